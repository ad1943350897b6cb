#include "carma/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "carma/errors.hpp"

namespace carma {

void CarmaSpec::validate() const {
    if (p < 1) throw std::domain_error("carma spec: p must be >= 1");
    if (q < 0 || q >= p) throw std::domain_error("carma spec: need 0 <= q < p");
    if (d < 1 || m < 1) throw std::domain_error("carma spec: dims must be >= 1");
    if (static_cast<int>(ar.size()) != p) throw std::domain_error("carma spec: expected p AR matrices");
    if (static_cast<int>(ma.size()) != q + 1)
        throw std::domain_error("carma spec: expected q+1 MA matrices");
    for (const auto& a : ar)
        if (a.rows() != d || a.cols() != d) throw std::domain_error("carma spec: AR matrix must be d x d");
    for (const auto& b : ma)
        if (b.rows() != d || b.cols() != m) throw std::domain_error("carma spec: MA matrix must be d x m");
    if (ma.front().cwiseAbs().maxCoeff() == 0.0)
        throw std::domain_error("carma spec: B_0 must be nonzero");
}

CarmaSpec CarmaSpec::scalar(const std::vector<double>& ar_coeffs,
                            const std::vector<double>& ma_coeffs) {
    CarmaSpec s;
    s.p = static_cast<int>(ar_coeffs.size());
    s.q = static_cast<int>(ma_coeffs.size()) - 1;
    s.d = s.m = 1;
    for (double a : ar_coeffs) s.ar.push_back(MatrixXd::Constant(1, 1, a));
    for (double b : ma_coeffs) s.ma.push_back(MatrixXd::Constant(1, 1, b));
    s.validate();
    return s;
}

void StateSpace::validate() const {
    if (a.rows() != a.cols()) throw std::domain_error("state space: A must be square");
    if (b.rows() != a.rows()) throw std::domain_error("state space: B row dimension mismatch");
    if (c.cols() != a.rows()) throw std::domain_error("state space: C column dimension mismatch");
    if (sigma_l.rows() != b.cols() || sigma_l.cols() != b.cols())
        throw std::domain_error("state space: sigma_l dimension mismatch");
    if ((sigma_l - sigma_l.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::domain_error("state space: sigma_l must be symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma_l, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12)
        throw std::domain_error("state space: sigma_l must be positive semi-definite");
}

std::vector<MatrixXd> beta_coefficients(const CarmaSpec& spec) {
    spec.validate();
    const int p = spec.p, q = spec.q;
    std::vector<MatrixXd> beta(p + 1, MatrixXd::Zero(spec.d, spec.m));  // 1-based
    // j = q, q-1, ..., 0 fills beta_{p-q}..beta_p in increasing index order.
    for (int j = q; j >= 0; --j) {
        MatrixXd val = spec.ma[static_cast<size_t>(q - j)];  // B_{q-j}
        for (int i = 1; i <= p - j - 1; ++i)
            val -= spec.ar[static_cast<size_t>(i - 1)] * beta[static_cast<size_t>(p - j - i)];
        beta[static_cast<size_t>(p - j)] = val;
    }
    beta.erase(beta.begin());
    return beta;
}

StateSpace companion(const CarmaSpec& spec, const MatrixXd& sigma_l) {
    spec.validate();
    const int p = spec.p, d = spec.d, m = spec.m;
    const int n = p * d;

    StateSpace ss;
    ss.a = MatrixXd::Zero(n, n);
    if (p > 1) ss.a.topRightCorner(d * (p - 1), d * (p - 1)).setIdentity();
    for (int i = 1; i <= p; ++i)
        ss.a.block((p - 1) * d, (p - i) * d, d, d) = -spec.ar[static_cast<size_t>(i - 1)];

    const auto beta = beta_coefficients(spec);
    ss.b = MatrixXd::Zero(n, m);
    for (int k = 0; k < p; ++k) ss.b.middleRows(k * d, d) = beta[static_cast<size_t>(k)];

    ss.c = MatrixXd::Zero(d, n);
    ss.c.leftCols(d).setIdentity();

    ss.sigma_l = sigma_l.size() > 0 ? sigma_l : MatrixXd::Identity(m, m);
    ss.validate();
    return ss;
}

MatrixXcd transfer_function(const StateSpace& ss, std::complex<double> z) {
    const Eigen::Index n = ss.n();
    MatrixXcd resolvent = z * MatrixXcd::Identity(n, n) - ss.a.cast<std::complex<double>>();
    Eigen::FullPivLU<MatrixXcd> lu(resolvent);
    if (!lu.isInvertible())
        throw singularity_error("transfer_function: z is an eigenvalue of A", z);
    return ss.c.cast<std::complex<double>>() * lu.solve(ss.b.cast<std::complex<double>>());
}

MatrixXcd transfer_function(const CarmaSpec& spec, std::complex<double> z) {
    spec.validate();
    MatrixXcd pz = std::pow(z, spec.p) * MatrixXcd::Identity(spec.d, spec.d);
    for (int i = 1; i <= spec.p; ++i)
        pz += std::pow(z, spec.p - i) * spec.ar[static_cast<size_t>(i - 1)].cast<std::complex<double>>();
    MatrixXcd qz = MatrixXcd::Zero(spec.d, spec.m);
    for (int j = 0; j <= spec.q; ++j)
        qz += std::pow(z, spec.q - j) * spec.ma[static_cast<size_t>(j)].cast<std::complex<double>>();
    Eigen::FullPivLU<MatrixXcd> lu(pz);
    if (!lu.isInvertible())
        throw singularity_error("transfer_function: det P(z) = 0", z);
    return lu.solve(qz);
}

Spectrum spectrum(const StateSpace& ss) {
    Eigen::EigenSolver<MatrixXd> es(ss.a);
    if (es.info() != Eigen::Success) throw numerical_error("spectrum: eigen-solver failed");
    Spectrum s;
    s.eigenvalues = es.eigenvalues();
    s.causal = (s.eigenvalues.real().array() < 0.0).all();
    return s;
}

double verify_equivalence(const StateSpace& ss, const CarmaSpec& spec,
                          const std::vector<std::complex<double>>& test_points) {
    double worst = 0.0;
    for (const auto& z : test_points) {
        MatrixXcd diff = transfer_function(ss, z) - transfer_function(spec, z);
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace carma
