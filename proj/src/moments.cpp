#include "carma/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "carma/errors.hpp"
#include "carma/linalg.hpp"

namespace carma {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require_causal(const StateSpace& ss, const char* who) {
    Spectrum s = spectrum(ss);
    if (!s.causal) {
        double worst = s.eigenvalues.real().maxCoeff();
        throw std::domain_error(std::string(who) +
                                ": model is not causal (max Re eigenvalue = " +
                                std::to_string(worst) + ")");
    }
}
}  // namespace

MatrixXd stationary_cov(const StateSpace& ss) {
    ss.validate();
    require_causal(ss, "stationary_cov");
    MatrixXd w = ss.b * ss.sigma_l * ss.b.transpose();
    MatrixXd v = linalg::lyapunov(ss.a, w);
    // Clip the tiny negative eigenvalues a PSD solve can leave behind.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(v);
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, v.norm()))
        throw numerical_error("stationary_cov: solution is not PSD");
    return v;
}

MatrixXd autocov(const StateSpace& ss, double h) {
    if (h < 0.0) throw std::domain_error("autocov: lag must be >= 0");
    MatrixXd v = stationary_cov(ss);
    if (h == 0.0) return ss.c * v * ss.c.transpose();
    return ss.c * linalg::expm(ss.a * h) * v * ss.c.transpose();
}

MatrixXcd spectral_density(const StateSpace& ss, double omega) {
    ss.validate();
    require_causal(ss, "spectral_density");
    MatrixXcd h = transfer_function(ss, std::complex<double>(0.0, omega));
    return (h * ss.sigma_l.cast<std::complex<double>>() * h.adjoint()) / (2.0 * kPi);
}

std::complex<double> stationary_cf(const StateSpace& ss, const LevyModel& driver,
                                   const VectorXd& u) {
    ss.validate();
    require_causal(ss, "stationary_cf");
    if (u.size() != ss.n()) throw std::domain_error("stationary_cf: u dimension mismatch");
    if (driver.dim() != ss.m()) throw std::domain_error("stationary_cf: driver dimension mismatch");
    if (u.norm() == 0.0) return {1.0, 0.0};

    // Truncation horizon: double T until ||e^{A^T T} u|| <= 1e-8 ||u||.
    const double unorm = u.norm();
    double t_star = 1.0;
    MatrixXd eat = linalg::expm(ss.a.transpose() * t_star);
    int guard = 0;
    while ((eat * u).norm() > 1e-8 * unorm) {
        t_star *= 2.0;
        eat = eat * eat;
        if (++guard > 60)
            throw numerical_error("stationary_cf: exponential decay horizon not found");
    }

    auto integrand = [&ss, &driver, &u](double s) {
        VectorXd arg = ss.b.transpose() * (linalg::expm(ss.a.transpose() * s) * u);
        return char_exponent(driver, arg);
    };
    std::complex<double> integral = linalg::adaptive_gk15(integrand, 0.0, t_star, 1e-10);
    return std::exp(integral);
}

}  // namespace carma
