#include "carma/sampler.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "carma/errors.hpp"
#include "carma/linalg.hpp"
#include "carma/moments.hpp"

namespace carma {

namespace {
constexpr double kPi = 3.14159265358979323846;

double slowest_decay_rate(const StateSpace& ss, const char* who) {
    Spectrum s = spectrum(ss);
    if (!s.causal) {
        throw std::domain_error(std::string(who) + ": model is not causal (max Re eigenvalue = " +
                                std::to_string(s.eigenvalues.real().maxCoeff()) + ")");
    }
    return -s.eigenvalues.real().maxCoeff();
}

MatrixXd psd_sqrt_factor(const MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}
}  // namespace

DiscreteSystem discretize(const StateSpace& ss, double h) {
    if (h <= 0.0) throw std::domain_error("discretize: h must be > 0");
    ss.validate();
    auto vl = linalg::van_loan(ss.a, ss.b * ss.sigma_l * ss.b.transpose(), h);
    return DiscreteSystem{std::move(vl.phi), std::move(vl.q), ss.c};
}

SampledPath simulate_gaussian(const StateSpace& ss, double h, Eigen::Index steps,
                              std::uint64_t seed, std::uint64_t stream) {
    if (steps < 1) throw std::domain_error("simulate_gaussian: steps must be >= 1");
    MatrixXd v = stationary_cov(ss);  // rejects non-causal models
    DiscreteSystem ds = discretize(ss, h);
    const Eigen::Index n = ss.n(), d = ss.d();

    MatrixXd v_fac = psd_sqrt_factor(v);
    MatrixXd q_fac = psd_sqrt_factor(ds.q_h);

    RngStream rng(seed, stream);
    VectorXd z(n);
    auto draw = [&rng, &z, n]() {
        for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
    };

    SampledPath path;
    path.h = h;
    path.seed = SeedRecord{seed, stream};
    path.model_tag = "gaussian_state_space";
    path.y.resize(steps + 1, d);

    draw();
    VectorXd x = v_fac * z;
    path.x0 = x;
    path.y.row(0) = (ds.c * x).transpose();
    for (Eigen::Index k = 1; k <= steps; ++k) {
        draw();
        x = ds.phi * x + q_fac * z;
        path.y.row(k) = (ds.c * x).transpose();
    }
    return path;
}

SampledPath simulate_levy(const StateSpace& ss, const LevyModel& driver, double h,
                          Eigen::Index steps, int substeps, std::uint64_t seed,
                          std::uint64_t stream) {
    if (steps < 1) throw std::domain_error("simulate_levy: steps must be >= 1");
    if (substeps < 1) throw std::domain_error("simulate_levy: substeps must be >= 1");
    if (h <= 0.0) throw std::domain_error("simulate_levy: h must be > 0");
    ss.validate();
    driver.validate();
    if (driver.dim() != ss.m()) throw std::domain_error("simulate_levy: driver dimension mismatch");

    const double rate = slowest_decay_rate(ss, "simulate_levy");
    const double delta = h / substeps;
    const Eigen::Index burn = static_cast<Eigen::Index>(std::ceil(20.0 / (rate * delta)));
    const Eigen::Index total = burn + steps * substeps;

    const MatrixXd phi = linalg::expm(ss.a * delta);
    IncrementBatch batch = sample_increments(driver, delta, total, seed, stream);

    SampledPath path;
    path.h = h;
    path.seed = SeedRecord{seed, stream};
    path.model_tag = "levy_state_space";
    path.y.resize(steps + 1, ss.d());

    VectorXd x = VectorXd::Zero(ss.n());
    for (Eigen::Index k = 0; k < burn; ++k)
        x = phi * x + ss.b * batch.values.row(k).transpose();
    path.x0 = x;
    path.y.row(0) = (ss.c * x).transpose();
    for (Eigen::Index k = 1; k <= steps; ++k) {
        for (int s = 0; s < substeps; ++s) {
            const Eigen::Index idx = burn + (k - 1) * substeps + s;
            x = phi * x + ss.b * batch.values.row(idx).transpose();
        }
        path.y.row(k) = (ss.c * x).transpose();
    }
    return path;
}

std::vector<double> sampled_ar_coefficients(const StateSpace& ss, double h) {
    if (h <= 0.0) throw std::domain_error("sampled_ar_coefficients: h must be > 0");
    Spectrum s = spectrum(ss);
    const Eigen::Index n = s.eigenvalues.size();
    const double sep_tol = 1e-10 * std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(s.eigenvalues(i) - s.eigenvalues(j)) < sep_tol)
                throw std::domain_error("sampled_ar_coefficients: repeated eigenvalues");
    const double strip = kPi / h;
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(s.eigenvalues(i).imag()) >= strip)
            throw std::domain_error(
                "sampled_ar_coefficients: eigenvalue outside the strip |Im| < pi/h; "
                "need h < " +
                std::to_string(kPi / std::abs(s.eigenvalues(i).imag())));

    // Expand prod_nu (1 - e^{lambda_nu h} z); coeffs[j] multiplies z^j.
    std::vector<std::complex<double>> coeffs(static_cast<size_t>(n) + 1, 0.0);
    coeffs[0] = 1.0;
    for (Eigen::Index nu = 0; nu < n; ++nu) {
        const std::complex<double> r = std::exp(s.eigenvalues(nu) * h);
        for (Eigen::Index j = nu + 1; j >= 1; --j)
            coeffs[static_cast<size_t>(j)] -= r * coeffs[static_cast<size_t>(j - 1)];
    }
    std::vector<double> phi(static_cast<size_t>(n));
    for (Eigen::Index j = 1; j <= n; ++j) {
        if (std::abs(coeffs[static_cast<size_t>(j)].imag()) > 1e-10)
            throw numerical_error("sampled_ar_coefficients: nonreal coefficient residue");
        phi[static_cast<size_t>(j - 1)] = -coeffs[static_cast<size_t>(j)].real();
    }
    return phi;
}

}  // namespace carma
