#include "carma/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "carma/errors.hpp"
#include "carma/optim.hpp"

namespace carma {

RecoveredIncrements recover_increments(const SampledPath& path, double a, double h_coarse) {
    if (path.d() != 1) throw std::domain_error("recover_increments: univariate paths only");
    if (h_coarse <= 0.0 || path.h <= 0.0) throw std::domain_error("recover_increments: spacing must be > 0");
    const double ratio = h_coarse / path.h;
    const auto r = static_cast<Eigen::Index>(std::llround(ratio));
    if (r < 1 || std::abs(ratio - static_cast<double>(r)) > 1e-9 * ratio)
        throw std::domain_error("recover_increments: h_fine must divide h_coarse");

    const Eigen::Index m = (path.n() - 1) / r;
    if (m < 1) throw std::domain_error("recover_increments: path too short for one coarse interval");

    RecoveredIncrements out;
    out.h_coarse = h_coarse;
    out.h_fine = path.h;
    out.a_used = a;
    out.values.resize(m);
    for (Eigen::Index n = 0; n < m; ++n) {
        const Eigen::Index lo = n * r;
        const Eigen::Index hi = lo + r;
        double trap = 0.5 * (path.y(lo, 0) + path.y(hi, 0));
        for (Eigen::Index j = lo + 1; j < hi; ++j) trap += path.y(j, 0);
        trap *= path.h;
        out.values(n) = path.y(hi, 0) - path.y(lo, 0) - a * trap;
    }
    return out;
}

GammaFit fit_gamma(const RecoveredIncrements& inc) {
    const Eigen::Index n = inc.values.size();
    const double h = inc.h_coarse;

    GammaFit fitted;
    double s_x = 0.0, s_ln = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double x = inc.values(i);
        if (x <= 0.0) {
            x = 1e-12;
            ++fitted.clipped;
        }
        s_x += x;
        s_ln += std::log(x);
    }
    if (fitted.clipped == n) throw std::domain_error("fit_gamma: all increments nonpositive");

    const auto loglik = [n, h, s_x, s_ln](double g) {
        return static_cast<double>(n) * (0.5 * g * h * std::log(g) - std::lgamma(g * h)) +
               (g * h - 1.0) * s_ln - std::sqrt(g) * s_x;
    };

    // Method-of-moments starter: E[dL] = sqrt(g) * h.
    const double mean = s_x / static_cast<double>(n);
    const double g0 = (mean / h) * (mean / h);
    const double lo = g0 / 50.0, hi = g0 * 50.0;
    fitted.gamma_hat = optim::golden_section([&loglik](double g) { return -loglik(g); }, lo, hi);
    if (fitted.gamma_hat < lo * 1.05 || fitted.gamma_hat > hi / 1.05)
        throw numerical_error("fit_gamma: maximizer stuck at bracket edge near " +
                              std::to_string(fitted.gamma_hat));
    fitted.loglik = loglik(fitted.gamma_hat);

    // Standard error from the observed information (numerical curvature).
    const double step = 1e-4 * fitted.gamma_hat;
    const double curvature = (loglik(fitted.gamma_hat + step) - 2.0 * fitted.loglik +
                              loglik(fitted.gamma_hat - step)) /
                             (step * step);
    fitted.std_err = curvature < 0.0 ? 1.0 / std::sqrt(-curvature)
                                     : std::numeric_limits<double>::quiet_NaN();
    return fitted;
}

IncrementDiagnostics increment_diagnostics(const RecoveredIncrements& inc, int bins) {
    const Eigen::Index n = inc.values.size();
    if (n < 10) throw std::domain_error("increment_diagnostics: need at least 10 increments");
    if (bins < 1) throw std::domain_error("increment_diagnostics: bins must be >= 1");
    const double h = inc.h_coarse;

    const double mean = inc.values.mean();
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = inc.values(i) - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    IncrementDiagnostics out;
    out.mean_rate = mean / h;
    out.var_rate = m2 / h;
    // Levy cumulants scale linearly in time; standardize the unit-time rates.
    const double k2 = m2 / h, k3 = m3 / h, k4 = (m4 - 3.0 * m2 * m2) / h;
    out.skewness = k2 > 0.0 ? k3 / std::pow(k2, 1.5) : 0.0;
    out.excess_kurtosis = k2 > 0.0 ? k4 / (k2 * k2) : 0.0;

    const double lo = inc.values.minCoeff();
    const double hi = inc.values.maxCoeff();
    if (lo == hi) {
        out.bin_edges = {lo, hi};
        out.bin_counts = {static_cast<double>(n)};
        return out;
    }
    const double width = (hi - lo) / bins;
    out.bin_edges.resize(static_cast<size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) out.bin_edges[static_cast<size_t>(b)] = lo + b * width;
    out.bin_counts.assign(static_cast<size_t>(bins), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto b = static_cast<Eigen::Index>((inc.values(i) - lo) / width);
        b = std::clamp<Eigen::Index>(b, 0, bins - 1);
        out.bin_counts[static_cast<size_t>(b)] += 1.0;
    }
    return out;
}

}  // namespace carma
