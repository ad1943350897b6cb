#pragma once

#include <Eigen/Dense>
#include <vector>

#include "carma/path.hpp"

namespace carma {

/// Driver increments reconstructed from a finely sampled OU path.
struct RecoveredIncrements {
    double h_coarse = 1.0;
    double h_fine = 1.0;
    Eigen::VectorXd values;  // one estimate per coarse interval
    double a_used = 0.0;
};

/// Increment recovery for an OU (CARMA(1,0)) path observed at spacing h_fine:
/// dL_n = Y_{nh} - Y_{(n-1)h} - a * T_n with T_n the composite trapezoidal
/// approximation of the drift integral over the coarse interval. h_fine must
/// divide h_coarse (integer ratio).
RecoveredIncrements recover_increments(const SampledPath& path, double a, double h_coarse);

struct GammaFit {
    double gamma_hat = 0.0;
    double std_err = 0.0;
    double loglik = 0.0;
    Eigen::Index clipped = 0;  // increments floored inside the likelihood
};

/// One-dimensional MLE of the standardised Gamma driver parameter: increments
/// at spacing h are treated as iid Gamma(shape g*h, rate sqrt(g)) samples.
/// Nonpositive increments are floored at 1e-12 inside the likelihood only;
/// the clip count is reported.
GammaFit fit_gamma(const RecoveredIncrements& inc);

struct IncrementDiagnostics {
    double mean_rate = 0.0;      // sample mean / h
    double var_rate = 0.0;       // sample variance / h
    double skewness = 0.0;       // standardized third cumulant per unit time
    double excess_kurtosis = 0.0;
    std::vector<double> bin_edges;
    std::vector<double> bin_counts;
};

/// Cumulant summaries per unit time plus a fixed-width histogram table,
/// suitable for overlay against a reference density.
IncrementDiagnostics increment_diagnostics(const RecoveredIncrements& inc, int bins = 50);

}  // namespace carma
