#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include "carma/path.hpp"
#include "carma/rng.hpp"

namespace carma {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Driver specifications
// ---------------------------------------------------------------------------

struct JumpNone {};

/// Poisson jumps of a fixed size vector at rate `rate`.
struct JumpPoisson {
    double rate = 1.0;
    VectorXd jump;
};

struct JumpDistFixed {
    VectorXd value;
};
struct JumpDistNormal {
    VectorXd mean;
    MatrixXd cov;
};
struct JumpDistExponential {
    double rate = 1.0;  // univariate, mean 1/rate
};
using JumpDist = std::variant<JumpDistFixed, JumpDistNormal, JumpDistExponential>;

struct JumpCompoundPoisson {
    double rate = 1.0;
    JumpDist dist;
};

using JumpPart = std::variant<JumpNone, JumpPoisson, JumpCompoundPoisson>;

/// Characteristic triplet with a finite-activity jump part. The drift gamma
/// is the slope of the decompensated representation, so for finite-activity
/// jumps E[L_1] = gamma + rate * E[jump].
struct LevyTriplet {
    VectorXd gamma;
    MatrixXd sigma_g;
    JumpPart jump;
};

/// Standardised Gamma subordinator: L_t ~ Gamma(shape g*t, rate sqrt(g)),
/// so unit increments have mean sqrt(g) and variance 1.
struct GammaLevy {
    double g = 1.0;
};

/// Normal inverse Gaussian process via the mean-variance mixture
/// L_1 = mu + V*Delta*beta + sqrt(V)*N(0, Delta), V ~ IG(delta/kappa, delta^2).
/// An empty mu means the zero-mean standardization mu = -(delta/kappa)*Delta*beta.
struct NigLevy {
    double delta = 1.0;
    double kappa = 1.0;
    VectorXd beta;
    MatrixXd delta_mat;
    VectorXd mu;  // empty => standardized

    VectorXd effective_mu() const;
};

/// Univariate alpha-stable driver, S1 parametrization.
struct StableLevy {
    double alpha = 1.5;
    double scale = 1.0;
    double skew = 0.0;
    double location = 0.0;
};

struct LevyModel;

struct SumLevy {
    std::vector<LevyModel> components;
};

struct LevyModel {
    std::variant<LevyTriplet, GammaLevy, NigLevy, StableLevy, SumLevy> spec;

    int dim() const;
    /// Throws std::domain_error when a parameter is outside its domain.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Increment generation and analytic characteristics
// ---------------------------------------------------------------------------

struct IncrementBatch {
    double h = 1.0;
    MatrixXd values;  // n x m
    SeedRecord seed;
};

/// n independent draws from the law of L_h. Identical (model, h, n, seed,
/// stream) reproduce bit-identical output.
IncrementBatch sample_increments(const LevyModel& model, double h, Eigen::Index n,
                                 std::uint64_t seed, std::uint64_t stream = 0);

/// Characteristic exponent psi(u) with E[exp(i<u,L_t>)] = exp(t psi(u)).
std::complex<double> char_exponent(const LevyModel& model, const VectorXd& u);

struct MomentRates {
    VectorXd mean;  // E[L_1]
    MatrixXd cov;   // Var[L_1]
};

/// Mean and covariance rates; throws std::domain_error for infinite-variance
/// components (stable with alpha < 2), naming the offender.
MomentRates moment_rates(const LevyModel& model);

/// Cumulative sums with L_0 = 0 prepended.
SampledPath path_from_increments(const IncrementBatch& batch);

}  // namespace carma
