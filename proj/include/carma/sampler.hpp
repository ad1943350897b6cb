#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "carma/levy.hpp"
#include "carma/model.hpp"
#include "carma/path.hpp"

namespace carma {

/// Exact equidistant discretization of the state equation: transition
/// phi = e^{Ah} and integrated-noise covariance q_h.
struct DiscreteSystem {
    MatrixXd phi;  // N x N
    MatrixXd q_h;  // N x N, symmetric PSD
    MatrixXd c;    // d x N
};

/// phi = e^{Ah}, q_h = int_0^h e^{As} B Sigma_L B^T e^{A^T s} ds via the
/// Van Loan augmented block exponential.
DiscreteSystem discretize(const StateSpace& ss, double h);

/// Exact-in-distribution sampling for Brownian drivers: x_0 from the
/// stationary Gaussian law, then x_{k+1} = phi x_k + eta_k with
/// eta_k ~ N(0, q_h). Returns steps+1 observations (t = 0 included).
SampledPath simulate_gaussian(const StateSpace& ss, double h, Eigen::Index steps,
                              std::uint64_t seed, std::uint64_t stream = 0);

/// Fine-grid approximation for a general Levy driver: sub-grid step
/// delta = h/substeps, state update x <- e^{A delta} x + B dL, stationary
/// start from a discarded burn-in of length >= 20 / |max Re eigenvalue|.
/// Returns steps+1 observations on the coarse grid.
SampledPath simulate_levy(const StateSpace& ss, const LevyModel& driver, double h,
                          Eigen::Index steps, int substeps, std::uint64_t seed,
                          std::uint64_t stream = 0);

/// AR coefficients Phi_1..Phi_N of the sampled weak-ARMA representation,
/// from 1 - sum Phi_j z^j = prod_nu (1 - e^{lambda_nu h} z). Requires
/// pairwise distinct eigenvalues with |Im lambda| < pi/h.
std::vector<double> sampled_ar_coefficients(const StateSpace& ss, double h);

}  // namespace carma
