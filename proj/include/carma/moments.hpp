#pragma once

#include <Eigen/Dense>
#include <complex>

#include "carma/levy.hpp"
#include "carma/model.hpp"

namespace carma {

/// Stationary state covariance V solving A V + V A^T = -B Sigma_L B^T.
/// Throws std::domain_error for non-causal models.
MatrixXd stationary_cov(const StateSpace& ss);

/// Output autocovariance cov(Y_{t+h}, Y_t) = C e^{Ah} V C^T for lag h >= 0.
MatrixXd autocov(const StateSpace& ss, double h);

/// Spectral density f(w) = (1/2pi) H(iw) Sigma_L H(iw)^*, a Hermitian PSD
/// d x d matrix.
MatrixXcd spectral_density(const StateSpace& ss, double omega);

/// Characteristic function of the stationary state distribution:
/// exp( int_0^inf psi_L(B^T e^{A^T s} u) ds ), evaluated by adaptive
/// quadrature on [0, T*] with T* chosen so ||e^{A^T T*} u|| <= 1e-8 ||u||.
std::complex<double> stationary_cf(const StateSpace& ss, const LevyModel& driver,
                                   const VectorXd& u);

}  // namespace carma
