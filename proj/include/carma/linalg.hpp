#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace carma::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Matrix exponential e^M (scaling-and-squaring with Pade approximant).
/// Single shared routine for the whole library.
MatrixXd expm(const MatrixXd& m);

/// Solve the continuous Lyapunov equation A V + V A^T + W = 0 for V via the
/// Kronecker-sum linear system (N^2 unknowns, dense LU). The result is
/// symmetrized. Throws numerical_error when the system is singular
/// (eigenvalue pairs with lambda_i + lambda_j = 0).
MatrixXd lyapunov(const MatrixXd& a, const MatrixXd& w);

/// Van Loan block-exponential: given A (N x N) and W (N x N, PSD) computes
///   phi = e^{A h},   q = \int_0^h e^{A s} W e^{A^T s} ds
/// with a single matrix exponential of the augmented 2N x 2N block matrix.
struct VanLoanResult {
    MatrixXd phi;
    MatrixXd q;
};
VanLoanResult van_loan(const MatrixXd& a, const MatrixXd& w, double h);

/// Adaptive Gauss-Kronrod (G7/K15) quadrature on [lo, hi] for a complex
/// integrand. abs_tol is on the integral value; throws numerical_error when
/// the subdivision limit is reached without meeting the tolerance.
std::complex<double> adaptive_gk15(const std::function<std::complex<double>(double)>& f,
                                   double lo, double hi, double abs_tol,
                                   int max_depth = 30);

/// Real-valued convenience wrapper.
double adaptive_gk15_real(const std::function<double(double)>& f, double lo, double hi,
                          double abs_tol, int max_depth = 30);

}  // namespace carma::linalg
