#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace carma {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

/// Coefficient system of a d-dimensional CARMA(p,q) process driven by an
/// m-dimensional process: P(z) = I z^p + A_1 z^{p-1} + ... + A_p,
/// Q(z) = B_0 z^q + ... + B_q, with q < p and B_0 != 0.
struct CarmaSpec {
    int p = 1;
    int q = 0;
    int d = 1;
    int m = 1;
    std::vector<MatrixXd> ar;  // A_1..A_p, each d x d
    std::vector<MatrixXd> ma;  // B_0..B_q, each d x m

    void validate() const;

    /// Convenience builder for scalar (d = m = 1) systems.
    static CarmaSpec scalar(const std::vector<double>& ar_coeffs,
                            const std::vector<double>& ma_coeffs);
};

/// Continuous-time state space model dX = A X dt + B dL, Y = C X, with driver
/// covariance sigma_l = Var(L_1).
struct StateSpace {
    MatrixXd a;        // N x N
    MatrixXd b;        // N x m
    MatrixXd c;        // d x N
    MatrixXd sigma_l;  // m x m

    Eigen::Index n() const { return a.rows(); }
    Eigen::Index d() const { return c.rows(); }
    Eigen::Index m() const { return b.cols(); }
    void validate() const;
};

struct Spectrum {
    VectorXcd eigenvalues;
    bool causal = false;  // true iff every eigenvalue has Re < 0 (strict)
};

/// beta_1..beta_p of the companion-form driver loading: beta_k = 0 for
/// k <= p-q-1 and beta_{p-j} = -sum_{i=1}^{p-j-1} A_i beta_{p-j-i} + B_{q-j}.
std::vector<MatrixXd> beta_coefficients(const CarmaSpec& spec);

/// Block-companion state space realization (N = p*d) with C = [I 0 ... 0].
StateSpace companion(const CarmaSpec& spec, const MatrixXd& sigma_l = MatrixXd());

/// Rational transfer matrix H(z) = C (zI - A)^{-1} B.
MatrixXcd transfer_function(const StateSpace& ss, std::complex<double> z);
/// Same in polynomial form: H(z) = P(z)^{-1} Q(z).
MatrixXcd transfer_function(const CarmaSpec& spec, std::complex<double> z);

Spectrum spectrum(const StateSpace& ss);

/// Max entrywise |H_ss(z) - H_spec(z)| over the test points.
double verify_equivalence(const StateSpace& ss, const CarmaSpec& spec,
                          const std::vector<std::complex<double>>& test_points);

}  // namespace carma
