#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "carma/model.hpp"
#include "carma/optim.hpp"
#include "carma/path.hpp"

namespace carma {

using Eigen::VectorXd;

/// Compact parameter space Theta (a box) together with the builder
/// theta -> (A, B, C, Sigma_L).
struct Parametrization {
    int dim = 0;
    std::string family;  // univariate-canonical | bivariate-paper | user-table
    optim::Box box;
    std::function<StateSpace(const VectorXd&)> build;

    /// Univariate CARMA(p,q): theta = (a_1..a_p, b_1..b_q, sigma) where the
    /// companion bottom row is (a_p, ..., a_1), B_0 = 1, B_j = b_j and
    /// Sigma_L = sigma^2. For (p,q) = (1,0) this is the OU model with
    /// theta = (a, sigma), state matrix A = [a].
    static Parametrization univariate(int p, int q, const optim::Box& box);

    /// The 10-parameter bivariate echelon-form model used in the simulation
    /// study: theta_1..theta_7 fill (A, B), theta_8..theta_10 are the entries
    /// of Sigma_L directly (PSD enforced through a penalty).
    static Parametrization bivariate_paper(const optim::Box& box);

    /// Generic table-driven family: entries of theta are written into copies
    /// of the base matrices; Sigma_L = F F^T with F the (lower-triangular)
    /// factor table.
    struct Assignment {
        char target = 'A';  // 'A', 'B', 'C' or 'F'
        int row = 0;
        int col = 0;
        int theta_index = 0;
        double scale = 1.0;
    };
    static Parametrization user_table(MatrixXd a0, MatrixXd b0, MatrixXd c0, MatrixXd f0,
                                      std::vector<Assignment> assign, const optim::Box& box);
};

struct InnovationSequence {
    MatrixXd e;                  // n x d linear innovations
    std::vector<MatrixXd> v;     // per-step prediction-error covariances
    double loglik = 0.0;         // -(1/2) sum (log det V_n + e_n^T V_n^{-1} e_n)
};

/// Linear (Kalman) one-step innovations with the state covariance initialized
/// at the stationary solution. Throws numerical_error naming the step when a
/// prediction covariance fails to be positive definite.
InnovationSequence kalman_innovations(const StateSpace& ss, const SampledPath& path);

/// Negative Gaussian quasi-log-likelihood (constant-free). Non-causal or
/// non-PSD-Sigma parameter points return a finite penalty value
/// (1e10 + 1e6 * violation) instead of throwing.
double neg_quasi_loglik(const Parametrization& par, const VectorXd& theta,
                        const SampledPath& path);

struct FitSettings {
    int starts = 8;
    int max_iter = 2000;        // Nelder-Mead iteration cap per start
    int bfgs_max_iter = 200;
    double grad_tol = 1e-5;     // on the per-observation-averaged objective
    double simplex_tol = 1e-9;
    std::uint64_t multistart_seed = 0;
    int threads = 1;
    bool compute_cov = true;
};

struct FitResult {
    VectorXd theta_hat;
    double loglik = 0.0;  // quasi-log-likelihood at theta_hat
    MatrixXd omega;       // sandwich covariance of theta_hat (Omega / L)
    VectorXd std_err;     // sqrt(diag(omega))
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    bool omega_clipped = false;
};

/// Multi-start quasi-maximum-likelihood fit: Nelder-Mead refined by BFGS with
/// numerical gradients, starts = theta_init plus box-uniform draws.
FitResult fit(const Parametrization& par, const SampledPath& path, const VectorXd& theta_init,
              const FitSettings& settings = {});

/// Sandwich covariance estimate Omega/L = J^{-1} I J^{-1} / L with J the
/// central-difference Hessian of the averaged objective and I the Bartlett
/// long-run variance of per-observation score contributions (bandwidth
/// floor(L^{1/3})). Throws numerical_error when J is singular.
MatrixXd asymptotic_cov(const Parametrization& par, const VectorXd& theta_hat,
                        const SampledPath& path, bool* clipped = nullptr);

struct IdentifiabilityReport {
    bool distinguishable = false;
    bool strip_ok_1 = true;   // eigenvalues of theta_1 distinct and in the strip
    bool strip_ok_2 = true;
    double max_density_gap = 0.0;
};

/// Compares the spectral densities of the h-sampled processes on freq_grid
/// (via the discrete systems) and validates the eigenvalue strip condition.
IdentifiabilityReport identifiability_check(const Parametrization& par, const VectorXd& theta_1,
                                            const VectorXd& theta_2, double h,
                                            const std::vector<double>& freq_grid);

}  // namespace carma
