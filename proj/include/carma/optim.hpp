#pragma once

#include <Eigen/Dense>
#include <functional>

namespace carma::optim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using Objective = std::function<double(const VectorXd&)>;

struct Box {
    VectorXd lo;
    VectorXd hi;

    bool contains(const VectorXd& x) const;
    VectorXd clamp(const VectorXd& x) const;
};

struct Result {
    VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool step_converged = false;   // simplex / line-search tolerance met
    double gradient_norm = 0.0;    // central-difference gradient at x
};

/// Nelder-Mead simplex minimization. Points outside the box are rejected
/// through a distance penalty so the search stays inside.
Result nelder_mead(const Objective& f, const VectorXd& x0, const Box& box,
                   int max_iter = 2000, double tol = 1e-9);

/// BFGS with central-difference gradients and Armijo backtracking, iterates
/// projected onto the box.
Result bfgs(const Objective& f, const VectorXd& x0, const Box& box,
            int max_iter = 200, double grad_tol = 1e-5);

/// Central-difference gradient with per-coordinate scaled steps.
VectorXd gradient_fd(const Objective& f, const VectorXd& x, double rel_step = 1e-6);

/// Central-difference Hessian with per-coordinate scaled steps.
MatrixXd hessian_fd(const Objective& f, const VectorXd& x, double rel_step = 1e-4);

/// Scalar minimization by golden-section on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-10, int max_iter = 200);

}  // namespace carma::optim
