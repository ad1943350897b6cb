#include "doctest.h"

#include <cmath>

#include "carma/optim.hpp"

using namespace carma::optim;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
Box box2(double lo, double hi) {
    Box b;
    b.lo = VectorXd::Constant(2, lo);
    b.hi = VectorXd::Constant(2, hi);
    return b;
}
}  // namespace

TEST_CASE("nelder_mead and bfgs minimize a shifted quadratic") {
    auto f = [](const VectorXd& x) {
        return (x(0) - 0.7) * (x(0) - 0.7) + 3.0 * (x(1) + 0.2) * (x(1) + 0.2);
    };
    VectorXd x0 = VectorXd::Zero(2);
    Result nm = nelder_mead(f, x0, box2(-5, 5));
    CHECK(nm.x(0) == doctest::Approx(0.7).epsilon(1e-5));
    CHECK(nm.x(1) == doctest::Approx(-0.2).epsilon(1e-5));

    Result bf = bfgs(f, x0, box2(-5, 5));
    CHECK(bf.x(0) == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(bf.x(1) == doctest::Approx(-0.2).epsilon(1e-6));
    CHECK(bf.gradient_norm < 1e-5);
}

TEST_CASE("rosenbrock: simplex then bfgs refinement") {
    auto f = [](const VectorXd& x) {
        const double a = 1.0 - x(0);
        const double b = x(1) - x(0) * x(0);
        return a * a + 100.0 * b * b;
    };
    VectorXd x0(2);
    x0 << -1.2, 1.0;
    Result nm = nelder_mead(f, x0, box2(-5, 5), 5000);
    Result bf = bfgs(f, nm.x, box2(-5, 5), 500);
    CHECK(bf.x(0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(bf.x(1) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("box constraints bind") {
    auto f = [](const VectorXd& x) { return (x(0) - 3.0) * (x(0) - 3.0) + x(1) * x(1); };
    Box b = box2(-1, 1);
    Result nm = nelder_mead(f, VectorXd::Zero(2), b);
    CHECK(nm.x(0) == doctest::Approx(1.0).epsilon(1e-4));
    Result bf = bfgs(f, VectorXd::Zero(2), b);
    CHECK(bf.x(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("finite-difference gradient and hessian") {
    auto f = [](const VectorXd& x) {
        return std::sin(x(0)) + x(0) * x(1) + 0.5 * x(1) * x(1);
    };
    VectorXd x(2);
    x << 0.3, -0.6;
    VectorXd g = gradient_fd(f, x);
    CHECK(g(0) == doctest::Approx(std::cos(0.3) + (-0.6)).epsilon(1e-7));
    CHECK(g(1) == doctest::Approx(0.3 - 0.6).epsilon(1e-7));

    MatrixXd h = hessian_fd(f, x);
    CHECK(h(0, 0) == doctest::Approx(-std::sin(0.3)).epsilon(1e-4));
    CHECK(h(0, 1) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(h(1, 1) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("golden section") {
    double x = golden_section([](double t) { return (t - 1.7) * (t - 1.7); }, 0.0, 5.0);
    CHECK(x == doctest::Approx(1.7).epsilon(1e-7));
}
