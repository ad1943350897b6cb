#include "doctest.h"

#include <cmath>

#include "carma/errors.hpp"
#include "carma/linalg.hpp"
#include "carma/rng.hpp"
#include "test_util.hpp"

using carma::linalg::adaptive_gk15_real;
using carma::linalg::expm;
using carma::linalg::lyapunov;
using carma::linalg::van_loan;
using Eigen::MatrixXd;

TEST_CASE("expm basics") {
    MatrixXd a = MatrixXd::Constant(1, 1, -0.6);
    CHECK(expm(a)(0, 0) == doctest::Approx(std::exp(-0.6)).epsilon(1e-13));

    MatrixXd nilp(2, 2);
    nilp << 0, 1, 0, 0;
    MatrixXd e = expm(nilp);
    CHECK(e(0, 0) == doctest::Approx(1.0));
    CHECK(e(0, 1) == doctest::Approx(1.0));
    CHECK(e(1, 0) == doctest::Approx(0.0));

    // planar rotation: exp([[0,-t],[t,0]]) = [[cos t, -sin t],[sin t, cos t]]
    const double t = 0.7;
    MatrixXd rot(2, 2);
    rot << 0, -t, t, 0;
    MatrixXd r = expm(rot);
    CHECK(r(0, 0) == doctest::Approx(std::cos(t)).epsilon(1e-13));
    CHECK(r(1, 0) == doctest::Approx(std::sin(t)).epsilon(1e-13));
}

TEST_CASE("lyapunov scalar and CARMA(2,0) closed forms") {
    // OU: a = -0.6, W = 1 -> V = int_0^inf e^{-1.2 u} du = 1/1.2
    MatrixXd a = MatrixXd::Constant(1, 1, -0.6);
    MatrixXd w = MatrixXd::Constant(1, 1, 1.0);
    CHECK(lyapunov(a, w)(0, 0) == doctest::Approx(1.0 / 1.2).epsilon(1e-12));

    MatrixXd a2(2, 2);
    a2 << 0, 1, -2, -3;
    MatrixXd b(2, 1);
    b << 0, 1;
    MatrixXd v = lyapunov(a2, b * b.transpose());
    CHECK(v(0, 0) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("lyapunov agrees with quadrature of the integral form") {
    carma::RngStream rng(321, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform() * 5.0);
        carma::StateSpace ss = test_util::random_causal_state_space(rng, n, 1, 1);
        MatrixXd w = ss.b * ss.sigma_l * ss.b.transpose();
        MatrixXd v = lyapunov(ss.a, w);
        MatrixXd quad = test_util::quadrature_stationary_cov(ss.a, w);
        CHECK((v - quad).norm() <= 1e-9 * std::max(1.0, quad.norm()));
    }
}

TEST_CASE("lyapunov rejects singular systems") {
    MatrixXd a(2, 2);
    a << 0, 1, 1, 0;  // eigenvalues +1, -1 sum to zero
    CHECK_THROWS_AS(lyapunov(a, MatrixXd::Identity(2, 2)), carma::numerical_error);
}

TEST_CASE("van_loan matches scalar closed forms and the Lyapunov fixed point") {
    MatrixXd a = MatrixXd::Constant(1, 1, -0.6);
    MatrixXd w = MatrixXd::Constant(1, 1, 1.0);
    auto vl = van_loan(a, w, 1.0);
    CHECK(vl.phi(0, 0) == doctest::Approx(std::exp(-0.6)).epsilon(1e-12));
    CHECK(vl.q(0, 0) == doctest::Approx((1.0 - std::exp(-1.2)) / 1.2).epsilon(1e-12));

    carma::RngStream rng(99, 0);
    for (int rep = 0; rep < 5; ++rep) {
        carma::StateSpace ss = test_util::random_causal_state_space(rng, 4, 1, 2);
        MatrixXd bw = ss.b * ss.sigma_l * ss.b.transpose();
        MatrixXd v = lyapunov(ss.a, bw);
        auto d = van_loan(ss.a, bw, 0.7);
        MatrixXd resid = d.q + d.phi * v * d.phi.transpose() - v;
        CHECK(resid.norm() <= 1e-10 * std::max(1.0, v.norm()));
    }
}

TEST_CASE("adaptive GK15 on smooth and oscillatory integrands") {
    double v = adaptive_gk15_real([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
    CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

    double w = adaptive_gk15_real([](double x) { return std::exp(-x); }, 0.0, 50.0, 1e-12);
    CHECK(w == doctest::Approx(1.0).epsilon(1e-11));

    double o = adaptive_gk15_real([](double x) { return std::sin(5.0 * x); }, 0.0, 3.14159265358979,
                             1e-12);
    CHECK(o == doctest::Approx(0.4).epsilon(1e-9));  // (1 - cos(5 pi)) / 5
}
