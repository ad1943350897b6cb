#include "doctest.h"

#include <cmath>
#include <vector>

#include "carma/linalg.hpp"
#include "carma/moments.hpp"
#include "carma/rng.hpp"
#include "carma/sampler.hpp"
#include "test_util.hpp"

using namespace carma;

namespace {

StateSpace ou_state_space(double a = -0.6, double sigma2 = 1.0) {
    return companion(CarmaSpec::scalar({-a}, {1.0}), MatrixXd::Constant(1, 1, sigma2));
}

LevyModel brownian(double var = 1.0) {
    LevyTriplet t;
    t.gamma = VectorXd::Zero(1);
    t.sigma_g = MatrixXd::Constant(1, 1, var);
    t.jump = JumpNone{};
    return LevyModel{t};
}

double lag1_autocorr(const Eigen::VectorXd& y) {
    const Eigen::Index n = y.size();
    const double mean = y.mean();
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = y(i) - mean;
        den += d * d;
        if (i + 1 < n) num += d * (y(i + 1) - mean);
    }
    return num / den;
}

}  // namespace

TEST_CASE("discretize: OU closed forms and limits") {
    DiscreteSystem ds = discretize(ou_state_space(), 1.0);
    CHECK(ds.phi(0, 0) == doctest::Approx(std::exp(-0.6)).epsilon(1e-12));
    CHECK(ds.q_h(0, 0) == doctest::Approx((1.0 - std::exp(-1.2)) / 1.2).epsilon(1e-12));

    DiscreteSystem tiny = discretize(ou_state_space(), 1e-8);
    CHECK(std::abs(tiny.phi(0, 0) - 1.0) < 1e-6);
    CHECK(tiny.q_h(0, 0) < 1e-6);

    CHECK_THROWS_AS(discretize(ou_state_space(), 0.0), std::domain_error);
}

TEST_CASE("discretize: stationary fixed point on random causal models") {
    RngStream rng(71, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 1 + static_cast<int>(rng.uniform() * 5.0);
        StateSpace ss = test_util::random_causal_state_space(rng, n, 1, 1);
        MatrixXd v = stationary_cov(ss);
        DiscreteSystem ds = discretize(ss, 0.5 + rng.uniform());
        MatrixXd resid = ds.q_h + ds.phi * v * ds.phi.transpose() - v;
        CHECK(resid.cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, v.norm()));
    }
}

TEST_CASE("coarse/fine consistency: thinning by 2 matches sampling at 2h") {
    RngStream rng(73, 0);
    for (int rep = 0; rep < 10; ++rep) {
        StateSpace ss = test_util::random_causal_state_space(rng, 3, 1, 2);
        const double h = 0.3 + rng.uniform();
        DiscreteSystem fine = discretize(ss, h);
        DiscreteSystem coarse = discretize(ss, 2.0 * h);
        CHECK((coarse.phi - fine.phi * fine.phi).cwiseAbs().maxCoeff() < 1e-10);
        MatrixXd q2 = fine.q_h + fine.phi * fine.q_h * fine.phi.transpose();
        CHECK((coarse.q_h - q2).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, q2.norm()));
    }
}

TEST_CASE("simulate_gaussian: OU lag-1 autocorrelation and variance") {
    StateSpace ou = ou_state_space();
    SampledPath path = simulate_gaussian(ou, 1.0, 100000, 12345);
    REQUIRE(path.n() == 100001);
    CHECK(std::abs(lag1_autocorr(path.y.col(0)) - std::exp(-0.6)) < 0.01);

    const double target = (ou.c * stationary_cov(ou) * ou.c.transpose())(0, 0);
    const double sample_var =
        (path.y.col(0).array() - path.y.col(0).mean()).square().mean();
    // 3 SE with the AR(1) effective-sample-size correction
    const double phi = std::exp(-0.6);
    const double se = target * std::sqrt(2.0 / (100000.0 * (1.0 - phi * phi) / (1.0 + phi * phi)));
    CHECK(std::abs(sample_var - target) < 3.0 * se);

    SampledPath silent = simulate_gaussian(ou_state_space(-0.6, 0.0), 1.0, 100, 1);
    CHECK(silent.y.cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(simulate_gaussian(companion(CarmaSpec::scalar({-1.0}, {1.0})), 1.0, 10, 1),
                    std::domain_error);
}

TEST_CASE("simulate_gaussian is reproducible") {
    StateSpace ou = ou_state_space();
    SampledPath a = simulate_gaussian(ou, 0.5, 500, 99, 1);
    SampledPath b = simulate_gaussian(ou, 0.5, 500, 99, 1);
    CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("simulate_levy with a Brownian driver matches Gaussian targets") {
    StateSpace ou = ou_state_space();
    SampledPath path = simulate_levy(ou, brownian(), 1.0, 50000, 64, 321);
    const double target_var = stationary_cov(ou)(0, 0);
    const double sample_var = (path.y.col(0).array() - path.y.col(0).mean()).square().mean();
    CHECK(std::abs(path.y.col(0).mean()) < 0.03);
    CHECK(sample_var == doctest::Approx(target_var).epsilon(0.05));
    CHECK(std::abs(lag1_autocorr(path.y.col(0)) - std::exp(-0.6)) < 0.015);
}

TEST_CASE("simulate_levy: compound Poisson OU stationary mean") {
    StateSpace ou = ou_state_space(-1.0, 1.0);
    LevyTriplet cp;
    cp.gamma = VectorXd::Zero(1);
    cp.sigma_g = MatrixXd::Zero(1, 1);
    cp.jump = JumpPoisson{1.0, VectorXd::Constant(1, 1.0)};

    // substeps keep the order-1 discretization bias (about delta/2) well
    // below the Monte Carlo band
    SampledPath path = simulate_levy(ou, LevyModel{cp}, 1.0, 50000, 256, 654);
    // stationary mean = -a^{-1} * rate * jump = 1; 3 SE with autocorrelation
    const double var_y = 0.5;  // rate * jump^2 / (2 |a|)
    const double se = std::sqrt(2.0 * var_y / 50000.0);
    CHECK(std::abs(path.y.col(0).mean() - 1.0) < 3.0 * se);
}

TEST_CASE("simulate_levy: stable driver produces finite paths") {
    StateSpace ou = ou_state_space(-0.5, 1.0);
    SampledPath path = simulate_levy(ou, LevyModel{StableLevy{1.5, 1.0, 0.0, 0.0}}, 1.0, 2000, 16, 777);
    CHECK(path.y.allFinite());
    CHECK(path.n() == 2001);
}

TEST_CASE("simulate_levy substep ladder converges in second moments") {
    StateSpace ou = ou_state_space();
    const double target = stationary_cov(ou)(0, 0);
    std::vector<double> errors;
    for (int s : {1, 2, 4}) {
        SampledPath path = simulate_levy(ou, brownian(), 1.0, 200000, s, 888);
        const double var = (path.y.col(0).array() - path.y.col(0).mean()).square().mean();
        errors.push_back(std::abs(var - target));
    }
    CHECK(errors[0] / errors[1] >= 1.5);
    CHECK(errors[1] / errors[2] >= 1.5);
}

TEST_CASE("sampled AR coefficients: closed forms") {
    auto phi1 = sampled_ar_coefficients(ou_state_space(), 1.0);
    REQUIRE(phi1.size() == 1);
    CHECK(phi1[0] == doctest::Approx(std::exp(-0.6)).epsilon(1e-12));

    StateSpace two = companion(CarmaSpec::scalar({3.0, 2.0}, {1.0}));  // eigenvalues -1, -2
    auto phi2 = sampled_ar_coefficients(two, 0.5);
    REQUIRE(phi2.size() == 2);
    CHECK(phi2[0] == doctest::Approx(std::exp(-0.5) + std::exp(-1.0)).epsilon(1e-12));
    CHECK(phi2[1] == doctest::Approx(-std::exp(-1.5)).epsilon(1e-12));
}

TEST_CASE("sampled AR coefficients: rejections") {
    StateSpace jordan;  // repeated eigenvalue -1
    jordan.a.resize(2, 2);
    jordan.a << -1, 1, 0, -1;
    jordan.b = MatrixXd::Ones(2, 1);
    jordan.c = MatrixXd::Ones(1, 2);
    jordan.sigma_l = MatrixXd::Identity(1, 1);
    CHECK_THROWS_AS(sampled_ar_coefficients(jordan, 1.0), std::domain_error);

    StateSpace spin;  // eigenvalues -1 +- 5i violate the strip at h = 1
    spin.a.resize(2, 2);
    spin.a << -1, 5, -5, -1;
    spin.b = MatrixXd::Ones(2, 1);
    spin.c = MatrixXd::Ones(1, 2);
    spin.sigma_l = MatrixXd::Identity(1, 1);
    CHECK_THROWS_WITH_AS(sampled_ar_coefficients(spin, 1.0), doctest::Contains("strip"),
                         std::domain_error);
    CHECK(sampled_ar_coefficients(spin, 0.1).size() == 2);  // fine at small h
}

TEST_CASE("weak-ARMA identity: Phi annihilates sampled autocovariances") {
    RngStream rng(83, 0);
    int done = 0;
    while (done < 20) {
        const int d = 1 + static_cast<int>(rng.uniform() * 2.0);
        const int n = d * (1 + static_cast<int>(rng.uniform() * 2.0));
        StateSpace ss = test_util::random_causal_state_space(rng, n, d, d);
        const double max_im = spectrum(ss).eigenvalues.imag().cwiseAbs().maxCoeff();
        const double h = std::min(0.5, 2.5 / (max_im + 1e-9));
        std::vector<double> phi;
        try {
            phi = sampled_ar_coefficients(ss, h);
        } catch (const std::domain_error&) {
            continue;  // re-draw on repeated eigenvalues
        }
        const double scale = std::max(1.0, autocov(ss, 0.0).norm());
        for (Eigen::Index k = n; k < n + 4; ++k) {
            MatrixXd resid = autocov(ss, k * h);
            for (size_t j = 1; j <= phi.size(); ++j)
                resid -= phi[j - 1] * autocov(ss, (k - static_cast<Eigen::Index>(j)) * h);
            CHECK(resid.cwiseAbs().maxCoeff() <= 1e-8 * scale);
        }
        ++done;
    }
}
