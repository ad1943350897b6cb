#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace carma {

/// RNG provenance of a generated object.
struct SeedRecord {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Equidistant observations y_k at times t_k = k*h, k = 0..n-1.
struct SampledPath {
    double h = 1.0;
    Eigen::MatrixXd y;   // n x d
    Eigen::VectorXd x0;  // initial latent state, empty when not applicable
    SeedRecord seed;
    std::string model_tag;

    Eigen::Index n() const { return y.rows(); }
    Eigen::Index d() const { return y.cols(); }
};

}  // namespace carma
