#pragma once

#include <cstdint>
#include <random>

namespace carma {

/// Seeded random stream. Streams are derived from (seed, stream_id) so that
/// parallel replications draw from independent, order-insensitive substreams.
/// All transforms below are fixed algorithms on top of the fully specified
/// mt19937_64 engine, so identical (seed, stream) inputs give bit-identical
/// draws on every platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Uniform on (lo, hi).
    double uniform(double lo, double hi);
    /// Standard normal (Box-Muller, pairs cached).
    double normal();
    /// Exponential with unit mean.
    double exponential();
    /// Gamma(shape, rate), Marsaglia-Tsang with the shape<1 boost.
    double gamma(double shape, double rate);
    /// Inverse Gaussian(mean, shape), Michael-Schucany-Haas transformation.
    double inverse_gaussian(double mean, double shape);
    /// Poisson(mean) by exponential waiting-time summation.
    std::uint64_t poisson(double mean);
    /// Standard alpha-stable S(alpha, skew; 1, 0) in the S1 parametrization,
    /// Chambers-Mallows-Stuck transformation.
    double stable(double alpha, double skew);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 gen_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace carma
