#include "carma/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace carma {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;  // 2^-53
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream & 0xffffffffu),
                      static_cast<std::uint32_t>(stream >> 32)};
    gen_.seed(seq);
}

double RngStream::uniform() {
    // (x >> 11) in [0, 2^53); +0.5 keeps the result strictly inside (0,1).
    return (static_cast<double>(gen_() >> 11) + 0.5) * kTwoPow53Inv;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    cached_normal_ = r * std::sin(2.0 * kPi * u2);
    has_cached_normal_ = true;
    return r * std::cos(2.0 * kPi * u2);
}

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::gamma(double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0)
        throw std::domain_error("gamma: shape and rate must be positive");
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a+1) * U^{1/a}; exponentiate in log space so tiny
        // shapes underflow cleanly to zero instead of producing NaN.
        double g = gamma(shape + 1.0, 1.0);
        double lu = std::log(uniform()) / shape;
        return g * std::exp(lu) / rate;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = uniform();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double RngStream::inverse_gaussian(double mean, double shape) {
    if (mean <= 0.0 || shape <= 0.0)
        throw std::domain_error("inverse_gaussian: mean and shape must be positive");
    double n = normal();
    double y = n * n;
    double x = mean + mean * mean * y / (2.0 * shape) -
               mean / (2.0 * shape) * std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
    if (uniform() <= mean / (mean + x)) return x;
    return mean * mean / x;
}

std::uint64_t RngStream::poisson(double mean) {
    if (mean < 0.0) throw std::domain_error("poisson: mean must be nonnegative");
    if (mean == 0.0) return 0;
    std::uint64_t k = 0;
    double s = exponential();
    while (s < mean) {
        ++k;
        s += exponential();
    }
    return k;
}

double RngStream::stable(double alpha, double skew) {
    if (alpha <= 0.0 || alpha > 2.0) throw std::domain_error("stable: alpha must be in (0,2]");
    if (skew < -1.0 || skew > 1.0) throw std::domain_error("stable: skew must be in [-1,1]");
    double u = uniform(-0.5 * kPi, 0.5 * kPi);
    double w = exponential();
    if (alpha == 1.0) {
        double a = 0.5 * kPi + skew * u;
        return (2.0 / kPi) *
               (a * std::tan(u) - skew * std::log((0.5 * kPi * w * std::cos(u)) / a));
    }
    double t = skew * std::tan(0.5 * kPi * alpha);
    double b = std::atan(t) / alpha;
    double s = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
    return s * std::sin(alpha * (u + b)) / std::pow(std::cos(u), 1.0 / alpha) *
           std::pow(std::cos(u - alpha * (u + b)) / w, (1.0 - alpha) / alpha);
}

}  // namespace carma
