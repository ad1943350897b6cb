#include "carma/levy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "carma/errors.hpp"

namespace carma {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSymTol = 1e-12;

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

// F with F F^T = S for symmetric PSD S (eigen square root; tolerates
// semidefinite inputs where a Cholesky would fail).
MatrixXd psd_sqrt_factor(const MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
    VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lam.asDiagonal();
}

void check_symmetric_psd(const MatrixXd& s, const std::string& name, double tol) {
    if (s.rows() != s.cols()) throw std::domain_error(name + " must be square");
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > tol)
        throw std::domain_error(name + " must be symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
        throw std::domain_error(name + " must be positive semi-definite");
}

int jump_dim(const JumpDist& d) {
    if (const auto* f = std::get_if<JumpDistFixed>(&d)) return static_cast<int>(f->value.size());
    if (const auto* n = std::get_if<JumpDistNormal>(&d)) return static_cast<int>(n->mean.size());
    return 1;
}

VectorXd jump_mean(const JumpDist& d) {
    if (const auto* f = std::get_if<JumpDistFixed>(&d)) return f->value;
    if (const auto* n = std::get_if<JumpDistNormal>(&d)) return n->mean;
    const auto& e = std::get<JumpDistExponential>(d);
    return VectorXd::Constant(1, 1.0 / e.rate);
}

MatrixXd jump_second_moment(const JumpDist& d) {
    if (const auto* f = std::get_if<JumpDistFixed>(&d)) return f->value * f->value.transpose();
    if (const auto* n = std::get_if<JumpDistNormal>(&d))
        return n->cov + n->mean * n->mean.transpose();
    const auto& e = std::get<JumpDistExponential>(d);
    return MatrixXd::Constant(1, 1, 2.0 / (e.rate * e.rate));
}

cd jump_cf(const JumpDist& d, const VectorXd& u) {
    if (const auto* f = std::get_if<JumpDistFixed>(&d)) return std::exp(kI * u.dot(f->value));
    if (const auto* n = std::get_if<JumpDistNormal>(&d))
        return std::exp(kI * u.dot(n->mean) - 0.5 * u.dot(n->cov * u));
    const auto& e = std::get<JumpDistExponential>(d);
    return e.rate / (e.rate - kI * u(0));
}

}  // namespace

VectorXd NigLevy::effective_mu() const {
    if (mu.size() > 0) return mu;
    return -(delta / kappa) * (delta_mat * beta);
}

int LevyModel::dim() const {
    return std::visit(
        [](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LevyTriplet>)
                return static_cast<int>(m.gamma.size());
            else if constexpr (std::is_same_v<T, GammaLevy>)
                return 1;
            else if constexpr (std::is_same_v<T, NigLevy>)
                return static_cast<int>(m.beta.size());
            else if constexpr (std::is_same_v<T, StableLevy>)
                return 1;
            else
                return m.components.empty() ? 0 : m.components.front().dim();
        },
        spec);
}

void LevyModel::validate() const {
    std::visit(
        [this](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LevyTriplet>) {
                const int d = static_cast<int>(m.gamma.size());
                if (d < 1) throw std::domain_error("triplet: dimension must be >= 1");
                if (m.sigma_g.rows() != d || m.sigma_g.cols() != d)
                    throw std::domain_error("triplet: sigma_g dimension mismatch");
                check_symmetric_psd(m.sigma_g, "triplet: sigma_g", kSymTol);
                if (const auto* p = std::get_if<JumpPoisson>(&m.jump)) {
                    if (p->rate <= 0.0) throw std::domain_error("triplet: Poisson rate must be > 0");
                    if (p->jump.size() != d) throw std::domain_error("triplet: jump dimension mismatch");
                } else if (const auto* c = std::get_if<JumpCompoundPoisson>(&m.jump)) {
                    if (c->rate <= 0.0)
                        throw std::domain_error("triplet: compound Poisson rate must be > 0");
                    if (jump_dim(c->dist) != d)
                        throw std::domain_error("triplet: jump distribution dimension mismatch");
                    if (const auto* n = std::get_if<JumpDistNormal>(&c->dist))
                        check_symmetric_psd(n->cov, "triplet: jump covariance", kSymTol);
                    if (const auto* e = std::get_if<JumpDistExponential>(&c->dist))
                        if (e->rate <= 0.0)
                            throw std::domain_error("triplet: exponential jump rate must be > 0");
                }
            } else if constexpr (std::is_same_v<T, GammaLevy>) {
                if (m.g <= 0.0) throw std::domain_error("gamma: shape-rate parameter must be > 0");
            } else if constexpr (std::is_same_v<T, NigLevy>) {
                if (m.delta <= 0.0 || m.kappa <= 0.0)
                    throw std::domain_error("nig: delta and kappa must be > 0");
                const int d = static_cast<int>(m.beta.size());
                if (d < 1) throw std::domain_error("nig: dimension must be >= 1");
                if (m.delta_mat.rows() != d || m.delta_mat.cols() != d)
                    throw std::domain_error("nig: Delta dimension mismatch");
                check_symmetric_psd(m.delta_mat, "nig: Delta", kSymTol);
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.delta_mat, Eigen::EigenvaluesOnly);
                if (es.eigenvalues().minCoeff() <= 0.0)
                    throw std::domain_error("nig: Delta must be positive definite");
                if (m.mu.size() > 0 && m.mu.size() != d)
                    throw std::domain_error("nig: mu dimension mismatch");
            } else if constexpr (std::is_same_v<T, StableLevy>) {
                if (m.alpha <= 0.0 || m.alpha > 2.0)
                    throw std::domain_error("stable: alpha must be in (0,2]");
                if (m.scale <= 0.0) throw std::domain_error("stable: scale must be > 0");
                if (m.skew < -1.0 || m.skew > 1.0)
                    throw std::domain_error("stable: skew must be in [-1,1]");
                if (m.alpha == 2.0 && m.skew != 0.0)
                    throw std::domain_error("stable: alpha=2 requires skew=0");
            } else {
                if (m.components.empty()) throw std::domain_error("sum: needs >= 1 component");
                const int d = m.components.front().dim();
                for (const auto& c : m.components) {
                    c.validate();
                    if (c.dim() != d) throw std::domain_error("sum: component dimension mismatch");
                }
            }
        },
        spec);
}

namespace {

void add_triplet_increments(const LevyTriplet& t, double h, MatrixXd& out, RngStream& rng) {
    const Eigen::Index n = out.rows();
    const Eigen::Index m = out.cols();
    const VectorXd drift = t.gamma * h;
    const bool has_gauss = t.sigma_g.cwiseAbs().maxCoeff() > 0.0;
    MatrixXd fac;
    if (has_gauss) fac = psd_sqrt_factor(t.sigma_g) * std::sqrt(h);
    VectorXd z(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.row(i) += drift.transpose();
        if (has_gauss) {
            for (Eigen::Index j = 0; j < m; ++j) z(j) = rng.normal();
            out.row(i) += (fac * z).transpose();
        }
        if (const auto* p = std::get_if<JumpPoisson>(&t.jump)) {
            const double k = static_cast<double>(rng.poisson(p->rate * h));
            out.row(i) += k * p->jump.transpose();
        } else if (const auto* c = std::get_if<JumpCompoundPoisson>(&t.jump)) {
            const std::uint64_t k = rng.poisson(c->rate * h);
            for (std::uint64_t j = 0; j < k; ++j) {
                if (const auto* f = std::get_if<JumpDistFixed>(&c->dist)) {
                    out.row(i) += f->value.transpose();
                } else if (const auto* nd = std::get_if<JumpDistNormal>(&c->dist)) {
                    // factor recomputed rarely: jumps are sparse at the rates used here
                    MatrixXd jf = psd_sqrt_factor(nd->cov);
                    for (Eigen::Index l = 0; l < m; ++l) z(l) = rng.normal();
                    out.row(i) += (nd->mean + jf * z).transpose();
                } else {
                    const auto& e = std::get<JumpDistExponential>(c->dist);
                    out(i, 0) += rng.exponential() / e.rate;
                }
            }
        }
    }
}

void add_increments(const LevyModel& model, double h, MatrixXd& out, RngStream& rng) {
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            const Eigen::Index n = out.rows();
            if constexpr (std::is_same_v<T, LevyTriplet>) {
                add_triplet_increments(m, h, out, rng);
            } else if constexpr (std::is_same_v<T, GammaLevy>) {
                const double shape = m.g * h;
                const double rate = std::sqrt(m.g);
                for (Eigen::Index i = 0; i < n; ++i) out(i, 0) += rng.gamma(shape, rate);
            } else if constexpr (std::is_same_v<T, NigLevy>) {
                const Eigen::Index d = out.cols();
                const VectorXd mu_h = m.effective_mu() * h;
                const VectorXd db = m.delta_mat * m.beta;
                const MatrixXd fac = psd_sqrt_factor(m.delta_mat);
                const double ig_mean = h * m.delta / m.kappa;
                const double ig_shape = h * h * m.delta * m.delta;
                VectorXd z(d);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double v = rng.inverse_gaussian(ig_mean, ig_shape);
                    for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal();
                    out.row(i) += (mu_h + v * db + std::sqrt(v) * (fac * z)).transpose();
                }
            } else if constexpr (std::is_same_v<T, StableLevy>) {
                if (m.alpha == 1.0) {
                    const double sh = m.scale * h;
                    const double shift = m.location * h + (2.0 / kPi) * m.skew * sh * std::log(sh);
                    for (Eigen::Index i = 0; i < n; ++i)
                        out(i, 0) += sh * rng.stable(m.alpha, m.skew) + shift;
                } else {
                    const double sh = m.scale * std::pow(h, 1.0 / m.alpha);
                    for (Eigen::Index i = 0; i < n; ++i)
                        out(i, 0) += sh * rng.stable(m.alpha, m.skew) + m.location * h;
                }
            } else {
                for (const auto& c : m.components) add_increments(c, h, out, rng);
            }
        },
        model.spec);
}

}  // namespace

IncrementBatch sample_increments(const LevyModel& model, double h, Eigen::Index n,
                                 std::uint64_t seed, std::uint64_t stream) {
    if (h <= 0.0) throw std::domain_error("sample_increments: h must be > 0");
    if (n < 1) throw std::domain_error("sample_increments: n must be >= 1");
    model.validate();

    IncrementBatch batch;
    batch.h = h;
    batch.seed = SeedRecord{seed, stream};
    batch.values = MatrixXd::Zero(n, model.dim());
    RngStream rng(seed, stream);
    add_increments(model, h, batch.values, rng);
    return batch;
}

std::complex<double> char_exponent(const LevyModel& model, const VectorXd& u) {
    model.validate();
    if (u.size() != model.dim()) throw std::domain_error("char_exponent: u dimension mismatch");
    return std::visit(
        [&u](const auto& m) -> cd {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LevyTriplet>) {
                cd psi = kI * u.dot(m.gamma) - 0.5 * u.dot(m.sigma_g * u);
                if (const auto* p = std::get_if<JumpPoisson>(&m.jump))
                    psi += p->rate * (std::exp(kI * u.dot(p->jump)) - 1.0);
                else if (const auto* c = std::get_if<JumpCompoundPoisson>(&m.jump))
                    psi += c->rate * (jump_cf(c->dist, u) - 1.0);
                return psi;
            } else if constexpr (std::is_same_v<T, GammaLevy>) {
                return -m.g * std::log(1.0 - kI * u(0) / std::sqrt(m.g));
            } else if constexpr (std::is_same_v<T, NigLevy>) {
                const VectorXd db = m.delta_mat * m.beta;
                cd rad = m.kappa * m.kappa + u.dot(m.delta_mat * u) - 2.0 * kI * u.dot(db);
                return kI * u.dot(m.effective_mu()) + m.delta * m.kappa - m.delta * std::sqrt(rad);
            } else if constexpr (std::is_same_v<T, StableLevy>) {
                const double x = u(0);
                if (x == 0.0) return cd{0.0, 0.0};
                const double ax = std::abs(x);
                const double sg = x > 0.0 ? 1.0 : -1.0;
                cd psi = kI * m.location * x;
                if (m.alpha == 1.0) {
                    psi -= m.scale * ax *
                           (1.0 + kI * m.skew * (2.0 / kPi) * sg * std::log(ax));
                } else {
                    psi -= std::pow(m.scale, m.alpha) * std::pow(ax, m.alpha) *
                           (1.0 - kI * m.skew * sg * std::tan(0.5 * kPi * m.alpha));
                }
                return psi;
            } else {
                cd psi{0.0, 0.0};
                for (const auto& c : m.components) psi += char_exponent(c, u);
                return psi;
            }
        },
        model.spec);
}

MomentRates moment_rates(const LevyModel& model) {
    model.validate();
    return std::visit(
        [](const auto& m) -> MomentRates {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LevyTriplet>) {
                MomentRates r{m.gamma, m.sigma_g};
                if (const auto* p = std::get_if<JumpPoisson>(&m.jump)) {
                    r.mean += p->rate * p->jump;
                    r.cov += p->rate * p->jump * p->jump.transpose();
                } else if (const auto* c = std::get_if<JumpCompoundPoisson>(&m.jump)) {
                    r.mean += c->rate * jump_mean(c->dist);
                    r.cov += c->rate * jump_second_moment(c->dist);
                }
                return r;
            } else if constexpr (std::is_same_v<T, GammaLevy>) {
                return {VectorXd::Constant(1, std::sqrt(m.g)), MatrixXd::Constant(1, 1, 1.0)};
            } else if constexpr (std::is_same_v<T, NigLevy>) {
                const double r = m.delta / m.kappa;
                const VectorXd db = m.delta_mat * m.beta;
                MomentRates out;
                out.mean = m.effective_mu() + r * db;
                out.cov = r * m.delta_mat +
                          (r * r * r / (m.delta * m.delta)) * db * db.transpose();
                return out;
            } else if constexpr (std::is_same_v<T, StableLevy>) {
                if (m.alpha < 2.0)
                    throw std::domain_error("moment_rates: infinite variance for Stable(alpha=" +
                                            std::to_string(m.alpha) + ")");
                return {VectorXd::Constant(1, m.location),
                        MatrixXd::Constant(1, 1, 2.0 * m.scale * m.scale)};
            } else {
                MomentRates out;
                const int d = m.components.front().dim();
                out.mean = VectorXd::Zero(d);
                out.cov = MatrixXd::Zero(d, d);
                for (const auto& c : m.components) {
                    MomentRates r = moment_rates(c);
                    out.mean += r.mean;
                    out.cov += r.cov;
                }
                return out;
            }
        },
        model.spec);
}

SampledPath path_from_increments(const IncrementBatch& batch) {
    SampledPath path;
    path.h = batch.h;
    path.seed = batch.seed;
    path.model_tag = "levy_path";
    const Eigen::Index n = batch.values.rows();
    path.y = MatrixXd::Zero(n + 1, batch.values.cols());
    for (Eigen::Index i = 0; i < n; ++i)
        path.y.row(i + 1) = path.y.row(i) + batch.values.row(i);
    return path;
}

}  // namespace carma
