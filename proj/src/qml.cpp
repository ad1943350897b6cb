#include "carma/qml.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "carma/errors.hpp"
#include "carma/linalg.hpp"
#include "carma/moments.hpp"
#include "carma/rng.hpp"
#include "carma/sampler.hpp"

namespace carma {

namespace {

constexpr double kPenaltyBase = 1e10;
constexpr double kPenaltySlope = 1e6;

// One Kalman pass with preallocated buffers; this is the hot loop of fit().
struct KalmanPass {
    Eigen::Index nn, dd;
    MatrixXd phi, q, c, ct;
    MatrixXd p, pf, cp, kt, tmp, s, sinv;
    VectorXd x, xn, e, se;

    KalmanPass(const DiscreteSystem& ds, const MatrixXd& v0)
        : nn(ds.phi.rows()), dd(ds.c.rows()), phi(ds.phi), q(ds.q_h), c(ds.c),
          ct(ds.c.transpose()), p(v0), pf(nn, nn), cp(dd, nn), kt(dd, nn),
          tmp(nn, nn), s(dd, dd), sinv(dd, dd), x(VectorXd::Zero(nn)), xn(nn),
          e(dd), se(dd) {}

    // Returns the index of the first step with non-PD prediction covariance,
    // or -1 on success. Accumulates 0.5 * (log det V_n + e^T V^{-1} e) into
    // total; optionally records per-step contributions / innovations.
    Eigen::Index run(const MatrixXd& y, double& total, VectorXd* per_obs,
                     MatrixXd* innov, std::vector<MatrixXd>* covs) {
        const Eigen::Index len = y.rows();
        total = 0.0;
        for (Eigen::Index k = 0; k < len; ++k) {
            cp.noalias() = c * p;
            s.noalias() = cp * ct;
            e = y.row(k).transpose();
            e.noalias() -= c * x;

            double logdet, quad;
            if (dd == 1) {
                const double v = s(0, 0);
                if (!(v > 0.0) || !std::isfinite(v)) return k;
                logdet = std::log(v);
                quad = e(0) * e(0) / v;
                sinv(0, 0) = 1.0 / v;
            } else if (dd == 2) {
                const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
                if (!(det > 0.0) || !(s(0, 0) > 0.0) || !std::isfinite(det)) return k;
                logdet = std::log(det);
                const double inv_det = 1.0 / det;
                sinv(0, 0) = s(1, 1) * inv_det;
                sinv(1, 1) = s(0, 0) * inv_det;
                sinv(0, 1) = sinv(1, 0) = -s(0, 1) * inv_det;
                se.noalias() = sinv * e;
                quad = e.dot(se);
            } else {
                Eigen::LLT<MatrixXd> llt(s);
                if (llt.info() != Eigen::Success) return k;
                logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
                quad = e.dot(llt.solve(e));
                sinv = llt.solve(MatrixXd::Identity(dd, dd));
            }
            if (!std::isfinite(logdet) || !std::isfinite(quad)) return k;

            const double contrib = 0.5 * (logdet + quad);
            total += contrib;
            if (per_obs) (*per_obs)(k) = contrib;
            if (innov) innov->row(k) = e.transpose();
            if (covs) (*covs)[static_cast<size_t>(k)] = s;

            kt.noalias() = sinv * cp;
            x.noalias() += kt.transpose() * e;
            pf = p;
            pf.noalias() -= kt.transpose() * cp;
            xn.noalias() = phi * x;
            x.swap(xn);
            tmp.noalias() = phi * pf;
            p.noalias() = tmp * phi.transpose();
            p += q;
            p = 0.5 * (p + p.transpose()).eval();
        }
        return -1;
    }
};

// Penalty for parameter points outside the causal / PSD region; -1 => none.
double constraint_penalty(const StateSpace& ss) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> sig(ss.sigma_l, Eigen::EigenvaluesOnly);
    const double sig_min = sig.eigenvalues().minCoeff();
    if (sig_min < 0.0) return kPenaltyBase + kPenaltySlope * (-sig_min);
    Eigen::EigenSolver<MatrixXd> es(ss.a);
    const double max_re = es.eigenvalues().real().maxCoeff();
    if (max_re >= 0.0) return kPenaltyBase + kPenaltySlope * max_re;
    return -1.0;
}

// Shared objective machinery: builds the model once per theta, returns the
// total neg quasi-log-likelihood or a penalty.
double eval_neg_loglik(const Parametrization& par, const VectorXd& theta,
                       const SampledPath& path, VectorXd* per_obs) {
    StateSpace ss = par.build(theta);
    const double pen = constraint_penalty(ss);
    if (pen > 0.0) return pen;

    MatrixXd v0;
    try {
        v0 = stationary_cov(ss);
    } catch (const numerical_error&) {
        return kPenaltyBase;
    }
    DiscreteSystem ds = discretize(ss, path.h);
    KalmanPass pass(ds, v0);
    double total = 0.0;
    if (pass.run(path.y, total, per_obs, nullptr, nullptr) >= 0) return kPenaltyBase;
    if (!std::isfinite(total)) return kPenaltyBase;
    return total;
}

}  // namespace

InnovationSequence kalman_innovations(const StateSpace& ss, const SampledPath& path) {
    ss.validate();
    if (path.d() != ss.d()) throw std::domain_error("kalman_innovations: dimension mismatch");
    MatrixXd v0 = stationary_cov(ss);  // rejects non-causal models
    DiscreteSystem ds = discretize(ss, path.h);

    InnovationSequence out;
    out.e.resize(path.n(), path.d());
    out.v.assign(static_cast<size_t>(path.n()), MatrixXd());
    KalmanPass pass(ds, v0);
    double total = 0.0;
    Eigen::Index bad = pass.run(path.y, total, nullptr, &out.e, &out.v);
    if (bad >= 0)
        throw numerical_error("kalman_innovations: non-positive-definite V at step " +
                              std::to_string(bad));
    out.loglik = -total;
    return out;
}

double neg_quasi_loglik(const Parametrization& par, const VectorXd& theta,
                        const SampledPath& path) {
    if (theta.size() != par.dim) throw std::domain_error("neg_quasi_loglik: theta dimension mismatch");
    return eval_neg_loglik(par, theta, path, nullptr);
}

FitResult fit(const Parametrization& par, const SampledPath& path, const VectorXd& theta_init,
              const FitSettings& settings) {
    if (theta_init.size() != par.dim) throw std::domain_error("fit: theta_init dimension mismatch");
    if (!par.box.contains(theta_init)) throw std::domain_error("fit: theta_init outside the box");

    const double scale = 1.0 / static_cast<double>(path.n());
    auto objective = [&par, &path, scale](const VectorXd& t) {
        return scale * eval_neg_loglik(par, t, path, nullptr);
    };

    std::vector<VectorXd> starts;
    starts.push_back(theta_init);
    RngStream rng(settings.multistart_seed, 0);
    for (int s = 1; s < settings.starts; ++s) {
        VectorXd draw(par.dim);
        for (int i = 0; i < par.dim; ++i) draw(i) = rng.uniform(par.box.lo(i), par.box.hi(i));
        starts.push_back(draw);
    }

    std::vector<optim::Result> results(starts.size());
    auto run_start = [&](size_t idx) {
        // max_iter = 0 skips the simplex stage (pure quasi-Newton polish)
        VectorXd stage_x = starts[idx];
        int nm_iters = 0;
        bool nm_capped = false;
        if (settings.max_iter > 0) {
            optim::Result nm = optim::nelder_mead(objective, stage_x, par.box,
                                                  settings.max_iter, settings.simplex_tol);
            stage_x = nm.x;
            nm_iters = nm.iterations;
            nm_capped = nm.iterations >= settings.max_iter;
        }
        optim::Result bf = optim::bfgs(objective, stage_x, par.box, settings.bfgs_max_iter,
                                       settings.grad_tol);
        bf.iterations += nm_iters;
        bf.step_converged = bf.step_converged && !nm_capped;
        results[idx] = std::move(bf);
    };
    if (settings.threads > 1 && starts.size() > 1) {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        const int nthreads = std::min<int>(settings.threads, static_cast<int>(starts.size()));
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&]() {
                for (size_t i = next.fetch_add(1); i < starts.size(); i = next.fetch_add(1))
                    run_start(i);
            });
        for (auto& th : pool) th.join();
    } else {
        for (size_t i = 0; i < starts.size(); ++i) run_start(i);
    }

    size_t best = 0;
    for (size_t i = 1; i < results.size(); ++i)
        if (results[i].value < results[best].value) best = i;

    if (results[best].value >= kPenaltyBase)
        throw std::domain_error("fit: no start produced a causal model");

    FitResult out;
    out.theta_hat = results[best].x;
    out.loglik = -results[best].value / scale;
    out.iterations = results[best].iterations;
    out.gradient_norm = results[best].gradient_norm;
    out.converged = results[best].step_converged && results[best].gradient_norm < settings.grad_tol;

    if (settings.compute_cov) {
        try {
            out.omega = asymptotic_cov(par, out.theta_hat, path, &out.omega_clipped);
            out.std_err = out.omega.diagonal().cwiseMax(0.0).cwiseSqrt();
        } catch (const numerical_error&) {
            out.omega.resize(0, 0);  // reported without a covariance
        }
    }
    return out;
}

MatrixXd asymptotic_cov(const Parametrization& par, const VectorXd& theta_hat,
                        const SampledPath& path, bool* clipped) {
    const Eigen::Index len = path.n();
    const int dim = par.dim;
    const double scale = 1.0 / static_cast<double>(len);
    auto averaged = [&par, &path, scale](const VectorXd& t) {
        return scale * eval_neg_loglik(par, t, path, nullptr);
    };

    MatrixXd j = optim::hessian_fd(averaged, theta_hat, 1e-4);

    // Per-observation score contributions by central differences.
    MatrixXd scores(len, dim);
    VectorXd plus(len), minus(len);
    VectorXd t = theta_hat;
    for (int i = 0; i < dim; ++i) {
        const double h = 1e-4 * std::max(1.0, std::abs(theta_hat(i)));
        t(i) = theta_hat(i) + h;
        eval_neg_loglik(par, t, path, &plus);
        t(i) = theta_hat(i) - h;
        eval_neg_loglik(par, t, path, &minus);
        t(i) = theta_hat(i);
        scores.col(i) = (plus - minus) / (2.0 * h);
    }
    const Eigen::RowVectorXd mean = scores.colwise().mean();
    scores.rowwise() -= mean;

    // Bartlett long-run variance, bandwidth floor(L^{1/3}).
    const Eigen::Index bw = static_cast<Eigen::Index>(std::floor(std::cbrt(static_cast<double>(len))));
    MatrixXd info = scores.transpose() * scores / static_cast<double>(len);
    for (Eigen::Index k = 1; k <= bw; ++k) {
        const double w = 1.0 - static_cast<double>(k) / static_cast<double>(bw + 1);
        MatrixXd gk = scores.bottomRows(len - k).transpose() * scores.topRows(len - k) /
                      static_cast<double>(len);
        info += w * (gk + gk.transpose());
    }

    Eigen::FullPivLU<MatrixXd> lu(j);
    if (!lu.isInvertible())
        throw numerical_error(
            "asymptotic_cov: singular Hessian (parametrization may be non-identifiable)");
    MatrixXd jinv = lu.inverse();
    MatrixXd omega = jinv * info * jinv.transpose() / static_cast<double>(len);
    omega = 0.5 * (omega + omega.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(omega);
    if (es.eigenvalues().minCoeff() < 0.0) {
        if (clipped) *clipped = true;
        omega = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                es.eigenvectors().transpose();
    } else if (clipped) {
        *clipped = false;
    }
    return omega;
}

IdentifiabilityReport identifiability_check(const Parametrization& par, const VectorXd& theta_1,
                                            const VectorXd& theta_2, double h,
                                            const std::vector<double>& freq_grid) {
    constexpr double kPi = 3.14159265358979323846;
    IdentifiabilityReport report;

    auto strip_ok = [h](const StateSpace& ss) {
        Spectrum s = spectrum(ss);
        const Eigen::Index n = s.eigenvalues.size();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(s.eigenvalues(i).imag()) >= kPi / h) return false;
            for (Eigen::Index j = i + 1; j < n; ++j)
                if (std::abs(s.eigenvalues(i) - s.eigenvalues(j)) < 1e-10) return false;
        }
        return true;
    };

    StateSpace ss1 = par.build(theta_1);
    StateSpace ss2 = par.build(theta_2);
    report.strip_ok_1 = strip_ok(ss1);
    report.strip_ok_2 = strip_ok(ss2);

    DiscreteSystem d1 = discretize(ss1, h);
    DiscreteSystem d2 = discretize(ss2, h);
    auto sampled_density = [](const DiscreteSystem& ds, double omega, double h) {
        const Eigen::Index n = ds.phi.rows();
        const std::complex<double> z = std::exp(std::complex<double>(0.0, omega * h));
        MatrixXcd res = z * MatrixXcd::Identity(n, n) - ds.phi.cast<std::complex<double>>();
        MatrixXcd hh = ds.c.cast<std::complex<double>>() *
                       res.partialPivLu().solve(ds.q_h.cast<std::complex<double>>());
        MatrixXcd res2 = (1.0 / z) * MatrixXcd::Identity(n, n) -
                         ds.phi.transpose().cast<std::complex<double>>();
        return (hh * res2.partialPivLu().solve(ds.c.transpose().cast<std::complex<double>>()) /
                (2.0 * kPi))
            .eval();
    };

    double gap = 0.0;
    for (double w : freq_grid) {
        MatrixXcd f1 = sampled_density(d1, w, h);
        MatrixXcd f2 = sampled_density(d2, w, h);
        gap = std::max(gap, (f1 - f2).cwiseAbs().maxCoeff());
    }
    report.max_density_gap = gap;
    report.distinguishable = gap > 1e-8;
    return report;
}

// ---------------------------------------------------------------------------
// Built-in parametrizations
// ---------------------------------------------------------------------------

Parametrization Parametrization::univariate(int p, int q, const optim::Box& box) {
    if (p < 1 || q < 0 || q >= p) throw std::domain_error("univariate: need 0 <= q < p");
    Parametrization par;
    par.dim = p + q + 1;
    par.family = "univariate-canonical";
    par.box = box;
    if (box.lo.size() != par.dim || box.hi.size() != par.dim)
        throw std::domain_error("univariate: box dimension mismatch");
    par.build = [p, q](const VectorXd& theta) {
        std::vector<double> ar(static_cast<size_t>(p));
        for (int i = 0; i < p; ++i) ar[static_cast<size_t>(i)] = -theta(i);
        std::vector<double> ma(static_cast<size_t>(q) + 1);
        ma[0] = 1.0;
        for (int j = 1; j <= q; ++j) ma[static_cast<size_t>(j)] = theta(p + j - 1);
        const double sigma = theta(p + q);
        return companion(CarmaSpec::scalar(ar, ma), MatrixXd::Constant(1, 1, sigma * sigma));
    };
    return par;
}

Parametrization Parametrization::bivariate_paper(const optim::Box& box) {
    Parametrization par;
    par.dim = 10;
    par.family = "bivariate-paper";
    par.box = box;
    if (box.lo.size() != 10 || box.hi.size() != 10)
        throw std::domain_error("bivariate_paper: box must have 10 coordinates");
    par.build = [](const VectorXd& t) {
        StateSpace ss;
        ss.a.resize(3, 3);
        ss.a << t(0), t(1), 0.0,
                0.0, 0.0, 1.0,
                t(2), t(3), t(4);
        ss.b.resize(3, 2);
        ss.b << t(0), t(1),
                t(5), t(6),
                t(2) + t(4) * t(5), t(3) + t(4) * t(6);
        ss.c.resize(2, 3);
        ss.c << 1, 0, 0,
                0, 1, 0;
        ss.sigma_l.resize(2, 2);
        ss.sigma_l << t(7), t(8),
                      t(8), t(9);
        return ss;
    };
    return par;
}

Parametrization Parametrization::user_table(MatrixXd a0, MatrixXd b0, MatrixXd c0, MatrixXd f0,
                                            std::vector<Assignment> assign,
                                            const optim::Box& box) {
    Parametrization par;
    par.family = "user-table";
    par.box = box;
    par.dim = static_cast<int>(box.lo.size());
    for (const auto& as : assign) {
        if (as.theta_index < 0 || as.theta_index >= par.dim)
            throw std::domain_error("user_table: theta index out of range");
        const MatrixXd& target = as.target == 'A'   ? a0
                                 : as.target == 'B' ? b0
                                 : as.target == 'C' ? c0
                                                    : f0;
        if (as.target != 'A' && as.target != 'B' && as.target != 'C' && as.target != 'F')
            throw std::domain_error("user_table: target must be A, B, C or F");
        if (as.row < 0 || as.row >= target.rows() || as.col < 0 || as.col >= target.cols())
            throw std::domain_error("user_table: assignment index out of range");
    }
    par.build = [a0 = std::move(a0), b0 = std::move(b0), c0 = std::move(c0), f0 = std::move(f0),
                 assign = std::move(assign)](const VectorXd& theta) {
        StateSpace ss;
        ss.a = a0;
        ss.b = b0;
        ss.c = c0;
        MatrixXd f = f0;
        for (const auto& as : assign) {
            MatrixXd& target = as.target == 'A'   ? ss.a
                               : as.target == 'B' ? ss.b
                               : as.target == 'C' ? ss.c
                                                  : f;
            target(as.row, as.col) = as.scale * theta(as.theta_index);
        }
        ss.sigma_l = f * f.transpose();
        return ss;
    };
    return par;
}

}  // namespace carma
