#include "carma/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace carma::optim {

bool Box::contains(const VectorXd& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

VectorXd Box::clamp(const VectorXd& x) const {
    return x.cwiseMax(lo).cwiseMin(hi);
}

VectorXd gradient_fd(const Objective& f, const VectorXd& x, double rel_step) {
    const Eigen::Index n = x.size();
    VectorXd g(n);
    VectorXd xp = x, xm = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = rel_step * std::max(1.0, std::abs(x(i)));
        xp(i) = x(i) + h;
        xm(i) = x(i) - h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
        xp(i) = x(i);
        xm(i) = x(i);
    }
    return g;
}

MatrixXd hessian_fd(const Objective& f, const VectorXd& x, double rel_step) {
    const Eigen::Index n = x.size();
    VectorXd h(n);
    for (Eigen::Index i = 0; i < n; ++i) h(i) = rel_step * std::max(1.0, std::abs(x(i)));

    MatrixXd hess(n, n);
    const double f0 = f(x);
    VectorXd xt = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        xt(i) = x(i) + h(i);
        const double fp = f(xt);
        xt(i) = x(i) - h(i);
        const double fm = f(xt);
        xt(i) = x(i);
        hess(i, i) = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            xt(i) = x(i) + h(i); xt(j) = x(j) + h(j);
            const double fpp = f(xt);
            xt(j) = x(j) - h(j);
            const double fpm = f(xt);
            xt(i) = x(i) - h(i); xt(j) = x(j) + h(j);
            const double fmp = f(xt);
            xt(j) = x(j) - h(j);
            const double fmm = f(xt);
            xt(i) = x(i); xt(j) = x(j);
            hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h(i) * h(j));
        }
    }
    return hess;
}

namespace {

// Box violations get a steep penalty so simplex vertices drift back inside.
double eval_boxed(const Objective& f, const Box& box, const VectorXd& x) {
    if (box.contains(x)) return f(x);
    const double dist = (x - box.clamp(x)).norm();
    return 1e12 * (1.0 + dist);
}

}  // namespace

Result nelder_mead(const Objective& f, const VectorXd& x0, const Box& box,
                   int max_iter, double tol) {
    const Eigen::Index n = x0.size();
    if (n < 1) throw std::invalid_argument("nelder_mead: empty parameter vector");

    std::vector<VectorXd> pts(static_cast<size_t>(n) + 1, box.clamp(x0));
    std::vector<double> vals(static_cast<size_t>(n) + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        double step = 0.05 * std::max(1.0, std::abs(pts[0](i)));
        if (pts[0](i) + step > box.hi(i)) step = -step;
        pts[static_cast<size_t>(i) + 1](i) += step;
    }
    for (size_t i = 0; i < pts.size(); ++i) vals[i] = eval_boxed(f, box, pts[i]);

    std::vector<size_t> order(pts.size());
    auto sort_simplex = [&]() {
        std::iota(order.begin(), order.end(), size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&vals](size_t a, size_t b) { return vals[a] < vals[b]; });
    };

    Result res;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        sort_simplex();
        const size_t best = order.front(), worst = order.back();
        const size_t second_worst = order[order.size() - 2];

        double diam = 0.0;
        for (size_t i = 1; i < order.size(); ++i)
            diam = std::max(diam, (pts[order[i]] - pts[best]).norm());
        const double fspread = vals[worst] - vals[best];
        if (diam < tol * std::max(1.0, pts[best].norm()) || fspread < 1e-13 * (1.0 + std::abs(vals[best]))) {
            res.step_converged = true;
            break;
        }

        VectorXd centroid = VectorXd::Zero(n);
        for (size_t i = 0; i + 1 < order.size(); ++i) centroid += pts[order[i]];
        centroid /= static_cast<double>(n);

        VectorXd xr = centroid + (centroid - pts[worst]);  // reflection
        double fr = eval_boxed(f, box, xr);
        if (fr < vals[order.front()]) {
            VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);  // expansion
            double fe = eval_boxed(f, box, xe);
            if (fe < fr) { pts[worst] = xe; vals[worst] = fe; }
            else { pts[worst] = xr; vals[worst] = fr; }
        } else if (fr < vals[second_worst]) {
            pts[worst] = xr; vals[worst] = fr;
        } else {
            const bool outside = fr < vals[worst];
            VectorXd xc = outside ? centroid + 0.5 * (xr - centroid)
                                  : centroid + 0.5 * (pts[worst] - centroid);
            double fc = eval_boxed(f, box, xc);
            if (fc < std::min(fr, vals[worst])) {
                pts[worst] = xc; vals[worst] = fc;
            } else {
                for (size_t i = 1; i < order.size(); ++i) {  // shrink
                    pts[order[i]] = pts[best] + 0.5 * (pts[order[i]] - pts[best]);
                    vals[order[i]] = eval_boxed(f, box, pts[order[i]]);
                }
            }
        }
    }
    sort_simplex();
    res.x = pts[order.front()];
    res.value = vals[order.front()];
    res.iterations = iter;
    return res;
}

Result bfgs(const Objective& f, const VectorXd& x0, const Box& box, int max_iter,
            double grad_tol) {
    const Eigen::Index n = x0.size();
    VectorXd x = box.clamp(x0);
    double fx = f(x);
    VectorXd g = gradient_fd(f, x, 1e-6);
    MatrixXd hinv = MatrixXd::Identity(n, n);

    Result res;
    int iter = 0;
    bool small_step = false;
    for (; iter < max_iter; ++iter) {
        if (g.norm() < grad_tol) { small_step = true; break; }
        VectorXd dir = -hinv * g;
        if (dir.dot(g) >= 0.0) dir = -g;  // reset on loss of descent

        // Armijo backtracking with projection onto the box.
        double t = 1.0;
        const double slope = g.dot(dir);
        VectorXd xn;
        double fn = fx;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            xn = box.clamp(x + t * dir);
            fn = f(xn);
            if (fn <= fx + 1e-4 * t * slope || fn < fx - 1e-14) { accepted = true; break; }
            t *= 0.5;
        }
        if (!accepted || (xn - x).norm() < 1e-14 * std::max(1.0, x.norm())) {
            small_step = true;
            break;
        }

        VectorXd gn = gradient_fd(f, xn, 1e-6);
        VectorXd s = xn - x;
        VectorXd yv = gn - g;
        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            const double rho = 1.0 / sy;
            MatrixXd eye = MatrixXd::Identity(n, n);
            hinv = (eye - rho * s * yv.transpose()) * hinv *
                       (eye - rho * yv * s.transpose()) +
                   rho * s * s.transpose();
        } else {
            hinv = MatrixXd::Identity(n, n);
        }
        x = xn;
        fx = fn;
        g = gn;
    }
    res.x = x;
    res.value = fx;
    res.iterations = iter;
    res.gradient_norm = g.norm();
    res.step_converged = small_step;
    return res;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double tol, int max_iter) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace carma::optim
