#include "carma/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <vector>

#include "carma/errors.hpp"

namespace carma::linalg {

MatrixXd expm(const MatrixXd& m) { return m.exp(); }

MatrixXd lyapunov(const MatrixXd& a, const MatrixXd& w) {
    const Eigen::Index n = a.rows();
    // (I (x) A + A (x) I) vec(V) = -vec(W), column-major vec.
    MatrixXd k = MatrixXd::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        k.block(j * n, j * n, n, n) += a;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index r = 0; r < n; ++r) k(j * n + r, i * n + r) += a(j, i);
    }
    Eigen::VectorXd rhs(n * n);
    for (Eigen::Index j = 0; j < n; ++j) rhs.segment(j * n, n) = -w.col(j);

    Eigen::FullPivLU<MatrixXd> lu(k);
    if (!lu.isInvertible())
        throw numerical_error("lyapunov: singular Kronecker system (eigenvalue pair summing to zero)");
    Eigen::VectorXd v = lu.solve(rhs);

    MatrixXd out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) out.col(j) = v.segment(j * n, n);
    return 0.5 * (out + out.transpose());
}

VanLoanResult van_loan(const MatrixXd& a, const MatrixXd& w, double h) {
    const Eigen::Index n = a.rows();
    // exp([[-A, W],[0, A^T]] h) = [[.., B12],[0, B22]]; then
    // phi = B22^T and q = B22^T B12.
    MatrixXd block = MatrixXd::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = -a;
    block.topRightCorner(n, n) = w;
    block.bottomRightCorner(n, n) = a.transpose();
    MatrixXd e = expm(block * h);

    VanLoanResult res;
    res.phi = e.bottomRightCorner(n, n).transpose();
    res.q = res.phi * e.topRightCorner(n, n);
    res.q = 0.5 * (res.q + res.q.transpose()).eval();
    return res;
}

namespace {

// Kronrod 15 nodes/weights on [-1,1] (positive half) and embedded Gauss 7 weights.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GkEval {
    std::complex<double> value;
    double err;
};

GkEval gk15(const std::function<std::complex<double>(double)>& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    std::complex<double> resk = 0.0, resg = 0.0;
    for (int i = 0; i < 8; ++i) {
        if (i == 7) {
            std::complex<double> fc = f(c);
            resk += kWgk[7] * fc;
            resg += kWg[3] * fc;
            break;
        }
        std::complex<double> fa = f(c - half * kXgk[i]);
        std::complex<double> fb = f(c + half * kXgk[i]);
        resk += kWgk[i] * (fa + fb);
        if (i % 2 == 1) resg += kWg[i / 2] * (fa + fb);
    }
    GkEval out;
    out.value = resk * half;
    out.err = std::abs(resk - resg) * half;
    return out;
}

std::complex<double> gk_recurse(const std::function<std::complex<double>(double)>& f,
                                double lo, double hi, double tol, int depth) {
    GkEval e = gk15(f, lo, hi);
    if (e.err <= tol || e.err <= 1e-16 * std::abs(e.value)) return e.value;
    if (depth <= 0)
        throw numerical_error("adaptive_gk15: subdivision limit reached, residual error " +
                              std::to_string(e.err));
    double mid = 0.5 * (lo + hi);
    return gk_recurse(f, lo, mid, 0.5 * tol, depth - 1) +
           gk_recurse(f, mid, hi, 0.5 * tol, depth - 1);
}

}  // namespace

std::complex<double> adaptive_gk15(const std::function<std::complex<double>(double)>& f,
                                   double lo, double hi, double abs_tol, int max_depth) {
    return gk_recurse(f, lo, hi, abs_tol, max_depth);
}

double adaptive_gk15_real(const std::function<double(double)>& f, double lo, double hi,
                          double abs_tol, int max_depth) {
    auto g = [&f](double x) { return std::complex<double>(f(x), 0.0); };
    return gk_recurse(g, lo, hi, abs_tol, max_depth).real();
}

}  // namespace carma::linalg
