#include "tbody/kernels.hpp"

#include "tbody/lp.hpp"

#include <cmath>
#include <exception>
#include <limits>

namespace tbody::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat select_columns(const Mat& V, const std::vector<Eigen::Index>& idx) {
    Mat out(V.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = V.col(idx[i]);
    return out;
}

bool spans(const Mat& V) {
    if (V.cols() < V.rows()) return false;
    Eigen::ColPivHouseholderQR<Mat> qr(V);
    qr.setThreshold(1e-10);
    return qr.rank() == V.rows();
}

// Gauge of x w.r.t. conv(+-V) with column `skip` removed; +inf when the rest
// does not span.
double gauge_without(const Mat& V, Eigen::Index skip, const Vec& x, double tol) {
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<size_t>(V.cols()));
    for (Eigen::Index j = 0; j < V.cols(); ++j)
        if (j != skip) idx.push_back(j);
    const Mat rest = select_columns(V, idx);
    if (!spans(rest)) return kInf;
    return solve_gauge_lp(rest, x, tol).value;
}

double gauge_or_inf(const Mat& V, bool spanning, const Vec& x, double tol) {
    if (!spanning) return kInf;
    return solve_gauge_lp(V, x, tol).value;
}

// Shared tail of extreme_columns: resolve the candidates that the first pass
// could not settle, strictly in index order.
Mat finish_extreme(const Mat& V, const Vec& g_all, const Vec& g_def, double tol) {
    const Eigen::Index m = V.cols();
    std::vector<char> keep(static_cast<size_t>(m), 1);
    std::vector<Eigen::Index> ambiguous;
    for (Eigen::Index k = 0; k < m; ++k) {
        if (g_all(k) > 1.0 + tol) continue;
        if (g_def(k) <= 1.0 + tol)
            keep[k] = 0;
        else
            ambiguous.push_back(k);
    }
    for (Eigen::Index k : ambiguous) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < m; ++j)
            if (j != k && keep[j]) idx.push_back(j);
        const Mat rest = select_columns(V, idx);
        if (spans(rest) && solve_gauge_lp(rest, V.col(k), tol).value <= 1.0 + tol) keep[k] = 0;
    }
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 0; k < m; ++k)
        if (keep[k]) idx.push_back(k);
    return select_columns(V, idx);
}

std::vector<Eigen::Index> definite_indices(const Vec& g_all, double tol) {
    std::vector<Eigen::Index> def;
    for (Eigen::Index k = 0; k < g_all.size(); ++k)
        if (g_all(k) > 1.0 + tol) def.push_back(k);
    return def;
}

double max_abs_tail(const std::vector<Mat>& points, size_t level, const Vec& t) {
    const Mat& A = points[level];
    if (level + 1 == points.size()) return (A.transpose() * t).cwiseAbs().maxCoeff();
    double best = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        best = std::max(best, max_abs_tail(points, level + 1, contract_leading(t, A.rows(), A.col(j))));
    return best;
}

void check_multilinear(const std::vector<Mat>& points, const Vec& u) {
    if (points.empty()) throw InvalidArgument("empty factor list");
    Eigen::Index total = 1;
    for (const auto& p : points) total *= p.rows();
    require_dim(u.size(), total, "multilinear contraction");
}

}  // namespace

Vec contract_leading(const Vec& t, Eigen::Index d1, const Vec& a) {
    const Eigen::Index rest = t.size() / d1;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> T(t.data(), d1, rest);
    return T.transpose() * a;
}

double dist_to_hull(const Vec& x, const Mat& V, double tol) {
    require_dim(x.size(), V.rows(), "dist_to_hull");
    if (solve_gauge_lp(V, x, tol).value <= 1.0) return 0.0;
    Mat atoms(V.rows(), 2 * V.cols());
    atoms << V, -V;
    atoms.colwise() -= x;
    return min_norm_point(atoms).distance;
}

namespace serial {

Mat extreme_columns(const Mat& V, double tol) {
    const Eigen::Index m = V.cols();
    Vec g_all(m);
    for (Eigen::Index k = 0; k < m; ++k) g_all(k) = gauge_without(V, k, V.col(k), tol);
    const Mat D = select_columns(V, definite_indices(g_all, tol));
    const bool d_spans = spans(D);
    Vec g_def = Vec::Constant(m, kInf);
    for (Eigen::Index k = 0; k < m; ++k)
        if (g_all(k) <= 1.0 + tol) g_def(k) = gauge_or_inf(D, d_spans, V.col(k), tol);
    return finish_extreme(V, g_all, g_def, tol);
}

Vec gauges(const Mat& V, const Mat& X, double tol) {
    Vec g(X.cols());
    for (Eigen::Index k = 0; k < X.cols(); ++k) g(k) = solve_gauge_lp(V, X.col(k), tol).value;
    return g;
}

double max_dist_to_hull(const Mat& X, const Mat& V, double tol) {
    double best = 0.0;
    for (Eigen::Index k = 0; k < X.cols(); ++k) best = std::max(best, dist_to_hull(X.col(k), V, tol));
    return best;
}

double max_abs_multilinear(const std::vector<Mat>& points, const Vec& u) {
    check_multilinear(points, u);
    return max_abs_tail(points, 0, u);
}

}  // namespace serial

namespace parallel {

namespace {

// OpenMP loop over [0, n); the exception of the lowest failing index is
// rethrown after the loop.
template <class F>
void for_each_index(Eigen::Index n, F&& f) {
    std::vector<std::exception_ptr> errs(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index k = 0; k < n; ++k) {
        try {
            f(k);
        } catch (...) {
            errs[static_cast<size_t>(k)] = std::current_exception();
        }
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace

Mat extreme_columns(const Mat& V, double tol) {
    const Eigen::Index m = V.cols();
    Vec g_all(m);
    for_each_index(m, [&](Eigen::Index k) { g_all(k) = gauge_without(V, k, V.col(k), tol); });
    const Mat D = select_columns(V, definite_indices(g_all, tol));
    const bool d_spans = spans(D);
    Vec g_def = Vec::Constant(m, kInf);
    for_each_index(m, [&](Eigen::Index k) {
        if (g_all(k) <= 1.0 + tol) g_def(k) = gauge_or_inf(D, d_spans, V.col(k), tol);
    });
    return finish_extreme(V, g_all, g_def, tol);
}

Vec gauges(const Mat& V, const Mat& X, double tol) {
    Vec g(X.cols());
    for_each_index(X.cols(), [&](Eigen::Index k) { g(k) = solve_gauge_lp(V, X.col(k), tol).value; });
    return g;
}

double max_dist_to_hull(const Mat& X, const Mat& V, double tol) {
    Vec d(X.cols());
    for_each_index(X.cols(), [&](Eigen::Index k) { d(k) = dist_to_hull(X.col(k), V, tol); });
    return X.cols() ? d.maxCoeff() : 0.0;
}

double max_abs_multilinear(const std::vector<Mat>& points, const Vec& u) {
    check_multilinear(points, u);
    if (points.size() == 1) return max_abs_tail(points, 0, u);
    const Mat& A = points[0];
    Vec best(A.cols());
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        best(j) = max_abs_tail(points, 1, contract_leading(u, A.rows(), A.col(j)));
    return best.maxCoeff();
}

}  // namespace parallel

}  // namespace tbody::kernels
