#include "tbody/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tbody {

void canonical_sign(Eigen::Ref<Vec> v, double eps) {
    const double m = v.cwiseAbs().maxCoeff();
    if (m == 0.0) return;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > eps * m) {
            if (v(i) < 0) v = -v;
            v.array() += 0.0;  // no negative zeros
            return;
        }
    }
}

Mat dedupe_columns(const Mat& cols, double tol) {
    const Eigen::Index d = cols.rows();
    const Eigen::Index n = cols.cols();
    if (n == 0) return cols;
    const double scale = std::max(1.0, cols.cwiseAbs().maxCoeff());
    const double eps = tol * scale;
    Mat canon = cols;
    for (Eigen::Index j = 0; j < n; ++j) canonical_sign(canon.col(j));

    // near-duplicates have nearby projections, so only a window of the sorted order is scanned
    Vec w(d);
    for (Eigen::Index i = 0; i < d; ++i) w(i) = 1.0 + 0.6180339887498949 * static_cast<double>(i + 1) / static_cast<double>(d);
    const Vec key = canon.transpose() * w;
    const double reach = eps * w.sum() * (1.0 + 1e-12) + 1e-300;
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return key(a) < key(b) || (key(a) == key(b) && a < b);
    });
    std::vector<Eigen::Index> pos(static_cast<size_t>(n));
    for (size_t r = 0; r < order.size(); ++r) pos[static_cast<size_t>(order[r])] = static_cast<Eigen::Index>(r);

    std::vector<char> kept(static_cast<size_t>(n), 0);
    std::vector<Eigen::Index> keep;
    auto near = [&](Eigen::Index j, Eigen::Index k) {
        return kept[static_cast<size_t>(k)] && k < j && (canon.col(j) - canon.col(k)).cwiseAbs().maxCoeff() <= eps;
    };
    for (Eigen::Index j = 0; j < n; ++j) {
        bool dup = false;
        const Eigen::Index r = pos[static_cast<size_t>(j)];
        for (Eigen::Index s = r - 1; !dup && s >= 0 && key(j) - key(order[static_cast<size_t>(s)]) <= reach; --s)
            dup = near(j, order[static_cast<size_t>(s)]);
        for (Eigen::Index s = r + 1; !dup && s < n && key(order[static_cast<size_t>(s)]) - key(j) <= reach; ++s)
            dup = near(j, order[static_cast<size_t>(s)]);
        if (!dup) {
            kept[static_cast<size_t>(j)] = 1;
            keep.push_back(j);
        }
    }
    Mat out(d, static_cast<Eigen::Index>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = canon.col(keep[i]);
    return out;
}

namespace {

Mat facets_1d(const Mat& p) {
    const double a = p.cwiseAbs().maxCoeff();
    if (a <= 0) throw CorruptBody("degenerate 1-dimensional body");
    Mat w(1, 1);
    w(0, 0) = 1.0 / a;
    return w;
}

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

Mat facets_2d(const Mat& p, double tol) {
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(2 * p.cols());
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
        pts.emplace_back(p(0, j), p(1, j));
        pts.emplace_back(-p(0, j), -p(1, j));
    }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    double scale = 0.0;
    for (const auto& q : pts) scale = std::max(scale, q.norm());
    const double eps = 1e-12 * scale * scale;

    // Andrew's monotone chain, dropping collinear points.
    std::vector<Eigen::Vector2d> hull(2 * pts.size());
    size_t k = 0;
    for (const auto& q : pts) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], q) <= eps) --k;
        hull[k++] = q;
    }
    for (size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        const auto& q = pts[i];
        while (k >= t && cross2(hull[k - 2], hull[k - 1], q) <= eps) --k;
        hull[k++] = q;
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw CorruptBody("points do not span the plane");

    Mat normals(2, static_cast<Eigen::Index>(hull.size()));
    Eigen::Index c = 0;
    for (size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        Eigen::Matrix2d A;
        A << a.x(), a.y(), b.x(), b.y();
        if (std::abs(A.determinant()) <= eps) continue;
        normals.col(c++) = A.partialPivLu().solve(Eigen::Vector2d::Ones());
    }
    normals.conservativeResize(2, c);
    (void)tol;
    return dedupe_columns(normals, 1e-9);
}

Mat facets_3d(const Mat& p, double tol) {
    const Eigen::Index m = p.cols();
    Mat pts(3, 2 * m);
    pts << p, -p;
    const Eigen::Index n = pts.cols();
    const double scale = pts.colwise().norm().maxCoeff();
    if (scale <= 0) throw CorruptBody("degenerate 3-dimensional body");

    std::vector<Eigen::Vector3d> found;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            for (Eigen::Index k = j + 1; k < n; ++k) {
                Eigen::Matrix3d A;
                A.row(0) = pts.col(i).transpose();
                A.row(1) = pts.col(j).transpose();
                A.row(2) = pts.col(k).transpose();
                const double det = A.determinant();
                if (std::abs(det) <= 1e-12 * scale * scale * scale) continue;
                const Eigen::Vector3d w = A.partialPivLu().solve(Eigen::Vector3d::Ones());
                bool ok = true;
                for (Eigen::Index q = 0; q < n && ok; ++q) ok = w.dot(pts.col(q)) <= 1.0 + tol;
                if (!ok) continue;
                found.push_back(w);
            }
        }
    }
    if (found.size() < 3) throw CorruptBody("points do not span 3-space");
    Mat normals(3, static_cast<Eigen::Index>(found.size()));
    for (size_t i = 0; i < found.size(); ++i) normals.col(static_cast<Eigen::Index>(i)) = found[i];
    return dedupe_columns(normals, 1e-9);
}

}  // namespace

Mat symmetric_hull_facets(const Mat& points, double tol) {
    switch (points.rows()) {
        case 1: return facets_1d(points);
        case 2: return facets_2d(points, tol);
        case 3: return facets_3d(points, tol);
        default:
            throw Unsupported("facet enumeration is only implemented in dimensions 1-3, got " +
                              std::to_string(points.rows()));
    }
}

}  // namespace tbody
