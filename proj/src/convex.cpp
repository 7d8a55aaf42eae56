#include "tbody/convex.hpp"

#include "tbody/hull.hpp"
#include "tbody/kernels.hpp"
#include "tbody/lp.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <random>

namespace tbody {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double support_grad(const SymBody& b, const Vec& u, Vec* grad) {
    if (b.is_polytope()) {
        const Vec dots = b.vertices().transpose() * u;
        Eigen::Index j;
        dots.cwiseAbs().maxCoeff(&j);
        if (grad) *grad = (dots(j) >= 0 ? 1.0 : -1.0) * b.vertices().col(j);
        return std::abs(dots(j));
    }
    const Vec Mu = b.shape() * u;
    const double h = std::sqrt(std::max(0.0, u.dot(Mu)));
    if (grad) *grad = h > 0 ? Vec(Mu / h) : Vec(Vec::Zero(u.size()));
    return h;
}

double support_gap(const SymBody& p, const SymBody& q, const Vec& u) {
    return std::abs(support(p, u) - support(q, u));
}

// Projected ascent of |h_P - h_Q| on the unit sphere from u.
double ascend_gap(const SymBody& p, const SymBody& q, Vec u, int iters) {
    u.normalize();
    double f = support_gap(p, q, u);
    double step = 0.1;
    for (int it = 0; it < iters && step > 1e-13; ++it) {
        Vec gp, gq;
        const double hp = support_grad(p, u, &gp);
        const double hq = support_grad(q, u, &gq);
        Vec g = (hp >= hq ? 1.0 : -1.0) * (gp - gq);
        g -= g.dot(u) * u;
        if (g.norm() <= 1e-15) break;
        g.normalize();
        const Vec cand = (u + step * g).normalized();
        const double fc = support_gap(p, q, cand);
        if (fc > f) {
            u = cand;
            f = fc;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    return f;
}

std::vector<Vec> random_directions(int d, int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<Vec> out;
    out.reserve(static_cast<size_t>(n + 2 * d));
    for (int i = 0; i < d; ++i) out.push_back(Vec::Unit(d, i));
    for (int i = 0; i < n; ++i) {
        Vec v(d);
        for (int k = 0; k < d; ++k) v(k) = nd(rng);
        out.push_back(v.normalized());
    }
    return out;
}

// Certified sup over the circle of f(theta) = |h_P - h_Q|, Lipschitz with
// constant nu(P) + nu(Q).
HausdorffValue hausdorff_planar(const SymBody& p, const SymBody& q, double tol) {
    const double L = outradius(p) + outradius(q);
    auto f = [&](double th) {
        Vec u(2);
        u << std::cos(th), std::sin(th);
        return support_gap(p, q, u);
    };
    struct Interval {
        double a, b, fm, ub;
        bool operator<(const Interval& o) const { return ub < o.ub; }
    };
    std::priority_queue<Interval> heap;
    double best = 0.0;
    const int n0 = 720;
    const double pi = std::numbers::pi;
    for (int i = 0; i < n0; ++i) {
        const double a = pi * i / n0, b = pi * (i + 1) / n0;
        const double fm = f(0.5 * (a + b));
        best = std::max(best, fm);
        heap.push({a, b, fm, fm + 0.5 * L * (b - a)});
    }
    size_t evals = n0;
    while (!heap.empty()) {
        const Interval top = heap.top();
        if (top.ub - best <= tol || evals > 4000000) break;
        heap.pop();
        const double mid = 0.5 * (top.a + top.b);
        for (const auto& [a, b] : std::array<std::pair<double, double>, 2>{{{top.a, mid}, {mid, top.b}}}) {
            const double fm = f(0.5 * (a + b));
            ++evals;
            best = std::max(best, fm);
            const double ub = fm + 0.5 * L * (b - a);
            if (ub > best + tol) heap.push({a, b, fm, ub});
        }
    }
    const double upper = heap.empty() ? best : std::max(best, heap.top().ub);
    return {best, upper - best, false};
}

HausdorffValue hausdorff_ellipsoids(const SymBody& p, const SymBody& q, double tol) {
    const int d = p.dim();
    const Mat& A = p.shape();
    const Mat& B = q.shape();
    Eigen::SelfAdjointEigenSolver<Mat> ea(A), eb(B), ediff(A - B);
    const double upper = ediff.eigenvalues().cwiseAbs().maxCoeff() /
                         (std::sqrt(ea.eigenvalues().minCoeff()) + std::sqrt(eb.eigenvalues().minCoeff()));
    double best = 0.0;
    auto dirs = random_directions(d, 256, 12345u);
    for (int i = 0; i < d; ++i) dirs.push_back(ediff.eigenvectors().col(i));
    std::vector<std::pair<double, size_t>> scored;
    for (size_t i = 0; i < dirs.size(); ++i) scored.emplace_back(support_gap(p, q, dirs[i]), i);
    std::sort(scored.rbegin(), scored.rend());
    for (size_t k = 0; k < std::min<size_t>(8, scored.size()); ++k) {
        best = std::max(best, scored[k].first);
        if (upper - best <= tol) break;
        best = std::max(best, ascend_gap(p, q, dirs[scored[k].second], 400));
    }
    return {best, std::max(0.0, upper - best), false};
}

HausdorffValue hausdorff_sampled_ascent(const SymBody& p, const SymBody& q) {
    const int d = p.dim();
    auto dirs = random_directions(d, 2000, 777u);
    std::vector<std::pair<double, size_t>> scored;
    for (size_t i = 0; i < dirs.size(); ++i) scored.emplace_back(support_gap(p, q, dirs[i]), i);
    std::sort(scored.rbegin(), scored.rend());
    double best = scored.front().first;
    for (size_t k = 0; k < std::min<size_t>(16, scored.size()); ++k)
        best = std::max(best, ascend_gap(p, q, dirs[scored[k].second], 600));
    return {best, kInf, false};
}

// Centered Khachiyan ascent with Todd-Yildirim away steps on the weights of
// the representative vertices.
Mat mvee_shape(const Mat& V, double tol) {
    const Eigen::Index d = V.rows();
    const Eigen::Index m = V.cols();
    const double dd = static_cast<double>(d);
    Vec u = Vec::Constant(m, 1.0 / static_cast<double>(m));
    Mat X(d, d);
    const int max_iter = 2000000;
    for (int it = 0; it < max_iter; ++it) {
        X = V * u.asDiagonal() * V.transpose();
        const Eigen::LDLT<Mat> ldlt(X);
        if (ldlt.info() != Eigen::Success) throw CorruptBody("degenerate vertex set in Loewner computation");
        const Mat G = ldlt.solve(V);
        const Vec g = (V.cwiseProduct(G)).colwise().sum().transpose();

        Eigen::Index jp, jm = -1;
        const double gp = g.maxCoeff(&jp);
        double gm = kInf;
        for (Eigen::Index j = 0; j < m; ++j)
            if (u(j) > 0 && g(j) < gm) {
                gm = g(j);
                jm = j;
            }
        if (gp <= dd * (1.0 + tol) && gm >= dd * (1.0 - tol)) break;

        if (gp - dd >= dd - gm) {
            const double tau = (gp - dd) / (dd * (gp - 1.0));
            u *= (1.0 - tau);
            u(jp) += tau;
        } else {
            const double floor_tau = -u(jm) / (1.0 - u(jm));
            double tau = gm > 1.0 ? (gm - dd) / (dd * (gm - 1.0)) : floor_tau;
            const bool drop = tau <= floor_tau;
            tau = std::max(tau, floor_tau);
            u *= (1.0 - tau);
            u(jm) += tau;
            if (drop) u(jm) = 0.0;
        }
    }
    Mat M = dd * X;
    M = 0.5 * (M + M.transpose());
    const Mat Minv_V = M.ldlt().solve(V);
    const double s = (V.cwiseProduct(Minv_V)).colwise().sum().maxCoeff();
    if (s > 1.0) M *= s;
    return M;
}

Mat polar_vertices_bruteforce(const Mat& V, double max_bases) {
    const int d = static_cast<int>(V.rows());
    const int m = static_cast<int>(V.cols());
    double count = std::pow(2.0, d - 1);
    for (int i = 0; i < d; ++i) count *= static_cast<double>(m - i) / (i + 1);
    if (count > max_bases)
        throw Unsupported("polar vertex enumeration would need " + std::to_string(count) + " bases");

    const double tol = 1e-9;
    std::vector<Vec> found;
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    Mat A(d, d);
    Vec rhs(d);
    for (;;) {
        for (int i = 0; i < d; ++i) A.row(i) = V.col(idx[i]).transpose();
        Eigen::FullPivLU<Mat> lu(A);
        if (lu.rank() == d) {
            for (long mask = 0; mask < (1L << (d - 1)); ++mask) {
                rhs(0) = 1.0;
                for (int i = 1; i < d; ++i) rhs(i) = ((mask >> (i - 1)) & 1) ? -1.0 : 1.0;
                const Vec y = lu.solve(rhs);
                if ((V.transpose() * y).cwiseAbs().maxCoeff() <= 1.0 + tol) found.push_back(y);
            }
        }
        int k = d - 1;
        while (k >= 0 && idx[k] == m - d + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int i = k + 1; i < d; ++i) idx[i] = idx[i - 1] + 1;
    }
    Mat out(d, static_cast<Eigen::Index>(found.size()));
    for (size_t i = 0; i < found.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = found[i];
    return dedupe_columns(out, 1e-9);
}

}  // namespace

GaugeValue gauge(const SymBody& body, const Vec& x, double tol) {
    require_dim(x.size(), body.dim(), "gauge");
    GaugeValue out;
    if (body.is_ellipsoid()) {
        const Vec Mx = body.shape_inverse() * x;
        out.value = std::sqrt(std::max(0.0, x.dot(Mx)));
        if (out.value > 0) out.certificate = Mx / out.value;
        return out;
    }
    const GaugeLp lp = solve_gauge_lp(body.vertices(), x, tol);
    out.value = lp.value;
    out.certificate = lp.dual;
    return out;
}

double support(const SymBody& body, const Vec& u) {
    require_dim(u.size(), body.dim(), "support");
    return support_grad(body, u, nullptr);
}

bool membership(const SymBody& body, const Vec& x, double tol) {
    if (!(tol > 0)) throw InvalidArgument("membership tolerance must be positive");
    return gauge(body, x).value <= 1.0 + tol;
}

Mat polar_vertices(const SymBody& body, double max_bases) {
    const Mat& V = body.vertices();
    if (V.rows() <= 3) return symmetric_hull_facets(V);
    return polar_vertices_bruteforce(V, max_bases);
}

SymBody polar(const SymBody& body) {
    if (body.is_ellipsoid()) return SymBody::ellipsoid(body.shape_inverse());
    if (body.dim() > 3)
        throw Unsupported("polar of a polytope is only available in dimension <= 3, got " +
                          std::to_string(body.dim()));
    return SymBody::polytope(symmetric_hull_facets(body.vertices()), SymBody::Prune::No);
}

double dist_to_hull(const Vec& x, const SymBody& body, double tol) {
    if (!body.is_polytope()) throw Unsupported("dist_to_hull requires a polytope");
    return kernels::dist_to_hull(x, body.vertices(), tol);
}

HausdorffValue hausdorff(const SymBody& p, const SymBody& q, double tol) {
    require_dim(q.dim(), p.dim(), "hausdorff");
    if (p.identical(q)) return {0.0, 0.0, true};
    if (p.is_polytope() && q.is_polytope()) {
        const double a = kernels::parallel::max_dist_to_hull(p.vertices(), q.vertices(), 1e-9);
        const double b = kernels::parallel::max_dist_to_hull(q.vertices(), p.vertices(), 1e-9);
        return {std::max(a, b), 0.0, true};
    }
    if (p.dim() == 1) return {std::abs(outradius(p) - outradius(q)), 0.0, true};
    if (p.dim() == 2) return hausdorff_planar(p, q, tol);
    if (p.is_ellipsoid() && q.is_ellipsoid()) return hausdorff_ellipsoids(p, q, tol);
    return hausdorff_sampled_ascent(p, q);
}

double hausdorff_sampled(const SymBody& p, const SymBody& q, int samples, unsigned seed) {
    require_dim(q.dim(), p.dim(), "hausdorff_sampled");
    double best = 0.0;
    for (const Vec& u : random_directions(p.dim(), samples, seed)) best = std::max(best, support_gap(p, q, u));
    return best;
}

SymBody loewner(const SymBody& body, double rel_tol) {
    if (body.is_ellipsoid()) return body;
    return SymBody::ellipsoid(mvee_shape(body.vertices(), rel_tol));
}

double outradius(const SymBody& body) {
    if (body.is_polytope()) return body.vertices().colwise().norm().maxCoeff();
    return std::sqrt(Eigen::SelfAdjointEigenSolver<Mat>(body.shape()).eigenvalues().maxCoeff());
}

SymBody minkowski_combo(const SymBody& p, const SymBody& q, double t) {
    if (!p.is_polytope() || !q.is_polytope())
        throw Unsupported("Minkowski combinations are only formed between polytopes");
    require_dim(q.dim(), p.dim(), "minkowski_combo");
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("minkowski_combo: t must lie in [0,1]");
    if (t == 0.0) return q;
    if (t == 1.0) return p;
    const Mat& A = p.vertices();
    const Mat& B = q.vertices();
    Mat cand(p.dim(), 2 * A.cols() * B.cols());
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < A.cols(); ++i)
        for (Eigen::Index j = 0; j < B.cols(); ++j) {
            cand.col(c++) = t * A.col(i) + (1.0 - t) * B.col(j);
            cand.col(c++) = t * A.col(i) - (1.0 - t) * B.col(j);
        }
    return SymBody::polytope(cand);
}

double inclusion_factor(const SymBody& a, const SymBody& b, double tol) {
    require_dim(b.dim(), a.dim(), "inclusion_factor");
    if (a.is_polytope()) {
        if (b.is_ellipsoid()) {
            const Mat& V = a.vertices();
            return std::sqrt((V.cwiseProduct(b.shape_inverse() * V)).colwise().sum().maxCoeff());
        }
        return kernels::parallel::gauges(b.vertices(), a.vertices(), tol).maxCoeff();
    }
    if (b.is_ellipsoid()) {
        // sqrt of the largest generalized eigenvalue of (M_a, M_b)
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(a.shape(), b.shape());
        return std::sqrt(ges.eigenvalues().maxCoeff());
    }
    // max over the ellipsoid of a polytope gauge = max over polar vertices y
    // of the ellipsoid's support at y
    const Mat Y = polar_vertices(b);
    return std::sqrt((Y.cwiseProduct(a.shape() * Y)).colwise().sum().maxCoeff());
}

SymBody linear_image(const Mat& A, const SymBody& body) {
    require_dim(A.cols(), body.dim(), "linear_image");
    if (body.is_polytope()) return SymBody::polytope(A * body.vertices(), SymBody::Prune::No);
    Mat M = A * body.shape() * A.transpose();
    return SymBody::ellipsoid(0.5 * (M + M.transpose()));
}

BallApprox ball_approximation(int dim, int resolution_2d, int icosphere_level) {
    if (dim == 1) return {SymBody::cross_polytope(1), 0.0, 1};
    if (dim == 2) {
        if (resolution_2d < 4 || resolution_2d % 2) throw InvalidArgument("2D ball resolution must be even and >= 4");
        const int reps = resolution_2d / 2;
        Mat v(2, reps);
        for (int k = 0; k < reps; ++k) {
            const double th = 2.0 * std::numbers::pi * k / resolution_2d;
            v(0, k) = std::cos(th);
            v(1, k) = std::sin(th);
        }
        return {SymBody::polytope(v, SymBody::Prune::No), 1.0 - std::cos(std::numbers::pi / resolution_2d),
                resolution_2d};
    }
    if (dim == 3) {
        const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
        std::vector<Eigen::Vector3d> pts = {
            {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
            {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
        for (auto& p : pts) p.normalize();
        std::vector<std::array<int, 3>> faces = {
            {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
            {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
            {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
        for (int level = 0; level < icosphere_level; ++level) {
            std::map<std::pair<int, int>, int> mid;
            auto midpoint = [&](int a, int b) {
                const auto key = std::minmax(a, b);
                auto it = mid.find(key);
                if (it != mid.end()) return it->second;
                pts.push_back((pts[a] + pts[b]).normalized());
                const int id = static_cast<int>(pts.size()) - 1;
                mid.emplace(key, id);
                return id;
            };
            std::vector<std::array<int, 3>> next;
            for (const auto& f : faces) {
                const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
                next.push_back({f[0], a, c});
                next.push_back({f[1], b, a});
                next.push_back({f[2], c, b});
                next.push_back({a, b, c});
            }
            faces = std::move(next);
        }
        double inner = 1.0;
        for (const auto& f : faces) {
            const Eigen::Vector3d n = (pts[f[1]] - pts[f[0]]).cross(pts[f[2]] - pts[f[0]]).normalized();
            inner = std::min(inner, std::abs(n.dot(pts[f[0]])));
        }
        Mat v(3, static_cast<Eigen::Index>(pts.size()));
        for (size_t i = 0; i < pts.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = pts[i];
        return {SymBody::polytope(v, SymBody::Prune::No), 1.0 - inner, static_cast<int>(faces.size())};
    }
    throw Unsupported("ball approximation is only available in dimensions 1-3");
}

}  // namespace tbody

namespace tbody {

double max_gauge_on_sphere(const SymBody& body, int samples, unsigned seed) {
    const auto dirs = random_directions(body.dim(), samples, seed);
    std::vector<std::pair<double, size_t>> scored;
    for (size_t i = 0; i < dirs.size(); ++i) scored.emplace_back(gauge(body, dirs[i]).value, i);
    std::sort(scored.rbegin(), scored.rend());
    double best = scored.front().first;
    for (size_t k = 0; k < std::min<size_t>(8, scored.size()); ++k) {
        Vec u = dirs[scored[k].second];
        double f = scored[k].first;
        double step = 0.2;
        for (int it = 0; it < 300 && step > 1e-12; ++it) {
            const GaugeValue g = gauge(body, u);
            Vec grad = g.certificate.value_or(Vec::Zero(u.size()));
            grad -= grad.dot(u) * u;
            if (grad.norm() <= 1e-15) break;
            const Vec cand = (u + step * grad.normalized()).normalized();
            const double fc = gauge(body, cand).value;
            if (fc > f) {
                u = cand;
                f = fc;
                step *= 1.5;
            } else {
                step *= 0.5;
            }
        }
        best = std::max(best, f);
    }
    return best;
}

double min_support_on_sphere(const SymBody& body, int samples, unsigned seed) {
    const auto dirs = random_directions(body.dim(), samples, seed);
    std::vector<std::pair<double, size_t>> scored;
    for (size_t i = 0; i < dirs.size(); ++i) scored.emplace_back(support(body, dirs[i]), i);
    std::sort(scored.begin(), scored.end());
    double best = scored.front().first;
    for (size_t k = 0; k < std::min<size_t>(8, scored.size()); ++k) {
        Vec u = dirs[scored[k].second];
        double f = scored[k].first;
        double step = 0.2;
        for (int it = 0; it < 300 && step > 1e-12; ++it) {
            Vec grad;
            support_grad(body, u, &grad);
            grad -= grad.dot(u) * u;
            if (grad.norm() <= 1e-15) break;
            const Vec cand = (u - step * grad.normalized()).normalized();
            const double fc = support(body, cand);
            if (fc < f) {
                u = cand;
                f = fc;
                step *= 1.5;
            } else {
                step *= 0.5;
            }
        }
        best = std::min(best, f);
    }
    return best;
}

double inradius_lower_bound(const SymBody& body, int frames, unsigned seed) {
    const int d = body.dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    double best = 0.0;
    for (int f = 0; f < std::max(1, frames); ++f) {
        Mat B = Mat::Identity(d, d);
        if (f > 0) {
            Mat G(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) G(i, j) = nd(rng);
            B = Eigen::HouseholderQR<Mat>(G).householderQ();
        }
        double smin = kInf;
        for (int k = 0; k < d; ++k) smin = std::min(smin, 1.0 / gauge(body, B.col(k)).value);
        best = std::max(best, smin / std::sqrt(static_cast<double>(d)));
    }
    return best;
}

}  // namespace tbody
