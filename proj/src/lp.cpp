#include "tbody/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tbody {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kRefactorEvery = 24;

struct Basis {
    std::vector<int> col;
    std::vector<double> sign;
};

Mat basis_matrix(const Mat& V, const Basis& b) {
    Mat B(V.rows(), V.rows());
    for (Eigen::Index i = 0; i < V.rows(); ++i) B.col(i) = b.sign[i] * V.col(b.col[i]);
    return B;
}

}  // namespace

GaugeLp solve_gauge_lp(const Mat& V, const Vec& x, double tol) {
    const Eigen::Index d = V.rows();
    const Eigen::Index m = V.cols();
    require_dim(x.size(), d, "gauge LP");

    GaugeLp out;
    out.dual = Vec::Zero(d);
    out.coeffs = Vec::Zero(m);
    if (x.isZero(0.0)) return out;

    Eigen::ColPivHouseholderQR<Mat> qr(V);
    qr.setThreshold(1e-10);
    if (qr.rank() < d) throw CorruptBody("vertex set does not span the ambient space");

    Basis basis;
    basis.col.resize(d);
    basis.sign.assign(d, 1.0);
    std::vector<char> in_basis(m, 0);
    for (Eigen::Index i = 0; i < d; ++i) {
        basis.col[i] = static_cast<int>(qr.colsPermutation().indices()(i));
        in_basis[basis.col[i]] = 1;
    }

    Mat Binv = basis_matrix(V, basis).partialPivLu().inverse();
    Vec xB = Binv * x;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (xB(i) < 0) {
            basis.sign[i] = -1.0;
            xB(i) = -xB(i);
            Binv.row(i) *= -1.0;
        }
    }

    // rows of B^{-1} B_0 start as the identity, so the lexicographic ratio test
    // below keeps every row lex-positive
    const Mat B0 = basis_matrix(V, basis);
    const Vec ones = Vec::Ones(d);
    const int max_pivots = static_cast<int>(50 * (m + d));
    int degenerate_run = 0;
    int since_refactor = 0;

    for (;;) {
        const Vec y = Binv.transpose() * ones;
        const Vec r = V.transpose() * y;

        // Dantzig pricing; Bland after a run of degenerate pivots.
        const bool bland = degenerate_run > 2 * d;
        Eigen::Index enter = -1;
        double best = 1.0 + tol;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (in_basis[j]) continue;
            const double a = std::abs(r(j));
            if (a > best) {
                enter = j;
                if (bland) break;
                best = a;
            }
        }
        if (enter < 0) {
            // product-form updates drift; only trust optimality on a fresh inverse
            if (since_refactor > 0) {
                Binv = basis_matrix(V, basis).partialPivLu().inverse();
                xB = (Binv * x).cwiseMax(0.0);
                since_refactor = 0;
                continue;
            }
            out.dual = y;
            break;
        }
        const double s = r(enter) > 0 ? 1.0 : -1.0;
        const Vec delta = Binv * (s * V.col(enter));

        // Lexicographic ratio test: ties in x_B / delta are broken by the rows
        // of B^{-1} B_0 / delta, which rules out cycling on degenerate vertices.
        Eigen::Index leave = -1;
        double theta = std::numeric_limits<double>::infinity();
        const double xscale = 1.0 + xB.cwiseAbs().maxCoeff();
        std::vector<Eigen::Index> ties;
        for (Eigen::Index i = 0; i < d; ++i) {
            if (delta(i) <= kPivotTol) continue;
            const double t = xB(i) / delta(i);
            if (t < theta - 1e-13 * xscale) {
                theta = t;
                ties.assign(1, i);
            } else if (t <= theta + 1e-13 * xscale) {
                ties.push_back(i);
                theta = std::min(theta, t);
            }
        }
        if (ties.empty()) throw CorruptBody("gauge LP unbounded: corrupt vertex data");
        if (ties.size() > 1) {
            Mat lex(static_cast<Eigen::Index>(ties.size()), d);
            for (size_t t = 0; t < ties.size(); ++t)
                lex.row(static_cast<Eigen::Index>(t)) = (Binv.row(ties[t]) * B0) / delta(ties[t]);
            std::vector<Eigen::Index> alive(ties.size());
            for (size_t t = 0; t < ties.size(); ++t) alive[t] = static_cast<Eigen::Index>(t);
            for (Eigen::Index k = 0; alive.size() > 1 && k < d; ++k) {
                double lo = std::numeric_limits<double>::infinity();
                for (Eigen::Index t : alive) lo = std::min(lo, lex(t, k));
                std::vector<Eigen::Index> next;
                for (Eigen::Index t : alive)
                    if (lex(t, k) <= lo + 1e-12 * (1.0 + std::abs(lo))) next.push_back(t);
                alive.swap(next);
            }
            std::vector<Eigen::Index> kept;
            for (Eigen::Index t : alive) kept.push_back(ties[static_cast<size_t>(t)]);
            ties.swap(kept);
        }
        leave = ties.front();
        if (bland)
            for (Eigen::Index i : ties)
                if (basis.col[i] < basis.col[leave]) leave = i;
        theta = std::max(0.0, xB(leave) / delta(leave));

        degenerate_run = theta <= 1e-14 * xscale ? degenerate_run + 1 : 0;

        xB -= theta * delta;
        xB(leave) = theta;
        in_basis[basis.col[leave]] = 0;
        in_basis[enter] = 1;
        basis.col[leave] = static_cast<int>(enter);
        basis.sign[leave] = s;

        const double piv = delta(leave);
        Binv.row(leave) /= piv;
        for (Eigen::Index i = 0; i < d; ++i)
            if (i != leave && delta(i) != 0.0) Binv.row(i) -= delta(i) * Binv.row(leave);

        if (++since_refactor >= kRefactorEvery) {
            Binv = basis_matrix(V, basis).partialPivLu().inverse();
            xB = (Binv * x).cwiseMax(0.0);
            since_refactor = 0;
        }
        if (++out.pivots > max_pivots) throw CorruptBody("gauge LP failed to converge");
    }

    for (Eigen::Index i = 0; i < d; ++i) out.coeffs(basis.col[i]) = basis.sign[i] * xB(i);
    out.value = xB.sum();
    return out;
}

}  // namespace tbody

namespace tbody {

MinNormPoint min_norm_point(const Mat& P, double bracket_tol) {
    const Eigen::Index n = P.cols();
    if (n == 0) throw InvalidArgument("min_norm_point: empty atom set");

    const Vec norms = P.colwise().norm();
    const double scale = 1.0 + norms.maxCoeff();
    constexpr double kWeightTol = 1e-14;

    Eigen::Index k0;
    norms.minCoeff(&k0);
    std::vector<Eigen::Index> S{k0};
    Vec lambda = Vec::Ones(1);
    Vec x = P.col(k0);

    auto corral = [&](const std::vector<Eigen::Index>& idx) {
        Mat A(P.rows(), static_cast<Eigen::Index>(idx.size()));
        for (size_t i = 0; i < idx.size(); ++i) A.col(static_cast<Eigen::Index>(i)) = P.col(idx[i]);
        return A;
    };

    MinNormPoint out;
    const int max_major = static_cast<int>(10 * n + 100);
    for (int major = 0; major < max_major; ++major) {
        out.iterations = major;
        const double nx = x.norm();
        if (nx <= 1e-15 * scale) break;
        const Vec dots = P.transpose() * x;
        Eigen::Index j;
        const double dmin = dots.minCoeff(&j);
        if (nx - dmin / nx <= bracket_tol * scale) break;
        if (std::find(S.begin(), S.end(), j) != S.end()) break;
        S.push_back(j);
        lambda.conservativeResize(lambda.size() + 1);
        lambda(lambda.size() - 1) = 0.0;

        for (int minor = 0; minor < 10 * static_cast<int>(S.size()) + 10; ++minor) {
            const Mat A = corral(S);
            const Eigen::Index k = A.cols();
            Mat K(k + 1, k + 1);
            K.topLeftCorner(k, k) = A.transpose() * A;
            K.topRightCorner(k, 1).setOnes();
            K.bottomLeftCorner(1, k).setOnes();
            K(k, k) = 0.0;
            Vec rhs = Vec::Zero(k + 1);
            rhs(k) = 1.0;
            const Vec sol = K.completeOrthogonalDecomposition().solve(rhs);
            const Vec alpha = sol.head(k);

            if ((alpha.array() > kWeightTol).all()) {
                lambda = alpha / alpha.sum();
                break;
            }
            double theta = 1.0;
            for (Eigen::Index i = 0; i < k; ++i)
                if (alpha(i) <= kWeightTol) {
                    const double den = lambda(i) - alpha(i);
                    if (den > 0) theta = std::min(theta, lambda(i) / den);
                }
            lambda = lambda + theta * (alpha - lambda);
            std::vector<Eigen::Index> keep_idx;
            std::vector<double> keep_w;
            for (Eigen::Index i = 0; i < k; ++i)
                if (lambda(i) > kWeightTol) {
                    keep_idx.push_back(S[i]);
                    keep_w.push_back(lambda(i));
                }
            if (keep_idx.empty()) {
                keep_idx.push_back(S.back());
                keep_w.push_back(1.0);
            }
            S = keep_idx;
            lambda = Eigen::Map<Vec>(keep_w.data(), static_cast<Eigen::Index>(keep_w.size()));
            lambda /= lambda.sum();
        }
        x = corral(S) * lambda;
    }

    out.point = x;
    out.distance = x.norm();
    if (out.distance > 0) {
        const Vec dots = P.transpose() * (x / out.distance);
        out.lower_bound = std::max(0.0, dots.minCoeff());
    }
    return out;
}

}  // namespace tbody
