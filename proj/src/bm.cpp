#include "tbody/bm.hpp"

#include "tbody/convex.hpp"
#include "tbody/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

namespace tbody {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Restarts run in batches of this size; the search stops after a batch once
// lambda is within kStop of 1. Fixed so results do not depend on threads.
constexpr int kBatch = 4;
constexpr double kStop = 1e-9;

struct Combo {
    std::vector<int> sigma;
    std::vector<bool> reflect;  // per factor, planar factors only
};

std::vector<Combo> enumerate_combos(const TensorShape& shape) {
    const int l = shape.order();
    std::vector<int> perm(static_cast<size_t>(l));
    for (int k = 0; k < l; ++k) perm[static_cast<size_t>(k)] = k;
    std::vector<std::vector<int>> perms;
    do {
        bool ok = true;
        for (int k = 0; k < l; ++k) ok = ok && shape.dim(perm[static_cast<size_t>(k)]) == shape.dim(k);
        if (ok) perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<int> planar;
    for (int k = 0; k < l; ++k)
        if (shape.dim(k) == 2) planar.push_back(k);
    std::vector<Combo> out;
    for (const auto& s : perms)
        for (unsigned mask = 0; mask < (1u << planar.size()); ++mask) {
            Combo c{s, std::vector<bool>(static_cast<size_t>(l), false)};
            for (size_t b = 0; b < planar.size(); ++b)
                if (mask & (1u << b)) c.reflect[static_cast<size_t>(planar[b])] = true;
            out.push_back(std::move(c));
        }
    return out;
}

int param_count(const TensorShape& shape) {
    int p = 0;
    for (int d : shape.dims()) p += d == 2 ? 1 : 3;
    return p;
}

GlTensorElement orthogonal_element(const TensorShape& shape, const Combo& c, const Vec& x) {
    std::vector<Mat> f;
    Eigen::Index o = 0;
    for (int k = 0; k < shape.order(); ++k) {
        if (shape.dim(k) == 2) {
            const double th = x(o++);
            Mat r(2, 2);
            r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
            if (c.reflect[static_cast<size_t>(k)]) r.col(1) *= -1.0;
            f.push_back(r);
        } else {
            const Eigen::Vector3d w = x.segment(o, 3);
            o += 3;
            const double a = w.norm();
            f.push_back(a > 0 ? Mat(Eigen::AngleAxisd(a, w / a).toRotationMatrix()) : Mat(Mat::Identity(3, 3)));
        }
    }
    return GlTensorElement::make(shape, c.sigma, std::move(f));
}

// Search coordinates of an orthogonal factor list; 3D factors with det -1
// are negated, which leaves symmetric bodies unchanged.
Vec params_of(const TensorShape& shape, const std::vector<Mat>& f, std::vector<bool>& reflect) {
    Vec x(param_count(shape));
    Eigen::Index o = 0;
    reflect.assign(f.size(), false);
    for (int k = 0; k < shape.order(); ++k) {
        Mat u = f[static_cast<size_t>(k)];
        if (shape.dim(k) == 2) {
            if (u.determinant() < 0) {
                reflect[static_cast<size_t>(k)] = true;
                u.col(1) *= -1.0;
            }
            x(o++) = std::atan2(u(1, 0), u(0, 0));
        } else {
            if (u.determinant() < 0) u = -u;
            const Eigen::AngleAxisd aa{Eigen::Matrix3d(u)};
            x.segment(o, 3) = aa.angle() * aa.axis();
            o += 3;
        }
    }
    return x;
}

struct Start {
    size_t combo;
    Vec x;
};

// Order-two polytope pairs: an orthogonal U1 (x) U2 maps a vertex matrix V to
// U1 V U2^T, preserving singular values. Pairing a distinctive vertex of P'
// with the vertices of Q' of closest spectrum and aligning singular vectors
// (all sign choices) gives exact candidates for planted orbits.
std::vector<Start> matching_starts(const SymBody& p, const SymBody& q, const TensorShape& shape,
                                   const std::vector<Combo>& combos) {
    std::vector<Start> out;
    if (shape.order() != 2 || !p.is_polytope() || !q.is_polytope()) return out;
    const int d1 = shape.dim(0), d2 = shape.dim(1), r = std::min(d1, d2);
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    auto as_matrix = [&](const Vec& v) { return Mat(Eigen::Map<const RowMat>(v.data(), d1, d2)); };

    const Mat& VQ = q.vertices();
    std::vector<Vec> spec_q;
    for (Eigen::Index j = 0; j < VQ.cols(); ++j)
        spec_q.push_back(Eigen::JacobiSVD<Mat>(as_matrix(VQ.col(j))).singularValues());

    for (size_t c = 0; c < combos.size(); ++c) {
        const GlTensorElement perm = GlTensorElement::permutation(shape, combos[c].sigma);
        const Mat VP = perm.apply_columns(p.vertices());
        // anchors: vertices with the best separated spectra
        std::vector<std::pair<double, Eigen::Index>> sep;
        for (Eigen::Index j = 0; j < VP.cols(); ++j) {
            const Vec sv = Eigen::JacobiSVD<Mat>(as_matrix(VP.col(j))).singularValues();
            double gap = sv(r - 1);
            for (int k = 0; k + 1 < r; ++k) gap = std::min(gap, sv(k) - sv(k + 1));
            sep.push_back({-gap / std::max(sv(0), 1e-300), j});
        }
        std::sort(sep.begin(), sep.end());
        for (size_t a = 0; a < std::min<size_t>(2, sep.size()); ++a) {
            const Eigen::JacobiSVD<Mat> sp(as_matrix(VP.col(sep[a].second)), Eigen::ComputeFullU | Eigen::ComputeFullV);
            std::vector<std::pair<double, Eigen::Index>> near;
            for (size_t j = 0; j < spec_q.size(); ++j)
                near.push_back({(spec_q[j] - sp.singularValues()).norm(), static_cast<Eigen::Index>(j)});
            std::sort(near.begin(), near.end());
            for (size_t b = 0; b < std::min<size_t>(4, near.size()); ++b) {
                const Eigen::JacobiSVD<Mat> sq(as_matrix(VQ.col(near[b].second)),
                                               Eigen::ComputeFullU | Eigen::ComputeFullV);
                for (unsigned mask = 0; mask < (1u << (r - 1)); ++mask) {
                    Mat S = Mat::Identity(d1, d1), T = Mat::Identity(d2, d2);
                    for (int k = 1; k < r; ++k)
                        if (mask & (1u << (k - 1))) {
                            S(k, k) = -1.0;
                            T(k, k) = -1.0;
                        }
                    const Mat u1 = sq.matrixU() * S * sp.matrixU().transpose();
                    const Mat u2 = sq.matrixV() * T * sp.matrixV().transpose();
                    std::vector<bool> refl;
                    const Vec x = params_of(shape, {u1, u2}, refl);
                    for (size_t cc = 0; cc < combos.size(); ++cc)
                        if (combos[cc].sigma == combos[c].sigma && combos[cc].reflect == refl) out.push_back({cc, x});
                }
            }
        }
    }
    return out;
}

double max_gauge(const SymBody& b, const Mat& X) {
    if (b.is_polytope()) return kernels::serial::gauges(b.vertices(), X, 1e-9).maxCoeff();
    return std::sqrt((X.cwiseProduct(b.shape_inverse() * X)).colwise().sum().maxCoeff());
}

// lambda(U) for Q' inside c U P' inside lambda Q', c folded in.
double objective(const SymBody& p, const SymBody& q, const GlTensorElement& u) {
    if (p.is_polytope() && q.is_polytope()) {
        const Mat UP = u.apply_columns(p.vertices());
        return kernels::serial::gauges(UP, q.vertices(), 1e-9).maxCoeff() * max_gauge(q, UP);
    }
    const SymBody up = act_on_body(u, p);
    return inclusion_factor(q, up) * inclusion_factor(up, q);
}

struct Candidate {
    double value = kInf;
    std::optional<GlTensorElement> element;
};

bool better(const Candidate& a, const Candidate& b) {
    if (!b.element) return a.element.has_value();
    if (!a.element) return false;
    if (a.value != b.value) return a.value < b.value;
    return element_less(*a.element, *b.element);
}

Candidate run_restart(const SymBody& p, const SymBody& q, const TensorShape& shape, const std::vector<Combo>& combos,
                      const std::vector<Start>& extra, int restart, const BmOptions& opt) {
    const int np = param_count(shape);
    std::seed_seq ss{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                     static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(ss);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);

    auto random_point = [&] {
        Vec x(np);
        for (Eigen::Index k = 0; k < np; ++k) x(k) = ang(rng);
        return x;
    };

    Vec x = Vec::Zero(np);
    size_t combo = 0;
    double f = kInf;
    const int starts = restart == 0 ? 1 : 4;
    for (int s = 0; s < starts; ++s) {
        const Vec cand = restart == 0 ? Vec(Vec::Zero(np)) : random_point();
        for (size_t c = 0; c < combos.size(); ++c) {
            const double v = objective(p, q, orthogonal_element(shape, combos[c], cand));
            if (v < f) {
                f = v;
                x = cand;
                combo = c;
            }
        }
    }
    if (restart == 0)
        for (const Start& st : extra) {
            const double v = objective(p, q, orthogonal_element(shape, combos[st.combo], st.x));
            if (v < f) {
                f = v;
                x = st.x;
                combo = st.combo;
            }
        }

    double h = 0.5;
    for (int it = 0; it < opt.budget.steps && h > 1e-11 && f > 1.0 + 1e-13; ++it) {
        Mat B(np, np);
        for (Eigen::Index i = 0; i < B.size(); ++i) B.data()[i] = nd(rng);
        const Mat Qm = Eigen::HouseholderQR<Mat>(B).householderQ();
        bool improved = false;
        for (Eigen::Index k = 0; k < np && !improved; ++k)
            for (double sgn : {1.0, -1.0}) {
                const Vec cand = x + sgn * h * Qm.col(k);
                const double v = objective(p, q, orthogonal_element(shape, combos[combo], cand));
                if (v < f) {
                    f = v;
                    x = cand;
                    improved = true;
                    break;
                }
            }
        h = improved ? std::min(1.0, 2.0 * h) : 0.5 * h;
    }
    return {f, orthogonal_element(shape, combos[combo], x)};
}

}  // namespace

bool element_less(const GlTensorElement& a, const GlTensorElement& b) {
    if (a.sigma() != b.sigma()) return a.sigma() < b.sigma();
    for (size_t i = 0; i < a.factors().size(); ++i) {
        const Mat& x = a.factors()[i];
        const Mat& y = b.factors()[i];
        for (Eigen::Index r = 0; r < x.rows(); ++r)
            for (Eigen::Index c = 0; c < x.cols(); ++c)
                if (x(r, c) != y(r, c)) return x(r, c) < y(r, c);
    }
    return false;
}

BmCertificate certify(const SymBody& p, const SymBody& q, const GlTensorElement& t) {
    require_dim(q.dim(), p.dim(), "certify");
    const double s1 = inclusion_factor(q, act_on_body(t, p));
    const GlTensorElement ts = compose(GlTensorElement::scalar(t.shape(), s1), t);
    const SymBody tp = act_on_body(ts, p);
    BmCertificate c{1.0, ts, inclusion_factor(q, tp), inclusion_factor(tp, q), {}, 0};
    c.lambda = std::max(1.0, c.slack_inner * c.slack_outer);
    return c;
}

BmCertificate bm_upper(const SymBody& p, const SymBody& q, const TensorShape& shape, const BmOptions& opt) {
    require_dim(p.dim(), shape.total(), "bm_upper");
    require_dim(q.dim(), shape.total(), "bm_upper");
    if (opt.budget.restarts < 1 || opt.budget.steps < 0) throw InvalidArgument("invalid search budget");
    const Retraction rp = retract(p, shape, opt.tensorial);
    const Retraction rq = retract(q, shape, opt.tensorial);
    const std::vector<Combo> combos = enumerate_combos(shape);
    const std::vector<Start> extra = matching_starts(rp.body, rq.body, shape, combos);

    Candidate best;
    for (int first = 0; first < opt.budget.restarts; first += kBatch) {
        const int n = std::min(kBatch, opt.budget.restarts - first);
        std::vector<Candidate> found(static_cast<size_t>(n));
        std::vector<std::exception_ptr> errs(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < n; ++k) {
            try {
                found[static_cast<size_t>(k)] = run_restart(rp.body, rq.body, shape, combos, extra, first + k, opt);
            } catch (...) {
                errs[static_cast<size_t>(k)] = std::current_exception();
            }
        }
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
        for (const auto& c : found)
            if (better(c, best)) best = c;
        if (best.value <= 1.0 + kStop) break;
    }

    // Q = xi_Q Q', P = xi_P P': Q inside xi_Q U xi_P^{-1} P up to scale.
    const GlTensorElement t = compose(rq.transform, compose(*best.element, inverse(rp.transform)));
    BmCertificate cert = certify(p, q, t);
    cert.budget = opt.budget;
    cert.seed = opt.seed;
    return cert;
}

OrbitResult same_orbit(const SymBody& p, const SymBody& q, const TensorShape& shape, double tol,
                       const BmOptions& opt) {
    BmCertificate c = bm_upper(p, q, shape, opt);
    const double l = c.lambda;
    return {l <= 1.0 + tol, l, std::move(c)};
}

TransporterReport transporter_diagnostic(const SymBody& p, const SymBody& c, const TensorShape& shape, double eps,
                                         double lambda, int trials, std::uint64_t seed) {
    require_dim(p.dim(), shape.total(), "transporter_diagnostic");
    require_dim(c.dim(), shape.total(), "transporter_diagnostic");
    if (!(eps > 0) || !(lambda > 0) || trials < 0) throw InvalidArgument("eps and lambda must be positive");
    const double gp = max_gauge_on_sphere(p, 400, static_cast<unsigned>(seed));
    if (gp > 1.0 / (2.0 * eps) * (1.0 + 1e-9))
        throw Error("precondition_violated", "2 eps B_2 is not inside P (max gauge on the sphere " +
                                                 std::to_string(gp) + " > " + std::to_string(1.0 / (2.0 * eps)) + ")");
    const double gc = max_gauge_on_sphere(c, 400, static_cast<unsigned>(seed));
    if (gc > 1.0 / lambda * (1.0 + 1e-9))
        throw Error("precondition_violated", "lambda B_2 is not inside C (max gauge on the sphere " +
                                                 std::to_string(gc) + " > " + std::to_string(1.0 / lambda) + ")");

    TransporterReport r;
    r.trials = trials;
    r.bound = (outradius(c) + lambda) / eps;
    r.identity_norm = GlTensorElement::identity(shape).operator_norm();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const std::vector<Combo> combos = enumerate_combos(shape);

    auto expm_sym = [](const Mat& s) {
        Eigen::SelfAdjointEigenSolver<Mat> es(s);
        return Mat(es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                   es.eigenvectors().transpose());
    };

    for (int n = 0; n < trials; ++n) {
        // Q' within eps of P
        SymBody qn = p;
        const double amp = eps * ud(rng);
        if (p.is_polytope()) {
            Mat V = p.vertices();
            for (Eigen::Index j = 0; j < V.cols(); ++j) {
                Vec z(V.rows());
                for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = nd(rng);
                V.col(j) += amp * ud(rng) * z.normalized();
            }
            qn = SymBody::polytope(V, SymBody::Prune::No);
        } else {
            Mat S(p.dim(), p.dim());
            for (Eigen::Index i = 0; i < S.size(); ++i) S.data()[i] = nd(rng);
            qn = linear_image(expm_sym(0.5 * amp * (S + S.transpose()) / std::sqrt(double(p.dim()))), p);
        }
        if (!(hausdorff(p, qn).value < eps)) continue;

        // T = c (x) exp(a K_i) exp(a S_i), a random permutation
        const double a = ud(rng);
        std::vector<Mat> f;
        for (int d : shape.dims()) {
            Mat K(d, d), S(d, d);
            for (Eigen::Index i = 0; i < K.size(); ++i) K.data()[i] = nd(rng);
            for (Eigen::Index i = 0; i < S.size(); ++i) S.data()[i] = nd(rng);
            const Mat skew = 0.5 * (K - K.transpose());
            const Mat I = Mat::Identity(d, d);
            const Mat rot = (I - a * skew).partialPivLu().solve(I + a * skew);  // Cayley
            f.push_back(rot * expm_sym(0.25 * a * (S + S.transpose())));
        }
        f.back() *= std::exp(0.5 * a * nd(rng));
        const Combo& cb = combos[static_cast<size_t>(rng() % combos.size())];
        const GlTensorElement t = GlTensorElement::make(shape, cb.sigma, std::move(f));
        if (!(hausdorff(act_on_body(t, qn), c).value < lambda)) continue;
        ++r.accepted;
        const double nrm = t.operator_norm();
        r.max_norm = std::max(r.max_norm, nrm);
        if (nrm > r.bound) ++r.violations;
    }
    return r;
}

}  // namespace tbody
