#include "tbody/tensorial.hpp"

#include "tbody/convex.hpp"
#include "tbody/hull.hpp"
#include "tbody/kernels.hpp"
#include "tbody/lp.hpp"

#include <cmath>
#include <exception>
#include <random>

namespace tbody {

namespace {

void check_shape(const SymBody& q, const TensorShape& shape) {
    require_dim(q.dim(), shape.total(), "tensor shape");
}

void check_small_factors(const TensorShape& shape) {
    for (int d : shape.dims())
        if (d > 3) throw Unsupported("factor dimension " + std::to_string(d) + " > 3 is not supported here");
}

// d x d_i matrix sending x to a^1 (x) .. x .. (x) a^l.
Mat lift_matrix(const TensorShape& shape, const std::vector<Vec>& a, int i) {
    const int di = shape.dim(i);
    Mat L(shape.total(), di);
    std::vector<Vec> xs = a;
    for (int j = 0; j < di; ++j) {
        xs[static_cast<size_t>(i)] = Vec::Unit(di, j);
        L.col(j) = kron_vec(xs, shape);
    }
    return L;
}

Mat sym_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

struct Cut {
    double value = 0.0;
    Vec normal;
};

// Gauges (with lifted dual certificates) at every column, in parallel.
std::vector<Cut> evaluate_cuts(const Mat& V, const Mat& L, const Mat& X) {
    std::vector<Cut> out(static_cast<size_t>(X.cols()));
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index k = 0; k < X.cols(); ++k) {
        try {
            const GaugeLp lp = solve_gauge_lp(V, L * X.col(k));
            out[static_cast<size_t>(k)] = {lp.value, L.transpose() * lp.dual};
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

SymBody polytope_section(const SymBody& q, const Mat& L, const TensorialOptions& opt) {
    const Mat& V = q.vertices();
    const Eigen::Index di = L.cols();

    Mat dirs(di, di + di * (di - 1));
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < di; ++j) dirs.col(c++) = Vec::Unit(di, j);
    for (Eigen::Index j = 0; j < di; ++j)
        for (Eigen::Index k = j + 1; k < di; ++k) {
            dirs.col(c++) = Vec::Unit(di, j) + Vec::Unit(di, k);
            dirs.col(c++) = Vec::Unit(di, j) - Vec::Unit(di, k);
        }
    dirs.conservativeResize(di, c);

    std::vector<Cut> first = evaluate_cuts(V, L, dirs);
    Mat W(di, static_cast<Eigen::Index>(first.size()));
    for (size_t k = 0; k < first.size(); ++k) W.col(static_cast<Eigen::Index>(k)) = first[k].normal;
    int evaluations = static_cast<int>(first.size());

    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    while (Eigen::ColPivHouseholderQR<Mat>(W).rank() < di) {
        Vec u(di);
        for (Eigen::Index k = 0; k < di; ++k) u(k) = nd(rng);
        const Cut cut = evaluate_cuts(V, L, u).front();
        W.conservativeResize(Eigen::NoChange, W.cols() + 1);
        W.col(W.cols() - 1) = cut.normal;
        if (++evaluations > opt.section_cap) throw CorruptBody("section body is unbounded");
    }

    for (;;) {
        W = dedupe_columns(W, 1e-12);
        const Mat P = symmetric_hull_facets(W);
        const std::vector<Cut> cuts = evaluate_cuts(V, L, P);
        evaluations += static_cast<int>(cuts.size());
        std::vector<Vec> fresh;
        for (const Cut& cut : cuts)
            if (cut.value > 1.0 + opt.section_tol) fresh.push_back(cut.normal);
        if (fresh.empty()) {
            Mat out(di, P.cols());
            for (Eigen::Index k = 0; k < P.cols(); ++k) out.col(k) = P.col(k) / cuts[static_cast<size_t>(k)].value;
            return SymBody::polytope(out);
        }
        if (evaluations > opt.section_cap)
            throw Error("section_not_converged", "section reconstruction exceeded " +
                                                     std::to_string(opt.section_cap) + " gauge evaluations");
        const Eigen::Index old = W.cols();
        W.conservativeResize(Eigen::NoChange, old + static_cast<Eigen::Index>(fresh.size()));
        for (size_t k = 0; k < fresh.size(); ++k) W.col(old + static_cast<Eigen::Index>(k)) = fresh[k];
    }
}

struct Slacks {
    double projective = 0.0;
    Vec projective_witness;
    double injective = 0.0;
    Vec injective_witness;
};

// (a) pi-product of the sections inside Q, (b) Q inside their injective product.
Slacks inclusion_slacks(const SymBody& q, const FactorTuple& sections) {
    Slacks s;
    std::vector<Mat> verts;
    for (const auto& f : sections) verts.push_back(f.vertices());
    const Mat X = kron_columns(verts);
    const Vec g = kernels::parallel::gauges(q.vertices(), X, 1e-9);
    Eigen::Index k;
    s.projective = g.maxCoeff(&k) - 1.0;
    s.projective_witness = X.col(k);

    const InjectiveProduct inj(sections);
    const Mat& V = q.vertices();
    s.injective = -1.0;
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
        const double e = inj.gauge(V.col(j)) - 1.0;
        if (e > s.injective) {
            s.injective = e;
            s.injective_witness = V.col(j);
        }
    }
    return s;
}

std::vector<Vec> canonical_anchor(const SymBody& q, const TensorShape& shape, double* lambda) {
    std::vector<Vec> a;
    for (int d : shape.dims()) a.push_back(Vec::Unit(d, 0));
    const double g = gauge(q, kron_vec(a, shape)).value;
    if (!(g > 0)) throw CorruptBody("gauge vanishes at e_1 (x) ... (x) e_1");
    a.back() /= g;
    if (lambda) *lambda = 1.0 / g;
    return a;
}

TensorialVerdict require_tensorial(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt) {
    TensorialVerdict v = is_tensorial(q, shape, opt);
    if (!v.tensorial) throw NotTensorial(std::move(v));
    return v;
}

}  // namespace

SymBody section_body(const SymBody& q, const TensorShape& shape, const std::vector<Vec>& anchor_factors, int i,
                     const TensorialOptions& opt) {
    check_shape(q, shape);
    if (static_cast<int>(anchor_factors.size()) != shape.order())
        throw InvalidArgument("anchor needs one factor per tensor position");
    if (i < 0 || i >= shape.order()) throw InvalidArgument("section index out of range");
    for (int k = 0; k < shape.order(); ++k) {
        require_dim(anchor_factors[static_cast<size_t>(k)].size(), shape.dim(k), "anchor factor");
        if (k != i && anchor_factors[static_cast<size_t>(k)].norm() == 0.0)
            throw InvalidArgument("anchor factor " + std::to_string(k) + " is zero");
    }
    const Mat L = lift_matrix(shape, anchor_factors, i);
    if (q.is_ellipsoid()) {
        const Mat N = L.transpose() * q.shape_inverse() * L;
        return SymBody::ellipsoid(Mat(0.5 * (N + N.transpose())).inverse());
    }
    if (shape.dim(i) > 3)
        throw Unsupported("polytope sections are reconstructed in dimension <= 3, got " +
                          std::to_string(shape.dim(i)));
    return polytope_section(q, L, opt);
}

SectionFamily canonical_sections(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt) {
    check_shape(q, shape);
    SectionFamily fam;
    fam.anchor_factors = canonical_anchor(q, shape, nullptr);
    fam.anchor = kron_vec(fam.anchor_factors, shape);
    for (int i = 0; i < shape.order(); ++i) fam.bodies.push_back(section_body(q, shape, fam.anchor_factors, i, opt));
    return fam;
}

std::string to_string(TensorialVerdict::Side side) {
    switch (side) {
        case TensorialVerdict::Side::None: return "none";
        case TensorialVerdict::Side::ProjectiveNotInside: return "projective_product_not_inside";
        case TensorialVerdict::Side::OutsideInjective: return "outside_injective_product";
        case TensorialVerdict::Side::KroneckerResidual: return "kronecker_residual";
    }
    return "unknown";
}

TensorialVerdict is_tensorial(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt) {
    check_shape(q, shape);
    TensorialVerdict v;
    if (q.is_ellipsoid()) {
        const KroneckerFactors k = nearest_kronecker(q.shape(), shape);
        v.violation = k.relative_residual;
        bool pd = true;
        for (const auto& f : k.factors) pd = pd && Eigen::SelfAdjointEigenSolver<Mat>(f).eigenvalues().minCoeff() > 0;
        v.tensorial = pd && v.violation <= opt.tol;
        v.marginal = v.violation > opt.tol && v.violation <= opt.marginal;
        if (v.tensorial)
            v.sections = canonical_sections(q, shape, opt);
        else
            v.side = TensorialVerdict::Side::KroneckerResidual;
        return v;
    }
    check_small_factors(shape);
    v.sections = canonical_sections(q, shape, opt);
    const Slacks s = inclusion_slacks(q, v.sections.bodies);
    v.projective_slack = s.projective;
    v.injective_slack = s.injective;
    v.violation = std::max({0.0, s.projective, s.injective});
    v.tensorial = v.violation <= opt.tol;
    v.marginal = v.violation > opt.tol && v.violation <= opt.marginal;
    if (s.projective >= s.injective) {
        v.witness = s.projective_witness;
        if (!v.tensorial) v.side = TensorialVerdict::Side::ProjectiveNotInside;
    } else {
        v.witness = s.injective_witness;
        if (!v.tensorial) v.side = TensorialVerdict::Side::OutsideInjective;
    }
    return v;
}

NotTensorial::NotTensorial(TensorialVerdict v)
    : Error("not_tensorial", "body is not tensorial: " + to_string(v.side) + " violated by " +
                                 std::to_string(v.violation)),
      verdict_(std::move(v)) {}

SymBody conv_otimes(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt) {
    check_small_factors(shape);
    const TensorialVerdict v = require_tensorial(q, shape, opt);
    if (q.is_polytope()) return projective_product(v.sections.bodies);
    FactorTuple approx;
    for (const auto& s : v.sections.bodies) {
        const BallApprox b = ball_approximation(s.dim(), opt.ball_resolution_2d, opt.ball_icosphere_level);
        approx.push_back(linear_image(sym_sqrt(s.shape()), b.body));
    }
    return projective_product(approx);
}

SymBody l_otimes(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt) {
    const TensorialVerdict v = require_tensorial(q, shape, opt);
    FactorTuple ells;
    for (const auto& s : v.sections.bodies) ells.push_back(loewner(s, opt.mvee_tol));
    return hilbert_product(ells);
}

bool in_slice(const SymBody& q, const TensorShape& shape, double tol, const TensorialOptions& opt) {
    const SymBody e = l_otimes(q, shape, opt);
    return (e.shape() - Mat::Identity(e.dim(), e.dim())).norm() <= tol;
}

Retraction retract(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt) {
    SymBody e = l_otimes(q, shape, opt);
    GlTensorElement t = xi(e, shape, opt.tol);
    return {act_on_body(inverse(t), q), std::move(e), std::move(t)};
}

SymBody retract_r(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt) {
    return retract(q, shape, opt).body;
}

PhiValue phi(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt) {
    Retraction r = retract(q, shape, opt);
    return {std::move(r.body), std::move(r.ellipsoid)};
}

SymBody phi_inv(const SymBody& slice_body, const SymBody& ellipsoid, const TensorShape& shape,
                const TensorialOptions& opt) {
    check_shape(slice_body, shape);
    check_shape(ellipsoid, shape);
    if (!ellipsoid.is_ellipsoid()) throw InvalidArgument("phi_inv: second argument must be an ellipsoid");
    const SymBody e = l_otimes(slice_body, shape, opt);
    const double off = (e.shape() - Mat::Identity(e.dim(), e.dim())).norm();
    if (off > opt.slice_tol)
        throw Error("off_slice", "phi_inv: body is not in the slice (|l(L) - I|_F = " + std::to_string(off) + ")");
    return act_on_body(xi(ellipsoid, shape, opt.tol), slice_body);
}

HomotopyValue homotopy(const SymBody& q, double t, const TensorShape& shape, const TensorialOptions& opt) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("homotopy parameter must lie in [0,1]");
    if (!q.is_polytope()) throw Unsupported("homotopy is defined on polytopes");
    check_small_factors(shape);
    const TensorialVerdict v = require_tensorial(q, shape, opt);
    HomotopyValue out{q, 0.0, {}};
    if (t <= 0.5) {
        if (t == 0.0) return out;
        out.body = minkowski_combo(q, projective_product(v.sections.bodies), 1.0 - 2.0 * t);
        return out;
    }
    FactorTuple factors;
    for (const auto& s : v.sections.bodies) {
        const BallApprox b = ball_approximation(s.dim(), opt.ball_resolution_2d, opt.ball_icosphere_level);
        out.ball_error = std::max(out.ball_error, b.error);
        out.resolution.push_back(b.resolution);
        factors.push_back(minkowski_combo(s, b.body, 2.0 - 2.0 * t));
    }
    out.body = projective_product(factors);
    return out;
}

RandomTensorial random_tensorial_with_factors(std::uint64_t seed, const TensorShape& shape,
                                              const RandomTensorialParams& params) {
    check_small_factors(shape);
    if (!(params.t >= 0.0 && params.t <= 1.0)) throw InvalidArgument("interpolation t must lie in [0,1]");
    if (params.factor_vertices < 1 || params.extra_points < 0) throw InvalidArgument("invalid generator counts");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.0, 1.0);

    RandomTensorial out{SymBody::cross_polytope(1), {}};
    for (int d : shape.dims()) {
        const int m = std::max(params.factor_vertices, d);
        for (;;) {
            Mat v(d, m);
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < d; ++k) v(k, j) = nd(rng);
            Eigen::ColPivHouseholderQR<Mat> qr(v);
            if (qr.rank() < d || qr.matrixR().diagonal().cwiseAbs().minCoeff() < 1e-3) continue;
            out.factors.push_back(SymBody::polytope(v));
            break;
        }
    }
    std::vector<Mat> fv;
    for (const auto& f : out.factors) fv.push_back(f.vertices());
    Mat X = kron_columns(fv);
    if (params.t > 0.0 && params.extra_points > 0) {
        const InjectiveProduct inj(out.factors);
        const Eigen::Index base = X.cols();
        X.conservativeResize(Eigen::NoChange, base + params.extra_points);
        for (int k = 0; k < params.extra_points; ++k) {
            Vec u(shape.total());
            for (Eigen::Index j = 0; j < u.size(); ++j) u(j) = nd(rng);
            const double s = params.t * ud(rng);
            const double pi = solve_gauge_lp(X.leftCols(base), u).value;
            const double eps = inj.gauge(u);
            X.col(base + k) = u * ((1.0 - s) / pi + s / eps);
        }
    }
    out.body = SymBody::polytope(X);
    return out;
}

SymBody random_tensorial(std::uint64_t seed, const TensorShape& shape, const RandomTensorialParams& params) {
    return random_tensorial_with_factors(seed, shape, params).body;
}

double multi_anchor_stress(const SymBody& q, const TensorShape& shape, int anchors, std::uint64_t seed,
                           const TensorialOptions& opt) {
    check_shape(q, shape);
    check_small_factors(shape);
    if (!q.is_polytope()) throw Unsupported("multi-anchor stress runs on polytopes");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int n = 0; n < anchors; ++n) {
        std::vector<Vec> a;
        for (int d : shape.dims()) {
            Vec x(d);
            for (int k = 0; k < d; ++k) x(k) = nd(rng);
            a.push_back(x.normalized());
        }
        a.back() /= gauge(q, kron_vec(a, shape)).value;
        FactorTuple sec;
        for (int i = 0; i < shape.order(); ++i) sec.push_back(section_body(q, shape, a, i, opt));
        const Slacks s = inclusion_slacks(q, sec);
        worst = std::max({worst, s.projective, s.injective});
    }
    return worst;
}

std::string to_string(MarginReport::Status s) {
    switch (s) {
        case MarginReport::Status::Holds: return "holds";
        case MarginReport::Status::ConclusionFailed: return "conclusion_failed";
        case MarginReport::Status::PreconditionViolated: return "precondition_violated";
        case MarginReport::Status::HypothesisNotMet: return "hypothesis_not_met";
    }
    return "unknown";
}

MarginReport natalia_margin(const SymBody& p, const SymBody& q, double eps, int samples, unsigned seed) {
    require_dim(q.dim(), p.dim(), "natalia_margin");
    if (!(eps > 0)) throw InvalidArgument("eps must be positive");
    MarginReport r;
    r.max_gauge_p = max_gauge_on_sphere(p, samples, seed);
    r.hausdorff = hausdorff(p, q).value;
    r.min_support_q = min_support_on_sphere(q, samples, seed);
    r.inradius_lower_q = inradius_lower_bound(q, 16, seed);
    r.conclusion_holds = r.min_support_q >= eps * (1.0 - 1e-9);
    r.certified = r.inradius_lower_q >= eps * (1.0 - 1e-9);
    if (r.max_gauge_p > 1.0 / (2.0 * eps) * (1.0 + 1e-9))
        r.status = MarginReport::Status::PreconditionViolated;
    else if (!(r.hausdorff < eps))
        r.status = MarginReport::Status::HypothesisNotMet;
    else if (!r.conclusion_holds)
        r.status = MarginReport::Status::ConclusionFailed;
    else
        r.status = MarginReport::Status::Holds;
    return r;
}

}  // namespace tbody
