#include "tbody/invariants.hpp"

#include "tbody/convex.hpp"
#include "tbody/tensor_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>

namespace tbody {

Mat random_orthogonal(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Mat a(d, d);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
    const Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < d; ++k)
        if (r(k, k) < 0) q.col(k) *= -1.0;
    return q;
}

namespace {

std::vector<int> random_sigma(const TensorShape& shape, std::mt19937_64& rng) {
    const int l = shape.order();
    std::vector<int> s(static_cast<size_t>(l));
    for (int k = 0; k < l; ++k) s[static_cast<size_t>(k)] = k;
    // shuffle within groups of equal dimension
    for (int k = l - 1; k > 0; --k) {
        std::vector<int> same;
        for (int j = 0; j <= k; ++j)
            if (shape.dim(j) == shape.dim(k)) same.push_back(j);
        const int j = same[static_cast<size_t>(rng() % same.size())];
        std::swap(s[static_cast<size_t>(j)], s[static_cast<size_t>(k)]);
    }
    return s;
}

Mat random_spd(int d, std::mt19937_64& rng, double spread) {
    std::normal_distribution<double> nd;
    const Mat u = random_orthogonal(d, rng);
    Vec ev(d);
    for (int k = 0; k < d; ++k) ev(k) = std::exp(2.0 * spread * nd(rng));
    return u * ev.asDiagonal() * u.transpose();
}

}  // namespace

GlTensorElement random_orthogonal_element(const TensorShape& shape, std::mt19937_64& rng) {
    std::vector<Mat> f;
    for (int d : shape.dims()) f.push_back(random_orthogonal(d, rng));
    return GlTensorElement::make(shape, random_sigma(shape, rng), std::move(f));
}

GlTensorElement random_element(const TensorShape& shape, std::mt19937_64& rng, double spread) {
    std::normal_distribution<double> nd;
    std::vector<Mat> f;
    for (int d : shape.dims()) {
        Vec s(d);
        for (int k = 0; k < d; ++k) s(k) = std::exp(spread * nd(rng));
        const Mat u = random_orthogonal(d, rng);
        f.push_back(u * s.asDiagonal() * random_orthogonal(d, rng));
    }
    return GlTensorElement::make(shape, random_sigma(shape, rng), std::move(f));
}

SymBody random_tensorial_ellipsoid(const TensorShape& shape, std::mt19937_64& rng, double spread) {
    std::vector<Mat> f;
    for (int d : shape.dims()) f.push_back(random_spd(d, rng, spread));
    const Mat m = kron(f);
    return SymBody::ellipsoid(0.5 * (m + m.transpose()));
}

namespace {

double hausdorff_upper(const SymBody& a, const SymBody& b) {
    const HausdorffValue h = hausdorff(a, b);
    return std::isfinite(h.tolerance) ? h.value + h.tolerance : h.value;
}

std::vector<InvariantRow> one_trial(const InvariantConfig& cfg, int trial) {
    const TensorShape& shape = cfg.shape;
    const TensorialOptions& opt = cfg.tensorial;
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(trial);
    std::vector<InvariantRow> rows;
    auto row = [&](const std::string& name, double value, double tol, bool pass) {
        rows.push_back({trial, seed, name, value, tol, pass});
    };
    auto below = [&](const std::string& name, double value, double tol) { row(name, value, tol, value <= tol); };

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.0, 1.0);

    RandomTensorialParams params;
    params.t = ud(rng);
    const RandomTensorial gen = random_tensorial_with_factors(seed, shape, params);
    const SymBody& q = gen.body;

    const TensorialVerdict v = is_tensorial(q, shape, opt);
    below("is_tensorial_violation", v.violation, opt.tol);
    if (!v.tensorial) return rows;

    // g_eps <= g_Q <= g_pi relative to the sections
    {
        const InjectiveProduct inj(v.sections.bodies);
        double worst = -1.0;
        for (int k = 0; k < 100; ++k) {
            Vec u(shape.total());
            for (Eigen::Index j = 0; j < u.size(); ++j) u(j) = nd(rng);
            const double g = gauge(q, u).value;
            const double ge = inj.gauge(u);
            const double gp = projective_gauge(v.sections.bodies, u);
            worst = std::max({worst, (ge - g) / g, (g - gp) / g});
        }
        below("crossnorm_sandwich", worst, 1e-6);
    }

    const SymBody c = conv_otimes(q, shape, opt);
    below("conv_otimes_idempotent", hausdorff_upper(conv_otimes(c, shape, opt), c), 1e-7);

    const GlTensorElement t = random_element(shape, rng);
    const SymBody tq = act_on_body(t, q);
    below("conv_otimes_equivariance", hausdorff_upper(conv_otimes(tq, shape, opt), act_on_body(t, c)), 1e-6);
    const SymBody l = l_otimes(q, shape, opt);
    below("l_otimes_equivariance", hausdorff_upper(l_otimes(tq, shape, opt), act_on_body(t, l)), 1e-6);

    const Retraction r = retract(q, shape, opt);
    const SymBody lr = l_otimes(r.body, shape, opt);
    below("retract_in_slice", (lr.shape() - Mat::Identity(shape.total(), shape.total())).norm(), 1e-6);

    const GlTensorElement u = random_orthogonal_element(shape, rng);
    below("retract_orthogonal_equivariance",
          hausdorff_upper(retract_r(act_on_body(u, q), shape, opt), act_on_body(u, r.body)), 1e-6);

    // slice to slice forces orthogonality
    {
        const SymBody ul = act_on_body(u, r.body);
        const bool ortho_ok = in_slice(ul, shape, 1e-6, opt) && is_orthogonal(u, 1e-8);
        const GlTensorElement pos = polar_decompose(random_element(shape, rng)).positive_element();
        const bool pos_in = in_slice(act_on_body(pos, r.body), shape, 1e-6, opt);
        const bool law = ortho_ok && (!pos_in || is_orthogonal(pos, 1e-8));
        row("slice_transporter_orthogonal", law ? 0.0 : 1.0, 0.0, law);
    }

    below("phi_inv_phi", hausdorff_upper(phi_inv(r.body, r.ellipsoid, shape, opt), q), 1e-6);
    {
        const SymBody e = random_tensorial_ellipsoid(shape, rng);
        const PhiValue back = phi(phi_inv(r.body, e, shape, opt), shape, opt);
        below("phi_phi_inv",
              std::max(hausdorff_upper(back.slice_body, r.body), hausdorff_upper(back.ellipsoid, e)), 1e-6);
    }

    {
        const HomotopyValue h0 = homotopy(q, 0.0, shape, opt);
        row("homotopy_t0_identity", h0.body.identical(q) ? 0.0 : 1.0, 0.0, h0.body.identical(q));
        below("homotopy_half_conv", hausdorff_upper(homotopy(q, 0.5, shape, opt).body, c), 1e-6);
        const HomotopyValue h1 = homotopy(q, 1.0, shape, opt);
        FactorTuple balls;
        for (int d : shape.dims()) balls.push_back(ball_approximation(d, opt.ball_resolution_2d, opt.ball_icosphere_level).body);
        below("homotopy_t1_ball_product", hausdorff_upper(h1.body, projective_product(balls)), 1e-6 + h1.ball_error);
    }

    // Lipschitz bound of the projective product in one factor
    {
        const int i = static_cast<int>(rng() % static_cast<unsigned>(shape.order()));
        FactorTuple pf = gen.factors;
        Mat w = pf[static_cast<size_t>(i)].vertices();
        const double amp = 0.2 * ud(rng);
        for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] += amp * nd(rng);
        pf[static_cast<size_t>(i)] = SymBody::polytope(w);
        double nu = 1.0;
        for (int j = 0; j < shape.order(); ++j)
            if (j != i) nu *= outradius(gen.factors[static_cast<size_t>(j)]);
        const double lhs = hausdorff(projective_product(gen.factors), projective_product(pf)).value;
        const double rhs = hausdorff(gen.factors[static_cast<size_t>(i)], pf[static_cast<size_t>(i)]).value * nu;
        below("projective_lipschitz", lhs - rhs, 1e-6);
    }

    // eps B_2 inside Q' whenever 2 eps B_2 inside P and d_H(P, Q') < eps
    {
        const double eps = 0.5 * inradius_lower_bound(q, 8, static_cast<unsigned>(seed)) * (0.2 + 0.8 * ud(rng));
        Mat w = q.vertices();
        for (Eigen::Index k = 0; k < w.cols(); ++k) {
            Vec z(w.rows());
            for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = nd(rng);
            w.col(k) += 0.9 * eps * ud(rng) * z.normalized();
        }
        const SymBody q2 = SymBody::polytope(w);
        const MarginReport m = natalia_margin(q, q2, eps, 200, static_cast<unsigned>(seed));
        const bool ok = m.status == MarginReport::Status::Holds;
        row("natalia_margin", eps - m.min_support_q, 0.0, ok);
    }
    return rows;
}

}  // namespace

std::vector<InvariantRow> run_invariants(const InvariantConfig& cfg) {
    if (cfg.trials < 0) throw InvalidArgument("trial count must be nonnegative");
    std::vector<std::vector<InvariantRow>> per(static_cast<size_t>(cfg.trials));
    std::vector<std::exception_ptr> errs(static_cast<size_t>(cfg.trials));
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < cfg.trials; ++k) {
        try {
            per[static_cast<size_t>(k)] = one_trial(cfg, k);
        } catch (...) {
            errs[static_cast<size_t>(k)] = std::current_exception();
        }
    }
    std::vector<InvariantRow> rows;
    for (int k = 0; k < cfg.trials; ++k) {
        if (errs[static_cast<size_t>(k)]) {
            std::string what = "unknown error";
            try {
                std::rethrow_exception(errs[static_cast<size_t>(k)]);
            } catch (const std::exception& e) {
                what = e.what();
            }
            rows.push_back({k, cfg.seed + static_cast<std::uint64_t>(k), "error: " + what, 1.0, 0.0, false});
            continue;
        }
        for (auto& r : per[static_cast<size_t>(k)]) rows.push_back(std::move(r));
    }
    return rows;
}

std::string invariants_csv(const std::vector<InvariantRow>& rows) {
    std::string out = "trial,seed,quantity,value,tolerance,pass\n";
    char buf[512];
    for (const auto& r : rows) {
        std::string q = r.quantity;
        std::replace(q.begin(), q.end(), ',', ';');
        std::replace(q.begin(), q.end(), '\n', ' ');
        std::snprintf(buf, sizeof buf, "%d,%llu,%s,%.17g,%.17g,%d\n", r.trial, static_cast<unsigned long long>(r.seed),
                      q.c_str(), r.value, r.tolerance, r.pass ? 1 : 0);
        out += buf;
    }
    return out;
}

}  // namespace tbody
