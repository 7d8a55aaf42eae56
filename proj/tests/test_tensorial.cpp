#include "doctest.h"
#include "oracles.hpp"

#include "tbody/convex.hpp"
#include "tbody/gl_tensor.hpp"
#include "tbody/invariants.hpp"
#include "tbody/tensorial.hpp"

using namespace tbody;

namespace {

const TensorShape S22({2, 2});

Vec e(int d, int k) { return Vec::Unit(d, k); }

SymBody b1_4(double r = 1.0) { return SymBody::cross_polytope(4, r); }

double haus(const SymBody& a, const SymBody& b) {
    const HausdorffValue h = hausdorff(a, b);
    return h.value + (std::isfinite(h.tolerance) ? h.tolerance : 0.0);
}

// ratio of supports is constant iff the bodies are dilates
double dilation(const SymBody& a, const SymBody& b, std::mt19937_64& rng, double* spread) {
    double lo = 1e300, hi = 0.0;
    for (int k = 0; k < 200; ++k) {
        const Vec u = oracle::random_vec(a.dim(), rng);
        const double r = support(a, u) / support(b, u);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    *spread = hi / lo - 1.0;
    return std::sqrt(lo * hi);
}

}  // namespace

TEST_SUITE("tensorial") {
    TEST_CASE("section body examples") {
        const SymBody s = section_body(b1_4(), S22, {e(2, 0), e(2, 0)}, 0);
        CHECK(haus(s, SymBody::cross_polytope(2)) < 1e-9);
        const SymBody sb = section_body(SymBody::ball(4), S22, {e(2, 0), e(2, 0)}, 1);
        REQUIRE(sb.is_ellipsoid());
        CHECK((sb.shape() - Mat::Identity(2, 2)).norm() < 1e-12);

        const SectionFamily f = canonical_sections(b1_4(2.0), S22);
        CHECK(haus(f.bodies[0], SymBody::cross_polytope(2)) < 1e-9);
        CHECK(haus(f.bodies[1], SymBody::cross_polytope(2, 2.0)) < 1e-9);
        CHECK(haus(projective_product(f.bodies), b1_4(2.0)) < 1e-9);
        CHECK(gauge(b1_4(2.0), f.anchor).value == doctest::Approx(1.0).epsilon(1e-7));
        CHECK_FALSE(f.anchor_perturbed);
    }

    TEST_CASE("section body errors") {
        CHECK_THROWS_AS(section_body(b1_4(), S22, {e(2, 0), Vec::Zero(2)}, 0), InvalidArgument);
        CHECK_THROWS(section_body(SymBody::cross_polytope(16), TensorShape({4, 4}), {e(4, 0), e(4, 0)}, 0));
    }

    TEST_CASE("sections reproduce the lifted gauge") {
        for (const TensorShape& s : {TensorShape({2, 3}), TensorShape({3, 3}), TensorShape({2, 2, 2})}) {
            const SymBody q = random_tensorial(5, s);
            const SectionFamily f = canonical_sections(q, s);
            CHECK(gauge(q, f.anchor).value == doctest::Approx(1.0).epsilon(1e-7));
            std::mt19937_64 rng(1);
            for (int i = 0; i < s.order(); ++i)
                for (int k = 0; k < 10; ++k) {
                    std::vector<Vec> xs = f.anchor_factors;
                    xs[static_cast<size_t>(i)] = oracle::random_vec(s.dim(i), rng);
                    const double lifted = gauge(q, kron_vec(xs, s)).value;
                    CHECK(gauge(f.bodies[static_cast<size_t>(i)], xs[static_cast<size_t>(i)]).value ==
                          doctest::Approx(lifted).epsilon(1e-7));
                }
        }
    }

    TEST_CASE("decision examples") {
        const TensorialVerdict v = is_tensorial(b1_4(), S22);
        CHECK(v.tensorial);
        CHECK(v.side == TensorialVerdict::Side::None);
        CHECK(haus(v.sections.bodies[0], SymBody::cross_polytope(2)) < 1e-9);
        CHECK(haus(v.sections.bodies[1], SymBody::cross_polytope(2)) < 1e-9);
        CHECK(is_tensorial(SymBody::ball(4), S22).tensorial);
        const TensorialVerdict nd = is_tensorial(SymBody::ellipsoid(Mat((Vec(4) << 2, 1, 1, 1).finished().asDiagonal())), S22);
        CHECK_FALSE(nd.tensorial);
        CHECK(nd.side == TensorialVerdict::Side::KroneckerResidual);
        CHECK(nd.violation > 1e-6);
    }

    TEST_CASE("negative polytope verdicts carry checkable witnesses") {
        std::mt19937_64 rng(2);
        int negatives = 0;
        for (int t = 0; t < 20; ++t) {
            const SymBody q = SymBody::polytope(oracle::random_matrix(4, 6, rng));
            const TensorialVerdict v = is_tensorial(q, S22);
            if (v.tensorial) continue;
            ++negatives;
            REQUIRE(v.witness.size() == 4);
            if (v.side == TensorialVerdict::Side::ProjectiveNotInside)
                CHECK(gauge(q, v.witness).value > 1.0 + 1e-6);
            else if (v.side == TensorialVerdict::Side::OutsideInjective)
                CHECK(injective_gauge(v.sections.bodies, v.witness) > 1.0 + 1e-6);
            else
                FAIL("unexpected side");
            CHECK_THROWS_AS(conv_otimes(q, S22), NotTensorial);
        }
        CHECK(negatives >= 15);
    }

    TEST_CASE("soundness: sections are dilates of the generating factors") {
        std::mt19937_64 rng(3);
        for (const TensorShape& s : {TensorShape({2, 2}), TensorShape({2, 3}), TensorShape({2, 2, 2})}) {
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                const RandomTensorial g = random_tensorial_with_factors(seed, s);
                const TensorialVerdict v = is_tensorial(g.body, s);
                REQUIRE(v.tensorial);
                double prod = 1.0;
                for (int i = 0; i < s.order(); ++i) {
                    double spread = 0.0;
                    prod *= dilation(v.sections.bodies[static_cast<size_t>(i)], g.factors[static_cast<size_t>(i)], rng, &spread);
                    CHECK(spread < 1e-7);
                }
                CHECK(prod == doctest::Approx(1.0).epsilon(1e-7));
            }
        }
    }

    TEST_CASE("GL-moved generated bodies stay tensorial") {
        // this stream once hit an LP whose drifted basis inverse returned an
        // infeasible dual, so a section came out too large
        const TensorShape s({3, 3});
        std::mt19937_64 rng(1015);
        double worst = 0.0;
        for (std::uint64_t k = 0; k < 100; ++k) {
            RandomTensorialParams p;
            p.t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            const SymBody q = random_tensorial(k + 1, s, p);
            const TensorialVerdict v = is_tensorial(act_on_body(random_element(s, rng), q), s);
            random_orthogonal_element(s, rng);
            worst = std::max(worst, v.violation);
        }
        CHECK(worst <= 1e-9);
    }

    TEST_CASE("conv_otimes examples") {
        CHECK(haus(conv_otimes(b1_4(), S22), b1_4()) < 1e-9);
        // B2 (x)pi B2 is strictly inside B2^4: the nuclear norm of I/sqrt2 is sqrt2
        const SymBody c = conv_otimes(SymBody::ball(4), S22);
        const Vec u = (e(4, 0) + e(4, 3)) / std::sqrt(2.0);
        const double g = gauge(c, u).value;
        CHECK(g >= std::sqrt(2.0) - 1e-9);
        CHECK(g <= std::sqrt(2.0) / std::pow(1.0 - ball_approximation(2).error, 2) + 1e-9);
    }

    TEST_CASE("conv_otimes is constant on a fiber") {
        for (std::uint64_t seed = 11; seed < 16; ++seed) {
            RandomTensorialParams p;
            p.t = 0.9;
            const RandomTensorial g = random_tensorial_with_factors(seed, S22, p);
            CHECK(haus(conv_otimes(g.body, S22), projective_product(g.factors)) < 1e-7);
        }
    }

    TEST_CASE("l_otimes examples") {
        CHECK((l_otimes(b1_4(), S22).shape() - Mat::Identity(4, 4)).norm() < 1e-6);
        CHECK((l_otimes(SymBody::ball(4), S22).shape() - Mat::Identity(4, 4)).norm() < 1e-9);
        Mat d(2, 2);
        d << 2, 0, 0, 1;
        const GlTensorElement t = GlTensorElement::kronecker(S22, {d, Mat::Identity(2, 2)});
        const Mat want = oracle::kron(Mat((Vec(2) << 4, 1).finished().asDiagonal()), Mat::Identity(2, 2));
        CHECK((l_otimes(act_on_body(t, b1_4()), S22).shape() - want).norm() < 1e-6);
    }

    TEST_CASE("in_slice examples") {
        CHECK(in_slice(b1_4(), S22, 1e-6));
        CHECK_FALSE(in_slice(b1_4(2.0), S22, 1e-6));
        CHECK(in_slice(SymBody::ball(4), S22, 1e-6));
    }

    TEST_CASE("retraction examples") {
        CHECK(haus(retract_r(b1_4(), S22), b1_4()) < 1e-6);
        const Retraction r2 = retract(b1_4(2.0), S22);
        CHECK(haus(r2.body, b1_4()) < 1e-6);
        CHECK((r2.transform.matrix() - 2.0 * Mat::Identity(4, 4)).norm() < 1e-5);
        std::mt19937_64 rng(4);
        for (int t = 0; t < 5; ++t) {
            std::vector<Mat> spd;
            for (int k = 0; k < 2; ++k) {
                const Mat a = oracle::random_matrix(2, 2, rng);
                spd.push_back(a * a.transpose() + 0.5 * Mat::Identity(2, 2));
            }
            const SymBody q = act_on_body(GlTensorElement::kronecker(S22, spd), b1_4());
            CHECK(haus(retract_r(q, S22), b1_4()) < 1e-6);
        }
    }

    TEST_CASE("phi examples") {
        const PhiValue p = phi(b1_4(), S22);
        CHECK(haus(p.slice_body, b1_4()) < 1e-6);
        CHECK((p.ellipsoid.shape() - Mat::Identity(4, 4)).norm() < 1e-6);
        const SymBody back = phi_inv(b1_4(), SymBody::ball(4, 2.0), S22);
        CHECK(haus(back, b1_4(2.0)) < 1e-9);
        CHECK_THROWS_AS(phi_inv(b1_4(2.0), SymBody::ball(4), S22), Error);
        try {
            phi_inv(b1_4(2.0), SymBody::ball(4), S22);
        } catch (const Error& err) {
            CHECK(err.kind() == "off_slice");
        }
    }

    TEST_CASE("phi round trips on generated bodies") {
        std::mt19937_64 rng(5);
        for (std::uint64_t seed = 1; seed <= 8; ++seed) {
            const TensorShape s = seed % 2 ? TensorShape({2, 3}) : TensorShape({2, 2});
            const SymBody q = act_on_body(random_element(s, rng), random_tensorial(seed, s));
            const PhiValue p = phi(q, s);
            CHECK(haus(phi_inv(p.slice_body, p.ellipsoid, s), q) < 1e-6);
            const SymBody el = random_tensorial_ellipsoid(s, rng);
            const PhiValue p2 = phi(phi_inv(p.slice_body, el, s), s);
            CHECK(haus(p2.slice_body, p.slice_body) < 1e-6);
            CHECK(haus(p2.ellipsoid, el) < 1e-6);
        }
    }

    TEST_CASE("homotopy examples") {
        const SymBody q = random_tensorial(21, S22);
        CHECK(homotopy(q, 0.0, S22).body.identical(q));
        CHECK(haus(homotopy(b1_4(), 0.5, S22).body, b1_4()) < 1e-9);
        CHECK(haus(homotopy(q, 0.5, S22).body, conv_otimes(q, S22)) < 1e-9);
        const HomotopyValue h = homotopy(q, 1.0, S22);
        const BallApprox b = ball_approximation(2);
        CHECK(haus(h.body, projective_product({b.body, b.body})) < 1e-6 + h.ball_error);
        CHECK(h.resolution == std::vector<int>{64, 64});
        CHECK_THROWS_AS(homotopy(q, 1.5, S22), InvalidArgument);
        // intermediate values interpolate support functions in the first half
        const SymBody c = conv_otimes(q, S22);
        const SymBody mid = homotopy(q, 0.25, S22).body;
        std::mt19937_64 rng(6);
        for (int k = 0; k < 20; ++k) {
            const Vec u = oracle::random_vec(4, rng);
            CHECK(support(mid, u) == doctest::Approx(0.5 * support(q, u) + 0.5 * support(c, u)).epsilon(1e-9));
        }
    }

    TEST_CASE("random generator") {
        RandomTensorialParams p;
        p.t = 0.0;
        const RandomTensorial g = random_tensorial_with_factors(3, TensorShape({2, 3}), p);
        CHECK(g.body.identical(projective_product(g.factors)));
        CHECK(random_tensorial(9, TensorShape({2, 2, 2})).identical(random_tensorial(9, TensorShape({2, 2, 2}))));
        for (std::uint64_t seed = 1; seed <= 10; ++seed) CHECK(is_tensorial(random_tensorial(seed, TensorShape({3, 3})), TensorShape({3, 3})).tensorial);
    }

    TEST_CASE("crossnorm sandwich on generated bodies") {
        std::mt19937_64 rng(7);
        const TensorShape s({2, 3});
        const RandomTensorial g = random_tensorial_with_factors(4, s);
        const SymBody pi = projective_product(g.factors);
        for (int k = 0; k < 100; ++k) {
            const Vec u = oracle::random_vec(6, rng);
            const double gq = gauge(g.body, u).value;
            CHECK(injective_gauge(g.factors, u) <= gq * (1 + 1e-9));
            CHECK(gq <= gauge(pi, u).value * (1 + 1e-9));
        }
    }

    TEST_CASE("multi-anchor stress stays small on tensorial bodies") {
        CHECK(multi_anchor_stress(random_tensorial(2, S22), S22, 6, 1) < 1e-6);
    }

    TEST_CASE("margin lemma instances") {
        const MarginReport same = natalia_margin(b1_4(), b1_4(), 0.2);
        CHECK(same.status == MarginReport::Status::Holds);
        const MarginReport shrunk = natalia_margin(b1_4(), b1_4(0.9), 0.2);
        CHECK(shrunk.status == MarginReport::Status::Holds);
        CHECK(shrunk.hausdorff == doctest::Approx(0.1).epsilon(1e-9));
        CHECK(shrunk.certified);
        // B1^4 has inradius 1/2, so eps = 0.4 breaks the precondition
        const MarginReport pre = natalia_margin(b1_4(), b1_4(), 0.4);
        CHECK(pre.status == MarginReport::Status::PreconditionViolated);
        CHECK(natalia_margin(b1_4(), b1_4(0.5), 0.2).status == MarginReport::Status::HypothesisNotMet);
    }
}
