#include "doctest.h"
#include "oracles.hpp"

#include "tbody/bm.hpp"
#include "tbody/convex.hpp"
#include "tbody/invariants.hpp"

using namespace tbody;

namespace {

const TensorShape S22({2, 2});

// both inclusions recomputed from scratch with the facet oracle
void check_certificate(const SymBody& p, const SymBody& q, const BmCertificate& c) {
    const SymBody tp = act_on_body(c.element, p);
    double inner = 0.0, outer = 0.0;
    for (Eigen::Index j = 0; j < q.vertices().cols(); ++j) inner = std::max(inner, oracle::gauge(tp.vertices(), q.vertices().col(j)));
    for (Eigen::Index j = 0; j < tp.vertices().cols(); ++j) outer = std::max(outer, oracle::gauge(q.vertices(), tp.vertices().col(j)));
    CHECK(inner <= 1.0 + 1e-6);
    CHECK(outer <= c.lambda * (1.0 + 1e-6));
}

}  // namespace

TEST_SUITE("bm") {
    TEST_CASE("identical pair gives lambda one") {
        const SymBody q = random_tensorial(3, S22);
        const BmCertificate c = bm_upper(q, q, S22);
        CHECK(c.lambda <= 1.0 + 1e-9);
        CHECK(is_orthogonal(c.element, 1e-9));
        check_certificate(q, q, c);
        CHECK(same_orbit(q, q, S22, 1e-6).same);
    }

    TEST_CASE("planted orbit pairs") {
        std::mt19937_64 rng(12);
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            const SymBody p = random_tensorial(seed, S22);
            const SymBody q = act_on_body(random_element(S22, rng), p);
            const BmCertificate c = bm_upper(p, q, S22);
            CHECK(c.lambda <= 1.0 + 1e-6);
            check_certificate(p, q, c);
        }
        const SymBody b = SymBody::cross_polytope(4);
        const GlTensorElement r = GlTensorElement::kronecker(S22, {oracle::rotation(0.4), oracle::rotation(-1.2)});
        CHECK(same_orbit(b, act_on_body(r, b), S22, 1e-6).same);
    }

    TEST_CASE("cross-polytope against the Euclidean ball") {
        const SymBody b1 = projective_product({SymBody::cross_polytope(2), SymBody::cross_polytope(2)});
        const SymBody ball = SymBody::ball(4);
        const BmCertificate c = bm_upper(b1, ball, S22);
        CHECK(c.lambda <= 2.0 + 1e-6);
        CHECK(c.lambda >= 2.0 - 1e-6);
        const OrbitResult o = same_orbit(b1, ball, S22, 1e-6);
        CHECK_FALSE(o.same);
        CHECK(o.best_lambda == doctest::Approx(2.0).epsilon(1e-6));
    }

    TEST_CASE("certify recomputes both slacks") {
        const SymBody b = SymBody::cross_polytope(4);
        const BmCertificate c = certify(b, b.scaled(3.0), GlTensorElement::identity(S22));
        CHECK(c.lambda == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((c.element.matrix() - 3.0 * Mat::Identity(4, 4)).norm() < 1e-12);
        const BmCertificate d = certify(b, SymBody::cube(4), GlTensorElement::identity(S22));
        CHECK(d.lambda == doctest::Approx(4.0).epsilon(1e-9));
        check_certificate(b, SymBody::cube(4), d);
    }

    TEST_CASE("determinism and symmetry") {
        const SymBody p = random_tensorial(5, S22), q = random_tensorial(6, S22);
        BmOptions o;
        o.budget = {8, 100};
        o.seed = 7;
        const BmCertificate a = bm_upper(p, q, S22, o), b = bm_upper(p, q, S22, o);
        CHECK(a.lambda == b.lambda);
        CHECK(a.element.identical(b.element));
        check_certificate(p, q, a);
        const BmCertificate r = bm_upper(q, p, S22, o);
        CHECK(std::abs(r.lambda / a.lambda - 1.0) < 0.05);
    }

    TEST_CASE("triangle inequality on chained certificates") {
        const SymBody p = random_tensorial(7, S22), q = random_tensorial(8, S22), r = random_tensorial(9, S22);
        BmOptions o;
        o.budget = {8, 100};
        const BmCertificate pq = bm_upper(p, q, S22, o), qr = bm_upper(q, r, S22, o);
        const BmCertificate pr = certify(p, r, compose(qr.element, pq.element));
        CHECK(pr.lambda <= pq.lambda * qr.lambda + 1e-6);
    }

    TEST_CASE("orthogonal pre and post composition") {
        std::mt19937_64 rng(13);
        const SymBody p = random_tensorial(10, S22), q = random_tensorial(11, S22);
        BmOptions o;
        o.budget = {8, 100};
        const double base = bm_upper(p, q, S22, o).lambda;
        const double moved = bm_upper(act_on_body(random_orthogonal_element(S22, rng), p),
                                      act_on_body(random_orthogonal_element(S22, rng), q), S22, o)
                                 .lambda;
        CHECK(std::abs(moved / base - 1.0) < 0.05);
    }

    TEST_CASE("transporter diagnostic") {
        const SymBody b = SymBody::cross_polytope(4);
        const TransporterReport r = transporter_diagnostic(b, b, S22, 0.2, 0.4, 100, 1);
        CHECK(r.bound == doctest::Approx(7.0));
        CHECK(r.accepted > 0);
        CHECK(r.violations == 0);
        CHECK(r.max_norm <= r.bound);
        CHECK(r.identity_norm <= r.bound);
        CHECK_THROWS_AS(transporter_diagnostic(b, b, S22, 0.4, 0.4, 10, 1), Error);
    }

    TEST_CASE("non-tensorial inputs are rejected") {
        std::mt19937_64 rng(14);
        const SymBody junk = SymBody::polytope(oracle::random_matrix(4, 7, rng));
        CHECK_THROWS_AS(bm_upper(junk, SymBody::cross_polytope(4), S22), NotTensorial);
    }
}
