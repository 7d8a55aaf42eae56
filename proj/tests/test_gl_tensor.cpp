#include "doctest.h"
#include "oracles.hpp"

#include "tbody/convex.hpp"
#include "tbody/gl_tensor.hpp"
#include "tbody/invariants.hpp"

#include <numeric>

using namespace tbody;

namespace {

Vec e(int d, int k) { return Vec::Unit(d, k); }

// all permutations of {0..l-1} compatible with the shape
std::vector<std::vector<int>> admissible(const TensorShape& s) {
    std::vector<int> p(static_cast<size_t>(s.order()));
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        bool ok = true;
        for (int i = 0; i < s.order(); ++i) ok = ok && s.dim(i) == s.dim(p[static_cast<size_t>(i)]);
        if (ok) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::vector<Vec> random_factors(const TensorShape& s, std::mt19937_64& rng) {
    std::vector<Vec> xs;
    for (int d : s.dims()) xs.push_back(oracle::random_vec(d, rng));
    return xs;
}

// the defining formula on decomposables, written out directly
Vec apply_formula(const std::vector<int>& sigma, const std::vector<Mat>& f, const std::vector<Vec>& xs,
                  const TensorShape& s) {
    std::vector<Vec> ys;
    for (size_t i = 0; i < xs.size(); ++i) ys.push_back(f[i] * xs[static_cast<size_t>(sigma[i])]);
    return kron_vec(ys, s);
}

std::vector<Mat> random_invertible(const TensorShape& s, std::mt19937_64& rng) {
    std::vector<Mat> f;
    for (int d : s.dims()) f.push_back(oracle::random_matrix(d, d, rng) + 2.0 * Mat::Identity(d, d));
    return f;
}

}  // namespace

TEST_SUITE("gl_tensor") {
    TEST_CASE("N-quotient: reciprocal rescaling gives the same stored element") {
        const TensorShape s({2, 2});
        const Mat I = Mat::Identity(2, 2);
        const GlTensorElement a = GlTensorElement::make(s, {0, 1}, {2.0 * I, I});
        const GlTensorElement b = GlTensorElement::make(s, {0, 1}, {I, 2.0 * I});
        CHECK(a.identical(b));
        std::mt19937_64 rng(1);
        for (int t = 0; t < 20; ++t) {
            const auto f = random_invertible(TensorShape({2, 3, 2}), rng);
            // power-of-two factors keep the rescaling exact in floating point
            const double lam = std::ldexp(1.0, t % 7 - 3);
            auto g = f;
            g[0] *= lam;
            g[2] /= lam;
            CHECK(GlTensorElement::make(TensorShape({2, 3, 2}), {0, 1, 2}, f)
                      .identical(GlTensorElement::make(TensorShape({2, 3, 2}), {0, 1, 2}, g)));
            g = f;
            g[1] *= 1.37;
            g[2] /= 1.37;
            CHECK(GlTensorElement::make(TensorShape({2, 3, 2}), {0, 1, 2}, f)
                      .approx_equal(GlTensorElement::make(TensorShape({2, 3, 2}), {0, 1, 2}, g), 1e-12));
        }
    }

    TEST_CASE("canonical normalization") {
        std::mt19937_64 rng(2);
        const TensorShape s({3, 2});
        const GlTensorElement t = GlTensorElement::make(s, {0, 1}, random_invertible(s, rng));
        CHECK(t.factors()[0].norm() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
        const Mat& f0 = t.factors()[0];
        for (Eigen::Index i = 0; i < f0.rows(); ++i)
            for (Eigen::Index j = 0; j < f0.cols(); ++j)
                if (f0(i, j) != 0.0) {
                    CHECK(f0(i, j) > 0.0);
                    i = f0.rows();
                    break;
                }
    }

    TEST_CASE("construction errors") {
        const Mat I2 = Mat::Identity(2, 2), I3 = Mat::Identity(3, 3);
        CHECK_THROWS_AS(GlTensorElement::make(TensorShape({2, 3}), {1, 0}, {I2, I3}), InvalidArgument);
        Mat sing(2, 2);
        sing << 1, 2, 2, 4;
        CHECK_THROWS_AS(GlTensorElement::make(TensorShape({2, 2}), {0, 1}, {sing, I2}), InvalidArgument);
        CHECK_THROWS_AS(GlTensorElement::make(TensorShape({2, 2}), {0, 0}, {I2, I2}), InvalidArgument);
    }

    TEST_CASE("swap element induces the commutation matrix") {
        const TensorShape s({2, 2});
        const GlTensorElement sw = GlTensorElement::permutation(s, {1, 0});
        Mat K = Mat::Zero(4, 4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) K(2 * j + i, 2 * i + j) = 1.0;
        CHECK(sw.matrix() == K);
        CHECK(sw.apply(kron_vec({e(2, 0), e(2, 1)}, s)) == kron_vec({e(2, 1), e(2, 0)}, s));
    }

    TEST_CASE("apply examples") {
        const TensorShape s({2, 2});
        const Vec u = (Vec(4) << 1, 2, 3, 4).finished();
        CHECK(GlTensorElement::identity(s).apply(u) == u);
        Mat d(2, 2);
        d << 2, 0, 0, 1;
        const GlTensorElement t = GlTensorElement::kronecker(s, {d, Mat::Identity(2, 2)});
        const Vec x = kron_vec({e(2, 0), e(2, 0)}, s);
        CHECK((t.apply(x) - 2.0 * x).norm() < 1e-15);
        CHECK_THROWS_AS(t.apply(Vec::Ones(3)), DimensionMismatch);
    }

    TEST_CASE("action on decomposables follows the factored formula") {
        std::mt19937_64 rng(3);
        for (const TensorShape& s : {TensorShape({2, 2}), TensorShape({2, 3}), TensorShape({2, 2, 2}), TensorShape({3, 2, 3})}) {
            for (const auto& sigma : admissible(s)) {
                const auto f = random_invertible(s, rng);
                const GlTensorElement t = GlTensorElement::make(s, sigma, f);
                for (int k = 0; k < 5; ++k) {
                    const auto xs = random_factors(s, rng);
                    const Vec want = apply_formula(sigma, f, xs, s);
                    CHECK((t.apply(kron_vec(xs, s)) - want).norm() <= 1e-10 * want.norm());
                }
            }
        }
    }

    TEST_CASE("group laws") {
        std::mt19937_64 rng(4);
        const TensorShape s({2, 2, 2});
        const Mat I = Mat::Identity(s.total(), s.total());
        for (int t = 0; t < 10; ++t) {
            const GlTensorElement a = random_element(s, rng), b = random_element(s, rng), c = random_element(s, rng);
            const Mat ab_c = compose(compose(a, b), c).matrix();
            const Mat a_bc = compose(a, compose(b, c)).matrix();
            CHECK((ab_c - a_bc).norm() <= 1e-10 * ab_c.norm());
            CHECK((compose(a, b).matrix() - a.matrix() * b.matrix()).norm() <= 1e-10 * a.matrix().norm() * b.matrix().norm());
            CHECK((compose(a, inverse(a)).matrix() - I).norm() < 1e-10);
            CHECK((compose(GlTensorElement::identity(s), a).matrix() - a.matrix()).norm() < 1e-12);
        }
    }

    TEST_CASE("permutation composition") {
        const TensorShape s({2, 2, 2});
        for (const auto& sg : admissible(s))
            for (const auto& bt : admissible(s)) {
                const GlTensorElement c = compose(GlTensorElement::permutation(s, sg), GlTensorElement::permutation(s, bt));
                CHECK(c.sigma() == compose_permutations(sg, bt));
                CHECK(c.matrix() == GlTensorElement::permutation(s, compose_permutations(sg, bt)).matrix());
                // U_sigma^{-1} = U_{sigma^{-1}}
                CHECK(inverse(GlTensorElement::permutation(s, sg)).matrix() == GlTensorElement::permutation(s, sg).matrix().transpose());
            }
    }

    TEST_CASE("conjugation by transpositions permutes the factors") {
        std::mt19937_64 rng(5);
        const TensorShape s({2, 2, 2});
        for (const std::vector<int>& tr : {std::vector<int>{1, 0, 2}, {2, 1, 0}, {0, 2, 1}}) {
            const auto f = random_invertible(s, rng);
            const GlTensorElement u = GlTensorElement::permutation(s, tr);
            const GlTensorElement c = compose(u, compose(GlTensorElement::kronecker(s, f), inverse(u)));
            std::vector<Mat> g;
            for (int i = 0; i < 3; ++i) g.push_back(f[static_cast<size_t>(tr[static_cast<size_t>(i)])]);
            const Mat want = GlTensorElement::kronecker(s, g).matrix();
            CHECK((c.matrix() - want).norm() <= 1e-10 * want.norm());
        }
    }

    TEST_CASE("decomposability is preserved") {
        std::mt19937_64 rng(6);
        const TensorShape s({2, 3});
        for (int t = 0; t < 20; ++t) {
            const GlTensorElement g = random_element(s, rng);
            const Vec y = g.apply(kron_vec(random_factors(s, rng), s));
            const Mat m = Eigen::Map<const Mat>(y.data(), 3, 2);
            const Vec sv = Eigen::JacobiSVD<Mat>(m).singularValues();
            CHECK(sv(1) <= 1e-10 * sv(0));
        }
    }

    TEST_CASE("act on body") {
        const TensorShape s({2, 2});
        const SymBody b = SymBody::cross_polytope(4);
        CHECK(act_on_body(GlTensorElement::identity(s), b).identical(b));
        const SymBody e = act_on_body(GlTensorElement::kronecker(s, {2.0 * Mat::Identity(2, 2), Mat::Identity(2, 2)}),
                                      SymBody::ball(4));
        CHECK((e.shape() - 4.0 * Mat::Identity(4, 4)).norm() < 1e-12);
        // T(Q1 (x)pi Q2) = T1 Q_sigma(1) (x)pi T2 Q_sigma(2)
        std::mt19937_64 rng(7);
        for (int t = 0; t < 10; ++t) {
            const FactorTuple q{SymBody::polytope(oracle::random_matrix(2, 3, rng)), SymBody::polytope(oracle::random_matrix(2, 3, rng))};
            const auto f = random_invertible(s, rng);
            const std::vector<int> sg = t % 2 ? std::vector<int>{1, 0} : std::vector<int>{0, 1};
            const GlTensorElement g = GlTensorElement::make(s, sg, f);
            FactorTuple img;
            for (int i = 0; i < 2; ++i) img.push_back(linear_image(f[static_cast<size_t>(i)], q[static_cast<size_t>(sg[static_cast<size_t>(i)])]));
            CHECK(hausdorff(act_on_body(g, projective_product(q)), projective_product(img)).value < 1e-9);
        }
    }

    TEST_CASE("polar decomposition") {
        std::mt19937_64 rng(8);
        const TensorShape s({2, 3});
        const GlTensorElement u = random_orthogonal_element(s, rng);
        const PolarDecomposition pu = polar_decompose(u);
        for (const auto& p : pu.positive_part) CHECK((p - Mat::Identity(p.rows(), p.cols())).norm() < 1e-10);
        CHECK(pu.orthogonal_part.approx_equal(u, 1e-10));

        std::vector<Mat> spd;
        for (int d : s.dims()) {
            const Mat a = oracle::random_matrix(d, d, rng);
            spd.push_back(a * a.transpose() + Mat::Identity(d, d));
        }
        const GlTensorElement p = GlTensorElement::kronecker(s, spd);
        const PolarDecomposition pp = polar_decompose(p);
        CHECK(pp.positive_element().approx_equal(p, 1e-10));
        CHECK(pp.orthogonal_part.approx_equal(GlTensorElement::identity(s), 1e-10));

        for (int t = 0; t < 20; ++t) {
            const GlTensorElement g = random_element(TensorShape({2, 2, 2}), rng);
            const PolarDecomposition d = polar_decompose(g);
            CHECK((d.recompose().matrix() - g.matrix()).norm() < 1e-8 * g.matrix().norm());
            CHECK(is_orthogonal(d.orthogonal_part, 1e-10));
            for (const auto& sp : d.positive_part) {
                CHECK((sp - sp.transpose()).norm() < 1e-12);
                CHECK(Eigen::SelfAdjointEigenSolver<Mat>(sp).eigenvalues().minCoeff() > 0.0);
            }
        }
    }

    TEST_CASE("is_orthogonal examples") {
        const TensorShape s({2, 2});
        CHECK(is_orthogonal(GlTensorElement::identity(s), 1e-12));
        Mat d(2, 2);
        d << 2, 0, 0, 1;
        CHECK_FALSE(is_orthogonal(GlTensorElement::kronecker(s, {d, Mat::Identity(2, 2)}), 1e-8));
        const GlTensorElement r = GlTensorElement::make(s, {1, 0}, {oracle::rotation(0.3), oracle::rotation(1.1)});
        CHECK(is_orthogonal(r, 1e-12));
        const Mat m = r.matrix();
        CHECK((m.transpose() * m - Mat::Identity(4, 4)).norm() < 1e-12);
        CHECK_FALSE(is_orthogonal(GlTensorElement::scalar(s, 2.0), 1e-8));
    }

    TEST_CASE("nearest kronecker") {
        std::mt19937_64 rng(9);
        const Mat a = oracle::random_matrix(2, 2, rng), b = oracle::random_matrix(3, 3, rng);
        const KroneckerFactors k = nearest_kronecker(oracle::kron(a, b), TensorShape({2, 3}));
        CHECK(k.relative_residual < 1e-12);
        const Mat r = oracle::kron(k.factors[0], k.factors[1]);
        CHECK((r - oracle::kron(a, b)).norm() < 1e-12 * r.norm());
        const double ratio = k.factors[0](0, 0) / a(0, 0);
        CHECK((k.factors[0] - ratio * a).norm() < 1e-10 * a.norm() * std::abs(ratio));

        const KroneckerFactors id = nearest_kronecker(Mat::Identity(8, 8), TensorShape({2, 2, 2}));
        CHECK(id.residual < 1e-12);
        CHECK(id.factors.size() == 3);

        const Mat diag = Mat((Vec(4) << 2, 1, 1, 1).finished().asDiagonal());
        CHECK(nearest_kronecker(diag, TensorShape({2, 2})).residual > 0.1);
        CHECK_THROWS_AS(nearest_kronecker(Mat::Identity(5, 5), TensorShape({2, 2})), DimensionMismatch);
    }

    TEST_CASE("xi chart") {
        const TensorShape s({2, 2});
        CHECK(xi(SymBody::ball(4), s).approx_equal(GlTensorElement::identity(s), 1e-12));
        CHECK((xi(SymBody::ball(4, 2.0), s).matrix() - 2.0 * Mat::Identity(4, 4)).norm() < 1e-12);
        Mat d(2, 2);
        d << 4, 0, 0, 1;
        Mat r(2, 2);
        r << 2, 0, 0, 1;
        const GlTensorElement x = xi(SymBody::ellipsoid(oracle::kron(d, Mat::Identity(2, 2))), s);
        CHECK(x.approx_equal(GlTensorElement::kronecker(s, {r, Mat::Identity(2, 2)}), 1e-12));
        CHECK_THROWS_AS(xi(SymBody::ellipsoid(Mat((Vec(4) << 2, 1, 1, 1).finished().asDiagonal())), s), NonTensorialEllipsoid);

        std::mt19937_64 rng(10);
        for (const TensorShape& sh : {TensorShape({2, 3}), TensorShape({2, 2, 2})}) {
            for (int t = 0; t < 10; ++t) {
                const SymBody el = random_tensorial_ellipsoid(sh, rng);
                const SymBody back = act_on_body(inverse(xi(el, sh)), el);
                CHECK((back.shape() - Mat::Identity(sh.total(), sh.total())).norm() < 1e-7);
                CHECK(hausdorff(back, SymBody::ball(sh.total())).value < 1e-6);
            }
        }
    }

    TEST_CASE("chart dimension") {
        CHECK(chart_dimension(TensorShape({2, 2})) == 6);
        CHECK(chart_dimension(TensorShape({2, 3})) == 9);
        CHECK(chart_dimension(TensorShape({2, 2, 2})) == 9);
    }

    TEST_CASE("restore keeps canonical factors bit for bit") {
        std::mt19937_64 rng(11);
        const GlTensorElement g = random_element(TensorShape({2, 3}), rng);
        const GlTensorElement h = GlTensorElement::restore(g.shape(), g.sigma(), g.factors());
        CHECK(h.identical(g));
    }
}
