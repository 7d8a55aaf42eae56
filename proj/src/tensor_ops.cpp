#include "tbody/tensor_ops.hpp"

#include "tbody/convex.hpp"
#include "tbody/kernels.hpp"
#include "tbody/lp.hpp"

#include <cmath>

namespace tbody {

TensorShape::TensorShape(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw InvalidArgument("a tensor shape needs at least two factors");
    for (int d : dims_) {
        if (d < 2) throw InvalidArgument("every factor dimension must be >= 2");
        total_ *= d;
    }
}

TensorShape shape_of(const FactorTuple& factors) {
    std::vector<int> dims;
    for (const auto& f : factors) dims.push_back(f.dim());
    return TensorShape(std::move(dims));
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat kron(const std::vector<Mat>& factors) {
    if (factors.empty()) throw InvalidArgument("kron of an empty list");
    Mat out = factors.front();
    for (size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
    return out;
}

Vec kron_vec(const std::vector<Vec>& xs, const TensorShape& shape) {
    if (static_cast<int>(xs.size()) != shape.order())
        throw DimensionMismatch("kron_vec: expected " + std::to_string(shape.order()) + " factors");
    for (int i = 0; i < shape.order(); ++i) require_dim(xs[i].size(), shape.dim(i), "kron_vec factor");
    Vec out = xs.front();
    for (size_t i = 1; i < xs.size(); ++i) {
        Vec next(out.size() * xs[i].size());
        for (Eigen::Index k = 0; k < out.size(); ++k) next.segment(k * xs[i].size(), xs[i].size()) = out(k) * xs[i];
        out = std::move(next);
    }
    return out;
}

Mat kron_columns(const std::vector<Mat>& cols) {
    Eigen::Index rows = 1, count = 1;
    for (const auto& c : cols) {
        rows *= c.rows();
        count *= c.cols();
    }
    Mat out(rows, count);
    std::vector<Eigen::Index> idx(cols.size(), 0);
    for (Eigen::Index n = 0; n < count; ++n) {
        Eigen::Index rem = n;
        for (size_t i = cols.size(); i-- > 0;) {
            idx[i] = rem % cols[i].cols();
            rem /= cols[i].cols();
        }
        Vec v = cols[0].col(idx[0]);
        for (size_t i = 1; i < cols.size(); ++i) {
            Vec next(v.size() * cols[i].rows());
            for (Eigen::Index k = 0; k < v.size(); ++k)
                next.segment(k * cols[i].rows(), cols[i].rows()) = v(k) * cols[i].col(idx[i]);
            v = std::move(next);
        }
        out.col(n) = v;
    }
    return out;
}

namespace {

enum class FactorKind { Polytopes, Ellipsoids };

FactorKind classify(const FactorTuple& factors) {
    shape_of(factors);
    bool poly = true, ell = true;
    for (const auto& f : factors) {
        poly = poly && f.is_polytope();
        ell = ell && f.is_ellipsoid();
    }
    if (poly) return FactorKind::Polytopes;
    if (ell) return FactorKind::Ellipsoids;
    throw Unsupported("mixed polytope/ellipsoid factors are not supported");
}

std::vector<Mat> factor_vertices(const FactorTuple& factors) {
    std::vector<Mat> v;
    for (const auto& f : factors) v.push_back(f.vertices());
    return v;
}

Mat inv_sqrt(const Mat& M) {
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

// M_1^{-1/2} U M_2^{-1/2} with U the row-major d1 x d2 matricization of u.
Mat whitened_matrix(const std::vector<Mat>& inv_sqrt_factors, const Vec& u) {
    const Eigen::Index d1 = inv_sqrt_factors[0].rows(), d2 = inv_sqrt_factors[1].rows();
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> U(u.data(), d1, d2);
    return inv_sqrt_factors[0] * U * inv_sqrt_factors[1];
}

}  // namespace

SymBody projective_product(const FactorTuple& factors) {
    if (classify(factors) != FactorKind::Polytopes)
        throw Unsupported("projective_product needs polytope factors; use hilbert_product for ellipsoids");
    // products of extreme points are extreme, so pruning would keep every column
    return SymBody::polytope(kron_columns(factor_vertices(factors)), SymBody::Prune::No);
}

double projective_gauge(const FactorTuple& factors, const Vec& u) {
    const TensorShape shape = shape_of(factors);
    require_dim(u.size(), shape.total(), "projective_gauge");
    if (classify(factors) == FactorKind::Polytopes)
        return solve_gauge_lp(kron_columns(factor_vertices(factors)), u).value;
    if (factors.size() != 2) throw Unsupported("projective gauge of ellipsoids is implemented for two factors");
    std::vector<Mat> w{inv_sqrt(factors[0].shape()), inv_sqrt(factors[1].shape())};
    return Eigen::JacobiSVD<Mat>(whitened_matrix(w, u)).singularValues().sum();
}

InjectiveProduct::InjectiveProduct(const FactorTuple& factors) : shape_(shape_of(factors)) {
    if (classify(factors) == FactorKind::Polytopes) {
        for (const auto& f : factors) polar_.push_back(tbody::polar_vertices(f));
        polar_products_ = kron_columns(polar_);
    } else {
        if (factors.size() != 2)
            throw Unsupported("injective product of ellipsoids is implemented for two factors");
        ellipsoidal_ = true;
        for (const auto& f : factors) inv_sqrt_.push_back(inv_sqrt(f.shape()));
    }
}

double InjectiveProduct::gauge(const Vec& u) const {
    require_dim(u.size(), shape_.total(), "injective gauge");
    if (ellipsoidal_) return Eigen::JacobiSVD<Mat>(whitened_matrix(inv_sqrt_, u)).singularValues()(0);
    return kernels::parallel::max_abs_multilinear(polar_, u);
}

double InjectiveProduct::support(const Vec& u) const {
    require_dim(u.size(), shape_.total(), "injective support");
    if (ellipsoidal_) {
        // polar of the injective product is the projective product of polars
        std::vector<Mat> sq;
        for (const auto& w : inv_sqrt_) sq.push_back(w.inverse());
        return Eigen::JacobiSVD<Mat>(whitened_matrix(sq, u)).singularValues().sum();
    }
    return solve_gauge_lp(polar_products_, u).value;
}

double injective_gauge(const FactorTuple& factors, const Vec& u) { return InjectiveProduct(factors).gauge(u); }

double injective_support(const FactorTuple& factors, const Vec& u) { return InjectiveProduct(factors).support(u); }

SymBody hilbert_product(const FactorTuple& factors) {
    if (classify(factors) != FactorKind::Ellipsoids) throw Unsupported("hilbert_product needs ellipsoid factors");
    std::vector<Mat> shapes;
    for (const auto& f : factors) shapes.push_back(f.shape());
    return SymBody::ellipsoid(kron(shapes));
}

}  // namespace tbody
