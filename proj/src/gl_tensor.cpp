#include "tbody/gl_tensor.hpp"

#include <cmath>
#include <cstring>

namespace tbody {

namespace {

void validate_sigma(const TensorShape& shape, const std::vector<int>& sigma) {
    const int l = shape.order();
    if (static_cast<int>(sigma.size()) != l)
        throw InvalidArgument("permutation length " + std::to_string(sigma.size()) + " does not match order " +
                              std::to_string(l));
    std::vector<char> seen(static_cast<size_t>(l), 0);
    for (int k = 0; k < l; ++k) {
        const int s = sigma[static_cast<size_t>(k)];
        if (s < 0 || s >= l || seen[static_cast<size_t>(s)]) throw InvalidArgument("sigma is not a permutation");
        seen[static_cast<size_t>(s)] = 1;
        if (shape.dim(s) != shape.dim(k))
            throw InvalidArgument("sigma maps position " + std::to_string(k) + " to a factor of different dimension");
    }
}

double leading_entry(const Mat& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > 1e-12 * scale) return m(i, j);
    return 0.0;
}

void canonicalize(std::vector<Mat>& f) {
    double residue = 1.0;
    for (size_t i = 0; i + 1 < f.size(); ++i) {
        const double c = f[i].norm() / std::sqrt(static_cast<double>(f[i].rows()));
        f[i] /= c;
        residue *= c;
        if (leading_entry(f[i]) < 0) {
            f[i] = -f[i];
            residue = -residue;
        }
    }
    f.back() *= residue;
}

// out = T applied along `axis` of the row-major tensor t with dims `dims`.
Vec mode_product(const Vec& t, const std::vector<int>& dims, int axis, const Mat& T) {
    Eigen::Index pre = 1, post = 1;
    for (int k = 0; k < axis; ++k) pre *= dims[static_cast<size_t>(k)];
    for (size_t k = static_cast<size_t>(axis) + 1; k < dims.size(); ++k) post *= dims[k];
    const Eigen::Index n = dims[static_cast<size_t>(axis)];
    Vec out(t.size());
    for (Eigen::Index p = 0; p < pre; ++p) {
        using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        Eigen::Map<const RowMat> in(t.data() + p * n * post, n, post);
        Eigen::Map<RowMat> o(out.data() + p * n * post, n, post);
        o.noalias() = T * in;
    }
    return out;
}

Vec permute_axes(const Vec& u, const std::vector<int>& dims, const std::vector<int>& sigma) {
    const size_t l = dims.size();
    std::vector<Eigen::Index> stride(l, 1);
    for (size_t k = l - 1; k-- > 0;) stride[k] = stride[k + 1] * dims[k + 1];
    Vec out(u.size());
    std::vector<int> idx(l, 0);
    for (Eigen::Index n = 0; n < u.size(); ++n) {
        Eigen::Index j = 0;
        for (size_t k = 0; k < l; ++k) j += idx[k] * stride[static_cast<size_t>(sigma[k])];
        out(n) = u(j);
        for (size_t k = l; k-- > 0;) {
            if (++idx[k] < dims[k]) break;
            idx[k] = 0;
        }
    }
    return out;
}

bool is_identity_perm(const std::vector<int>& s) {
    for (size_t k = 0; k < s.size(); ++k)
        if (s[k] != static_cast<int>(k)) return false;
    return true;
}

Mat sym_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

GlTensorElement GlTensorElement::make(const TensorShape& shape, std::vector<int> sigma, std::vector<Mat> factors) {
    validate_sigma(shape, sigma);
    if (static_cast<int>(factors.size()) != shape.order())
        throw InvalidArgument("expected " + std::to_string(shape.order()) + " factor maps");
    for (int i = 0; i < shape.order(); ++i) {
        const Mat& f = factors[static_cast<size_t>(i)];
        if (f.rows() != shape.dim(i) || f.cols() != shape.dim(i))
            throw DimensionMismatch("factor " + std::to_string(i) + " must be " + std::to_string(shape.dim(i)) +
                                    "x" + std::to_string(shape.dim(i)));
        if (!f.allFinite()) throw InvalidArgument("non-finite factor entries");
        const Eigen::JacobiSVD<Mat> svd(f);
        const Vec sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 1e-12 * sv(0)) throw InvalidArgument("factor " + std::to_string(i) + " is singular");
    }
    canonicalize(factors);
    GlTensorElement t(shape);
    t.sigma_ = std::move(sigma);
    t.factors_ = std::move(factors);
    return t;
}

GlTensorElement GlTensorElement::restore(const TensorShape& shape, std::vector<int> sigma,
                                         std::vector<Mat> factors) {
    GlTensorElement t = make(shape, sigma, factors);
    for (size_t i = 0; i < factors.size(); ++i)
        if ((t.factors_[i] - factors[i]).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, factors[i].cwiseAbs().maxCoeff()))
            return t;
    t.factors_ = std::move(factors);
    return t;
}

GlTensorElement GlTensorElement::kronecker(const TensorShape& shape, std::vector<Mat> factors) {
    std::vector<int> id(static_cast<size_t>(shape.order()));
    for (size_t k = 0; k < id.size(); ++k) id[k] = static_cast<int>(k);
    return make(shape, std::move(id), std::move(factors));
}

GlTensorElement GlTensorElement::permutation(const TensorShape& shape, std::vector<int> sigma) {
    std::vector<Mat> f;
    for (int d : shape.dims()) f.push_back(Mat::Identity(d, d));
    return make(shape, std::move(sigma), std::move(f));
}

GlTensorElement GlTensorElement::identity(const TensorShape& shape) { return scalar(shape, 1.0); }

GlTensorElement GlTensorElement::scalar(const TensorShape& shape, double c) {
    std::vector<Mat> f;
    for (int d : shape.dims()) f.push_back(Mat::Identity(d, d));
    f.back() *= c;
    return kronecker(shape, std::move(f));
}

Vec GlTensorElement::apply(const Vec& u) const {
    require_dim(u.size(), shape_.total(), "GL_(x) action");
    Vec t = is_identity_perm(sigma_) ? u : permute_axes(u, shape_.dims(), sigma_);
    for (int k = 0; k < shape_.order(); ++k) t = mode_product(t, shape_.dims(), k, factors_[static_cast<size_t>(k)]);
    return t;
}

Mat GlTensorElement::apply_columns(const Mat& u) const {
    Mat out(u.rows(), u.cols());
    for (Eigen::Index j = 0; j < u.cols(); ++j) out.col(j) = apply(u.col(j));
    return out;
}

Mat GlTensorElement::matrix() const { return apply_columns(Mat::Identity(shape_.total(), shape_.total())); }

double GlTensorElement::operator_norm() const {
    double n = 1.0;
    for (const auto& f : factors_) n *= Eigen::JacobiSVD<Mat>(f).singularValues()(0);
    return n;
}

bool GlTensorElement::identical(const GlTensorElement& o) const {
    if (!(shape_ == o.shape_) || sigma_ != o.sigma_) return false;
    for (size_t i = 0; i < factors_.size(); ++i)
        if (std::memcmp(factors_[i].data(), o.factors_[i].data(), sizeof(double) * factors_[i].size()) != 0)
            return false;
    return true;
}

bool GlTensorElement::approx_equal(const GlTensorElement& o, double tol) const {
    if (!(shape_ == o.shape_) || sigma_ != o.sigma_) return false;
    for (size_t i = 0; i < factors_.size(); ++i)
        if ((factors_[i] - o.factors_[i]).cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

std::vector<int> compose_permutations(const std::vector<int>& sigma, const std::vector<int>& beta) {
    std::vector<int> out(sigma.size());
    for (size_t i = 0; i < sigma.size(); ++i) out[i] = beta[static_cast<size_t>(sigma[i])];
    return out;
}

GlTensorElement compose(const GlTensorElement& s, const GlTensorElement& t) {
    if (!(s.shape() == t.shape())) throw DimensionMismatch("compose: shapes differ");
    std::vector<Mat> f;
    for (size_t i = 0; i < s.factors().size(); ++i)
        f.push_back(s.factors()[i] * t.factors()[static_cast<size_t>(s.sigma()[i])]);
    return GlTensorElement::make(s.shape(), compose_permutations(s.sigma(), t.sigma()), std::move(f));
}

GlTensorElement inverse(const GlTensorElement& t) {
    const auto& tau = t.sigma();
    std::vector<int> inv(tau.size());
    for (size_t i = 0; i < tau.size(); ++i) inv[static_cast<size_t>(tau[i])] = static_cast<int>(i);
    std::vector<Mat> f;
    for (size_t i = 0; i < tau.size(); ++i) f.push_back(t.factors()[static_cast<size_t>(inv[i])].inverse());
    return GlTensorElement::make(t.shape(), std::move(inv), std::move(f));
}

SymBody act_on_body(const GlTensorElement& t, const SymBody& q) {
    require_dim(q.dim(), t.shape().total(), "act_on_body");
    if (q.is_polytope()) return SymBody::polytope(t.apply_columns(q.vertices()), SymBody::Prune::No);
    const Mat am = t.apply_columns(q.shape());
    const Mat m = t.apply_columns(am.transpose());
    return SymBody::ellipsoid(0.5 * (m + m.transpose()));
}

GlTensorElement PolarDecomposition::positive_element() const {
    return GlTensorElement::kronecker(orthogonal_part.shape(), positive_part);
}

GlTensorElement PolarDecomposition::recompose() const { return compose(positive_element(), orthogonal_part); }

PolarDecomposition polar_decompose(const GlTensorElement& t) {
    std::vector<Mat> pos, orth;
    for (const auto& f : t.factors()) {
        const Eigen::JacobiSVD<Mat> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Mat& U = svd.matrixU();
        Mat s = U * svd.singularValues().asDiagonal() * U.transpose();
        pos.push_back(0.5 * (s + s.transpose()));
        orth.push_back(U * svd.matrixV().transpose());
    }
    const TensorShape& shape = t.shape();
    GlTensorElement positive = GlTensorElement::kronecker(shape, pos);
    return {positive.factors(), GlTensorElement::make(shape, t.sigma(), std::move(orth))};
}

bool is_orthogonal(const GlTensorElement& t, double tol) {
    for (const auto& f : t.factors())
        if ((f.transpose() * f - Mat::Identity(f.rows(), f.cols())).norm() > tol) return false;
    return true;
}

KroneckerFactors nearest_kronecker(const Mat& m, const TensorShape& shape) {
    const Eigen::Index d = shape.total();
    if (m.rows() != d || m.cols() != d)
        throw DimensionMismatch("nearest_kronecker: matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", shape needs " + std::to_string(d));
    const bool symmetric = (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());

    KroneckerFactors out;
    Mat rest = m;
    for (int i = 0; i + 1 < shape.order(); ++i) {
        const Eigen::Index d1 = shape.dim(i);
        const Eigen::Index d2 = rest.rows() / d1;
        // R[(i1,j1), (i2,j2)] = rest[i1*d2 + i2, j1*d2 + j2]
        Mat R(d1 * d1, d2 * d2);
        for (Eigen::Index i1 = 0; i1 < d1; ++i1)
            for (Eigen::Index j1 = 0; j1 < d1; ++j1)
                for (Eigen::Index i2 = 0; i2 < d2; ++i2)
                    for (Eigen::Index j2 = 0; j2 < d2; ++j2)
                        R(i1 * d1 + j1, i2 * d2 + j2) = rest(i1 * d2 + i2, j1 * d2 + j2);
        const Eigen::JacobiSVD<Mat> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double s = std::sqrt(svd.singularValues()(0));
        Mat a(d1, d1), b(d2, d2);
        for (Eigen::Index i1 = 0; i1 < d1; ++i1)
            for (Eigen::Index j1 = 0; j1 < d1; ++j1) a(i1, j1) = s * svd.matrixU()(i1 * d1 + j1, 0);
        for (Eigen::Index i2 = 0; i2 < d2; ++i2)
            for (Eigen::Index j2 = 0; j2 < d2; ++j2) b(i2, j2) = s * svd.matrixV()(i2 * d2 + j2, 0);
        if (a.trace() < 0 || (a.trace() == 0 && leading_entry(a) < 0)) {
            a = -a;
            b = -b;
        }
        if (symmetric) {
            a = 0.5 * (a + a.transpose());
            b = 0.5 * (b + b.transpose());
        }
        out.factors.push_back(a);
        rest = b;
    }
    out.factors.push_back(rest);
    out.residual = (m - kron(out.factors)).norm();
    const double mn = m.norm();
    out.relative_residual = mn > 0 ? out.residual / mn : 0.0;
    return out;
}

GlTensorElement xi(const SymBody& e, const TensorShape& shape, double tol) {
    if (!e.is_ellipsoid()) throw InvalidArgument("xi is defined on ellipsoids");
    require_dim(e.dim(), shape.total(), "xi");
    KroneckerFactors k = nearest_kronecker(e.shape(), shape);
    if (k.relative_residual > tol)
        throw NonTensorialEllipsoid("ellipsoid is not tensorial: relative Kronecker residual " +
                                        std::to_string(k.relative_residual),
                                    k.relative_residual);
    canonicalize(k.factors);
    std::vector<Mat> roots;
    for (const auto& f : k.factors) {
        Eigen::SelfAdjointEigenSolver<Mat> es(f);
        if (es.eigenvalues().minCoeff() <= 0)
            throw NonTensorialEllipsoid("Kronecker factor of the shape matrix is not positive definite",
                                        k.relative_residual);
        roots.push_back(sym_sqrt(f));
    }
    return GlTensorElement::kronecker(shape, std::move(roots));
}

int chart_dimension(const TensorShape& shape) {
    int p = 0;
    for (int d : shape.dims()) p += d * (d + 1) / 2;
    return p;
}

}  // namespace tbody
