#include "tbody/body.hpp"

#include "tbody/hull.hpp"
#include "tbody/kernels.hpp"

#include <cmath>
#include <cstring>

namespace tbody {

SymBody SymBody::polytope(const Mat& vertices, Prune prune, double tol) {
    const Eigen::Index d = vertices.rows();
    if (d < 1) throw CorruptBody("polytope with zero dimension");
    if (!vertices.allFinite()) throw CorruptBody("non-finite vertex coordinates");
    Eigen::ColPivHouseholderQR<Mat> qr(vertices);
    qr.setThreshold(1e-10);
    if (vertices.cols() < d || qr.rank() < d)
        throw CorruptBody("vertices do not span R^" + std::to_string(d) + " (empty interior)");

    SymBody b;
    b.kind_ = Kind::VPolytope;
    b.dim_ = static_cast<int>(d);
    Mat v = dedupe_columns(vertices);
    if (prune == Prune::Yes) v = kernels::parallel::extreme_columns(v, tol);
    b.data_ = std::make_shared<const Mat>(std::move(v));
    return b;
}

SymBody SymBody::ellipsoid(const Mat& shape) {
    if (shape.rows() != shape.cols() || shape.rows() < 1) throw CorruptBody("shape matrix must be square");
    if (!shape.allFinite()) throw CorruptBody("non-finite shape matrix");
    const double asym = (shape - shape.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, shape.cwiseAbs().maxCoeff());
    if (asym > 1e-9 * scale) throw CorruptBody("shape matrix is not symmetric");
    Mat M = 0.5 * (shape + shape.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    if (es.eigenvalues().minCoeff() <= 1e-12 * scale) throw CorruptBody("shape matrix is not positive definite");

    SymBody b;
    b.kind_ = Kind::Ellipsoid;
    b.dim_ = static_cast<int>(M.rows());
    Mat inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    inv = 0.5 * (inv + inv.transpose());
    b.data_ = std::make_shared<const Mat>(std::move(M));
    b.inverse_ = std::make_shared<const Mat>(std::move(inv));
    return b;
}

SymBody SymBody::cross_polytope(int d, double radius) {
    return polytope(radius * Mat::Identity(d, d), Prune::No);
}

SymBody SymBody::cube(int d, double half_width) {
    // representatives of {-1,1}^d with first coordinate +1
    const Eigen::Index m = Eigen::Index{1} << (d - 1);
    Mat v(d, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        v(0, k) = half_width;
        for (int i = 1; i < d; ++i) v(i, k) = ((k >> (i - 1)) & 1) ? -half_width : half_width;
    }
    return polytope(v, Prune::No);
}

SymBody SymBody::ball(int d, double radius) {
    return ellipsoid(radius * radius * Mat::Identity(d, d));
}

const Mat& SymBody::vertices() const {
    if (kind_ != Kind::VPolytope) throw Unsupported("vertices() requested from an ellipsoid");
    return *data_;
}

const Mat& SymBody::shape() const {
    if (kind_ != Kind::Ellipsoid) throw Unsupported("shape() requested from a polytope");
    return *data_;
}

const Mat& SymBody::shape_inverse() const {
    if (kind_ != Kind::Ellipsoid) throw Unsupported("shape_inverse() requested from a polytope");
    return *inverse_;
}

bool SymBody::identical(const SymBody& other) const {
    if (kind_ != other.kind_ || dim_ != other.dim_) return false;
    const Mat& a = *data_;
    const Mat& b = *other.data_;
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<size_t>(a.size())) == 0;
}

SymBody SymBody::scaled(double s) const {
    if (!(s > 0)) throw InvalidArgument("scale factor must be positive");
    if (is_polytope()) return polytope(s * vertices(), Prune::No);
    return ellipsoid(s * s * shape());
}

}  // namespace tbody
