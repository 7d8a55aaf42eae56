#pragma once

#include "tbody/body.hpp"

#include <vector>

namespace tbody {

// Factor dimensions (d_1, ..., d_l) of the tensor space, l >= 2, d_i >= 2.
// Coordinates are flattened row-major: e_{k_1} (x) ... (x) e_{k_l} sits at
// ((k_1 * d_2 + k_2) * d_3 + ...) .
class TensorShape {
public:
    explicit TensorShape(std::vector<int> dims);

    int order() const { return static_cast<int>(dims_.size()); }
    int dim(int i) const { return dims_[static_cast<size_t>(i)]; }
    const std::vector<int>& dims() const { return dims_; }
    int total() const { return total_; }

    bool operator==(const TensorShape&) const = default;

private:
    std::vector<int> dims_;
    int total_ = 1;
};

using FactorTuple = std::vector<SymBody>;

TensorShape shape_of(const FactorTuple& factors);

Mat kron(const Mat& a, const Mat& b);
Mat kron(const std::vector<Mat>& factors);
Vec kron_vec(const std::vector<Vec>& xs, const TensorShape& shape);

// All Kronecker products of columns, one factor column per matrix; the column
// index runs row-major over the factor column indices.
Mat kron_columns(const std::vector<Mat>& factor_columns);

// Q_1 (x)_pi ... (x)_pi Q_l for polytope factors.
SymBody projective_product(const FactorTuple& factors);

// Gauge of the projective product without materializing a pruned body.
// Polytopes: LP over vertex products. Ellipsoids (l = 2): nuclear norm.
double projective_gauge(const FactorTuple& factors, const Vec& u);

// The injective product exists only through its gauge and support oracles,
// evaluated over the polar vertices of the factors.
class InjectiveProduct {
public:
    explicit InjectiveProduct(const FactorTuple& factors);

    // max over polar-vertex tuples of |<a^1 (x) ... (x) a^l, u>|
    double gauge(const Vec& u) const;
    // gauge of the projective product of the polars
    double support(const Vec& u) const;

    const TensorShape& shape() const { return shape_; }
    const std::vector<Mat>& polar_vertices() const { return polar_; }

private:
    TensorShape shape_;
    bool ellipsoidal_ = false;
    std::vector<Mat> polar_;        // polytope factors
    std::vector<Mat> inv_sqrt_;     // ellipsoid factors: M_i^{-1/2}
    Mat polar_products_;
};

double injective_gauge(const FactorTuple& factors, const Vec& u);
double injective_support(const FactorTuple& factors, const Vec& u);

// E_1 (x)_2 ... (x)_2 E_l, shape matrix M_1 (x) ... (x) M_l.
SymBody hilbert_product(const FactorTuple& ellipsoids);

}  // namespace tbody
