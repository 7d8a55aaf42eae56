#pragma once

#include "tbody/body.hpp"
#include "tbody/tensor_ops.hpp"

#include <vector>

namespace tbody {

// An element of GL_(x): u -> (T_1 (x) ... (x) T_l) U_sigma u, acting on
// decomposables as x^1 (x) ... (x) x^l -> T_1 x^{sigma(1)} (x) ... (x) T_l x^{sigma(l)}.
//
// `sigma` is 0-based and may only exchange positions of equal dimension.
// Factors are stored in canonical form for the quotient by scalar tuples
// (l_1 I, ..., l_l I) with product 1: every T_i with i < l has Frobenius norm
// sqrt(d_i) and a positive leading entry (row-major), T_l takes the residue.
class GlTensorElement {
public:
    static GlTensorElement make(const TensorShape& shape, std::vector<int> sigma, std::vector<Mat> factors);
    static GlTensorElement kronecker(const TensorShape& shape, std::vector<Mat> factors);
    static GlTensorElement permutation(const TensorShape& shape, std::vector<int> sigma);
    static GlTensorElement identity(const TensorShape& shape);
    static GlTensorElement scalar(const TensorShape& shape, double c);
    // Like make, but factors already in canonical form (within 1e-12) are
    // stored unchanged, so serialized elements reload bit for bit.
    static GlTensorElement restore(const TensorShape& shape, std::vector<int> sigma, std::vector<Mat> factors);

    const TensorShape& shape() const { return shape_; }
    const std::vector<int>& sigma() const { return sigma_; }
    const std::vector<Mat>& factors() const { return factors_; }

    Vec apply(const Vec& u) const;
    // Applies the element to every column.
    Mat apply_columns(const Mat& u) const;
    // Induced d x d matrix. Diagnostics only; the action never forms it.
    Mat matrix() const;
    // Operator norm on the Hilbert tensor space: product of factor norms.
    double operator_norm() const;

    bool identical(const GlTensorElement& other) const;
    bool approx_equal(const GlTensorElement& other, double tol) const;

private:
    GlTensorElement(TensorShape shape) : shape_(std::move(shape)) {}

    TensorShape shape_;
    std::vector<int> sigma_;
    std::vector<Mat> factors_;
};

// apply(compose(s, t), u) == apply(s, apply(t, u))
GlTensorElement compose(const GlTensorElement& s, const GlTensorElement& t);
GlTensorElement inverse(const GlTensorElement& t);

// Permutation group law, U_sigma U_beta = U_{beta o sigma}.
std::vector<int> compose_permutations(const std::vector<int>& sigma, const std::vector<int>& beta);

SymBody act_on_body(const GlTensorElement& t, const SymBody& q);

struct PolarDecomposition {
    std::vector<Mat> positive_part;      // symmetric positive definite S_i
    GlTensorElement orthogonal_part;     // orthogonal U_i with the permutation

    GlTensorElement positive_element() const;
    GlTensorElement recompose() const;
};

PolarDecomposition polar_decompose(const GlTensorElement& t);

bool is_orthogonal(const GlTensorElement& t, double tol);

struct KroneckerFactors {
    std::vector<Mat> factors;
    double residual = 0.0;           // Frobenius norm of M - (x) factors
    double relative_residual = 0.0;  // residual / |M|_F
};

// Nearest Kronecker product by rank-one approximation of the rearranged
// matrix; orders above two are split as d_1 x (d_2 ... d_l) recursively.
KroneckerFactors nearest_kronecker(const Mat& m, const TensorShape& shape);

class NonTensorialEllipsoid : public Error {
public:
    NonTensorialEllipsoid(const std::string& what, double residual)
        : Error("not_tensorial", what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Positive element xi(E) with xi(E)^{-1} E the Euclidean ball.
GlTensorElement xi(const SymBody& ellipsoid, const TensorShape& shape, double tol = 1e-6);

// Dimension of the chart around the positive Kronecker elements.
int chart_dimension(const TensorShape& shape);

}  // namespace tbody
