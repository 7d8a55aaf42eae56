#pragma once

#include "tbody/types.hpp"

#include <memory>

namespace tbody {

// A 0-symmetric convex body with nonempty interior, either
//  - a V-polytope conv(+-v_1, ..., +-v_m), storing one sign-canonical
//    representative per vertex pair as the columns of `vertices()`, or
//  - an ellipsoid {x : x^T M^-1 x <= 1} with M symmetric positive definite.
//
// Values are immutable; copies share the cached inverse.
class SymBody {
public:
    enum class Kind { VPolytope, Ellipsoid };
    enum class Prune { Yes, No };

    // Validates that the columns span R^d. With Prune::Yes redundant
    // representatives are removed (ties resolve to removal).
    static SymBody polytope(const Mat& vertices, Prune prune = Prune::Yes, double tol = 1e-9);
    static SymBody ellipsoid(const Mat& shape);

    static SymBody cross_polytope(int d, double radius = 1.0);
    static SymBody cube(int d, double half_width = 1.0);
    static SymBody ball(int d, double radius = 1.0);

    Kind kind() const { return kind_; }
    bool is_polytope() const { return kind_ == Kind::VPolytope; }
    bool is_ellipsoid() const { return kind_ == Kind::Ellipsoid; }
    int dim() const { return dim_; }

    // Representative vertices as columns. Throws for ellipsoids.
    const Mat& vertices() const;
    // Shape matrix M and its inverse. Throw for polytopes.
    const Mat& shape() const;
    const Mat& shape_inverse() const;

    // Bitwise equality of the stored representation.
    bool identical(const SymBody& other) const;

    SymBody scaled(double s) const;

private:
    SymBody() = default;

    Kind kind_ = Kind::VPolytope;
    int dim_ = 0;
    std::shared_ptr<const Mat> data_;
    std::shared_ptr<const Mat> inverse_;
};

}  // namespace tbody
