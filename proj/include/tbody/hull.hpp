#pragma once

#include "tbody/types.hpp"

namespace tbody {

// Facets of conv(+-p_j) for points given as columns in dimension 1, 2 or 3.
// Returns one outward normal w per symmetric facet pair, scaled so the facet
// is {x : <w,x> = 1}; columns are sign-canonical and deduplicated.
//
// Because the facet normals of a symmetric polytope are the vertices of its
// polar, this doubles as vertex enumeration for {x : |<w_k,x>| <= 1}.
Mat symmetric_hull_facets(const Mat& points, double tol = 1e-9);

// Flip a vector so its first entry above `eps * |v|_inf` is positive.
void canonical_sign(Eigen::Ref<Vec> v, double eps = 1e-12);

// Drop columns that coincide (up to sign) with an earlier column within
// `tol * scale`. Order of first occurrence is kept.
Mat dedupe_columns(const Mat& cols, double tol = 1e-12);

}  // namespace tbody
