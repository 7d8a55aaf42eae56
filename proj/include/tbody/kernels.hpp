#pragma once

#include "tbody/types.hpp"

#include <vector>

// Data-parallel kernels behind the geometric operations. Every kernel has a
// serial reference version and an OpenMP version; both produce bit-identical
// results (all reductions are max/min or happen in index order).
namespace tbody::kernels {

namespace serial {

// Columns of V (sign-canonical, deduplicated) that are extreme points of
// conv(+-V). A column within the hull of the others up to `tol` is removed.
Mat extreme_columns(const Mat& V, double tol);

// Gauge of conv(+-V) at every column of X.
Vec gauges(const Mat& V, const Mat& X, double tol);

// max over columns x of X of dist(x, conv(+-V)).
double max_dist_to_hull(const Mat& X, const Mat& V, double tol);

// max over tuples (a^1, ..., a^l), a^i a column of points[i], of
// |<a^1 (x) ... (x) a^l, u>| with row-major flattening of u.
double max_abs_multilinear(const std::vector<Mat>& points, const Vec& u);

}  // namespace serial

namespace parallel {

Mat extreme_columns(const Mat& V, double tol);
Vec gauges(const Mat& V, const Mat& X, double tol);
double max_dist_to_hull(const Mat& X, const Mat& V, double tol);
double max_abs_multilinear(const std::vector<Mat>& points, const Vec& u);

}  // namespace parallel

// Distance from x to conv(+-V): 0 inside, otherwise a min-norm-point solve.
double dist_to_hull(const Vec& x, const Mat& V, double tol);

// Contract the leading axis of a row-major tensor (as a d1 x rest matrix).
Vec contract_leading(const Vec& t, Eigen::Index d1, const Vec& a);

}  // namespace tbody::kernels
