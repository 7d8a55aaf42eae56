#pragma once

#include "tbody/types.hpp"

namespace tbody {

// Solution of  min sum_j |c_j|  s.t.  V c = x,  the gauge LP of conv(+-v_j).
//
// `dual` is the optimal y of the dual problem  max <y,x>  s.t. |<v_j,y>| <= 1,
// so it is a point of the polar body with <y,x> = value.
struct GaugeLp {
    double value = 0.0;
    Vec dual;
    Vec coeffs;
    int pivots = 0;
};

// `vertices` holds one representative vertex per column. Throws CorruptBody if
// the columns do not span the ambient space.
GaugeLp solve_gauge_lp(const Mat& vertices, const Vec& x, double tol = 1e-9);

}  // namespace tbody

namespace tbody {

// Minimum-norm point of conv(columns of `atoms`), by Wolfe's fully corrective
// conditional-gradient method. `lower_bound` is the separating-hyperplane bound
// min_k <x/|x|, p_k>, so the true distance lies in [lower_bound, distance].
struct MinNormPoint {
    Vec point;
    double distance = 0.0;
    double lower_bound = 0.0;
    int iterations = 0;
};

MinNormPoint min_norm_point(const Mat& atoms, double bracket_tol = 1e-12);

}  // namespace tbody
