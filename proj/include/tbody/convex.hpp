#pragma once

#include "tbody/body.hpp"

#include <optional>

namespace tbody {

struct GaugeValue {
    double value = 0.0;
    // Dual functional y with <y,.> <= 1 on the body and <y,x> = value.
    std::optional<Vec> certificate;
};

GaugeValue gauge(const SymBody& body, const Vec& x, double tol = 1e-9);
double support(const SymBody& body, const Vec& u);
bool membership(const SymBody& body, const Vec& x, double tol);

// Polar body. Polytopes are dualized only in dimension <= 3.
SymBody polar(const SymBody& body);

// Vertices (one per +- pair, as columns) of the polar of a polytope. Uses the
// facet enumeration in dimension <= 3 and exhaustive basis enumeration above
// that, refusing when more than `max_bases` candidate bases would be tried.
Mat polar_vertices(const SymBody& polytope, double max_bases = 5e6);

struct HausdorffValue {
    double value = 0.0;
    // Upper bound minus value; 0 for the exact polytope route and +inf when
    // the sampled estimate is not certified.
    double tolerance = 0.0;
    bool exact = false;
};

// Polytope pairs use the exact vertex-distance formula. Pairs involving an
// ellipsoid maximize |h_P - h_Q| over the unit sphere: certified branch and
// bound in the plane, sampling with local ascent otherwise (certified by a
// closed-form bound for ellipsoid pairs).
HausdorffValue hausdorff(const SymBody& p, const SymBody& q, double tol = 1e-9);

// Sphere-sampled estimate sup |h_P(u) - h_Q(u)| for any pair; used to
// cross-check the vertex formula.
double hausdorff_sampled(const SymBody& p, const SymBody& q, int samples, unsigned seed);

double dist_to_hull(const Vec& x, const SymBody& polytope, double tol = 1e-9);

// 0-centered minimum-volume ellipsoid containing the body.
SymBody loewner(const SymBody& body, double rel_tol = 1e-7);

double outradius(const SymBody& body);

// t P + (1 - t) Q for polytopes.
SymBody minkowski_combo(const SymBody& p, const SymBody& q, double t);

// Smallest s with A contained in s B, i.e. max over A of the gauge of B.
double inclusion_factor(const SymBody& a, const SymBody& b, double tol = 1e-9);

// Image of the body under a linear map.
SymBody linear_image(const Mat& A, const SymBody& body);

// Inscribed polytope approximation of the Euclidean unit ball: regular
// `resolution`-gon in 2D, subdivided icosahedron (20 * 4^level faces) in 3D.
struct BallApprox {
    SymBody body;
    double error = 0.0;  // Hausdorff distance to the true ball
    int resolution = 0;
};
BallApprox ball_approximation(int dim, int resolution_2d = 64, int icosphere_level = 2);

}  // namespace tbody

namespace tbody {

// Sphere probes used by the containment lemmas. Each starts from the basis
// directions plus `samples` seeded random directions and refines the best
// few by local (sub)gradient steps on the sphere.
//
// max over |u| = 1 of the gauge; the body contains r B_2 iff this is <= 1/r.
double max_gauge_on_sphere(const SymBody& body, int samples, unsigned seed);
// min over |u| = 1 of the support function, an upper bound on the inradius.
double min_support_on_sphere(const SymBody& body, int samples, unsigned seed);
// Certified lower bound on the inradius: a body containing +-s_k b_k for an
// orthonormal frame b contains (min_k s_k / sqrt(d)) B_2. Best of `frames`
// seeded frames (the first is the standard basis).
double inradius_lower_bound(const SymBody& body, int frames, unsigned seed);

}  // namespace tbody
