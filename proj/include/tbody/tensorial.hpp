#pragma once

#include "tbody/body.hpp"
#include "tbody/gl_tensor.hpp"
#include "tbody/tensor_ops.hpp"

#include <cstdint>
#include <string>

namespace tbody {

struct TensorialOptions {
    double tol = 1e-6;            // relative slack of both inclusion checks
    double marginal = 1e-4;       // violations in (tol, marginal] are flagged
    double section_tol = 1e-9;    // section reconstruction accuracy
    int section_cap = 10000;      // max gauge evaluations per section
    int ball_resolution_2d = 64;  // inscribed polygon for Euclidean summands
    int ball_icosphere_level = 2; // 320 faces
    double mvee_tol = 1e-11;      // factor Loewner ellipsoids inside l_(x)
    double slice_tol = 1e-5;      // phi_inv accepts |l(L) - I|_F up to this
};

// Canonical section bodies Q^1, ..., Q^l through the decomposable anchor
// a^1 (x) ... (x) a^l (anchor_factors), with the anchor on the boundary.
struct SectionFamily {
    std::vector<Vec> anchor_factors;
    Vec anchor;
    FactorTuple bodies;
    bool anchor_perturbed = false;
};

// {x in R^{d_i} : a^1 (x) .. x .. (x) a^l in Q}. Polytopes are recovered from
// the gauge oracle by cutting planes: every LP certificate y lifts to a
// supporting functional L^T y of the section, and the outer polytope is
// refined at its vertices until they all lie within `section_tol` of the
// boundary. Ellipsoid sections are computed in closed form.
SymBody section_body(const SymBody& q, const TensorShape& shape, const std::vector<Vec>& anchor_factors, int i,
                     const TensorialOptions& opt = {});

// Sections through e_1 (x) ... (x) (lambda e_1), lambda = 1 / g_Q(e_1 (x) ... (x) e_1).
SectionFamily canonical_sections(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt = {});

struct TensorialVerdict {
    enum class Side { None, ProjectiveNotInside, OutsideInjective, KroneckerResidual };

    bool tensorial = false;
    bool marginal = false;
    SectionFamily sections;
    Side side = Side::None;
    Vec witness;             // offending point (vertex), empty for residual witnesses
    double violation = 0.0;  // worst relative slack; Kronecker residual on the ellipsoid path
    double projective_slack = 0.0;
    double injective_slack = 0.0;
};

std::string to_string(TensorialVerdict::Side side);

TensorialVerdict is_tensorial(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt = {});

class NotTensorial : public Error {
public:
    explicit NotTensorial(TensorialVerdict v);
    const TensorialVerdict& verdict() const { return verdict_; }

private:
    TensorialVerdict verdict_;
};

// Projective product of the canonical sections. Ellipsoid sections are
// replaced by images of the inscribed ball polytope.
SymBody conv_otimes(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt = {});

// Loewner(Q^1) (x)_2 ... (x)_2 Loewner(Q^l).
SymBody l_otimes(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt = {});

bool in_slice(const SymBody& q, const TensorShape& shape, double tol, const TensorialOptions& opt = {});

// xi(l_(x)(Q))^{-1} Q, together with the element used.
struct Retraction {
    SymBody body;
    SymBody ellipsoid;             // l_(x)(Q)
    GlTensorElement transform;     // xi(l_(x)(Q)); Q = transform * body
};
Retraction retract(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt = {});
SymBody retract_r(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt = {});

struct PhiValue {
    SymBody slice_body;
    SymBody ellipsoid;
};
PhiValue phi(const SymBody& q, const TensorShape& shape, const TensorialOptions& opt = {});
SymBody phi_inv(const SymBody& slice_body, const SymBody& ellipsoid, const TensorShape& shape,
                const TensorialOptions& opt = {});

struct HomotopyValue {
    SymBody body;
    double ball_error = 0.0;     // Hausdorff distance of each ball summand to B_2
    std::vector<int> resolution; // per-factor ball resolution (vertices in 2D, faces in 3D)
};
HomotopyValue homotopy(const SymBody& q, double t, const TensorShape& shape, const TensorialOptions& opt = {});

struct RandomTensorialParams {
    int factor_vertices = 4;  // representatives sampled per factor
    int extra_points = 8;     // points added between the two products
    double t = 0.5;           // interpolation cap: 0 gives the projective product
};

struct RandomTensorial {
    SymBody body;
    FactorTuple factors;
};

RandomTensorial random_tensorial_with_factors(std::uint64_t seed, const TensorShape& shape,
                                              const RandomTensorialParams& params = {});
SymBody random_tensorial(std::uint64_t seed, const TensorShape& shape, const RandomTensorialParams& params = {});

// Checks of the inclusions through `anchors` random decomposable boundary
// anchors; returns the worst relative violation. Diagnostic only.
double multi_anchor_stress(const SymBody& q, const TensorShape& shape, int anchors, std::uint64_t seed,
                           const TensorialOptions& opt = {});

struct MarginReport {
    enum class Status { Holds, ConclusionFailed, PreconditionViolated, HypothesisNotMet };
    Status status = Status::Holds;
    double max_gauge_p = 0.0;        // sampled max of g_P on the sphere; need <= 1 / (2 eps)
    double hausdorff = 0.0;          // delta^H(P, Q); need < eps
    double min_support_q = 0.0;      // sampled min of h_Q on the sphere; conclusion needs >= eps
    double inradius_lower_q = 0.0;   // certified inner radius of Q
    bool conclusion_holds = false;   // evaluated regardless of the preconditions
    bool certified = false;          // inradius_lower_q >= eps
};

std::string to_string(MarginReport::Status s);

// If 2 eps B_2 is inside P and delta^H(P, Q) < eps then eps B_2 is inside Q.
MarginReport natalia_margin(const SymBody& p, const SymBody& q, double eps, int samples = 400,
                            unsigned seed = 1);

}  // namespace tbody
