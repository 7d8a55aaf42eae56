#pragma once

#include "tbody/gl_tensor.hpp"
#include "tbody/tensorial.hpp"

#include <cstdint>

namespace tbody {

struct BmBudget {
    int restarts = 32;
    int steps = 200;
};

struct BmOptions {
    BmBudget budget;
    std::uint64_t seed = 1;
    TensorialOptions tensorial;
};

// Q inside T P inside lambda Q, T in GL_(x). slack = {max over Q of g_{TP},
// max over TP of g_Q}; lambda is their product.
struct BmCertificate {
    double lambda = 1.0;
    GlTensorElement element;
    double slack_inner = 1.0;
    double slack_outer = 1.0;
    BmBudget budget;
    std::uint64_t seed = 0;
};

// Rescales T so that Q sits inside T P and measures both inclusions from scratch.
BmCertificate certify(const SymBody& p, const SymBody& q, const GlTensorElement& t);

// Upper bound on the tensorial Banach-Mazur distance. Both bodies are moved to
// the slice, then orthogonal Kronecker elements (all admissible permutations
// and, for planar factors, reflections) are searched from seeded restarts.
BmCertificate bm_upper(const SymBody& p, const SymBody& q, const TensorShape& shape, const BmOptions& opt = {});

struct OrbitResult {
    bool same = false;
    double best_lambda = 0.0;
    BmCertificate certificate;
};

OrbitResult same_orbit(const SymBody& p, const SymBody& q, const TensorShape& shape, double tol,
                       const BmOptions& opt = {});

struct TransporterReport {
    int trials = 0;
    int accepted = 0;       // sampled T with T Q' near C for some Q' near P
    double max_norm = 0.0;  // largest operator norm among accepted T
    double bound = 0.0;     // (outradius(C) + lambda) / eps
    int violations = 0;     // accepted T above the bound
    double identity_norm = 1.0;
};

// Requires 2 eps B_2 inside P and lambda B_2 inside C.
TransporterReport transporter_diagnostic(const SymBody& p, const SymBody& c, const TensorShape& shape, double eps,
                                         double lambda, int trials, std::uint64_t seed);

bool element_less(const GlTensorElement& a, const GlTensorElement& b);

}  // namespace tbody
