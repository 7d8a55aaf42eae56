#pragma once

#include "tbody/gl_tensor.hpp"
#include "tbody/tensorial.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tbody {

// Random group elements for property runs.
Mat random_orthogonal(int d, std::mt19937_64& rng);
// Orthogonal factors with a random admissible permutation.
GlTensorElement random_orthogonal_element(const TensorShape& shape, std::mt19937_64& rng);
// U_i diag(exp(spread * N(0,1))) V_i factors with a random admissible permutation.
GlTensorElement random_element(const TensorShape& shape, std::mt19937_64& rng, double spread = 0.4);
// Kronecker product of random positive definite factors.
SymBody random_tensorial_ellipsoid(const TensorShape& shape, std::mt19937_64& rng, double spread = 0.4);

struct InvariantRow {
    int trial = 0;
    std::uint64_t seed = 0;
    std::string quantity;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct InvariantConfig {
    TensorShape shape{std::vector<int>{2, 2}};
    std::uint64_t seed = 1;
    int trials = 10;
    TensorialOptions tensorial;
};

// The property suite on generated bodies, one block of rows per trial, in
// trial order. Trials run concurrently.
std::vector<InvariantRow> run_invariants(const InvariantConfig& cfg);

// trial,seed,quantity,value,tolerance,pass with 17 significant digits.
std::string invariants_csv(const std::vector<InvariantRow>& rows);

}  // namespace tbody
