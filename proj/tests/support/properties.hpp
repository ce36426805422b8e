#pragma once

// Randomized invariant checks shared by the unit tests and the acceptance
// run, each driven by a single seed.

#include <cstdint>
#include <string>
#include <vector>

namespace pansr::testing {

struct PropertyResult {
    std::string name;
    bool passed = true;
    std::string detail; // first counterexample, if any
};

PropertyResult parse_round_trip(std::uint64_t seed);
PropertyResult simplify_soundness(std::uint64_t seed);
PropertyResult midrank_column_sums(std::uint64_t seed);
PropertyResult selection_permutation_equivariance(std::uint64_t seed);
PropertyResult upgma_bruteforce(std::uint64_t seed);
PropertyResult usage_identities(std::uint64_t seed);
PropertyResult solution_reflexive_and_scale_covariant(std::uint64_t seed);
PropertyResult r_squared_affine_invariance(std::uint64_t seed);
PropertyResult generator_determinism_and_column_order(std::uint64_t seed);
PropertyResult bart_determinism_and_vip_bounds(std::uint64_t seed);
PropertyResult gp_budget_and_closure(std::uint64_t seed);

std::vector<PropertyResult> all_properties(std::uint64_t seed);

// UPGMA that recomputes each linkage from member lists; index tie-break.
std::vector<int> naive_upgma(std::vector<double> const& values);

} // namespace pansr::testing
