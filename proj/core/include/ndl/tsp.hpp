#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ndl/ast.hpp"
#include "ndl/model.hpp"

namespace ndl {

struct InvalidSize : ModelError {
    using ModelError::ModelError;
};

struct TspInstance {
    int n_cities = 0;
    std::vector<Configuration> initial_tours;
};

/// Circuit decomposition of an n-city TSP: decision array `next`
/// (self-indexed successors), derived `order` (visit sequence from city 1),
/// constraint types all_diff_next, all_diff_order, self_diff_next.
Model tsp_model(int n);

/// Uniformly random directed Hamiltonian cycle, returned propagated.
Configuration random_tour(const Model& m, std::uint64_t seed);
Configuration random_tour(int n, std::uint64_t seed);

/// Hand-encoded neighborhood operators: `2opt`, `3opt_basic`, `even_swap`.
/// Each type-checks against any tsp_model and analyzes with zero introns.
std::map<std::string, Program> reference_operators();

/// The 2-opt fixture with three dead atoms planted between its live ones;
/// pruning them recovers the clean fixture's behavior.
Program raw_2opt_variant();

} // namespace ndl
