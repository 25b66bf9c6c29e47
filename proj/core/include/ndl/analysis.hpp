#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "ndl/ast.hpp"
#include "ndl/model.hpp"

namespace ndl {

/// Every atom of a pruned-empty program is dead code; callers treat the
/// operator as having no executable core.
struct EmptyCore : std::runtime_error {
    EmptyCore() : std::runtime_error("program has no executable core") {}
};

struct StaticReport {
    /// producers with at least one output consumed later / all producers.
    double r_used_outputs = 1.0;
    /// atoms whose inputs are all bound at their position / all atoms
    /// that read inputs.
    double r_provided_inputs = 1.0;
    /// atoms with pairwise-distinct arguments / all atoms.
    double r_unique_args = 1.0;
    /// atoms that can influence a reachable, fully-bound modifier / all
    /// atoms.
    double r_effective = 1.0;
    /// paths ("3", "5.1", …) of atoms with no effect on execution.
    std::set<std::string> introns;
    double phi_code = 1.0; // mean of the four ratios
};

/// Left-to-right dataflow pass over the whole program (bodies included).
/// Does not need a Configuration; the model is only consulted for
/// interface symmetry and may carry no influence on the ratios.
StaticReport analyze(const Model& m, const Program& p);

/// Copy of `p` with every intron removed. Throws EmptyCore when nothing
/// remains. `rep` must come from analyze() on the same program.
Program prune_introns(const Program& p, const StaticReport& rep);

double phi_code(const StaticReport& rep);

} // namespace ndl
