#pragma once

#include <string>
#include <vector>

#include "ndl/ast.hpp"
#include "ndl/model.hpp"

namespace ndl {

struct TypeIssue {
    std::string path;   // "2.1"-style atom path
    std::string reason;
};

struct TypeReport {
    bool ok = true;
    std::vector<TypeIssue> errors;
    /// refs bound before each atom, keyed by path, rendered sorted.
    std::vector<std::pair<std::string, std::vector<std::string>>> bound_before;
};

/// Static checks: names resolve, argument kinds/arities match the atom
/// forms, chain iteration only over self-indexed arrays, local refs stay
/// within scope, and every ref slot gets a variable type (unification;
/// a model with a single visible type absorbs unconstrained slots).
/// Dataflow problems (unbound inputs) are not errors here — static
/// analysis treats them as introns.
TypeReport type_check(const Model& m, const Program& p);

} // namespace ndl
