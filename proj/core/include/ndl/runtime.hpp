#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "ndl/ast.hpp"
#include "ndl/model.hpp"

namespace ndl {

struct ExecBudget {
    long max_neighbors = 10000;
    long max_steps = 1000000; // atom evaluations
    int max_branch_depth = 256;
};

/// Enumeration result. `neighbors` is a multiset in emission order;
/// every member is total with derived arrays recomputed.
struct NeighborSet {
    std::vector<Configuration> neighbors;
    bool truncated = false;
    long steps_used = 0;
};

/// enumerate_neighbors expects a program whose dead atoms were pruned
/// away; feeding it an unpruned one is a caller bug, not an operator
/// property.
struct UnprunedProgram : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A modifier tried to assign a value outside the target's domain.
/// Inside enumeration this silently kills the branch instead.
struct DomainViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// What a ref is bound to: a variable handle for T refs, a plain
/// number for D/I refs.
struct BoundValue {
    bool is_var = false;
    VarId var{};
    int num = 0;
};

using Bindings = std::map<Ref, BoundValue>;

/// Observer invoked after every modifier application with the working
/// (unpropagated) configuration of the current branch.
using TraceFn = std::function<void(const Atom&, const Configuration&)>;

/// Depth-first enumeration of the operator's neighborhood from `start`
/// (total, propagated). Atom semantics: selectors are relational and
/// fan out one branch per match; filters kill the branch, except at the
/// top level of a combinator body where a false filter merely ends that
/// combinator's iteration; modifiers mutate the branch-local
/// configuration. A combinator whose iteration completes after at least
/// one modification emits one snapshot; a finished branch emits its
/// final state when modified and different from the branch's last
/// emission. Budget exhaustion flags `truncated` instead of failing.
NeighborSet enumerate_neighbors(const Model& m, const Program& p,
                                const Configuration& start,
                                const ExecBudget& budget = {},
                                const TraceFn& trace = {});

/// One modifier applied outside enumeration (set / swap / flip);
/// throws DomainViolation instead of pruning.
Configuration apply_modifier(const Model& m, const Configuration& c,
                             const Atom& modifier, const Bindings& b);

} // namespace ndl
