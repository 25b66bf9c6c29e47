#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ndl {

/// Distinguished marker for derived variables whose derivation chain
/// does not reach them (e.g. a broken circuit).
constexpr int undef_value = std::numeric_limits<int>::min();

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DuplicateName : ModelError { using ModelError::ModelError; };
struct UnknownVariableRef : ModelError { using ModelError::ModelError; };
struct UnknownConstraintType : ModelError { using ModelError::ModelError; };
struct EmptyDomain : ModelError { using ModelError::ModelError; };
struct ModelMismatch : ModelError { using ModelError::ModelError; };

/// Built-in binary predicates attachable to constraint edges.
/// neq_value_index compares endpoint A's value with endpoint B's index,
/// which encodes unary "no self assignment" constraints as self-loops.
enum class Pred { neq_values, eq_values, lt_values, neq_value_index };

enum class EdgeGen { all_pairs, self_loop };

/// Derivation rule kinds for derived variable arrays.
/// circuit_order: order[first index] = first index;
/// order[source[prev]] = step, following the successor chain.
enum class DerivedKind { circuit_order };

struct DerivedRule {
    DerivedKind kind = DerivedKind::circuit_order;
    std::string source;      // name of the source (decision) array
    int source_type = -1;    // resolved id
};

struct VariableTypeDecl {
    std::string name;
    int index_lo = 1, index_hi = 1;   // inclusive index range
    int domain_lo = 1, domain_hi = 1; // inclusive value range
    bool derived = false;
    std::optional<DerivedRule> rule;

    int count() const { return index_hi - index_lo + 1; }
    bool self_indexed() const {
        return index_lo == domain_lo && index_hi == domain_hi;
    }
    bool in_domain(int v) const { return v >= domain_lo && v <= domain_hi; }
    bool in_index(int i) const { return i >= index_lo && i <= index_hi; }
};

/// A variable instance: (array type id, index within the array).
struct VarId {
    int type = -1;
    int index = 0;
    bool operator==(const VarId&) const = default;
    auto operator<=>(const VarId&) const = default;
};

struct ConstraintTypeDecl {
    std::string name;
    Pred pred = Pred::neq_values;
    EdgeGen gen = EdgeGen::all_pairs;
    std::string target;   // array the generator quantifies over
    int target_type = -1;
    std::vector<std::pair<VarId, VarId>> edges; // directed, generation order
};

struct ConstantSetDecl {
    std::string name;
    std::vector<int> values;
};

class Configuration;

/// Typed constraint graph: variable arrays, typed directed binary
/// constraint edges, and constant sets. Immutable once built.
class Model {
public:
    std::vector<VariableTypeDecl> variable_types;
    std::vector<ConstraintTypeDecl> constraint_types;
    std::vector<ConstantSetDecl> constants;

    int var_type_id(const std::string& name) const;       // -1 when missing
    int constraint_type_id(const std::string& name) const;
    int constant_id(const std::string& name) const;

    /// Count of non-derived variable instances.
    int decision_count() const;

    /// Single non-derived type id when exactly one exists, else -1.
    int sole_visible_type() const;

    Configuration make_config() const;
};

/// Validates declarations and freezes edge lists.
Model build_model(std::vector<VariableTypeDecl> vars,
                  std::vector<ConstraintTypeDecl> cons,
                  std::vector<ConstantSetDecl> consts = {});

/// Total assignment for all variable instances of a model.
/// Derived entries may hold undef_value.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(const Model& m);

    int get(VarId v) const { return slots_[base_[v.type] + ofs(v)]; }
    void set(VarId v, int val) { slots_[base_[v.type] + ofs(v)] = val; }
    bool defined(VarId v) const { return get(v) != undef_value; }

    bool operator==(const Configuration&) const = default;

    /// Flat storage, variable types in declaration order. Exposed for
    /// hashing and cheap snapshots.
    const std::vector<int>& raw() const { return slots_; }
    std::vector<int>& raw() { return slots_; }

private:
    int ofs(VarId v) const { return v.index - lo_[v.type]; }
    std::vector<int> slots_;
    std::vector<int> base_;
    std::vector<int> lo_;
};

/// Recomputes derived arrays from their rules in declaration order;
/// unreachable entries become undef_value. Decision variables untouched.
void propagate(const Model& m, Configuration& c);

/// True iff the edge's predicate holds. Any undefined operand counts
/// as a violation, never an error.
bool check_edge(const Model& m, int ctype, std::pair<VarId, VarId> edge,
                const Configuration& c);

/// Satisfied edges / total edges for one constraint type; 1.0 when the
/// type has no edges.
double satisfied_ratio(const Model& m, const std::string& ctype,
                       const Configuration& c);
double satisfied_ratio(const Model& m, int ctype, const Configuration& c);

/// Fraction of decision variables whose values differ.
double diff_ratio(const Model& m, const Configuration& a,
                  const Configuration& b);

/// True iff every constraint type is fully satisfied.
bool admissible(const Model& m, const Configuration& c);

} // namespace ndl
