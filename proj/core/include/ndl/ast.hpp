#pragma once

#include <string>
#include <vector>

namespace ndl {

/// Typed logic-variable slot of an operator program.
/// T = model variable, D = value, I = index. For self-indexed arrays the
/// index kind collapses into D. level 0 = global, k>0 = local scope depth.
struct Ref {
    char kind = 'T';
    int ordinal = 0;
    int level = 0;

    bool operator==(const Ref&) const = default;
    auto operator<=>(const Ref&) const = default;
};

/// Global ref ordinals come in per-array blocks, in array declaration
/// order: the k-th visible array owns T ordinals [k·kTRefBlock, (k+1)·
/// kTRefBlock) and D/I ordinals [k·kDRefBlock, …). Grammars size their
/// terminal families by these widths, so on models with several arrays
/// an otherwise unconstrained ordinal still names its array.
inline constexpr int kTRefBlock = 5;
inline constexpr int kDRefBlock = 4;

enum class AtomKind {
    // selectors
    sel_constraint, sel_variable, sel_value, sel_constant,
    // modifiers
    mod_set, mod_swap, mod_flip,
    // filters
    flt_is_satisfied, flt_is_violated, flt_eq, flt_neq, flt_lt,
    // combinators
    cmb_for_each, cmb_bfs_over, cmb_bfs_over_inverted,
    cmb_iterate, cmb_iterate_reversed,
};

bool is_selector(AtomKind k);
bool is_modifier(AtomKind k);
bool is_filter(AtomKind k);
bool is_combinator(AtomKind k);

/// Atom spellings as they appear in operator text.
const char* atom_name(AtomKind k);

struct Atom;

struct Program {
    std::vector<Atom> atoms;
};

/// One conjunct. `name` carries the constraint/constant-set label where
/// the variant takes one. Combinators use `sel` (for_each) or
/// `args[0]` as the start ref plus `pair`, and `body`.
struct Atom {
    AtomKind kind = AtomKind::sel_constraint;
    std::string name;
    std::vector<Ref> args;
    std::vector<Ref> pair;          // two refs for bfs/iterate heads
    std::vector<Atom> sel;          // for_each: exactly one selector atom
    Program body;

    // source position for diagnostics (1-based; 0 = synthetic)
    int line = 0, col = 0;

    bool operator==(const Atom& o) const;
};

/// Count of atoms including combinator bodies and for_each selectors.
int atom_count(const Program& p);

/// "2" for the second top-level atom, "2.1" for the first atom of its
/// body, and so on.
std::string atom_path(const std::vector<int>& indices);

/// Inverse of atom_path; nullptr when the path names nothing.  A for_each
/// occupies slot 1 of its own path with its selector, so its body starts
/// at slot 2; other combinator bodies start at slot 1.
const Atom* atom_at(const Program& p, const std::string& path);

} // namespace ndl
