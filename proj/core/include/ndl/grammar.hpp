#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndl/ast.hpp"
#include "ndl/model.hpp"
#include "ndl/rng.hpp"

namespace ndl {

/// Thrown by generate_grammar when the model has no variable array that a
/// modifier could act on, so no useful operator can be derived.
struct NoModifiableVariables : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a requested depth budget cannot fit even the smallest sentence.
struct DepthInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GrammarOptions {
    /// Global T-refs made available per variable array. Keep at kTRefBlock
    /// so ordinals fall into the per-array blocks the type checker expects.
    int n_t_refs = kTRefBlock;
    /// Global D-refs (and I-refs where those are distinct) per variable array.
    int n_d_refs = kDRefBlock;
    /// Scope-local refs added inside combinator bodies when local_scopes is on.
    int n_local_refs = 2;
    bool local_scopes = false;
    bool symmetry_breaking = false;
    bool forbid_nested_combinators = false;
    /// Default derivation-depth budget for sampling.
    int max_depth = 90;
};

struct GrammarSymbol {
    bool terminal = false;
    int id = 0;

    bool operator==(const GrammarSymbol&) const = default;
};

/// Context-free grammar over the operator surface syntax.  Terminals are
/// literal text chunks; concatenating the terminals of a complete derivation
/// yields a parseable single-line program.
struct Grammar {
    std::vector<std::string> nonterminals;
    std::vector<std::string> terminals;
    /// productions[nt][alt] is a symbol sequence.
    std::vector<std::vector<std::vector<GrammarSymbol>>> productions;
    int start = 0;
    GrammarOptions options;

    /// Smallest achievable derivation depth per nonterminal.
    std::vector<int> min_depth;

    int nonterminal_id(const std::string& name) const;
};

Grammar generate_grammar(const Model& m, const GrammarOptions& opt = {});

/// One production per line: `<nt> ::= "lit" <other> | ...`.
std::string render_bnf(const Grammar& g);

/// Derivation tree node.  children holds one entry per nonterminal symbol of
/// the chosen alternative, in sequence order; terminals carry no node.
struct DerivationTree {
    int nt = -1;
    int alt = -1;
    std::vector<DerivationTree> children;
};

/// Depth of the derivation: leaves under a node count one level each.
int tree_depth(const DerivationTree& t);

/// Concatenated terminal text of the derivation.
std::string phenotype(const Grammar& g, const DerivationTree& t);

/// Grow a random derivation for `nt` within `budget` depth levels, expanding
/// open slots in random order and choosing uniformly among the alternatives
/// that still fit.  Throws DepthInfeasible if nothing fits.
DerivationTree grow_tree(const Grammar& g, int nt, std::mt19937_64& rng,
                         int budget);

DerivationTree sample_tree(const Grammar& g, std::uint64_t seed, int max_depth);

std::string sample_sentence(const Grammar& g, std::uint64_t seed,
                            int max_depth);

/// True when `text` is a sentence of the grammar (depth unrestricted).
bool grammar_accepts(const Grammar& g, const std::string& text);

} // namespace ndl
