#include "ndl/grammar.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace ndl {

namespace {

constexpr int kInf = 1 << 29;

struct Builder {
    const Model& m;
    const GrammarOptions& opt;
    Grammar g;
    std::map<std::string, int> term_ids;
    std::map<std::string, int> nt_ids;
    // family nonterminal -> (ref kind, first ordinal) for canonical naming
    std::map<int, std::pair<char, int>> family;

    std::vector<int> decision_types;
    std::vector<int> eligible_constraints;

    Builder(const Model& model, const GrammarOptions& o) : m(model), opt(o) {
        for (int t = 0; t < (int)m.variable_types.size(); ++t)
            if (!m.variable_types[t].derived) decision_types.push_back(t);
        for (int c = 0; c < (int)m.constraint_types.size(); ++c)
            if (!m.variable_types[m.constraint_types[c].target_type].derived)
                eligible_constraints.push_back(c);
    }

    GrammarSymbol lit(const std::string& text) {
        auto it = term_ids.find(text);
        if (it == term_ids.end()) {
            it = term_ids.emplace(text, (int)g.terminals.size()).first;
            g.terminals.push_back(text);
        }
        return {true, it->second};
    }

    int nt(const std::string& name) {
        auto it = nt_ids.find(name);
        if (it == nt_ids.end()) {
            it = nt_ids.emplace(name, (int)g.nonterminals.size()).first;
            g.nonterminals.push_back(name);
            g.productions.emplace_back();
        }
        return it->second;
    }

    GrammarSymbol use(int id) { return {false, id}; }

    void alt(int target, std::vector<GrammarSymbol> syms) {
        g.productions[target].push_back(std::move(syms));
    }

    int ref_family(char kind, const std::string& suffix, int type_pos,
                   int type_id, int count, int base) {
        std::string prefix(1, (char)std::tolower(kind));
        int id = nt(prefix + "_" + m.variable_types[type_id].name + suffix);
        if (!g.productions[id].empty()) return id;
        family[id] = {kind, base};
        for (int k = 0; k < count; ++k)
            alt(id, {lit(std::string(1, kind) + std::to_string(base + k))});
        if (!suffix.empty())
            for (int k = 0; k < opt.n_local_refs; ++k)
                alt(id, {lit("L" + std::string(1, kind) + std::to_string(k))});
        (void)type_pos;
        return id;
    }

    struct Families {
        int t = -1;
        int d = -1;
        int idx = -1; // index family: equals d for self-indexed arrays
    };

    std::map<int, Families> fams(const std::string& suffix) {
        std::map<int, Families> out;
        for (int pos = 0; pos < (int)decision_types.size(); ++pos) {
            int t = decision_types[pos];
            Families f;
            f.t = ref_family('T', suffix, pos, t, opt.n_t_refs,
                             pos * opt.n_t_refs);
            f.d = ref_family('D', suffix, pos, t, opt.n_d_refs,
                             pos * opt.n_d_refs);
            f.idx = m.variable_types[t].self_indexed()
                        ? f.d
                        : ref_family('I', suffix, pos, t, opt.n_d_refs,
                                     pos * opt.n_d_refs);
            out[t] = f;
        }
        return out;
    }

    struct Group {
        int program = -1;
        int atom = -1;
        int selector = -1;
    };

    void selector_alts(int target, const std::map<int, Families>& fam) {
        for (int c : eligible_constraints) {
            auto& ct = m.constraint_types[c];
            auto& f = fam.at(ct.target_type);
            alt(target, {lit("constraint(" + ct.name + ", "), use(f.t),
                         lit(", "), use(f.t), lit(")")});
        }
        for (int t : decision_types) {
            auto& f = fam.at(t);
            alt(target, {lit("variable("), use(f.idx), lit(", "), use(f.t),
                         lit(")")});
            alt(target, {lit("value("), use(f.t), lit(", "), use(f.d),
                         lit(")")});
        }
        for (auto& cs : m.constants) {
            auto& f = fam.at(decision_types.front());
            alt(target,
                {lit("constant(" + cs.name + ", "), use(f.d), lit(")")});
        }
    }

    void modifier_alts(int target, const std::map<int, Families>& fam) {
        for (int t : decision_types) {
            auto& f = fam.at(t);
            alt(target,
                {lit("set("), use(f.t), lit(", "), use(f.d), lit(")")});
            alt(target,
                {lit("swap("), use(f.t), lit(", "), use(f.t), lit(")")});
            alt(target, {lit("flip("), use(f.t), lit(", "), use(f.d),
                         lit(", "), use(f.d), lit(")")});
        }
    }

    void filter_alts(int target, const std::map<int, Families>& fam) {
        for (int c : eligible_constraints) {
            auto& ct = m.constraint_types[c];
            auto& f = fam.at(ct.target_type);
            for (const char* head : {"is_satisfied(", "is_violated("})
                alt(target, {lit(head + ct.name + ", "), use(f.t), lit(", "),
                             use(f.t), lit(")")});
        }
        for (int t : decision_types) {
            auto& f = fam.at(t);
            for (const char* head : {"eq(", "neq("})
                alt(target, {lit(head), use(f.t), lit(", "), use(f.t),
                             lit(")")});
            for (const char* head : {"eq(", "neq(", "lt("})
                alt(target, {lit(head), use(f.d), lit(", "), use(f.d),
                             lit(")")});
        }
    }

    // The head argument is read in the enclosing scope, so it uses `fam`;
    // the pair binds names the body sees, so those slots use `pair_fam`,
    // which carries the local alternatives when scoped bodies are on.
    void combinator_alts(int target, const std::map<int, Families>& fam,
                         const std::map<int, Families>& pair_fam,
                         int selector_nt, int body_program) {
        alt(target, {lit("for_each("), use(selector_nt), lit(", ("),
                     use(body_program), lit("))")});
        for (int c : eligible_constraints) {
            auto& ct = m.constraint_types[c];
            auto& f = fam.at(ct.target_type);
            auto& pf = pair_fam.at(ct.target_type);
            for (const char* head : {"bfs_over(", "bfs_over_inverted("})
                alt(target, {lit(head + ct.name + ", "), use(f.t), lit(", "),
                             use(pf.t), lit("-"), use(pf.t), lit(", ("),
                             use(body_program), lit("))")});
        }
        for (int t : decision_types) {
            if (!m.variable_types[t].self_indexed()) continue;
            auto& f = fam.at(t);
            auto& pf = pair_fam.at(t);
            for (const char* head : {"iterate(", "iterate_reversed("})
                alt(target, {lit(head), use(f.t), lit(", "), use(pf.t),
                             lit("-"), use(pf.d), lit(", ("),
                             use(body_program), lit("))")});
        }
    }

    Group build_group(const std::string& suffix,
                      const std::map<int, Families>& fam,
                      const std::map<int, Families>& pair_fam,
                      bool combinators, int body_program) {
        Group grp;
        grp.program = nt("program" + suffix);
        grp.atom = nt("atom" + suffix);
        grp.selector = nt("selector" + suffix);
        int modifier = nt("modifier" + suffix);
        int filter = nt("filter" + suffix);

        alt(grp.program, {use(grp.atom)});
        alt(grp.program, {use(grp.atom), lit(", "), use(grp.program)});
        alt(grp.atom, {use(grp.selector)});
        alt(grp.atom, {use(modifier)});
        alt(grp.atom, {use(filter)});
        selector_alts(grp.selector, fam);
        modifier_alts(modifier, fam);
        filter_alts(filter, fam);
        if (combinators) {
            int combinator = nt("combinator" + suffix);
            alt(grp.atom, {use(combinator)});
            int body = body_program < 0 ? grp.program : body_program;
            combinator_alts(combinator, fam, pair_fam, grp.selector, body);
        }
        return grp;
    }

    // Substitutes every selector slot by each of its alternatives so the
    // refs inside a first-atom combinator head get canonicalized too.
    void expand_selectors(const std::vector<GrammarSymbol>& seq,
                          int selector_nt,
                          std::vector<std::vector<GrammarSymbol>>& out) {
        for (size_t i = 0; i < seq.size(); ++i) {
            const GrammarSymbol& s = seq[i];
            if (s.terminal || s.id != selector_nt) continue;
            for (auto& alternative : g.productions[selector_nt]) {
                std::vector<GrammarSymbol> merged(seq.begin(),
                                                  seq.begin() + i);
                merged.insert(merged.end(), alternative.begin(),
                              alternative.end());
                merged.insert(merged.end(), seq.begin() + i + 1, seq.end());
                expand_selectors(merged, selector_nt, out);
            }
            return;
        }
        out.push_back(seq);
    }

    // Rewrites the ref-family slots of one alternative to fixed canonical
    // names: slot k of a family kind becomes that family's k-th ref.
    std::vector<GrammarSymbol> canonical(const std::vector<GrammarSymbol>& in) {
        std::vector<GrammarSymbol> out;
        std::map<std::pair<char, int>, int> next_ord;
        for (auto& s : in) {
            auto it = s.terminal ? family.end() : family.find(s.id);
            if (it == family.end()) {
                out.push_back(s);
                continue;
            }
            auto [kind, base] = it->second;
            int ord = base + next_ord[it->second]++;
            out.push_back(lit(std::string(1, kind) + std::to_string(ord)));
        }
        return out;
    }

    Grammar build() {
        if (decision_types.empty())
            throw NoModifiableVariables(
                "model has no non-derived variable arrays");
        auto base = fams("");
        bool split_body = opt.local_scopes || opt.forbid_nested_combinators;
        auto body_fam = opt.local_scopes ? fams("_b") : base;
        int body_program = -1;
        if (split_body) {
            Group b = build_group("_b", body_fam, body_fam,
                                  !opt.forbid_nested_combinators, -1);
            body_program = b.program;
        }
        Group top = build_group("", base, body_fam, true, body_program);
        g.start = top.program;

        if (opt.symmetry_breaking) {
            int sb_program = nt("program_first");
            int sb_atom = nt("atom_first");
            alt(sb_program, {use(sb_atom)});
            alt(sb_program, {use(sb_atom), lit(", "), use(top.program)});
            std::vector<std::vector<GrammarSymbol>> flat;
            for (auto& alternative : g.productions[top.atom])
                for (auto& sub : g.productions[alternative[0].id])
                    expand_selectors(sub, top.selector, flat);
            for (auto& a : flat) alt(sb_atom, canonical(a));
            g.start = sb_program;
        }

        g.options = opt;
        compute_min_depth();
        return std::move(g);
    }

    void compute_min_depth() {
        auto& md = g.min_depth;
        md.assign(g.nonterminals.size(), kInf);
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t n = 0; n < g.productions.size(); ++n) {
                int best = kInf;
                for (auto& alternative : g.productions[n]) {
                    int worst = 0;
                    for (auto& s : alternative)
                        worst = std::max(worst,
                                         s.terminal ? 1 : md[s.id]);
                    best = std::min(best, worst >= kInf ? kInf : 1 + worst);
                }
                if (best < md[n]) {
                    md[n] = best;
                    changed = true;
                }
            }
        }
    }
};

} // namespace

int Grammar::nonterminal_id(const std::string& name) const {
    for (int i = 0; i < (int)nonterminals.size(); ++i)
        if (nonterminals[i] == name) return i;
    return -1;
}

Grammar generate_grammar(const Model& m, const GrammarOptions& opt) {
    Builder b(m, opt);
    return b.build();
}

std::string render_bnf(const Grammar& g) {
    std::string out;
    for (size_t n = 0; n < g.nonterminals.size(); ++n) {
        out += "<" + g.nonterminals[n] + "> ::= ";
        for (size_t a = 0; a < g.productions[n].size(); ++a) {
            if (a) out += " | ";
            for (size_t s = 0; s < g.productions[n][a].size(); ++s) {
                if (s) out += ' ';
                auto& sym = g.productions[n][a][s];
                if (sym.terminal)
                    out += "\"" + g.terminals[sym.id] + "\"";
                else
                    out += "<" + g.nonterminals[sym.id] + ">";
            }
        }
        out += '\n';
    }
    return out;
}

int tree_depth(const DerivationTree& t) {
    int worst = 1;
    for (auto& c : t.children) worst = std::max(worst, tree_depth(c));
    return 1 + worst;
}

static void render_pheno(const Grammar& g, const DerivationTree& t,
                         std::string& out) {
    auto& syms = g.productions[t.nt][t.alt];
    size_t ci = 0;
    for (auto& s : syms) {
        if (s.terminal)
            out += g.terminals[s.id];
        else
            render_pheno(g, t.children[ci++], out);
    }
}

std::string phenotype(const Grammar& g, const DerivationTree& t) {
    std::string out;
    render_pheno(g, t, out);
    return out;
}

DerivationTree grow_tree(const Grammar& g, int nt, std::mt19937_64& rng,
                         int budget) {
    if (g.min_depth[nt] > budget)
        throw DepthInfeasible("depth budget " + std::to_string(budget) +
                              " below minimum " +
                              std::to_string(g.min_depth[nt]) + " for <" +
                              g.nonterminals[nt] + ">");
    DerivationTree root;
    root.nt = nt;
    struct Slot {
        DerivationTree* node;
        int rem;
    };
    std::vector<Slot> open{{&root, budget}};
    std::vector<int> fit;
    while (!open.empty()) {
        size_t k = (size_t)draw(rng, open.size());
        Slot slot = open[k];
        open[k] = open.back();
        open.pop_back();

        auto& alts = g.productions[slot.node->nt];
        fit.clear();
        for (int a = 0; a < (int)alts.size(); ++a) {
            bool ok = true;
            for (auto& s : alts[a]) {
                int need = s.terminal ? 1 : g.min_depth[s.id];
                if (need > slot.rem - 1) {
                    ok = false;
                    break;
                }
            }
            if (ok) fit.push_back(a);
        }
        if (fit.empty())
            throw DepthInfeasible("no alternative of <" +
                                  g.nonterminals[slot.node->nt] +
                                  "> fits the remaining budget");
        int a = fit[(size_t)draw(rng, fit.size())];
        slot.node->alt = a;
        size_t holes = 0;
        for (auto& s : alts[a])
            if (!s.terminal) ++holes;
        slot.node->children.resize(holes);
        size_t ci = 0;
        for (auto& s : alts[a]) {
            if (s.terminal) continue;
            slot.node->children[ci].nt = s.id;
            open.push_back({&slot.node->children[ci], slot.rem - 1});
            ++ci;
        }
    }
    return root;
}

DerivationTree sample_tree(const Grammar& g, std::uint64_t seed,
                           int max_depth) {
    std::mt19937_64 rng(seed);
    return grow_tree(g, g.start, rng, max_depth);
}

std::string sample_sentence(const Grammar& g, std::uint64_t seed,
                            int max_depth) {
    return phenotype(g, sample_tree(g, seed, max_depth));
}

namespace {

struct Matcher {
    const Grammar& g;
    const std::string& text;
    std::map<std::pair<int, size_t>, std::vector<size_t>> memo;

    const std::vector<size_t>& nt_ends(int nt, size_t pos) {
        auto key = std::make_pair(nt, pos);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::set<size_t> out;
        for (auto& alternative : g.productions[nt])
            seq_ends(alternative, 0, pos, out);
        return memo
            .emplace(key, std::vector<size_t>(out.begin(), out.end()))
            .first->second;
    }

    void seq_ends(const std::vector<GrammarSymbol>& syms, size_t si,
                  size_t pos, std::set<size_t>& out) {
        if (si == syms.size()) {
            out.insert(pos);
            return;
        }
        auto& s = syms[si];
        if (s.terminal) {
            const std::string& t = g.terminals[s.id];
            if (text.compare(pos, t.size(), t) == 0)
                seq_ends(syms, si + 1, pos + t.size(), out);
            return;
        }
        for (size_t e : nt_ends(s.id, pos)) seq_ends(syms, si + 1, e, out);
    }
};

} // namespace

bool grammar_accepts(const Grammar& g, const std::string& text) {
    Matcher m{g, text, {}};
    auto& ends = m.nt_ends(g.start, 0);
    return std::find(ends.begin(), ends.end(), text.size()) != ends.end();
}

} // namespace ndl
