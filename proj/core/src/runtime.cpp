#include "ndl/runtime.hpp"

#include <algorithm>

#include "ndl/analysis.hpp"

namespace ndl {

namespace {

struct TruncatedSignal {};

struct Env {
    std::vector<std::pair<Ref, BoundValue>> v;

    const BoundValue* find(Ref r) const {
        for (auto& e : v)
            if (e.first == r) return &e.second;
        return nullptr;
    }
    void set(Ref r, BoundValue val) {
        for (auto& e : v)
            if (e.first == r) { e.second = val; return; }
        v.push_back({r, val});
    }
};

BoundValue var_val(VarId v) { return {true, v, 0}; }
BoundValue num_val(int n) { return {false, {}, n}; }

struct St {
    Configuration cfg;
    long mods = 0;
    int last_emit = -1; // index into out.neighbors, this branch's history
};

struct Interp {
    const Model& m;
    const ExecBudget& bud;
    const TraceFn& trace;
    NeighborSet out;
    long steps = 0;
    int depth = 0;

    using Cont = std::function<void(St&, Env&)>;

    void tick() {
        if (++steps > bud.max_steps) throw TruncatedSignal{};
    }

    void push_depth() {
        if (++depth > bud.max_branch_depth) throw TruncatedSignal{};
    }

    void emit(St& st) {
        if ((long)out.neighbors.size() >= bud.max_neighbors)
            throw TruncatedSignal{};
        Configuration snap = st.cfg;
        propagate(m, snap);
        out.neighbors.push_back(std::move(snap));
        st.last_emit = (int)out.neighbors.size() - 1;
    }

    // -- value helpers; nullptr/false when unbound or undefined --------

    bool ref_num(const Env& env, Ref r, const St& st, int& out_num) const {
        const BoundValue* b = env.find(r);
        if (!b) return false;
        if (!b->is_var) { out_num = b->num; return true; }
        int v = st.cfg.get(b->var);
        if (v == undef_value) return false;
        out_num = v;
        return true;
    }

    const VarId* ref_var(const Env& env, Ref r) const {
        const BoundValue* b = env.find(r);
        return b && b->is_var ? &b->var : nullptr;
    }

    static bool match_var(Env& env, Ref r, VarId v) {
        if (const BoundValue* b = env.find(r))
            return b->is_var && b->var == v;
        env.set(r, var_val(v));
        return true;
    }

    static bool match_num(Env& env, Ref r, int n) {
        if (const BoundValue* b = env.find(r))
            return !b->is_var && b->num == n;
        env.set(r, num_val(n));
        return true;
    }

    // -- filters -------------------------------------------------------

    bool filter_holds(const Atom& a, const Env& env, const St& st) const {
        switch (a.kind) {
        case AtomKind::flt_eq:
        case AtomKind::flt_neq: {
            int x, y;
            if (!ref_num(env, a.args[0], st, x) ||
                !ref_num(env, a.args[1], st, y))
                return false;
            return a.kind == AtomKind::flt_eq ? x == y : x != y;
        }
        case AtomKind::flt_lt: {
            int x, y;
            if (!ref_num(env, a.args[0], st, x) ||
                !ref_num(env, a.args[1], st, y))
                return false;
            return x < y;
        }
        case AtomKind::flt_is_satisfied:
        case AtomKind::flt_is_violated: {
            int ct = m.constraint_type_id(a.name);
            const VarId* p = ref_var(env, a.args[0]);
            const VarId* q = ref_var(env, a.args[1]);
            if (ct < 0 || !p || !q) return false;
            const auto& edges = m.constraint_types[ct].edges;
            auto it = std::find(edges.begin(), edges.end(),
                                std::make_pair(*p, *q));
            if (it == edges.end()) return false; // no such arc: neither holds
            bool sat = check_edge(m, ct, *it, st.cfg);
            return a.kind == AtomKind::flt_is_satisfied ? sat : !sat;
        }
        default:
            return false;
        }
    }

    // -- modifiers; false = domain violation, branch dies --------------

    bool run_modifier(const Atom& a, const Env& env, St& st) {
        switch (a.kind) {
        case AtomKind::mod_set: {
            const VarId* t = ref_var(env, a.args[0]);
            int val;
            if (!t || !ref_num(env, a.args[1], st, val)) return false;
            if (!m.variable_types[t->type].in_domain(val)) return false;
            st.cfg.set(*t, val);
            break;
        }
        case AtomKind::mod_swap: {
            const VarId* t1 = ref_var(env, a.args[0]);
            const VarId* t2 = ref_var(env, a.args[1]);
            if (!t1 || !t2) return false;
            int v1 = st.cfg.get(*t1), v2 = st.cfg.get(*t2);
            if (!m.variable_types[t1->type].in_domain(v2) ||
                !m.variable_types[t2->type].in_domain(v1))
                return false;
            st.cfg.set(*t1, v2);
            st.cfg.set(*t2, v1);
            break;
        }
        case AtomKind::mod_flip: {
            const VarId* t = ref_var(env, a.args[0]);
            int d1, d2;
            if (!t || !ref_num(env, a.args[1], st, d1) ||
                !ref_num(env, a.args[2], st, d2))
                return false;
            int cur = st.cfg.get(*t);
            int nv = cur == d1 ? d2 : d1;
            if (!m.variable_types[t->type].in_domain(nv)) return false;
            st.cfg.set(*t, nv);
            break;
        }
        default:
            return false;
        }
        ++st.mods;
        if (trace) trace(a, st.cfg);
        return true;
    }

    // -- selector solutions against a fixed configuration --------------

    std::vector<Env> selector_solutions(const Atom& a, const Env& env,
                                        const St& st) const {
        std::vector<Env> sols;
        switch (a.kind) {
        case AtomKind::sel_constraint: {
            int ct = m.constraint_type_id(a.name);
            if (ct < 0) break;
            for (auto& e : m.constraint_types[ct].edges) {
                Env e2 = env;
                if (match_var(e2, a.args[0], e.first) &&
                    match_var(e2, a.args[1], e.second))
                    sols.push_back(std::move(e2));
            }
            break;
        }
        case AtomKind::sel_variable: {
            for (int t = 0; t < (int)m.variable_types.size(); ++t) {
                const auto& vt = m.variable_types[t];
                if (vt.derived) continue;
                for (int i = vt.index_lo; i <= vt.index_hi; ++i) {
                    Env e2 = env;
                    if (match_num(e2, a.args[0], i) &&
                        match_var(e2, a.args[1], VarId{t, i}))
                        sols.push_back(std::move(e2));
                }
            }
            break;
        }
        case AtomKind::sel_value: {
            if (const VarId* v = ref_var(env, a.args[0])) {
                Env e2 = env;
                int val = st.cfg.get(*v);
                if (val != undef_value && match_num(e2, a.args[1], val))
                    sols.push_back(std::move(e2));
                break;
            }
            if (env.find(a.args[0])) break; // bound to a number: no match
            for (int t = 0; t < (int)m.variable_types.size(); ++t) {
                const auto& vt = m.variable_types[t];
                if (vt.derived) continue;
                for (int i = vt.index_lo; i <= vt.index_hi; ++i) {
                    Env e2 = env;
                    int val = st.cfg.get(VarId{t, i});
                    if (match_var(e2, a.args[0], VarId{t, i}) &&
                        match_num(e2, a.args[1], val))
                        sols.push_back(std::move(e2));
                }
            }
            break;
        }
        case AtomKind::sel_constant: {
            int id = m.constant_id(a.name);
            if (id < 0) break;
            for (int n : m.constants[id].values) {
                Env e2 = env;
                if (match_num(e2, a.args[0], n)) sols.push_back(std::move(e2));
            }
            break;
        }
        default:
            break;
        }
        return sols;
    }

    // -- the interpreter ----------------------------------------------

    void run_list(const std::vector<Atom>& atoms, size_t i, St& st, Env& env,
                  bool in_body, const Cont& done, const Cont& stopped) {
        if (i == atoms.size()) {
            done(st, env);
            return;
        }
        const Atom& a = atoms[i];
        tick();

        if (is_selector(a.kind)) {
            std::vector<Env> sols = selector_solutions(a, env, st);
            push_depth();
            for (auto& e2 : sols) {
                St s2 = st;
                run_list(atoms, i + 1, s2, e2, in_body, done, stopped);
            }
            --depth;
            return;
        }

        if (is_filter(a.kind)) {
            if (filter_holds(a, env, st))
                run_list(atoms, i + 1, st, env, in_body, done, stopped);
            else if (in_body)
                stopped(st, env);
            return; // top-level false: branch dies
        }

        if (is_modifier(a.kind)) {
            if (run_modifier(a, env, st))
                run_list(atoms, i + 1, st, env, in_body, done, stopped);
            return; // domain violation: branch dies
        }

        run_combinator(atoms, i, st, env, in_body, done, stopped);
    }

    // Runs `body` once per entry of `frames` (pre-bound environments),
    // sequentially in the same branch; a false body-top-level filter
    // ends the loop early. Completion emits when anything was modified,
    // then resumes the enclosing list.
    void run_loop(const std::vector<Atom>& atoms, size_t i,
                  const std::vector<Atom>& body,
                  const std::vector<Env>& frames, St& st, const Env& env_entry,
                  bool in_body, const Cont& done, const Cont& stopped) {
        long mods_entry = st.mods;
        Cont finish = [this, &atoms, i, in_body, done, stopped, &env_entry,
                       mods_entry](St& s, Env&) {
            if (s.mods > mods_entry) emit(s);
            Env e2 = env_entry;
            run_list(atoms, i + 1, s, e2, in_body, done, stopped);
        };
        std::function<void(size_t, St&)> step;
        step = [this, &step, &body, &frames, &finish](size_t idx, St& s) {
            if (idx == frames.size()) {
                Env dummy;
                finish(s, dummy);
                return;
            }
            Env e2 = frames[idx];
            Cont bdone = [&step, idx](St& s2, Env&) { step(idx + 1, s2); };
            push_depth();
            run_list(body, 0, s, e2, true, bdone, finish);
            --depth;
        };
        step(0, st);
    }

    void run_combinator(const std::vector<Atom>& atoms, size_t i, St& st,
                        Env& env, bool in_body, const Cont& done,
                        const Cont& stopped) {
        const Atom& a = atoms[i];
        Env env_entry = env;

        if (a.kind == AtomKind::cmb_for_each) {
            std::vector<Env> frames =
                selector_solutions(a.sel[0], env_entry, st);
            run_loop(atoms, i, a.body.atoms, frames, st, env_entry, in_body,
                     done, stopped);
            return;
        }

        if (a.kind == AtomKind::cmb_iterate ||
            a.kind == AtomKind::cmb_iterate_reversed) {
            const VarId* sv = ref_var(env, a.args[0]);
            if (!sv) return; // unbound start: dead branch
            int t = sv->type;
            const auto& vt = m.variable_types[t];
            bool fwd = a.kind == AtomKind::cmb_iterate;
            // chain walked on the entry snapshot; the last element is
            // left unprocessed (its successor closes the walk)
            std::vector<int> chain;
            std::vector<char> seen(vt.count(), 0);
            seen[sv->index - vt.index_lo] = 1;
            int c = sv->index;
            for (;;) {
                int nx = -1;
                if (fwd) {
                    int v = st.cfg.get(VarId{t, c});
                    if (v == undef_value || !vt.in_index(v)) break;
                    nx = v;
                } else {
                    for (int k = vt.index_lo; k <= vt.index_hi; ++k)
                        if (st.cfg.get(VarId{t, k}) == c) { nx = k; break; }
                    if (nx < 0) break;
                }
                if (seen[nx - vt.index_lo]) break;
                seen[nx - vt.index_lo] = 1;
                chain.push_back(nx);
                c = nx;
            }
            if (!chain.empty()) chain.pop_back();
            std::vector<Env> frames;
            for (int el : chain) {
                Env e2 = env_entry;
                e2.set(a.pair[0], var_val(VarId{t, el}));
                e2.set(a.pair[1], num_val(st.cfg.get(VarId{t, el})));
                frames.push_back(std::move(e2));
            }
            run_loop(atoms, i, a.body.atoms, frames, st, env_entry, in_body,
                     done, stopped);
            return;
        }

        // bfs_over / bfs_over_inverted
        int ct = m.constraint_type_id(a.name);
        const VarId* sv = ref_var(env, a.args[0]);
        if (ct < 0 || !sv) return;
        bool inverted = a.kind == AtomKind::cmb_bfs_over_inverted;
        const auto& edges = m.constraint_types[ct].edges;
        std::vector<std::pair<VarId, VarId>> visits; // (current, next)
        {
            std::vector<VarId> queue{*sv};
            std::vector<VarId> visited{*sv};
            for (size_t qi = 0; qi < queue.size(); ++qi) {
                VarId u = queue[qi];
                for (auto& e : edges) {
                    VarId from = inverted ? e.second : e.first;
                    VarId to = inverted ? e.first : e.second;
                    if (!(from == u)) continue;
                    visits.push_back({u, to});
                    if (std::find(visited.begin(), visited.end(), to) ==
                        visited.end()) {
                        visited.push_back(to);
                        queue.push_back(to);
                    }
                }
            }
        }
        std::vector<Env> frames;
        for (auto& [u, x] : visits) {
            Env e2 = env_entry;
            e2.set(a.pair[0], var_val(u));
            e2.set(a.pair[1], var_val(x));
            frames.push_back(std::move(e2));
        }
        run_loop(atoms, i, a.body.atoms, frames, st, env_entry, in_body, done,
                 stopped);
    }
};

} // namespace

NeighborSet enumerate_neighbors(const Model& m, const Program& p,
                                const Configuration& start,
                                const ExecBudget& budget,
                                const TraceFn& trace) {
    {
        StaticReport rep = analyze(m, p);
        if (!rep.introns.empty()) {
            std::string msg = "program still contains dead atoms at:";
            for (auto& s : rep.introns) msg += " " + s;
            throw UnprunedProgram(msg);
        }
    }
    Interp in{m, budget, trace};
    Interp::Cont branch_final = [&in](St& st, Env&) {
        if (st.mods == 0) return;
        Configuration snap = st.cfg;
        propagate(in.m, snap);
        if (st.last_emit >= 0 && in.out.neighbors[st.last_emit] == snap)
            return;
        if ((long)in.out.neighbors.size() >= in.bud.max_neighbors)
            throw TruncatedSignal{};
        in.out.neighbors.push_back(std::move(snap));
    };
    Interp::Cont no_stop = [](St&, Env&) {};
    St st;
    st.cfg = start;
    Env env;
    try {
        in.run_list(p.atoms, 0, st, env, false, branch_final, no_stop);
    } catch (const TruncatedSignal&) {
        in.out.truncated = true;
    }
    in.out.steps_used = in.steps;
    return std::move(in.out);
}

Configuration apply_modifier(const Model& m, const Configuration& c,
                             const Atom& modifier, const Bindings& b) {
    if (!is_modifier(modifier.kind))
        throw DomainViolation("not a modifier atom");
    ExecBudget bud;
    TraceFn no_trace;
    Interp in{m, bud, no_trace};
    Env env;
    for (auto& [r, val] : b) env.set(r, val);
    St st;
    st.cfg = c;
    if (!in.run_modifier(modifier, env, st))
        throw DomainViolation("assignment outside the target domain");
    return st.cfg;
}

} // namespace ndl
