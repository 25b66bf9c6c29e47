#include "ndl/typecheck.hpp"

#include <map>
#include <set>

#include "ndl/parser.hpp"

namespace ndl {

namespace {

struct Checker {
    const Model& m;
    TypeReport rep;

    // union-find over ref slots for variable-type inference
    std::map<Ref, Ref> parent;
    std::map<Ref, int> assigned; // root -> var type id
    std::map<Ref, std::string> first_use; // ref -> earliest path (diag)

    Ref find(Ref r) {
        auto it = parent.find(r);
        if (it == parent.end()) { parent[r] = r; return r; }
        if (it->second == r) return r;
        Ref root = find(it->second);
        parent[r] = root;
        return root;
    }

    void err(const std::vector<int>& path, const std::string& why) {
        rep.errors.push_back({atom_path(path), why});
    }

    void assign(Ref r, int type, const std::vector<int>& path) {
        Ref root = find(r);
        auto it = assigned.find(root);
        if (it == assigned.end()) {
            assigned[root] = type;
        } else if (it->second != type) {
            err(path, "ref " + render_ref(r) + " used as both " +
                          m.variable_types[it->second].name + " and " +
                          m.variable_types[type].name);
        }
    }

    void unite(Ref a, Ref b, const std::vector<int>& path) {
        Ref ra = find(a), rb = find(b);
        if (ra == rb) return;
        auto ia = assigned.find(ra), ib = assigned.find(rb);
        if (ia != assigned.end() && ib != assigned.end() &&
            ia->second != ib->second) {
            err(path, "refs " + render_ref(a) + " and " + render_ref(b) +
                          " belong to different arrays");
        }
        int keep = ia != assigned.end() ? ia->second
                 : ib != assigned.end() ? ib->second : -1;
        assigned.erase(ra);
        assigned.erase(rb);
        parent[ra] = rb;
        if (keep >= 0) assigned[find(rb)] = keep;
    }

    bool want(const Atom& a, size_t i, const char* kinds,
              const std::vector<int>& path) {
        if (i >= a.args.size()) return false;
        char k = a.args[i].kind;
        for (const char* p = kinds; *p; ++p)
            if (*p == k) return true;
        err(path, std::string(atom_name(a.kind)) + " argument " +
                      std::to_string(i + 1) + " must be " + kinds +
                      "-kind, got " + render_ref(a.args[i]));
        return false;
    }

    int constraint_target(const Atom& a, const std::vector<int>& path) {
        int id = m.constraint_type_id(a.name);
        if (id < 0) {
            err(path, "unknown constraint type '" + a.name + "'");
            return -1;
        }
        return m.constraint_types[id].target_type;
    }

    void note_use(Ref r, const std::vector<int>& path) {
        first_use.emplace(r, atom_path(path));
    }

    void check_atom(const Atom& a, std::vector<int>& path, int depth,
                    std::set<Ref>& bound) {
        {
            std::vector<std::string> bb;
            for (auto& r : bound) bb.push_back(render_ref(r));
            rep.bound_before.push_back({atom_path(path), bb});
        }
        for (auto& r : a.args)
            if (r.level > depth)
                err(path, "local ref " + render_ref(r) +
                              " outside its scope depth");
        for (auto& r : a.pair)
            if (r.level > depth + 1)
                err(path, "local ref " + render_ref(r) +
                              " outside its scope depth");
        for (auto& r : a.args) note_use(r, path);

        switch (a.kind) {
        case AtomKind::sel_constraint:
        case AtomKind::flt_is_satisfied:
        case AtomKind::flt_is_violated: {
            int t = constraint_target(a, path);
            want(a, 0, "T", path);
            want(a, 1, "T", path);
            if (t >= 0) {
                assign(a.args[0], t, path);
                assign(a.args[1], t, path);
            }
            if (a.kind == AtomKind::sel_constraint) {
                bound.insert(a.args[0]);
                bound.insert(a.args[1]);
            }
            break;
        }
        case AtomKind::sel_variable:
            want(a, 0, "DI", path);
            want(a, 1, "T", path);
            unite(a.args[0], a.args[1], path);
            bound.insert(a.args[0]);
            bound.insert(a.args[1]);
            break;
        case AtomKind::sel_value:
            want(a, 0, "T", path);
            want(a, 1, "DI", path);
            unite(a.args[0], a.args[1], path);
            bound.insert(a.args[1]);
            break;
        case AtomKind::sel_constant:
            if (m.constant_id(a.name) < 0)
                err(path, "unknown constant set '" + a.name + "'");
            want(a, 0, "DI", path);
            bound.insert(a.args[0]);
            break;
        case AtomKind::mod_set:
            want(a, 0, "T", path);
            want(a, 1, "DI", path);
            unite(a.args[0], a.args[1], path);
            break;
        case AtomKind::mod_swap:
            want(a, 0, "T", path);
            want(a, 1, "T", path);
            unite(a.args[0], a.args[1], path);
            break;
        case AtomKind::mod_flip:
            want(a, 0, "T", path);
            want(a, 1, "DI", path);
            want(a, 2, "DI", path);
            unite(a.args[0], a.args[1], path);
            unite(a.args[0], a.args[2], path);
            break;
        case AtomKind::flt_eq:
        case AtomKind::flt_neq: {
            bool t0 = a.args.size() > 0 && a.args[0].kind == 'T';
            bool t1 = a.args.size() > 1 && a.args[1].kind == 'T';
            if (t0 != t1)
                err(path, std::string(atom_name(a.kind)) +
                              " mixes a variable ref with a value ref");
            unite(a.args[0], a.args[1], path);
            break;
        }
        case AtomKind::flt_lt:
            want(a, 0, "DI", path);
            want(a, 1, "DI", path);
            unite(a.args[0], a.args[1], path);
            break;
        case AtomKind::cmb_for_each: {
            path.push_back(0);
            std::set<Ref> inner = bound;
            check_atom(a.sel[0], path, depth + 1, inner);
            path.pop_back();
            check_body(a, path, depth, inner);
            break;
        }
        case AtomKind::cmb_bfs_over:
        case AtomKind::cmb_bfs_over_inverted: {
            int t = constraint_target(a, path);
            want(a, 0, "T", path);
            if (a.pair[0].kind != 'T' || a.pair[1].kind != 'T')
                err(path, "edge pair must be two variable refs");
            if (t >= 0) {
                assign(a.args[0], t, path);
                assign(a.pair[0], t, path);
                assign(a.pair[1], t, path);
            }
            std::set<Ref> inner = bound;
            inner.insert(a.pair[0]);
            inner.insert(a.pair[1]);
            check_body(a, path, depth, inner);
            break;
        }
        case AtomKind::cmb_iterate:
        case AtomKind::cmb_iterate_reversed: {
            want(a, 0, "T", path);
            if (a.pair[0].kind != 'T')
                err(path, "chain pair must start with a variable ref");
            if (a.pair[1].kind == 'T')
                err(path, "chain pair second ref must be a value/index ref");
            unite(a.args[0], a.pair[0], path);
            unite(a.args[0], a.pair[1], path);
            note_use(a.pair[0], path);
            std::set<Ref> inner = bound;
            inner.insert(a.pair[0]);
            inner.insert(a.pair[1]);
            check_body(a, path, depth, inner);
            break;
        }
        }
    }

    void check_body(const Atom& a, std::vector<int>& path, int depth,
                    std::set<Ref>& inner) {
        int base = a.kind == AtomKind::cmb_for_each ? 1 : 0;
        for (size_t i = 0; i < a.body.atoms.size(); ++i) {
            path.push_back((int)i + base);
            check_atom(a.body.atoms[i], path, depth + 1, inner);
            path.pop_back();
        }
    }

    void finish(const Program& p) {
        int sole = m.sole_visible_type();
        if (sole < 0) {
            // several visible arrays: an unpinned global T-ref names its
            // array through the per-block ordinal convention; only refs
            // outside every block stay uninterpretable. Pure-local or
            // value-only classes never need an array at all.
            std::vector<int> visible;
            for (int t = 0; t < (int)m.variable_types.size(); ++t)
                if (!m.variable_types[t].derived) visible.push_back(t);
            std::map<Ref, Ref> rep_t;
            for (auto& [r, _] : parent) {
                if (r.kind != 'T' || r.level != 0) continue;
                Ref root = find(r);
                if (assigned.count(root)) continue;
                auto it = rep_t.find(root);
                if (it == rep_t.end() || r < it->second) rep_t[root] = r;
            }
            for (auto& [root, r] : rep_t) {
                int pos = r.ordinal / kTRefBlock;
                if (pos < (int)visible.size()) {
                    assigned[root] = visible[pos];
                    continue;
                }
                auto fu = first_use.find(r);
                std::string where = fu != first_use.end() ? fu->second : "1";
                rep.errors.push_back(
                    {where, "ref " + render_ref(r) +
                                " has no inferable array; model has "
                                "several"});
            }
        }
        // chain iteration demands a self-indexed array; unconstrained
        // slots fall back to the single visible type when unambiguous
        std::vector<int> path;
        resolve_iterates(p, path, sole);
        rep.ok = rep.errors.empty();
    }

    void resolve_iterates(const Program& p, std::vector<int>& path, int sole,
                          int base = 0) {
        for (size_t i = 0; i < p.atoms.size(); ++i) {
            path.push_back((int)i + base);
            const Atom& a = p.atoms[i];
            if (a.kind == AtomKind::cmb_iterate ||
                a.kind == AtomKind::cmb_iterate_reversed) {
                Ref root = find(a.args[0]);
                int t = assigned.count(root) ? assigned[root] : sole;
                if (t >= 0 && !m.variable_types[t].self_indexed())
                    err(path, std::string(atom_name(a.kind)) + " over '" +
                                  m.variable_types[t].name +
                                  "', whose domain and index set differ");
            }
            if (is_combinator(a.kind))
                resolve_iterates(a.body, path, sole,
                                 a.kind == AtomKind::cmb_for_each ? 1 : 0);
            path.pop_back();
        }
    }
};

} // namespace

TypeReport type_check(const Model& m, const Program& p) {
    Checker ck{m};
    std::set<Ref> bound;
    std::vector<int> path;
    for (size_t i = 0; i < p.atoms.size(); ++i) {
        path.push_back((int)i);
        ck.check_atom(p.atoms[i], path, 0, bound);
        path.pop_back();
    }
    ck.finish(p);
    return ck.rep;
}

} // namespace ndl
