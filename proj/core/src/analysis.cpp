#include "ndl/analysis.hpp"

#include <map>
#include <vector>

namespace ndl {

namespace {

struct Node {
    const Atom* atom = nullptr;
    std::string path;
    int parent = -1;      // enclosing combinator node (or for_each head link)
    bool head = false;    // for_each selector atom: lives and dies with parent
    bool comb = false;
    bool mod = false;
    bool produces = false;
    bool reads = false;
    bool all_bound = true;
    bool distinct = true;
    bool consumed = false; // any produced ref read by a later atom
    std::vector<int> consumers;
};

struct Walker {
    std::vector<Node> nodes;

    static bool distinct_args(const Atom& a) {
        std::vector<Ref> rs(a.args);
        rs.insert(rs.end(), a.pair.begin(), a.pair.end());
        for (size_t i = 0; i < rs.size(); ++i)
            for (size_t j = i + 1; j < rs.size(); ++j)
                if (rs[i] == rs[j]) return false;
        return true;
    }

    // env: ref -> node id of its binder, scoped by value-copy into bodies
    void read_ref(int id, Ref r, std::map<Ref, int>& env) {
        nodes[id].reads = true;
        auto it = env.find(r);
        if (it == env.end()) {
            nodes[id].all_bound = false;
        } else {
            nodes[it->second].consumed = true;
            nodes[it->second].consumers.push_back(id);
        }
    }

    void bind_ref(int id, Ref r, std::map<Ref, int>& env) {
        nodes[id].produces = true;
        env[r] = id;
    }

    int visit(const Atom& a, std::vector<int>& path, int parent, bool head,
              std::map<Ref, int>& env) {
        int id = (int)nodes.size();
        nodes.push_back({});
        nodes[id].atom = &a;
        nodes[id].path = atom_path(path);
        nodes[id].parent = parent;
        nodes[id].head = head;
        nodes[id].comb = is_combinator(a.kind);
        nodes[id].mod = is_modifier(a.kind);
        nodes[id].distinct = distinct_args(a);

        if (is_selector(a.kind)) {
            for (auto r : a.args)
                if (env.count(r)) read_ref(id, r, env); else bind_ref(id, r, env);
        } else if (is_filter(a.kind) || is_modifier(a.kind)) {
            for (auto r : a.args) read_ref(id, r, env);
        } else if (a.kind == AtomKind::cmb_for_each) {
            std::map<Ref, int> inner = env;
            path.push_back(0);
            visit(a.sel[0], path, id, true, inner);
            path.pop_back();
            visit_body(a, path, id, inner);
        } else { // bfs_over / bfs_over_inverted / iterate / iterate_reversed
            read_ref(id, a.args[0], env);
            std::map<Ref, int> inner = env;
            bind_ref(id, a.pair[0], inner);
            bind_ref(id, a.pair[1], inner);
            visit_body(a, path, id, inner);
        }
        return id;
    }

    void visit_body(const Atom& a, std::vector<int>& path, int id,
                    std::map<Ref, int>& inner) {
        int base = a.kind == AtomKind::cmb_for_each ? 1 : 0;
        for (size_t i = 0; i < a.body.atoms.size(); ++i) {
            path.push_back((int)i + base);
            visit(a.body.atoms[i], path, id, false, inner);
            path.pop_back();
        }
    }
};

bool chain_ok(const std::vector<Node>& nodes, int id,
              const std::vector<char>& in) {
    for (int p = nodes[id].parent; p >= 0; p = nodes[p].parent)
        if (!in[p]) return false;
    return true;
}

} // namespace

StaticReport analyze(const Model& m, const Program& p) {
    (void)m;
    Walker w;
    std::map<Ref, int> env;
    std::vector<int> path;
    for (size_t i = 0; i < p.atoms.size(); ++i) {
        path.push_back((int)i);
        w.visit(p.atoms[i], path, -1, false, env);
        path.pop_back();
    }
    auto& nodes = w.nodes;
    size_t n = nodes.size();

    size_t producers = 0, used = 0, readers = 0, fed = 0, uniq = 0;
    for (auto& nd : nodes) {
        if (nd.produces) { ++producers; if (nd.consumed) ++used; }
        if (nd.reads) { ++readers; if (nd.all_bound) ++fed; }
        if (nd.distinct) ++uniq;
    }

    // effective set: fully-bound modifiers seed it (together with the
    // combinators that run them); tests and feeders join when everything
    // above them already belongs
    std::vector<char> in(n, 0);
    bool any_mod = false;
    for (size_t i = 0; i < n; ++i) {
        if (!nodes[i].mod || !nodes[i].all_bound) continue;
        bool live = true;
        for (int q = nodes[i].parent; q >= 0; q = nodes[q].parent)
            if (nodes[q].reads && !nodes[q].all_bound) { live = false; break; }
        if (!live) continue;
        any_mod = true;
        in[i] = 1;
        for (int q = nodes[i].parent; q >= 0; q = nodes[q].parent) in[q] = 1;
    }
    if (any_mod) {
        bool grew = true;
        while (grew) {
            grew = false;
            for (size_t i = 0; i < n; ++i) {
                if (in[i] || !chain_ok(nodes, (int)i, in)) continue;
                bool tester = !nodes[i].comb && !nodes[i].mod &&
                              !nodes[i].produces && nodes[i].reads &&
                              nodes[i].all_bound;
                bool feeder = false;
                for (int c : nodes[i].consumers)
                    if (in[c]) { feeder = true; break; }
                if (tester || feeder) { in[i] = grew = true; }
            }
        }
        // a for_each head atom is part of its combinator, not separately
        // removable
        for (size_t i = 0; i < n; ++i)
            if (nodes[i].head && nodes[i].parent >= 0)
                in[i] = in[nodes[i].parent];
    }

    StaticReport rep;
    rep.r_used_outputs = producers ? double(used) / producers : 1.0;
    rep.r_provided_inputs = readers ? double(fed) / readers : 1.0;
    rep.r_unique_args = n ? double(uniq) / n : 1.0;
    size_t eff = 0;
    for (size_t i = 0; i < n; ++i)
        if (in[i]) ++eff; else rep.introns.insert(nodes[i].path);
    rep.r_effective = n ? double(eff) / n : 1.0;
    rep.phi_code = (rep.r_used_outputs + rep.r_provided_inputs +
                    rep.r_unique_args + rep.r_effective) /
                   4.0;
    return rep;
}

namespace {

Program prune_in(const Program& p, const std::set<std::string>& introns,
                 std::vector<int>& path, int base) {
    Program out;
    for (size_t i = 0; i < p.atoms.size(); ++i) {
        path.push_back((int)i + base);
        if (!introns.count(atom_path(path))) {
            Atom a = p.atoms[i];
            if (is_combinator(a.kind))
                a.body = prune_in(a.body, introns, path,
                                  a.kind == AtomKind::cmb_for_each ? 1 : 0);
            out.atoms.push_back(std::move(a));
        }
        path.pop_back();
    }
    return out;
}

} // namespace

Program prune_introns(const Program& p, const StaticReport& rep) {
    std::vector<int> path;
    Program out = prune_in(p, rep.introns, path, 0);
    if (out.atoms.empty()) throw EmptyCore();
    return out;
}

double phi_code(const StaticReport& rep) { return rep.phi_code; }

} // namespace ndl
