#include "ndl/ast.hpp"

namespace ndl {

bool is_selector(AtomKind k) {
    return k >= AtomKind::sel_constraint && k <= AtomKind::sel_constant;
}
bool is_modifier(AtomKind k) {
    return k >= AtomKind::mod_set && k <= AtomKind::mod_flip;
}
bool is_filter(AtomKind k) {
    return k >= AtomKind::flt_is_satisfied && k <= AtomKind::flt_lt;
}
bool is_combinator(AtomKind k) {
    return k >= AtomKind::cmb_for_each && k <= AtomKind::cmb_iterate_reversed;
}

const char* atom_name(AtomKind k) {
    switch (k) {
    case AtomKind::sel_constraint: return "constraint";
    case AtomKind::sel_variable: return "variable";
    case AtomKind::sel_value: return "value";
    case AtomKind::sel_constant: return "constant";
    case AtomKind::mod_set: return "set";
    case AtomKind::mod_swap: return "swap";
    case AtomKind::mod_flip: return "flip";
    case AtomKind::flt_is_satisfied: return "is_satisfied";
    case AtomKind::flt_is_violated: return "is_violated";
    case AtomKind::flt_eq: return "eq";
    case AtomKind::flt_neq: return "neq";
    case AtomKind::flt_lt: return "lt";
    case AtomKind::cmb_for_each: return "for_each";
    case AtomKind::cmb_bfs_over: return "bfs_over";
    case AtomKind::cmb_bfs_over_inverted: return "bfs_over_inverted";
    case AtomKind::cmb_iterate: return "iterate";
    case AtomKind::cmb_iterate_reversed: return "iterate_reversed";
    }
    return "?";
}

bool Atom::operator==(const Atom& o) const {
    if (kind != o.kind || name != o.name || args != o.args || pair != o.pair)
        return false;
    if (sel.size() != o.sel.size()) return false;
    for (size_t i = 0; i < sel.size(); ++i)
        if (!(sel[i] == o.sel[i])) return false;
    if (body.atoms.size() != o.body.atoms.size()) return false;
    for (size_t i = 0; i < body.atoms.size(); ++i)
        if (!(body.atoms[i] == o.body.atoms[i])) return false;
    return true;
}

int atom_count(const Program& p) {
    int n = 0;
    for (auto& a : p.atoms) {
        ++n;
        for (auto& s : a.sel) { (void)s; ++n; }
        n += atom_count(a.body);
    }
    return n;
}

std::string atom_path(const std::vector<int>& indices) {
    std::string s;
    for (size_t i = 0; i < indices.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(indices[i] + 1);
    }
    return s;
}

const Atom* atom_at(const Program& p, const std::string& path) {
    const Program* cur = &p;
    const Atom* found = nullptr;
    size_t pos = 0;
    while (pos < path.size()) {
        size_t dot = path.find('.', pos);
        size_t end = dot == std::string::npos ? path.size() : dot;
        int slot = 0;
        for (size_t i = pos; i < end; ++i) {
            if (path[i] < '0' || path[i] > '9') return nullptr;
            slot = slot * 10 + (path[i] - '0');
        }
        if (found) {
            if (!is_combinator(found->kind)) return nullptr;
            if (found->kind == AtomKind::cmb_for_each) {
                if (slot == 1) {
                    found = &found->sel[0];
                    if (dot != std::string::npos) return nullptr;
                    return found;
                }
                slot -= 1; // body starts at slot 2
            }
            cur = &found->body;
        }
        if (slot < 1 || slot > (int)cur->atoms.size()) return nullptr;
        found = &cur->atoms[slot - 1];
        pos = dot == std::string::npos ? path.size() : dot + 1;
    }
    return found;
}

} // namespace ndl
