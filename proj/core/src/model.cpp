#include "ndl/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ndl {

int Model::var_type_id(const std::string& name) const {
    for (size_t i = 0; i < variable_types.size(); ++i)
        if (variable_types[i].name == name) return (int)i;
    return -1;
}

int Model::constraint_type_id(const std::string& name) const {
    for (size_t i = 0; i < constraint_types.size(); ++i)
        if (constraint_types[i].name == name) return (int)i;
    return -1;
}

int Model::constant_id(const std::string& name) const {
    for (size_t i = 0; i < constants.size(); ++i)
        if (constants[i].name == name) return (int)i;
    return -1;
}

int Model::decision_count() const {
    int n = 0;
    for (auto& vt : variable_types)
        if (!vt.derived) n += vt.count();
    return n;
}

int Model::sole_visible_type() const {
    int found = -1;
    for (size_t i = 0; i < variable_types.size(); ++i) {
        if (variable_types[i].derived) continue;
        if (found >= 0) return -1;
        found = (int)i;
    }
    return found;
}

Configuration Model::make_config() const { return Configuration(*this); }

Model build_model(std::vector<VariableTypeDecl> vars,
                  std::vector<ConstraintTypeDecl> cons,
                  std::vector<ConstantSetDecl> consts) {
    Model m;
    std::set<std::string> seen;
    for (auto& v : vars) {
        if (!seen.insert(v.name).second)
            throw DuplicateName("duplicate variable type: " + v.name);
        if (v.index_hi < v.index_lo)
            throw EmptyDomain("empty index set: " + v.name);
        if (v.domain_hi < v.domain_lo)
            throw EmptyDomain("empty domain: " + v.name);
        if (v.derived != v.rule.has_value())
            throw ModelError("derived flag and rule must agree: " + v.name);
    }
    m.variable_types = std::move(vars);
    for (auto& v : m.variable_types) {
        if (!v.rule) continue;
        int src = m.var_type_id(v.rule->source);
        if (src < 0)
            throw UnknownVariableRef("derivation source of " + v.name + ": " +
                                     v.rule->source);
        v.rule->source_type = src;
    }
    seen.clear();
    for (auto& c : cons) {
        if (!seen.insert(c.name).second)
            throw DuplicateName("duplicate constraint type: " + c.name);
        int t = m.var_type_id(c.target);
        if (t < 0)
            throw UnknownVariableRef("constraint " + c.name + " targets " +
                                     c.target);
        c.target_type = t;
        c.edges.clear();
        const auto& vt = m.variable_types[t];
        if (c.gen == EdgeGen::all_pairs) {
            for (int i = vt.index_lo; i <= vt.index_hi; ++i)
                for (int j = vt.index_lo; j <= vt.index_hi; ++j)
                    if (i != j) c.edges.push_back({{t, i}, {t, j}});
        } else {
            for (int i = vt.index_lo; i <= vt.index_hi; ++i)
                c.edges.push_back({{t, i}, {t, i}});
        }
    }
    m.constraint_types = std::move(cons);
    seen.clear();
    for (auto& k : consts) {
        if (!seen.insert(k.name).second)
            throw DuplicateName("duplicate constant set: " + k.name);
        if (k.values.empty()) throw EmptyDomain("empty constant set: " + k.name);
    }
    m.constants = std::move(consts);
    return m;
}

Configuration::Configuration(const Model& m) {
    int total = 0;
    for (auto& vt : m.variable_types) {
        base_.push_back(total);
        lo_.push_back(vt.index_lo);
        total += vt.count();
    }
    slots_.assign(total, undef_value);
}

void propagate(const Model& m, Configuration& c) {
    for (size_t t = 0; t < m.variable_types.size(); ++t) {
        const auto& vt = m.variable_types[t];
        if (!vt.rule) continue;
        const auto& src = m.variable_types[vt.rule->source_type];
        for (int i = vt.index_lo; i <= vt.index_hi; ++i)
            c.set({(int)t, i}, undef_value);
        // follow the successor chain from the first index; indices the
        // chain never reaches stay undefined
        int first = vt.index_lo;
        if (!vt.in_index(first)) continue;
        c.set({(int)t, first}, vt.domain_lo);
        int cur = first;
        for (int step = 1; step < vt.count(); ++step) {
            int nxt = c.get({vt.rule->source_type, cur});
            if (nxt == undef_value || !src.in_index(nxt)) break;
            if (c.get({(int)t, nxt}) != undef_value) break; // chain closed early
            c.set({(int)t, nxt}, vt.domain_lo + step);
            cur = nxt;
        }
    }
}

bool check_edge(const Model& m, int ctype, std::pair<VarId, VarId> edge,
                const Configuration& c) {
    if (ctype < 0 || ctype >= (int)m.constraint_types.size())
        throw UnknownConstraintType("constraint type id out of range");
    const auto& ct = m.constraint_types[ctype];
    int a = c.get(edge.first);
    int b = c.get(edge.second);
    switch (ct.pred) {
    case Pred::neq_values:
        if (a == undef_value || b == undef_value) return false;
        return a != b;
    case Pred::eq_values:
        if (a == undef_value || b == undef_value) return false;
        return a == b;
    case Pred::lt_values:
        if (a == undef_value || b == undef_value) return false;
        return a < b;
    case Pred::neq_value_index:
        if (a == undef_value) return false;
        return a != edge.second.index;
    }
    return false;
}

double satisfied_ratio(const Model& m, int ctype, const Configuration& c) {
    if (ctype < 0 || ctype >= (int)m.constraint_types.size())
        throw UnknownConstraintType("constraint type id out of range");
    const auto& ct = m.constraint_types[ctype];
    if (ct.edges.empty()) return 1.0;
    int sat = 0;
    for (auto& e : ct.edges)
        if (check_edge(m, ctype, e, c)) ++sat;
    return (double)sat / (double)ct.edges.size();
}

double satisfied_ratio(const Model& m, const std::string& ctype,
                       const Configuration& c) {
    int id = m.constraint_type_id(ctype);
    if (id < 0) throw UnknownConstraintType(ctype);
    return satisfied_ratio(m, id, c);
}

double diff_ratio(const Model& m, const Configuration& a,
                  const Configuration& b) {
    if (a.raw().size() != b.raw().size())
        throw ModelMismatch("configurations of different models");
    int total = 0, diff = 0;
    for (size_t t = 0; t < m.variable_types.size(); ++t) {
        const auto& vt = m.variable_types[t];
        if (vt.derived) continue;
        for (int i = vt.index_lo; i <= vt.index_hi; ++i) {
            ++total;
            if (a.get({(int)t, i}) != b.get({(int)t, i})) ++diff;
        }
    }
    return total ? (double)diff / (double)total : 0.0;
}

bool admissible(const Model& m, const Configuration& c) {
    for (size_t i = 0; i < m.constraint_types.size(); ++i)
        if (satisfied_ratio(m, (int)i, c) < 1.0) return false;
    return true;
}

} // namespace ndl
