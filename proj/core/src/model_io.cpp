#include "ndl/model_io.hpp"

#include <fstream>
#include <sstream>

namespace ndl {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("cannot write " + path);
}

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) {
        if (t[0] == '#') break;
        out.push_back(t);
    }
    return out;
}

[[noreturn]] void fail(int line_no, const std::string& what) {
    throw ModelError("model line " + std::to_string(line_no) + ": " + what);
}

std::pair<int, int> parse_range(const std::string& s, int line_no) {
    auto dots = s.find("..");
    if (dots == std::string::npos) fail(line_no, "expected LO..HI, got " + s);
    try {
        return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
    } catch (const std::exception&) {
        fail(line_no, "bad range " + s);
    }
}

// NAME(ARG) -> (NAME, ARG)
std::pair<std::string, std::string> parse_call(const std::string& s,
                                               int line_no) {
    auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')')
        fail(line_no, "expected NAME(ARG), got " + s);
    return {s.substr(0, open), s.substr(open + 1, s.size() - open - 2)};
}

Pred parse_pred(const std::string& s, int line_no) {
    if (s == "neq_values") return Pred::neq_values;
    if (s == "eq_values") return Pred::eq_values;
    if (s == "lt_values") return Pred::lt_values;
    if (s == "neq_value_index") return Pred::neq_value_index;
    fail(line_no, "unknown predicate " + s);
}

const char* pred_name(Pred p) {
    switch (p) {
    case Pred::neq_values: return "neq_values";
    case Pred::eq_values: return "eq_values";
    case Pred::lt_values: return "lt_values";
    case Pred::neq_value_index: return "neq_value_index";
    }
    return "?";
}

} // namespace

Model parse_model_text(const std::string& text) {
    std::vector<VariableTypeDecl> vars;
    std::vector<ConstraintTypeDecl> cons;
    std::vector<ConstantSetDecl> consts;
    enum class Section { none, vars, constraints, constants };
    Section section = Section::none;

    std::istringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        auto toks = tokens_of(line);
        if (toks.empty()) continue;
        if (toks.size() == 1 &&
            (toks[0] == "vars" || toks[0] == "constraints" ||
             toks[0] == "constants")) {
            section = toks[0] == "vars"          ? Section::vars
                      : toks[0] == "constraints" ? Section::constraints
                                                 : Section::constants;
            continue;
        }
        switch (section) {
        case Section::none:
            fail(line_no, "content before any section header");
        case Section::vars: {
            if (toks.size() < 5 || toks[1] != "index" || toks[3] != "domain")
                fail(line_no,
                     "expected NAME index LO..HI domain LO..HI "
                     "[derived RULE(SOURCE)]");
            VariableTypeDecl v;
            v.name = toks[0];
            std::tie(v.index_lo, v.index_hi) = parse_range(toks[2], line_no);
            std::tie(v.domain_lo, v.domain_hi) = parse_range(toks[4], line_no);
            if (toks.size() > 5) {
                if (toks[5] != "derived" || toks.size() != 7)
                    fail(line_no, "expected derived RULE(SOURCE)");
                auto [rule, source] = parse_call(toks[6], line_no);
                if (rule != "circuit_order")
                    fail(line_no, "unknown derivation rule " + rule);
                v.derived = true;
                v.rule = DerivedRule{DerivedKind::circuit_order, source, -1};
            }
            vars.push_back(std::move(v));
            break;
        }
        case Section::constraints: {
            if (toks.size() != 3)
                fail(line_no, "expected NAME PREDICATE GENERATOR(ARRAY)");
            ConstraintTypeDecl c;
            c.name = toks[0];
            c.pred = parse_pred(toks[1], line_no);
            auto [gen, target] = parse_call(toks[2], line_no);
            if (gen == "all_pairs")
                c.gen = EdgeGen::all_pairs;
            else if (gen == "self_loop")
                c.gen = EdgeGen::self_loop;
            else
                fail(line_no, "unknown edge generator " + gen);
            c.target = target;
            cons.push_back(std::move(c));
            break;
        }
        case Section::constants: {
            ConstantSetDecl k;
            k.name = toks[0];
            for (size_t i = 1; i < toks.size(); ++i) {
                try {
                    k.values.push_back(std::stoi(toks[i]));
                } catch (const std::exception&) {
                    fail(line_no, "bad constant value " + toks[i]);
                }
            }
            consts.push_back(std::move(k));
            break;
        }
        }
    }
    return build_model(std::move(vars), std::move(cons), std::move(consts));
}

Model load_model(const std::string& path) {
    try {
        return parse_model_text(read_file(path));
    } catch (const ModelError& e) {
        throw ModelError(path + ": " + e.what());
    }
}

std::string render_model(const Model& m) {
    std::ostringstream out;
    out << "vars\n";
    for (auto& v : m.variable_types) {
        out << "  " << v.name << " index " << v.index_lo << ".." << v.index_hi
            << " domain " << v.domain_lo << ".." << v.domain_hi;
        if (v.derived)
            out << " derived circuit_order(" << v.rule->source << ")";
        out << "\n";
    }
    out << "constraints\n";
    for (auto& c : m.constraint_types)
        out << "  " << c.name << " " << pred_name(c.pred) << " "
            << (c.gen == EdgeGen::all_pairs ? "all_pairs" : "self_loop") << "("
            << c.target << ")\n";
    if (!m.constants.empty()) {
        out << "constants\n";
        for (auto& k : m.constants) {
            out << "  " << k.name;
            for (int v : k.values) out << " " << v;
            out << "\n";
        }
    }
    return out.str();
}

TspInstance parse_instance_text(const std::string& text, const Model& m) {
    int type = m.sole_visible_type();
    if (type < 0)
        throw ModelMismatch("instance files need a single decision array");
    const auto& vt = m.variable_types[type];

    std::istringstream ss(text);
    std::string line;
    int line_no = 0;
    TspInstance inst;
    bool have_n = false;
    while (std::getline(ss, line)) {
        ++line_no;
        auto toks = tokens_of(line);
        if (toks.empty()) continue;
        std::vector<int> vals;
        for (auto& t : toks) {
            try {
                vals.push_back(std::stoi(t));
            } catch (const std::exception&) {
                throw ModelError("instance line " + std::to_string(line_no) +
                                 ": bad value " + t);
            }
        }
        if (!have_n) {
            if (vals.size() != 1)
                throw ModelError("instance line " + std::to_string(line_no) +
                                 ": expected the city count alone");
            inst.n_cities = vals[0];
            if (inst.n_cities != vt.count())
                throw ModelMismatch(
                    "instance declares " + std::to_string(inst.n_cities) +
                    " cities but the model has " +
                    std::to_string(vt.count()));
            have_n = true;
            continue;
        }
        if ((int)vals.size() != vt.count())
            throw ModelError("instance line " + std::to_string(line_no) +
                             ": expected " + std::to_string(vt.count()) +
                             " values");
        Configuration c = m.make_config();
        for (int k = 0; k < vt.count(); ++k) {
            if (!vt.in_domain(vals[k]))
                throw ModelError("instance line " + std::to_string(line_no) +
                                 ": value " + std::to_string(vals[k]) +
                                 " outside the domain");
            c.set({type, vt.index_lo + k}, vals[k]);
        }
        propagate(m, c);
        for (auto& v : m.variable_types)
            if (v.derived) {
                int d = m.var_type_id(v.name);
                for (int i = v.index_lo; i <= v.index_hi; ++i)
                    if (!c.defined({d, i}))
                        throw ModelError(
                            "instance line " + std::to_string(line_no) +
                            ": tour is not a single cycle");
            }
        inst.initial_tours.push_back(std::move(c));
    }
    if (!have_n) throw ModelError("instance file is empty");
    return inst;
}

TspInstance load_instance(const std::string& path, const Model& m) {
    try {
        return parse_instance_text(read_file(path), m);
    } catch (const ModelError& e) {
        throw ModelError(path + ": " + e.what());
    }
}

std::string render_instance(const TspInstance& inst, const Model& m) {
    int type = m.sole_visible_type();
    const auto& vt = m.variable_types[type];
    std::ostringstream out;
    out << inst.n_cities << "\n";
    for (auto& c : inst.initial_tours) {
        for (int k = 0; k < vt.count(); ++k) {
            if (k) out << " ";
            out << c.get({type, vt.index_lo + k});
        }
        out << "\n";
    }
    return out.str();
}

} // namespace ndl
