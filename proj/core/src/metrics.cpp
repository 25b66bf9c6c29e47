#include "ndl/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ndl {

namespace {

void aggregate(const std::vector<double>& xs, double& mn, double& mx,
               double& avg, double& sd) {
    mn = *std::min_element(xs.begin(), xs.end());
    mx = *std::max_element(xs.begin(), xs.end());
    double sum = 0;
    for (double x : xs) sum += x;
    avg = sum / xs.size();
    double var = 0;
    for (double x : xs) var += (x - avg) * (x - avg);
    sd = std::sqrt(var / xs.size());
}

} // namespace

NeighborhoodStats neighborhood_stats(const Model& m,
                                     const Configuration& start,
                                     const NeighborSet& ns) {
    NeighborhoodStats st;
    for (auto& ct : m.constraint_types) {
        st.sat_min[ct.name] = 0;
        st.sat_max[ct.name] = 0;
        st.sat_avg[ct.name] = 0;
        st.sat_stdev[ct.name] = 0;
    }
    st.size_s = (long)ns.neighbors.size();
    if (ns.neighbors.empty()) return st;

    std::set<std::vector<int>> uniq;
    for (auto& nb : ns.neighbors) uniq.insert(nb.raw());
    st.unique_u = (long)uniq.size();

    std::vector<double> chs;
    chs.reserve(ns.neighbors.size());
    for (auto& nb : ns.neighbors) chs.push_back(diff_ratio(m, start, nb));
    aggregate(chs, st.ch_min, st.ch_max, st.ch_avg, st.ch_stdev);

    for (int c = 0; c < (int)m.constraint_types.size(); ++c) {
        std::vector<double> rs;
        rs.reserve(ns.neighbors.size());
        for (auto& nb : ns.neighbors)
            rs.push_back(satisfied_ratio(m, c, nb));
        const std::string& name = m.constraint_types[c].name;
        aggregate(rs, st.sat_min[name], st.sat_max[name], st.sat_avg[name],
                  st.sat_stdev[name]);
    }
    return st;
}

double default_beta_s(const Model& m) {
    double v = m.decision_count();
    return v * (v - 1) / 2.0;
}

double phi_size(double u, const Model& m, const FitnessParams& p) {
    double beta = p.beta_s ? *p.beta_s : default_beta_s(m);
    return 1.0 / (1.0 + std::exp(p.alpha_s * (-u + beta / 2.0)));
}

double phi_unique(long u, long s) {
    return s > 0 ? (double)u / (double)s : 0.0;
}

double phi_nmss(const NeighborhoodStats& st, const Model& m) {
    size_t types = m.constraint_types.size();
    if (st.ch_avg == 0.0 || types == 0) return 0.0;
    double sum = 0;
    for (auto& [name, v] : st.sat_min) sum += v * v;
    return sum / ((double)types * m.decision_count() * st.ch_avg);
}

double phi_sat(const NeighborhoodStats& st, const Model& m) {
    if (st.sat_min.empty()) return 1.0; // no constraint types at all
    double total = 0;
    for (auto& [name, mn] : st.sat_min)
        total += mn == 1.0 ? 1.0 : st.sat_max.at(name) / m.decision_count();
    return total / st.sat_min.size();
}

double phi_var(const NeighborhoodStats& st, const FitnessParams& p) {
    return 1.0 / (1.0 + std::exp(p.alpha_v * (-st.ch_stdev + p.beta_v)));
}

// ---- FitnessSpec -----------------------------------------------------

FitnessSpec FitnessSpec::from_expression(const std::string& expr,
                                         FitnessParams p) {
    FitnessSpec spec;
    spec.params = p;
    spec.expr_ = expr;
    spec.compile();
    return spec;
}

FitnessSpec FitnessSpec::parse(const std::string& text) {
    FitnessSpec spec;
    bool have_expr = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FitnessError("line " + std::to_string(lineno) +
                               ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        auto num = [&](const char* what) {
            try {
                size_t used = 0;
                double d = std::stod(val, &used);
                if (used != val.size()) throw std::invalid_argument(val);
                return d;
            } catch (const std::exception&) {
                throw FitnessError("line " + std::to_string(lineno) + ": " +
                                   what + " needs a number, got '" + val +
                                   "'");
            }
        };
        if (key == "alpha_s") spec.params.alpha_s = num("alpha_s");
        else if (key == "beta_s") spec.params.beta_s = num("beta_s");
        else if (key == "alpha_v") spec.params.alpha_v = num("alpha_v");
        else if (key == "beta_v") spec.params.beta_v = num("beta_v");
        else if (key == "expr") { spec.expr_ = val; have_expr = true; }
        else
            throw FitnessError("line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
    }
    if (!have_expr) throw FitnessError("missing 'expr =' line");
    spec.compile();
    return spec;
}

FitnessSpec FitnessSpec::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FitnessError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void FitnessSpec::compile() {
    struct P {
        const std::string& s;
        size_t i = 0;
        std::vector<Tok>& out;

        void ws() {
            while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
        }
        [[noreturn]] void die(const std::string& why) {
            throw FitnessError("expression: " + why + " at offset " +
                               std::to_string(i));
        }
        void expr() {
            term();
            for (;;) {
                ws();
                if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
                    char op = s[i++];
                    term();
                    out.push_back({op});
                } else
                    return;
            }
        }
        void term() {
            unary();
            for (;;) {
                ws();
                if (i < s.size() && s[i] == '*') {
                    ++i;
                    unary();
                    out.push_back({'*'});
                } else
                    return;
            }
        }
        void unary() {
            ws();
            if (i < s.size() && s[i] == '-') {
                ++i;
                unary();
                out.push_back({'~'});
                return;
            }
            primary();
        }
        void primary() {
            ws();
            if (i >= s.size()) die("expected a value");
            if (s[i] == '(') {
                ++i;
                expr();
                ws();
                if (i >= s.size() || s[i] != ')') die("missing ')'");
                ++i;
                return;
            }
            if (std::isdigit((unsigned char)s[i]) || s[i] == '.') {
                size_t used = 0;
                double d = std::stod(s.substr(i), &used);
                i += used;
                Tok t;
                t.op = 0;
                t.num = d;
                out.push_back(t);
                return;
            }
            if (std::isalpha((unsigned char)s[i]) || s[i] == '_') {
                size_t b = i;
                while (i < s.size() && (std::isalnum((unsigned char)s[i]) ||
                                        s[i] == '_'))
                    ++i;
                std::string name = s.substr(b, i - b);
                if (name == "amount")
                    throw FitnessError(
                        "component 'amount' is rejected on purpose: it has "
                        "no working definition (see README, \"Fitness "
                        "expressions\")");
                static const std::set<std::string> known{
                    "code", "nmss", "sat", "size", "unique", "var"};
                if (!known.count(name))
                    throw FitnessError("unknown component '" + name +
                                       "' (known: code, nmss, sat, size, "
                                       "unique, var)");
                Tok t;
                t.op = 'c';
                t.name = name;
                out.push_back(t);
                return;
            }
            die(std::string("unexpected '") + s[i] + "'");
        }
    };
    rpn_.clear();
    P p{expr_, 0, rpn_};
    p.expr();
    p.ws();
    if (p.i != expr_.size())
        throw FitnessError("expression: trailing input at offset " +
                           std::to_string(p.i));
}

double FitnessSpec::evaluate(
    const std::map<std::string, double>& components) const {
    std::vector<double> stack;
    for (auto& t : rpn_) {
        switch (t.op) {
        case 0:
            stack.push_back(t.num);
            break;
        case 'c': {
            auto it = components.find(t.name);
            if (it == components.end())
                throw FitnessError("component '" + t.name +
                                   "' has no value here");
            stack.push_back(it->second);
            break;
        }
        case '~':
            stack.back() = -stack.back();
            break;
        default: {
            double b = stack.back();
            stack.pop_back();
            double a = stack.back();
            a = t.op == '+' ? a + b : t.op == '-' ? a - b : a * b;
            stack.back() = a;
        }
        }
    }
    return stack.empty() ? 0.0 : stack.back();
}

// ---- evaluation ------------------------------------------------------

FitnessRecord evaluate_operator(const Model& m, const Program& program,
                                const std::vector<Configuration>& tests,
                                const ExecBudget& budget,
                                const FitnessSpec& spec) {
    FitnessRecord rec;
    rec.static_report = analyze(m, program);
    Program pruned;
    try {
        pruned = prune_introns(program, rec.static_report);
    } catch (const EmptyCore&) {
        rec.empty_core = true;
    }
    double code = rec.static_report.phi_code;
    double total = 0;
    for (auto& test : tests) {
        std::map<std::string, double> comp{{"code", code}, {"nmss", 0},
                                           {"sat", 0},     {"size", 0},
                                           {"unique", 0},  {"var", 0}};
        NeighborhoodStats st;
        if (rec.empty_core) {
            st = neighborhood_stats(m, test, NeighborSet{});
        } else {
            NeighborSet ns = enumerate_neighbors(m, pruned, test, budget);
            rec.truncated = rec.truncated || ns.truncated;
            st = neighborhood_stats(m, test, ns);
            if (st.size_s > 0) {
                comp["size"] = phi_size(st.unique_u, m, spec.params);
                comp["unique"] = phi_unique(st.unique_u, st.size_s);
                comp["nmss"] = phi_nmss(st, m);
                comp["sat"] = phi_sat(st, m);
                comp["var"] = phi_var(st, spec.params);
            }
        }
        rec.stats.push_back(std::move(st));
        rec.per_test.push_back(comp);
        total += spec.evaluate(comp);
    }
    rec.composite = tests.empty() ? 0.0 : total / (double)tests.size();
    return rec;
}

} // namespace ndl
