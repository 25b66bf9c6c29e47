#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ndl/analysis.hpp"
#include "ndl/evolve.hpp"
#include "ndl/grammar.hpp"
#include "ndl/metrics.hpp"
#include "ndl/model_io.hpp"
#include "ndl/parser.hpp"
#include "ndl/runtime.hpp"
#include "ndl/tsp.hpp"
#include "ndl/typecheck.hpp"

#ifndef NDL_TOOL_VERSION
#define NDL_TOOL_VERSION "0.0.0"
#endif

namespace {

using nlohmann::json;

struct Options {
    std::string model_path;
    std::string op_path;
    std::string fitness_path;
    std::string tests_path;
    std::string out_dir;
    int pop = 1000;
    int gens = 50;
    std::uint64_t seed = 0;
    long budget_neighbors = 10000;
    long budget_steps = 1000000;
    int depth = 90;
    int jobs = 1;
    int start = 0;
    bool strict = false;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

ndl::ExecBudget budget_of(const Options& o) {
    ndl::ExecBudget b;
    b.max_neighbors = o.budget_neighbors;
    b.max_steps = o.budget_steps;
    return b;
}

// Tours used as evaluation starting points: an instance file when given,
// otherwise four seeded random tours.
std::vector<ndl::Configuration> load_tests(const Options& o,
                                           const ndl::Model& m, json& manifest) {
    if (!o.tests_path.empty()) {
        auto inst = ndl::load_instance(o.tests_path, m);
        manifest["tests"] = {{"source", o.tests_path},
                             {"count", inst.initial_tours.size()}};
        return inst.initial_tours;
    }
    std::vector<ndl::Configuration> tours;
    std::uint64_t state = o.seed;
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < 4; ++i) {
        seeds.push_back(ndl::splitmix64(state));
        tours.push_back(ndl::random_tour(m, seeds.back()));
    }
    manifest["tests"] = {{"source", "random"}, {"seeds", seeds}};
    return tours;
}

json params_json(const Options& o) {
    return {{"pop", o.pop},
            {"gens", o.gens},
            {"seed", o.seed},
            {"budget_neighbors", o.budget_neighbors},
            {"budget_steps", o.budget_steps},
            {"depth", o.depth},
            {"jobs", o.jobs}};
}

void write_manifest(const Options& o, json manifest, double wall_seconds,
                    std::vector<std::string> outputs) {
    if (o.out_dir.empty()) return;
    manifest["version"] = NDL_TOOL_VERSION;
    manifest["params"] = params_json(o);
    manifest["wall_clock_seconds"] = wall_seconds;
    manifest["outputs"] = outputs;
    ndl::write_file(o.out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

struct Timer {
    std::chrono::steady_clock::time_point t0 =
        std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
            .count();
    }
};

ndl::Program load_program(const std::string& path, const ndl::Model& m) {
    ndl::Program p = ndl::parse_operator(ndl::read_file(path));
    auto report = ndl::type_check(m, p);
    if (!report.ok) {
        std::string msg = path + ": operator does not type-check";
        for (auto& e : report.errors)
            msg += "\n  atom " + e.path + ": " + e.reason;
        throw std::runtime_error(msg);
    }
    return p;
}

int cmd_check(const Options& o) {
    ndl::Model m = ndl::load_model(o.model_path);
    ndl::Program p = ndl::parse_operator(ndl::read_file(o.op_path));
    std::cout << "op=" << o.op_path << "\n";
    std::cout << "atoms=" << ndl::atom_count(p) << "\n";
    auto report = ndl::type_check(m, p);
    std::cout << "type_ok=" << (report.ok ? 1 : 0) << "\n";
    if (!report.ok) {
        for (auto& e : report.errors)
            std::cout << "error=" << e.path << " " << e.reason << "\n";
        return 1;
    }
    auto sr = ndl::analyze(m, p);
    std::cout << "r_used_outputs=" << num(sr.r_used_outputs) << "\n";
    std::cout << "r_provided_inputs=" << num(sr.r_provided_inputs) << "\n";
    std::cout << "r_unique_args=" << num(sr.r_unique_args) << "\n";
    std::cout << "r_effective=" << num(sr.r_effective) << "\n";
    std::cout << "phi_code=" << num(ndl::phi_code(sr)) << "\n";
    for (auto& path : sr.introns) {
        const ndl::Atom* a = ndl::atom_at(p, path);
        std::cout << "intron=" << path << " "
                  << (a ? ndl::render_atom_flat(*a) : "?") << "\n";
    }
    return 0;
}

int cmd_grammar(const Options& o) {
    Timer timer;
    ndl::Model m = ndl::load_model(o.model_path);
    ndl::GrammarOptions gopt;
    gopt.max_depth = o.depth;
    ndl::Grammar g = ndl::generate_grammar(m, gopt);
    std::string bnf = ndl::render_bnf(g);
    std::cout << bnf;
    if (!o.out_dir.empty()) {
        std::filesystem::create_directories(o.out_dir);
        ndl::write_file(o.out_dir + "/grammar.bnf", bnf);
        json manifest = {{"command", "grammar"},
                         {"model", o.model_path}};
        write_manifest(o, manifest, timer.seconds(), {"grammar.bnf"});
    }
    return 0;
}

int cmd_neighbors(const Options& o) {
    ndl::Model m = ndl::load_model(o.model_path);
    ndl::Program p = load_program(o.op_path, m);
    json scratch;
    auto tests = load_tests(o, m, scratch);
    if (o.start < 0 || o.start >= (int)tests.size())
        throw std::runtime_error("--start index " + std::to_string(o.start) +
                                 " out of range (have " +
                                 std::to_string(tests.size()) + " tours)");
    ndl::Program pruned = p;
    auto sr = ndl::analyze(m, p);
    if (!sr.introns.empty()) pruned = ndl::prune_introns(p, sr);
    auto ns = ndl::enumerate_neighbors(m, pruned, tests[o.start], budget_of(o));

    int type = m.sole_visible_type();
    const auto& vt = m.variable_types[type];
    std::set<std::vector<int>> uniq;
    for (auto& c : ns.neighbors) {
        uniq.insert(c.raw());
        for (int k = 0; k < vt.count(); ++k) {
            if (k) std::cout << " ";
            std::cout << c.get({type, vt.index_lo + k});
        }
        std::cout << "\n";
    }
    std::cout << "s=" << ns.neighbors.size() << " u=" << uniq.size()
              << " truncated=" << (ns.truncated ? 1 : 0) << "\n";
    return ns.truncated && o.strict ? 2 : 0;
}

int cmd_eval_op(const Options& o) {
    ndl::Model m = ndl::load_model(o.model_path);
    ndl::Program p = load_program(o.op_path, m);
    ndl::FitnessSpec spec = ndl::FitnessSpec::parse_file(o.fitness_path);
    json scratch;
    auto tests = load_tests(o, m, scratch);
    auto record = ndl::evaluate_operator(m, p, tests, budget_of(o), spec);

    std::cout << "op=" << o.op_path << "\n";
    std::cout << "fitness=" << o.fitness_path << "\n";
    std::cout << "tests=" << tests.size() << "\n";
    std::cout << "empty_core=" << (record.empty_core ? 1 : 0) << "\n";
    for (size_t i = 0; i < record.per_test.size(); ++i) {
        std::cout << "test=" << i;
        auto& st = record.stats[i];
        std::cout << " s=" << st.size_s << " u=" << st.unique_u
                  << " ch_avg=" << num(st.ch_avg)
                  << " ch_stdev=" << num(st.ch_stdev);
        for (const char* k :
             {"code", "nmss", "sat", "size", "unique", "var"})
            std::cout << " " << k << "=" << num(record.per_test[i].at(k));
        std::cout << "\n";
    }
    std::cout << "truncated=" << (record.truncated ? 1 : 0) << "\n";
    std::cout << "composite=" << num(record.composite) << "\n";
    return record.truncated && o.strict ? 2 : 0;
}

int cmd_synth(const Options& o) {
    Timer timer;
    if (o.out_dir.empty())
        throw std::runtime_error("synth needs --out-dir for its artifacts");
    std::filesystem::create_directories(o.out_dir);

    ndl::Model m = ndl::load_model(o.model_path);
    ndl::FitnessSpec spec = ndl::FitnessSpec::parse_file(o.fitness_path);
    json manifest = {{"command", "synth"},
                     {"model", o.model_path},
                     {"fitness", o.fitness_path},
                     {"expression", spec.expression()}};
    auto tests = load_tests(o, m, manifest);

    ndl::GrammarOptions gopt;
    gopt.max_depth = o.depth;
    ndl::Grammar g = ndl::generate_grammar(m, gopt);
    ndl::write_file(o.out_dir + "/grammar.bnf", ndl::render_bnf(g));

    ndl::EvolveParams params;
    params.population_size = o.pop;
    params.generations = o.gens;
    params.seed = o.seed;
    params.max_depth = o.depth;
    params.jobs = o.jobs;

    auto on_improve = [&](int gen, const ndl::Individual& best) {
        ndl::write_file(o.out_dir + "/best.ndl",
                        ndl::render(ndl::parse_operator(best.phenotype)));
        std::cout << "gen=" << gen << " best=" << num(*best.fitness)
                  << " hash=" << ndl::hash_hex(best.phenotype) << "\n";
    };
    auto result = ndl::run_evolution(m, g, tests, budget_of(o), spec, params,
                                     on_improve);
    ndl::write_file(o.out_dir + "/history.csv",
                    ndl::history_csv(result.history));

    std::cout << "generations=" << (result.history.size() - 1) << "\n";
    std::cout << "best=" << num(*result.best.fitness) << "\n";
    std::cout << "out=" << o.out_dir << "\n";
    write_manifest(o, manifest, timer.seconds(),
                   {"grammar.bnf", "history.csv", "best.ndl"});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constraint-model neighborhood operator workbench"};
    app.set_version_flag("--version", NDL_TOOL_VERSION);
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* c, bool with_op) {
        c->add_option("--model", o.model_path, "Model file")->required();
        if (with_op)
            c->add_option("--op", o.op_path, "Operator file")->required();
        c->add_option("--tests", o.tests_path,
                      "Instance file with starting tours");
        c->add_option("--seed", o.seed, "Master seed");
        c->add_option("--budget-neighbors", o.budget_neighbors,
                      "Neighbor cap per enumeration");
        c->add_option("--budget-steps", o.budget_steps,
                      "Interpreter step cap per enumeration");
        c->add_flag("--strict", o.strict,
                    "Exit 2 when a budget truncates enumeration");
        c->add_option("--out-dir", o.out_dir, "Artifact directory");
        c->add_option("--jobs", o.jobs, "Evaluation threads");
    };

    auto* synth = app.add_subcommand("synth", "Evolve an operator");
    add_common(synth, false);
    synth->add_option("--fitness", o.fitness_path, "Fitness spec file")
        ->required();
    synth->add_option("--pop", o.pop, "Population size");
    synth->add_option("--gens", o.gens, "Generations");
    synth->add_option("--depth", o.depth, "Max derivation depth");

    auto* eval = app.add_subcommand("eval-op", "Score one operator");
    add_common(eval, true);
    eval->add_option("--fitness", o.fitness_path, "Fitness spec file")
        ->required();

    auto* nb = app.add_subcommand("neighbors", "Dump a neighborhood");
    add_common(nb, true);
    nb->add_option("--start", o.start, "Tour index within --tests");

    auto* check = app.add_subcommand("check", "Type-check and analyze");
    check->add_option("--model", o.model_path, "Model file")->required();
    check->add_option("--op", o.op_path, "Operator file")->required();

    auto* gram = app.add_subcommand("grammar", "Emit the model's grammar");
    gram->add_option("--model", o.model_path, "Model file")->required();
    gram->add_option("--depth", o.depth, "Max derivation depth");
    gram->add_option("--out-dir", o.out_dir, "Artifact directory");

    CLI11_PARSE(app, argc, argv);
    try {
        if (synth->parsed()) return cmd_synth(o);
        if (eval->parsed()) return cmd_eval_op(o);
        if (nb->parsed()) return cmd_neighbors(o);
        if (check->parsed()) return cmd_check(o);
        if (gram->parsed()) return cmd_grammar(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
