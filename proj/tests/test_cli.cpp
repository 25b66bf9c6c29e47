#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "ndl/model_io.hpp"
#include "ndl/parser.hpp"
#include "ndl/tsp.hpp"
#include "ndl/typecheck.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout and stderr combined
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(NDL_TOOL) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
        r.output.append(buf, got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

long count_lines(const std::string& s) {
    long n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

const std::string kModel6 = std::string(NDL_DATA) + "/models/tsp6.model";
const std::string kTours6 = std::string(NDL_DATA) + "/instances/tsp6.tours";
const std::string kOp2opt = std::string(NDL_DATA) + "/operators/2opt.ndl";
const std::string kOpRaw = std::string(NDL_DATA) + "/operators/2opt_raw.ndl";
const std::string kFit2opt = std::string(NDL_DATA) + "/presets/phi-2opt.fspec";

} // namespace

TEST_CASE("check reports analysis results and dead atoms") {
    auto clean = run("check --model " + kModel6 + " --op " + kOp2opt);
    CHECK(clean.exit_code == 0);
    CHECK(contains(clean.output, "type_ok=1"));
    CHECK(contains(clean.output, "phi_code=1"));
    CHECK(!contains(clean.output, "intron="));

    auto raw = run("check --model " + kModel6 + " --op " + kOpRaw);
    CHECK(raw.exit_code == 0);
    CHECK(contains(raw.output, "type_ok=1"));
    CHECK(contains(raw.output, "phi_code=0.90404"));
    CHECK(contains(raw.output, "intron=3 "));
    CHECK(contains(raw.output, "intron=4 "));
    CHECK(contains(raw.output, "intron=5 "));
}

TEST_CASE("check rejects programs that do not fit the model") {
    std::ofstream("/tmp/ndl_cli_bad.ndl")
        << "is_satisfied(nope, T0, T1), set(T0, D0)\n";
    auto r = run("check --model " + kModel6 + " --op /tmp/ndl_cli_bad.ndl");
    CHECK(r.exit_code == 1);
    CHECK(contains(r.output, "type_ok=0"));
    CHECK(contains(r.output, "error=1 "));
    CHECK(contains(r.output, "unknown constraint type 'nope'"));
}

TEST_CASE("neighbors dumps one tour per line plus a summary") {
    auto r = run("neighbors --model " + kModel6 + " --op " + kOp2opt +
                 " --tests " + kTours6 + " --start 0");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "s=18 u=18 truncated=0"));
    CHECK(count_lines(r.output) == 19);

    auto capped = run("neighbors --model " + kModel6 + " --op " + kOp2opt +
                      " --tests " + kTours6 +
                      " --budget-neighbors 5 --strict");
    CHECK(capped.exit_code == 2);
    CHECK(contains(capped.output, "s=5"));
    CHECK(contains(capped.output, "truncated=1"));

    auto oob = run("neighbors --model " + kModel6 + " --op " + kOp2opt +
                   " --tests " + kTours6 + " --start 9");
    CHECK(oob.exit_code == 1);
    CHECK(contains(oob.output, "--start index 9 out of range"));
}

TEST_CASE("eval-op scores an operator against the preset") {
    auto r = run("eval-op --model " + kModel6 + " --op " + kOp2opt +
                 " --fitness " + kFit2opt + " --tests " + kTours6);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "tests=4"));
    CHECK(contains(r.output, "empty_core=0"));
    CHECK(contains(r.output, "test=0 s=18 u=18"));
    CHECK(contains(r.output, "test=3 s=18 u=18"));
    CHECK(contains(r.output, "truncated=0"));
    CHECK(contains(r.output, "composite=5.399"));

    auto missing = run("eval-op --model " + kModel6 + " --op " + kOp2opt +
                       " --fitness /nonexistent.fspec --tests " + kTours6);
    CHECK(missing.exit_code == 1);
    CHECK(contains(missing.output, "error:"));
    CHECK(contains(missing.output, "/nonexistent.fspec"));
}

TEST_CASE("grammar prints the model's productions") {
    auto r = run("grammar --model " + kModel6);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "<program>"));
    CHECK(contains(r.output, "::="));
    CHECK(contains(r.output, "for_each"));
}

TEST_CASE("synth writes its artifacts and is reproducible") {
    namespace fs = std::filesystem;
    fs::remove_all("/tmp/ndl_synth_a");
    fs::remove_all("/tmp/ndl_synth_b");

    std::string common = "synth --model " + kModel6 + " --tests " + kTours6 +
                         " --fitness " + kFit2opt +
                         " --pop 8 --gens 2 --seed 5 --depth 30"
                         " --budget-neighbors 500 --budget-steps 100000";
    auto a = run(common + " --out-dir /tmp/ndl_synth_a");
    CHECK(a.exit_code == 0);
    CHECK(contains(a.output, "generations=2"));
    CHECK(contains(a.output, "best="));
    CHECK(contains(a.output, "out=/tmp/ndl_synth_a"));

    std::string history = ndl::read_file("/tmp/ndl_synth_a/history.csv");
    CHECK(count_lines(history) == 4); // header plus one row per generation
    CHECK(history.rfind("generation,best,avg,stdev,best_hash", 0) == 0);

    auto manifest =
        nlohmann::json::parse(ndl::read_file("/tmp/ndl_synth_a/manifest.json"));
    CHECK(manifest["command"] == "synth");
    CHECK(manifest["params"]["pop"] == 8);
    CHECK(manifest["params"]["seed"] == 5);
    CHECK(manifest["tests"]["count"] == 4);
    bool has_history = false;
    for (auto& o : manifest["outputs"])
        if (o == "history.csv") has_history = true;
    CHECK(has_history);
    CHECK(fs::exists("/tmp/ndl_synth_a/grammar.bnf"));

    ndl::Model m = ndl::tsp_model(6);
    ndl::Program best =
        ndl::parse_operator(ndl::read_file("/tmp/ndl_synth_a/best.ndl"));
    CHECK(ndl::type_check(m, best).ok);

    auto b = run(common + " --jobs 4 --out-dir /tmp/ndl_synth_b");
    CHECK(b.exit_code == 0);
    CHECK(ndl::read_file("/tmp/ndl_synth_b/history.csv") == history);
    CHECK(ndl::read_file("/tmp/ndl_synth_b/best.ndl") ==
          ndl::read_file("/tmp/ndl_synth_a/best.ndl"));

    auto no_dir = run("synth --model " + kModel6 + " --fitness " + kFit2opt +
                      " --pop 4 --gens 1");
    CHECK(no_dir.exit_code == 1);
    CHECK(contains(no_dir.output, "--out-dir"));
}
