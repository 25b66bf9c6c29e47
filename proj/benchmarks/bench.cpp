#include <benchmark/benchmark.h>

#include "ndl/analysis.hpp"
#include "ndl/grammar.hpp"
#include "ndl/metrics.hpp"
#include "ndl/runtime.hpp"
#include "ndl/tsp.hpp"

namespace {

void BM_Propagate(benchmark::State& state) {
    auto m = ndl::tsp_model((int)state.range(0));
    auto c = ndl::random_tour(m, 1);
    for (auto _ : state) {
        ndl::propagate(m, c);
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_Propagate)->Arg(6)->Arg(32)->Arg(256);

void BM_Enumerate2opt(benchmark::State& state) {
    auto m = ndl::tsp_model((int)state.range(0));
    auto ops = ndl::reference_operators();
    auto tour = ndl::random_tour(m, 1);
    for (auto _ : state) {
        auto ns = ndl::enumerate_neighbors(m, ops.at("2opt"), tour);
        benchmark::DoNotOptimize(ns);
    }
}
BENCHMARK(BM_Enumerate2opt)->Arg(6)->Arg(7)->Arg(12);

void BM_AnalyzeRaw(benchmark::State& state) {
    auto m = ndl::tsp_model(6);
    auto p = ndl::raw_2opt_variant();
    for (auto _ : state) {
        auto report = ndl::analyze(m, p);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_AnalyzeRaw);

void BM_SampleSentence(benchmark::State& state) {
    auto m = ndl::tsp_model(6);
    auto g = ndl::generate_grammar(m);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto s = ndl::sample_sentence(g, seed++, 90);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_SampleSentence);

void BM_Evaluate2opt(benchmark::State& state) {
    auto m = ndl::tsp_model(6);
    auto ops = ndl::reference_operators();
    std::vector<ndl::Configuration> tests;
    for (int i = 0; i < 4; ++i) tests.push_back(ndl::random_tour(m, i));
    auto spec = ndl::FitnessSpec::parse(
        "expr = code + 2*(nmss + sat + size*unique*var)");
    for (auto _ : state) {
        auto r = ndl::evaluate_operator(m, ops.at("2opt"), tests, {}, spec);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_Evaluate2opt);

} // namespace

BENCHMARK_MAIN();
