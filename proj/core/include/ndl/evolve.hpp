#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ndl/grammar.hpp"
#include "ndl/metrics.hpp"

namespace ndl {

struct Individual {
    DerivationTree tree;
    std::string phenotype;
    std::optional<double> fitness;
};

struct EvolveParams {
    int population_size = 1000;
    int elite_size = 10;
    int generations = 50;
    double crossover_prob = 0.75;
    int mutations_per_individual = 2;
    int tournament_size = 2;
    int max_depth = 90;
    std::uint64_t seed = 0;
    /// Worker threads for fitness evaluation.  Results are byte-identical
    /// for any value: evaluation is pure and writes into fixed slots.
    int jobs = 1;
};

struct HistoryRow {
    int generation = 0;
    double best = 0;
    double avg = 0;
    double stdev = 0;
    std::string best_hash;
};

struct EvolveResult {
    Individual best;
    std::vector<HistoryRow> history;
};

std::uint64_t fnv1a64(std::string_view s);

/// 16 lowercase hex digits of fnv1a64(s).
std::string hash_hex(std::string_view s);

std::vector<Individual> init_population(const Grammar& g,
                                        const EvolveParams& params);

/// Copies `a`, replaces a uniformly chosen node with a same-nonterminal
/// subtree from `b`.  Returns `a` unchanged when no donor exists or the
/// offspring would exceed max_depth.
Individual subtree_crossover(const Grammar& g, const Individual& a,
                             const Individual& b, std::mt19937_64& rng,
                             int max_depth);

/// Regrows a uniformly chosen node within the depth budget left at its
/// position.  Returns the individual unchanged when the budget is too tight.
Individual subtree_mutation(const Grammar& g, const Individual& ind,
                            std::mt19937_64& rng, int max_depth);

/// Fills in missing fitness values, splitting the work over params.jobs
/// threads.
void evaluate_population(std::vector<Individual>& pop, const Model& m,
                         const std::vector<Configuration>& tests,
                         const ExecBudget& budget, const FitnessSpec& spec,
                         int jobs);

/// Generational loop: evaluate, copy elites through untouched, breed the
/// rest by tournament selection, crossover, then mutation.  `on_improve`
/// fires whenever the running best fitness strictly increases (including
/// the first evaluation); `on_generation` fires once per generation right
/// after evaluation, with the full scored population.
EvolveResult run_evolution(
    const Model& m, const Grammar& g,
    const std::vector<Configuration>& tests, const ExecBudget& budget,
    const FitnessSpec& spec, const EvolveParams& params,
    std::function<void(int, const Individual&)> on_improve = {},
    std::function<void(int, const std::vector<Individual>&)> on_generation =
        {});

/// Header line `generation,best,avg,stdev,best_hash` plus one row per entry.
std::string history_csv(const std::vector<HistoryRow>& rows);

} // namespace ndl
