#include "ndl/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "ndl/parser.hpp"

namespace ndl {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::string_view s) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  (unsigned long long)fnv1a64(s));
    return buf;
}

namespace {

void collect_nodes(DerivationTree& t, int level,
                   std::vector<std::pair<DerivationTree*, int>>& out) {
    out.emplace_back(&t, level);
    for (auto& c : t.children) collect_nodes(c, level + 1, out);
}

void collect_matching(const DerivationTree& t, int nt,
                      std::vector<const DerivationTree*>& out) {
    if (t.nt == nt) out.push_back(&t);
    for (auto& c : t.children) collect_matching(c, nt, out);
}

double draw01(std::mt19937_64& rng) {
    return (rng() >> 11) * (1.0 / 9007199254740992.0);
}

Individual from_tree(const Grammar& g, DerivationTree tree) {
    Individual ind;
    ind.tree = std::move(tree);
    ind.phenotype = phenotype(g, ind.tree);
    return ind;
}

} // namespace

std::vector<Individual> init_population(const Grammar& g,
                                        const EvolveParams& params) {
    std::vector<Individual> pop;
    pop.reserve(params.population_size);
    std::uint64_t state = params.seed;
    for (int i = 0; i < params.population_size; ++i)
        pop.push_back(from_tree(
            g, sample_tree(g, splitmix64(state), params.max_depth)));
    return pop;
}

Individual subtree_crossover(const Grammar& g, const Individual& a,
                             const Individual& b, std::mt19937_64& rng,
                             int max_depth) {
    Individual child = a;
    child.fitness.reset();
    std::vector<std::pair<DerivationTree*, int>> sites;
    collect_nodes(child.tree, 0, sites);
    DerivationTree* site = sites[(size_t)draw(rng, sites.size())].first;

    std::vector<const DerivationTree*> donors;
    collect_matching(b.tree, site->nt, donors);
    if (donors.empty()) return a;
    *site = *donors[(size_t)draw(rng, donors.size())];
    if (tree_depth(child.tree) > max_depth) return a;
    child.phenotype = phenotype(g, child.tree);
    return child;
}

Individual subtree_mutation(const Grammar& g, const Individual& ind,
                            std::mt19937_64& rng, int max_depth) {
    Individual child = ind;
    child.fitness.reset();
    std::vector<std::pair<DerivationTree*, int>> sites;
    collect_nodes(child.tree, 0, sites);
    auto [site, level] = sites[(size_t)draw(rng, sites.size())];
    int budget = max_depth - level;
    if (budget < g.min_depth[site->nt]) return ind;
    *site = grow_tree(g, site->nt, rng, budget);
    child.phenotype = phenotype(g, child.tree);
    return child;
}

void evaluate_population(std::vector<Individual>& pop, const Model& m,
                         const std::vector<Configuration>& tests,
                         const ExecBudget& budget, const FitnessSpec& spec,
                         int jobs) {
    std::vector<size_t> todo;
    for (size_t i = 0; i < pop.size(); ++i)
        if (!pop[i].fitness) todo.push_back(i);
    if (todo.empty()) return;

    auto work = [&](size_t lo, size_t hi) {
        for (size_t k = lo; k < hi; ++k) {
            Individual& ind = pop[todo[k]];
            Program p = parse_operator(ind.phenotype);
            ind.fitness =
                evaluate_operator(m, p, tests, budget, spec).composite;
        }
    };

    if (jobs <= 1 || todo.size() < 2) {
        work(0, todo.size());
        return;
    }
    size_t n = (size_t)std::min<size_t>(jobs, todo.size());
    size_t chunk = (todo.size() + n - 1) / n;
    std::vector<std::thread> threads;
    for (size_t t = 0; t < n; ++t) {
        size_t lo = t * chunk;
        size_t hi = std::min(todo.size(), lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back(work, lo, hi);
    }
    for (auto& t : threads) t.join();
}

EvolveResult run_evolution(
    const Model& m, const Grammar& g,
    const std::vector<Configuration>& tests, const ExecBudget& budget,
    const FitnessSpec& spec, const EvolveParams& params,
    std::function<void(int, const Individual&)> on_improve,
    std::function<void(int, const std::vector<Individual>&)> on_generation) {
    std::mt19937_64 rng(params.seed);
    std::vector<Individual> pop = init_population(g, params);

    EvolveResult result;
    bool have_best = false;

    auto tournament = [&]() -> size_t {
        size_t best = (size_t)draw(rng, pop.size());
        for (int k = 1; k < params.tournament_size; ++k) {
            size_t c = (size_t)draw(rng, pop.size());
            if (*pop[c].fitness > *pop[best].fitness) best = c;
        }
        return best;
    };

    for (int gen = 0; gen <= params.generations; ++gen) {
        evaluate_population(pop, m, tests, budget, spec, params.jobs);
        if (on_generation) on_generation(gen, pop);

        std::vector<size_t> order(pop.size());
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (*pop[a].fitness != *pop[b].fitness)
                return *pop[a].fitness > *pop[b].fitness;
            return a < b;
        });

        double sum = 0, sq = 0;
        for (auto& ind : pop) {
            sum += *ind.fitness;
            sq += *ind.fitness * *ind.fitness;
        }
        double avg = sum / pop.size();
        double var = std::max(0.0, sq / pop.size() - avg * avg);
        const Individual& gen_best = pop[order[0]];
        result.history.push_back({gen, *gen_best.fitness, avg,
                                  std::sqrt(var),
                                  hash_hex(gen_best.phenotype)});

        if (!have_best || *gen_best.fitness > *result.best.fitness) {
            result.best = gen_best;
            have_best = true;
            if (on_improve) on_improve(gen, result.best);
        }
        if (gen == params.generations) break;

        std::vector<Individual> next;
        next.reserve(pop.size());
        for (int e = 0; e < params.elite_size && e < (int)pop.size(); ++e)
            next.push_back(pop[order[e]]);
        while ((int)next.size() < params.population_size) {
            size_t p1 = tournament();
            Individual child;
            if (draw01(rng) < params.crossover_prob) {
                size_t p2 = tournament();
                child = subtree_crossover(g, pop[p1], pop[p2], rng,
                                          params.max_depth);
            } else {
                child = pop[p1];
            }
            for (int k = 0; k < params.mutations_per_individual; ++k)
                child = subtree_mutation(g, child, rng, params.max_depth);
            next.push_back(std::move(child));
        }
        pop = std::move(next);
    }
    return result;
}

std::string history_csv(const std::vector<HistoryRow>& rows) {
    std::string out = "generation,best,avg,stdev,best_hash\n";
    char buf[128];
    for (auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%s\n",
                      r.generation, r.best, r.avg, r.stdev,
                      r.best_hash.c_str());
        out += buf;
    }
    return out;
}

} // namespace ndl
