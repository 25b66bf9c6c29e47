#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndl/analysis.hpp"
#include "ndl/model.hpp"
#include "ndl/runtime.hpp"

namespace ndl {

/// Aggregates over an enumerated neighborhood. Change ratios compare
/// decision variables against the start configuration; satisfaction
/// ratios are tracked per constraint type. stdev is the population
/// standard deviation. An empty neighborhood yields all zeros.
struct NeighborhoodStats {
    long size_s = 0;
    long unique_u = 0;
    double ch_min = 0, ch_max = 0, ch_avg = 0, ch_stdev = 0;
    std::map<std::string, double> sat_min, sat_max, sat_avg, sat_stdev;
};

struct FitnessParams {
    double alpha_s = 0.5;
    /// Neighborhood-size midpoint scale; when unset it defaults to
    /// |V|·(|V|−1)/2 over the model's decision variables.
    std::optional<double> beta_s;
    double alpha_v = 40.0;
    double beta_v = 0.06;
};

struct FitnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Composite-fitness specification: numeric parameters plus an
/// arithmetic expression over the component scores
/// {code, nmss, sat, size, unique, var} with +, -, *, parentheses and
/// numeric literals.
class FitnessSpec {
public:
    FitnessParams params;

    /// Parses the key=value text form: lines `alpha_s = 0.5`,
    /// `beta_v = 0.06`, … plus one `expr = …` line; `#` comments.
    static FitnessSpec parse(const std::string& text);
    static FitnessSpec parse_file(const std::string& path);
    static FitnessSpec from_expression(const std::string& expr,
                                       FitnessParams p = {});

    double evaluate(const std::map<std::string, double>& components) const;
    const std::string& expression() const { return expr_; }

private:
    void compile();
    std::string expr_;
    struct Tok {
        char op = 0; // 0 = number, 'c' = component, else operator
        double num = 0;
        std::string name;
    };
    std::vector<Tok> rpn_;
};

/// Evaluation of one operator across a set of test configurations.
struct FitnessRecord {
    std::vector<std::map<std::string, double>> per_test; // component scores
    double composite = 0; // arithmetic mean of per-test composites
    std::vector<NeighborhoodStats> stats;
    StaticReport static_report;
    bool empty_core = false;
    bool truncated = false;
};

NeighborhoodStats neighborhood_stats(const Model& m,
                                     const Configuration& start,
                                     const NeighborSet& ns);

/// 1/(1+e^(α_s·(−u+β_s/2))): rewards larger neighborhoods, flattening
/// out past the midpoint.
double phi_size(double u, const Model& m, const FitnessParams& p = {});

/// β_s fallback when the params leave it unset: |V|·(|V|−1)/2 over the
/// model's decision variables.
double default_beta_s(const Model& m);

/// u/s; 0 for an empty neighborhood.
double phi_unique(long u, long s);

/// Σ_t sat_min(t)² ÷ (#types · |V| · ch_avg); 0 when ch_avg = 0 so
/// do-nothing operators earn nothing.
double phi_nmss(const NeighborhoodStats& st, const Model& m);

/// Mean over types of: 1 when the type is satisfied everywhere, else
/// its best ratio scaled down by |V|.
double phi_sat(const NeighborhoodStats& st, const Model& m);

/// 1/(1+e^(α_v·(−ch_stdev+β_v))): rewards variance in the number of
/// touched variables.
double phi_var(const NeighborhoodStats& st, const FitnessParams& p = {});

/// analyze → prune → enumerate per test → score. Programs without an
/// executable core keep their code score and get 0 for every
/// neighborhood component; so does any test yielding no neighbors.
FitnessRecord evaluate_operator(const Model& m, const Program& program,
                                const std::vector<Configuration>& tests,
                                const ExecBudget& budget,
                                const FitnessSpec& spec);

} // namespace ndl
