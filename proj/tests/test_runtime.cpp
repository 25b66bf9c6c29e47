#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ndl/parser.hpp"
#include "ndl/runtime.hpp"
#include "ndl/tsp.hpp"
#include "support/oracles.hpp"

using namespace ndl;

namespace {

std::set<std::vector<int>> neighbor_set(const Model& m, const NeighborSet& ns) {
    std::set<std::vector<int>> out;
    for (auto& c : ns.neighbors) out.insert(oracle::next_of(m, c));
    return out;
}

long unique_count(const NeighborSet& ns) {
    std::set<std::vector<int>> seen;
    for (auto& c : ns.neighbors) seen.insert(c.raw());
    return (long)seen.size();
}

} // namespace

TEST_CASE("two exchange matches the segment reversal oracle") {
    for (int n : {6, 7}) {
        CAPTURE(n);
        Model m = tsp_model(n);
        auto p = reference_operators().at("2opt");
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto start = random_tour(m, seed);
            auto ns = enumerate_neighbors(m, p, start);
            CHECK_FALSE(ns.truncated);
            CHECK(ns.steps_used > 0);
            CHECK((long)ns.neighbors.size() == (long)n * (n - 3));
            CHECK(unique_count(ns) == (long)n * (n - 3));
            CHECK(neighbor_set(m, ns) ==
                  oracle::two_opt_all(oracle::next_of(m, start)));
        }
    }
}

TEST_CASE("three rotation matches its closed form") {
    for (int n : {6, 7}) {
        CAPTURE(n);
        Model m = tsp_model(n);
        auto p = reference_operators().at("3opt_basic");
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto start = random_tour(m, seed);
            auto ns = enumerate_neighbors(m, p, start);
            CHECK((long)ns.neighbors.size() == (long)n * (n - 2));
            CHECK(neighbor_set(m, ns) ==
                  oracle::rotate3_all(oracle::next_of(m, start)));
        }
    }
}

TEST_CASE("three rotation multiset on six cities") {
    Model m = tsp_model(6);
    auto start = oracle::config_of(m, {2, 3, 4, 5, 6, 1});
    auto ns = enumerate_neighbors(m, reference_operators().at("3opt_basic"),
                                  start);
    CHECK(ns.neighbors.size() == 24);
    CHECK(unique_count(ns) == 18);
}

TEST_CASE("the loop walks the entry snapshot and emits once per branch") {
    Model m = tsp_model(6);
    auto start = oracle::config_of(m, {2, 3, 4, 5, 6, 1});

    std::vector<std::vector<int>> snaps;
    TraceFn trace = [&](const Atom&, const Configuration& c) {
        snaps.push_back(oracle::next_of(m, c));
    };
    auto ns = enumerate_neighbors(m, reference_operators().at("2opt"), start,
                                  {}, trace);
    CHECK(ns.neighbors.size() == 18);

    // one branch's swap-by-swap history, as consecutive trace entries
    std::vector<std::vector<int>> wanted = {{2, 6, 4, 5, 3, 1},
                                            {2, 4, 6, 5, 3, 1},
                                            {2, 3, 6, 5, 4, 1},
                                            {2, 5, 6, 3, 4, 1}};
    bool found = false;
    for (size_t i = 0; i + 3 < snaps.size() && !found; ++i)
        found = std::equal(wanted.begin(), wanted.end(), snaps.begin() + i);
    CHECK(found);

    std::vector<int> branch_result = {2, 5, 6, 3, 4, 1};
    CHECK(neighbor_set(m, ns).count(branch_result) == 1);
}

TEST_CASE("reversed iteration visits predecessors") {
    Model m = tsp_model(6);
    auto start = oracle::config_of(m, {2, 3, 4, 5, 6, 1});
    auto ns = enumerate_neighbors(m, reference_operators().at("even_swap"),
                                  start);
    CHECK(ns.neighbors.size() == 6);
    for (auto& c : ns.neighbors) {
        auto next = oracle::next_of(m, c);
        std::multiset<int> vals(next.begin(), next.end());
        CHECK(vals == std::multiset<int>{1, 2, 3, 4, 5, 6});
    }
}

TEST_CASE("a self assignment still counts as a change") {
    Model m = tsp_model(6);
    auto start = oracle::config_of(m, {2, 3, 4, 5, 6, 1});
    auto p = parse_operator("value(T0, D0), set(T0, D0)");
    auto ns = enumerate_neighbors(m, p, start);
    CHECK(ns.neighbors.size() == 6);
    CHECK(unique_count(ns) == 1);
    CHECK(ns.neighbors[0] == start);
}

TEST_CASE("walks over the constraint graph reach every arc") {
    Model m = tsp_model(6);
    auto start = oracle::config_of(m, {3, 6, 5, 1, 2, 4});

    auto fwd = parse_operator(
        "variable(D0, T0), bfs_over(all_diff_next, T0, T1-T2, "
        "(is_satisfied(all_diff_next, T1, T2), swap(T1, T2)))");
    auto inv = parse_operator(
        "variable(D0, T0), bfs_over_inverted(all_diff_next, T0, T1-T2, "
        "(is_satisfied(all_diff_next, T1, T2), swap(T1, T2)))");

    auto a = enumerate_neighbors(m, fwd, start);
    auto b = enumerate_neighbors(m, inv, start);
    CHECK(a.neighbors.size() == 6);
    CHECK(b.neighbors.size() == 6);
    CHECK(a.neighbors == b.neighbors);

    auto self_loop = parse_operator(
        "variable(D0, T0), bfs_over(self_diff_next, T0, T1-T2, "
        "(swap(T1, T2)))");
    auto c = enumerate_neighbors(m, self_loop, start);
    CHECK(c.neighbors.size() == 6);
    CHECK(unique_count(c) == 1);
    CHECK(c.neighbors[0] == start);
}

TEST_CASE("budgets truncate instead of failing") {
    Model m = tsp_model(6);
    auto start = random_tour(m, 3);
    auto p = reference_operators().at("2opt");

    ExecBudget few_neighbors;
    few_neighbors.max_neighbors = 5;
    auto ns = enumerate_neighbors(m, p, start, few_neighbors);
    CHECK(ns.truncated);
    CHECK(ns.neighbors.size() == 5);

    ExecBudget few_steps;
    few_steps.max_steps = 10;
    ns = enumerate_neighbors(m, p, start, few_steps);
    CHECK(ns.truncated);
    CHECK(ns.neighbors.size() < 18);

    ExecBudget shallow;
    shallow.max_branch_depth = 1;
    ns = enumerate_neighbors(m, p, start, shallow);
    CHECK(ns.truncated);

    auto full = enumerate_neighbors(m, p, start);
    CHECK_FALSE(full.truncated);
    CHECK(full.steps_used > 0);
}

TEST_CASE("unpruned programs are rejected with their dead paths") {
    Model m = tsp_model(6);
    auto start = random_tour(m, 0);
    try {
        enumerate_neighbors(m, raw_2opt_variant(), start);
        FAIL("expected a rejection");
    } catch (const UnprunedProgram& e) {
        std::string msg = e.what();
        CHECK(msg.find("3") != std::string::npos);
        CHECK(msg.find("4") != std::string::npos);
        CHECK(msg.find("5") != std::string::npos);
    }
}

TEST_CASE("modifiers apply outside enumeration") {
    Model m = tsp_model(6);
    int nt = m.var_type_id("next");
    auto start = oracle::config_of(m, {2, 3, 4, 5, 6, 1});

    Atom sw = parse_operator("swap(T0, T1)").atoms[0];
    Bindings b;
    b[Ref{'T', 0, 0}] = BoundValue{true, VarId{nt, 1}, 0};
    b[Ref{'T', 1, 0}] = BoundValue{true, VarId{nt, 2}, 0};
    auto out = apply_modifier(m, start, sw, b);
    CHECK(out.get({nt, 1}) == 3);
    CHECK(out.get({nt, 2}) == 2);

    Atom st = parse_operator("set(T0, D0)").atoms[0];
    Bindings bad;
    bad[Ref{'T', 0, 0}] = BoundValue{true, VarId{nt, 1}, 0};
    bad[Ref{'D', 0, 0}] = BoundValue{false, {}, 9};
    CHECK_THROWS_AS(apply_modifier(m, start, st, bad), DomainViolation);

    Atom flt = parse_operator("eq(D0, D0)").atoms[0];
    CHECK_THROWS_AS(apply_modifier(m, start, flt, {}), DomainViolation);

    Atom fl = parse_operator("flip(T0, D0, D1)").atoms[0];
    Bindings fb;
    fb[Ref{'T', 0, 0}] = BoundValue{true, VarId{nt, 1}, 0};
    fb[Ref{'D', 0, 0}] = BoundValue{false, {}, 2};
    fb[Ref{'D', 1, 0}] = BoundValue{false, {}, 5};
    auto flipped = apply_modifier(m, start, fl, fb);
    CHECK(flipped.get({nt, 1}) == 5); // was d1, becomes d2
    auto back = apply_modifier(m, flipped, fl, fb);
    CHECK(back.get({nt, 1}) == 2); // anything else becomes d1
}