#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <vector>

#include "ndl/model.hpp"
#include "ndl/tsp.hpp"
#include "support/oracles.hpp"

using namespace ndl;

TEST_CASE("tsp model shape") {
    Model m = tsp_model(6);

    REQUIRE(m.variable_types.size() == 2);
    int nt = m.var_type_id("next");
    int ot = m.var_type_id("order");
    REQUIRE(nt >= 0);
    REQUIRE(ot >= 0);

    const auto& nv = m.variable_types[nt];
    CHECK(nv.index_lo == 1);
    CHECK(nv.index_hi == 6);
    CHECK(nv.domain_lo == 1);
    CHECK(nv.domain_hi == 6);
    CHECK_FALSE(nv.derived);
    CHECK(nv.self_indexed());

    const auto& ov = m.variable_types[ot];
    CHECK(ov.derived);
    REQUIRE(ov.rule.has_value());
    CHECK(ov.rule->kind == DerivedKind::circuit_order);
    CHECK(ov.rule->source == "next");
    CHECK(ov.rule->source_type == nt);

    REQUIRE(m.constraint_types.size() == 3);
    int adn = m.constraint_type_id("all_diff_next");
    int ado = m.constraint_type_id("all_diff_order");
    int sdn = m.constraint_type_id("self_diff_next");
    REQUIRE(adn >= 0);
    REQUIRE(ado >= 0);
    REQUIRE(sdn >= 0);

    CHECK(m.constraint_types[adn].pred == Pred::neq_values);
    CHECK(m.constraint_types[adn].gen == EdgeGen::all_pairs);
    CHECK(m.constraint_types[adn].target_type == nt);
    CHECK(m.constraint_types[adn].edges.size() == 30);

    CHECK(m.constraint_types[ado].target_type == ot);
    CHECK(m.constraint_types[ado].edges.size() == 30);

    CHECK(m.constraint_types[sdn].pred == Pred::neq_value_index);
    CHECK(m.constraint_types[sdn].gen == EdgeGen::self_loop);
    CHECK(m.constraint_types[sdn].edges.size() == 6);
    for (auto& e : m.constraint_types[sdn].edges)
        CHECK(e.first == e.second);

    CHECK(m.decision_count() == 6);
    CHECK(m.sole_visible_type() == nt);
    CHECK(m.constants.empty());
}

TEST_CASE("derived order follows the successor chain") {
    Model m = tsp_model(6);
    int ot = m.var_type_id("order");

    auto c = oracle::config_of(m, {2, 3, 4, 5, 6, 1});
    for (int i = 1; i <= 6; ++i)
        CHECK(c.get({ot, i}) == i);

    c = oracle::config_of(m, {3, 6, 5, 1, 2, 4});
    std::vector<int> want = {1, 4, 2, 6, 3, 5};
    for (int i = 1; i <= 6; ++i)
        CHECK(c.get({ot, i}) == want[i - 1]);
}

TEST_CASE("broken circuit leaves unreached entries undefined") {
    Model m = tsp_model(6);
    int ot = m.var_type_id("order");

    // two disjoint 3-cycles; the walk from city 1 covers only one
    auto c = oracle::config_of(m, {2, 3, 1, 5, 6, 4});
    CHECK(c.get({ot, 1}) == 1);
    CHECK(c.get({ot, 2}) == 2);
    CHECK(c.get({ot, 3}) == 3);
    CHECK_FALSE(c.defined({ot, 4}));
    CHECK_FALSE(c.defined({ot, 5}));
    CHECK_FALSE(c.defined({ot, 6}));

    CHECK(satisfied_ratio(m, "all_diff_next", c) == doctest::Approx(1.0));
    CHECK(satisfied_ratio(m, "all_diff_order", c) ==
          doctest::Approx(6.0 / 30.0));
    CHECK(satisfied_ratio(m, "self_diff_next", c) == doctest::Approx(1.0));
    CHECK_FALSE(admissible(m, c));

    int ado = m.constraint_type_id("all_diff_order");
    CHECK_FALSE(check_edge(m, ado, {{ot, 1}, {ot, 4}}, c));
    CHECK_FALSE(check_edge(m, ado, {{ot, 4}, {ot, 5}}, c));
}

TEST_CASE("self loop constraint counts fixed points") {
    Model m = tsp_model(6);
    auto c = oracle::config_of(m, {2, 3, 4, 5, 5, 1});
    CHECK(satisfied_ratio(m, "self_diff_next", c) == doctest::Approx(5.0 / 6.0));
    CHECK(satisfied_ratio(m, "all_diff_next", c) == doctest::Approx(28.0 / 30.0));
    CHECK_FALSE(admissible(m, c));
}

TEST_CASE("propagate is idempotent") {
    Model m = tsp_model(6);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto c = random_tour(m, seed);
        auto d = c;
        propagate(m, d);
        CHECK(c == d);
    }
}

TEST_CASE("random tours are admissible permutations") {
    Model m = tsp_model(6);
    int ot = m.var_type_id("order");
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto c = random_tour(m, seed);
        CHECK(admissible(m, c));
        CHECK(oracle::single_cycle(oracle::next_of(m, c)));
        std::vector<int> order;
        for (int i = 1; i <= 6; ++i) order.push_back(c.get({ot, i}));
        std::sort(order.begin(), order.end());
        std::vector<int> want = {1, 2, 3, 4, 5, 6};
        CHECK(order == want);
    }
}

TEST_CASE("admissibility matches the cycle walk on every assignment") {
    Model m = tsp_model(6);
    int nt = m.var_type_id("next");
    std::vector<int> next(6, 1);
    long mismatches = 0, admissible_count = 0;
    auto c = m.make_config();
    for (;;) {
        for (int i = 0; i < 6; ++i) c.set({nt, i + 1}, next[i]);
        propagate(m, c);
        bool a = admissible(m, c);
        if (a) ++admissible_count;
        if (a != oracle::single_cycle(next)) ++mismatches;
        int pos = 5;
        while (pos >= 0 && next[pos] == 6) next[pos--] = 1;
        if (pos < 0) break;
        ++next[pos];
    }
    CHECK(mismatches == 0);
    CHECK(admissible_count == 120); // (n-1)! directed tours
}

TEST_CASE("diff ratio counts decision variables only") {
    Model m = tsp_model(6);
    int ot = m.var_type_id("order");
    auto a = oracle::config_of(m, {2, 3, 4, 5, 6, 1});
    CHECK(diff_ratio(m, a, a) == doctest::Approx(0.0));

    auto b = oracle::config_of(m, {2, 3, 4, 5, 6, 2});
    CHECK(diff_ratio(m, a, b) == doctest::Approx(1.0 / 6.0));

    auto d = oracle::config_of(m, {3, 6, 5, 1, 2, 4});
    CHECK(diff_ratio(m, a, d) == doctest::Approx(1.0));

    auto e = a;
    e.set({ot, 3}, 99); // derived slot only
    CHECK(diff_ratio(m, a, e) == doctest::Approx(0.0));
}

TEST_CASE("builder rejects bad declarations") {
    VariableTypeDecl next{"next", 1, 6, 1, 6};
    CHECK_THROWS_AS(build_model({next, next}, {}), DuplicateName);

    VariableTypeDecl bad_index{"x", 3, 2, 1, 6};
    CHECK_THROWS_AS(build_model({bad_index}, {}), EmptyDomain);

    VariableTypeDecl bad_domain{"x", 1, 6, 4, 3};
    CHECK_THROWS_AS(build_model({bad_domain}, {}), EmptyDomain);

    VariableTypeDecl half_derived{"x", 1, 6, 1, 6};
    half_derived.derived = true; // no rule
    CHECK_THROWS_AS(build_model({half_derived}, {}), ModelError);

    VariableTypeDecl orphan{"order", 1, 6, 1, 6};
    orphan.derived = true;
    orphan.rule = DerivedRule{DerivedKind::circuit_order, "ghost", -1};
    CHECK_THROWS_AS(build_model({orphan}, {}), UnknownVariableRef);

    ConstraintTypeDecl con{"c", Pred::neq_values, EdgeGen::all_pairs, "next"};
    CHECK_THROWS_AS(build_model({next}, {con, con}), DuplicateName);

    ConstraintTypeDecl stray{"c", Pred::neq_values, EdgeGen::all_pairs, "ghost"};
    CHECK_THROWS_AS(build_model({next}, {stray}), UnknownVariableRef);

    ConstantSetDecl k{"k", {1, 2}};
    CHECK_THROWS_AS(build_model({next}, {con}, {k, k}), DuplicateName);
    ConstantSetDecl empty{"e", {}};
    CHECK_THROWS_AS(build_model({next}, {con}, {empty}), EmptyDomain);
}

TEST_CASE("satisfied ratio rejects unknown constraint names") {
    Model m = tsp_model(6);
    auto c = random_tour(m, 1);
    CHECK_THROWS_AS(satisfied_ratio(m, "no_such", c), UnknownConstraintType);
}
