#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "ndl/metrics.hpp"
#include "ndl/parser.hpp"
#include "ndl/tsp.hpp"
#include "support/oracles.hpp"

using namespace ndl;

namespace {

std::vector<Configuration> shipped_tests(const Model& m) {
    return {
        oracle::config_of(m, {2, 3, 4, 5, 6, 1}),
        oracle::config_of(m, {3, 6, 5, 1, 2, 4}),
        oracle::config_of(m, {4, 6, 5, 2, 1, 3}),
        oracle::config_of(m, {6, 1, 2, 3, 4, 5}),
    };
}

FitnessSpec eq1() {
    return FitnessSpec::from_expression(
        "code + 2*(nmss + sat + size*unique*var)");
}

} // namespace

TEST_CASE("size midpoint sits at half the default scale") {
    Model m = tsp_model(6);
    CHECK(default_beta_s(m) == 15.0);
    CHECK(phi_size(7.5, m) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(phi_size(18, m) > phi_size(10, m));
    CHECK(phi_size(10, m) > phi_size(3, m));

    FitnessParams p;
    p.beta_s = 20.0;
    CHECK(phi_size(10, m, p) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("uniqueness ratio") {
    CHECK(phi_unique(18, 24) == doctest::Approx(0.75));
    CHECK(phi_unique(18, 18) == doctest::Approx(1.0));
    CHECK(phi_unique(0, 0) == 0.0);
}

TEST_CASE("normalized mean squared satisfaction") {
    Model m = tsp_model(6);
    NeighborhoodStats st;
    st.sat_min = {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}};
    st.ch_avg = 1.0 / 3.0;
    CHECK(phi_nmss(st, m) == doctest::Approx(0.5).epsilon(1e-12));

    st.ch_avg = 0.0;
    CHECK(phi_nmss(st, m) == 0.0);

    st.ch_avg = 0.5;
    st.sat_min = {{"a", 0.5}, {"b", 1.0}, {"c", 0.0}};
    CHECK(phi_nmss(st, m) == doctest::Approx(1.25 / 9.0));

    Model bare = build_model({{"x", 1, 6, 1, 6}}, {});
    CHECK(phi_nmss(st, bare) == 0.0);
}

TEST_CASE("satisfaction component rewards full types and scales the rest") {
    Model m = tsp_model(6);
    NeighborhoodStats st;
    st.sat_min = {{"a", 1.0}, {"b", 0.5}, {"c", 1.0}};
    st.sat_max = {{"a", 1.0}, {"b", 0.8}, {"c", 1.0}};
    CHECK(phi_sat(st, m) ==
          doctest::Approx((1.0 + 0.8 / 6.0 + 1.0) / 3.0));

    NeighborhoodStats none;
    CHECK(phi_sat(none, m) == 1.0);
}

TEST_CASE("variance component at zero spread") {
    NeighborhoodStats st; // ch_stdev = 0
    double want = 1.0 / (1.0 + std::exp(2.4));
    CHECK(phi_var(st) == doctest::Approx(want).epsilon(1e-12));
    CHECK(phi_var(st) == doctest::Approx(0.0831727).epsilon(1e-6));

    st.ch_stdev = 0.06;
    CHECK(phi_var(st) == doctest::Approx(0.5).epsilon(1e-12));
    st.ch_stdev = 0.2;
    CHECK(phi_var(st) > 0.99);
}

TEST_CASE("neighborhood stats over an empty set are all zero") {
    Model m = tsp_model(6);
    auto start = random_tour(m, 0);
    auto st = neighborhood_stats(m, start, NeighborSet{});
    CHECK(st.size_s == 0);
    CHECK(st.unique_u == 0);
    CHECK(st.ch_avg == 0.0);
    REQUIRE(st.sat_min.size() == 3);
    CHECK(st.sat_min.at("all_diff_next") == 0.0);
    CHECK(st.sat_max.at("all_diff_order") == 0.0);
    CHECK(st.sat_stdev.at("self_diff_next") == 0.0);
}

TEST_CASE("neighborhood stats aggregate change and satisfaction") {
    Model m = tsp_model(6);
    auto start = oracle::config_of(m, {2, 3, 4, 5, 6, 1});
    NeighborSet ns;
    ns.neighbors.push_back(oracle::config_of(m, {2, 3, 4, 5, 6, 1}));
    ns.neighbors.push_back(oracle::config_of(m, {2, 3, 4, 5, 6, 1}));
    ns.neighbors.push_back(oracle::config_of(m, {3, 6, 5, 1, 2, 4}));
    auto st = neighborhood_stats(m, start, ns);
    CHECK(st.size_s == 3);
    CHECK(st.unique_u == 2);
    CHECK(st.ch_min == doctest::Approx(0.0));
    CHECK(st.ch_max == doctest::Approx(1.0));
    CHECK(st.ch_avg == doctest::Approx(1.0 / 3.0));
    CHECK(st.sat_min.at("all_diff_next") == doctest::Approx(1.0));
    CHECK(st.sat_avg.at("all_diff_order") == doctest::Approx(1.0));
}

TEST_CASE("expression precedence and unary minus") {
    auto v = [](const std::string& e,
                std::map<std::string, double> comps = {}) {
        return FitnessSpec::from_expression(e).evaluate(comps);
    };
    CHECK(v("1 - 2 * 3 + 4") == doctest::Approx(-1.0));
    CHECK(v("(1 - 2) * (3 + 4)") == doctest::Approx(-7.0));
    CHECK(v("-2 * -3") == doctest::Approx(6.0));
    CHECK(v("2 * code + size", {{"code", 3}, {"size", 0.5}}) ==
          doctest::Approx(6.5));
    CHECK(v("0.6*size + 0.05", {{"size", 1.0}}) == doctest::Approx(0.65));
}

TEST_CASE("expression errors name the problem") {
    CHECK_THROWS_AS(FitnessSpec::from_expression("code +"), FitnessError);
    CHECK_THROWS_AS(FitnessSpec::from_expression("(code"), FitnessError);
    CHECK_THROWS_AS(FitnessSpec::from_expression("code extra"), FitnessError);
    CHECK_THROWS_AS(FitnessSpec::from_expression("code / 2"), FitnessError);

    try {
        FitnessSpec::from_expression("nmss + amount");
        FAIL("expected a rejection");
    } catch (const FitnessError& e) {
        std::string msg = e.what();
        CHECK(msg.find("amount") != std::string::npos);
        CHECK(msg.find("README") != std::string::npos);
        CHECK(msg.find("Fitness expressions") != std::string::npos);
    }

    try {
        FitnessSpec::from_expression("velocity");
        FAIL("expected a rejection");
    } catch (const FitnessError& e) {
        std::string msg = e.what();
        CHECK(msg.find("velocity") != std::string::npos);
        CHECK(msg.find("code, nmss, sat, size, unique, var") !=
              std::string::npos);
    }

    auto spec = FitnessSpec::from_expression("code");
    CHECK_THROWS_AS(spec.evaluate({{"size", 1.0}}), FitnessError);
}

TEST_CASE("key value parsing") {
    auto spec = FitnessSpec::parse("# preset\n"
                                   "alpha_s = 1.5\n"
                                   "beta_s = 20\n"
                                   "alpha_v = 41\n"
                                   "beta_v = 0.5\n"
                                   "expr = size\n");
    CHECK(spec.params.alpha_s == doctest::Approx(1.5));
    REQUIRE(spec.params.beta_s.has_value());
    CHECK(*spec.params.beta_s == doctest::Approx(20.0));
    CHECK(spec.params.alpha_v == doctest::Approx(41.0));
    CHECK(spec.params.beta_v == doctest::Approx(0.5));
    CHECK(spec.expression() == "size");

    CHECK_THROWS_AS(FitnessSpec::parse(""), FitnessError);
    CHECK_THROWS_AS(FitnessSpec::parse("alpha_s = 0.5\n"), FitnessError);
    CHECK_THROWS_AS(FitnessSpec::parse("expr\n"), FitnessError);
    CHECK_THROWS_AS(FitnessSpec::parse("turbo = 1\nexpr = code\n"),
                    FitnessError);
    CHECK_THROWS_AS(FitnessSpec::parse("alpha_s = fast\nexpr = code\n"),
                    FitnessError);
    CHECK_THROWS_AS(FitnessSpec::parse_file("/nonexistent.fspec"),
                    FitnessError);
}

TEST_CASE("operator evaluation on the shipped six city tests") {
    Model m = tsp_model(6);
    auto tests = shipped_tests(m);
    auto spec = eq1();

    auto two = evaluate_operator(m, reference_operators().at("2opt"), tests,
                                 {}, spec);
    CHECK_FALSE(two.empty_core);
    CHECK_FALSE(two.truncated);
    REQUIRE(two.per_test.size() == 4);
    REQUIRE(two.stats.size() == 4);
    CHECK(two.composite == doctest::Approx(5.39902).epsilon(1e-4));
    for (auto& st : two.stats) {
        CHECK(st.size_s == 18);
        CHECK(st.unique_u == 18);
        CHECK(st.sat_min.at("all_diff_next") == doctest::Approx(1.0));
    }
    for (auto& comp : two.per_test)
        CHECK(spec.evaluate(comp) == doctest::Approx(two.composite));

    auto three = evaluate_operator(m, reference_operators().at("3opt_basic"),
                                   tests, {}, spec);
    CHECK(three.composite == doctest::Approx(3.79077).epsilon(1e-4));
    for (auto& st : three.stats) {
        CHECK(st.size_s == 24);
        CHECK(st.unique_u == 18);
        CHECK(st.ch_stdev == doctest::Approx(0.0));
    }
    CHECK(two.composite > three.composite);
}

TEST_CASE("dead atoms cost exactly their code share") {
    Model m = tsp_model(6);
    auto tests = shipped_tests(m);
    auto spec = eq1();

    auto clean = evaluate_operator(m, reference_operators().at("2opt"), tests,
                                   {}, spec);
    auto raw = evaluate_operator(m, raw_2opt_variant(), tests, {}, spec);
    CHECK(raw.static_report.introns.size() == 3);
    REQUIRE(raw.per_test.size() == 4);
    for (size_t i = 0; i < 4; ++i) {
        CHECK(raw.per_test[i].at("size") ==
              doctest::Approx(clean.per_test[i].at("size")));
        CHECK(raw.per_test[i].at("var") ==
              doctest::Approx(clean.per_test[i].at("var")));
    }
    double code_gap = 1.0 - raw.static_report.phi_code;
    CHECK(raw.composite ==
          doctest::Approx(clean.composite - code_gap).epsilon(1e-9));
}

TEST_CASE("an operator with no core keeps only its code score") {
    Model m = tsp_model(6);
    auto tests = shipped_tests(m);
    auto rec = evaluate_operator(m, parse_operator("variable(D0, T0)"), tests,
                                 {}, eq1());
    CHECK(rec.empty_core);
    CHECK(rec.composite == doctest::Approx(0.5));
    for (auto& comp : rec.per_test) {
        CHECK(comp.at("size") == 0.0);
        CHECK(comp.at("sat") == 0.0);
        CHECK(comp.at("var") == 0.0);
    }
    for (auto& st : rec.stats) CHECK(st.size_s == 0);
}

TEST_CASE("a tight budget marks the record truncated") {
    Model m = tsp_model(6);
    auto tests = shipped_tests(m);
    ExecBudget tiny;
    tiny.max_neighbors = 5;
    auto rec = evaluate_operator(m, reference_operators().at("2opt"), tests,
                                 tiny, eq1());
    CHECK(rec.truncated);
}

TEST_CASE("shipped presets parse") {
    std::string dir = NDL_DATA "/presets/";
    auto a = FitnessSpec::parse_file(dir + "phi-2opt.fspec");
    CHECK(a.expression() == "code + 2*(nmss + sat + size*unique*var)");
    auto b = FitnessSpec::parse_file(dir + "phi-3opt.fspec");
    CHECK(b.expression() == "code + 2*(nmss + sat + size*unique)");
    auto c = FitnessSpec::parse_file(dir + "phi-3swap.fspec");
    CHECK(c.expression().find("0.6*size*unique*var") != std::string::npos);
}
