#include "ndl/tsp.hpp"

#include <numeric>

#include "ndl/parser.hpp"
#include "ndl/rng.hpp"

namespace ndl {

Model tsp_model(int n) {
    if (n < 3)
        throw InvalidSize("tsp_model needs at least 3 cities, got " +
                          std::to_string(n));
    VariableTypeDecl next{"next", 1, n, 1, n, false, {}};
    VariableTypeDecl order{"order", 1, n, 1, n, true,
                           DerivedRule{DerivedKind::circuit_order, "next", -1}};
    ConstraintTypeDecl adn{"all_diff_next", Pred::neq_values,
                           EdgeGen::all_pairs, "next", -1, {}};
    ConstraintTypeDecl ado{"all_diff_order", Pred::neq_values,
                           EdgeGen::all_pairs, "order", -1, {}};
    ConstraintTypeDecl sdn{"self_diff_next", Pred::neq_value_index,
                           EdgeGen::self_loop, "next", -1, {}};
    return build_model({next, order}, {adn, ado, sdn});
}

Configuration random_tour(const Model& m, std::uint64_t seed) {
    int type = m.sole_visible_type();
    if (type < 0)
        throw ModelMismatch("random_tour needs a single decision array");
    const auto& vt = m.variable_types[type];
    int n = vt.count();
    std::vector<int> cities(n);
    std::iota(cities.begin(), cities.end(), vt.index_lo);
    std::mt19937_64 rng(seed);
    for (int i = n - 1; i > 1; --i)
        std::swap(cities[i], cities[1 + (int)draw(rng, (std::uint64_t)i)]);
    Configuration c = m.make_config();
    for (int k = 0; k < n; ++k)
        c.set({type, cities[k]}, cities[(k + 1) % n]);
    propagate(m, c);
    return c;
}

Configuration random_tour(int n, std::uint64_t seed) {
    return random_tour(tsp_model(n), seed);
}

namespace {

const char* k2opt =
    "constraint(all_diff_next, T0, T1), variable(D0, T0), value(T1, D1), "
    "neq(D1, D0), iterate(T0, T4-D2, (is_satisfied(all_diff_next, T4, T1), "
    "swap(T0, T1), swap(T0, T4)))";

const char* k2optRaw =
    "constraint(all_diff_next, T0, T1), variable(D0, T0), variable(D5, T2), "
    "value(T2, D6), lt(D2, D6), value(T1, D1), neq(D1, D0), "
    "iterate(T0, T4-D2, (is_satisfied(all_diff_next, T4, T1), "
    "swap(T0, T1), swap(T0, T4)))";

const char* k3optBasic =
    "constraint(all_diff_next, T0, T1), value(T1, D0), variable(D0, T2), "
    "is_satisfied(all_diff_next, T0, T2), swap(T0, T1), swap(T1, T2)";

const char* kEvenSwap =
    "variable(D0, T0), iterate_reversed(T0, T4-D2, (swap(T0, T4)))";

} // namespace

std::map<std::string, Program> reference_operators() {
    return {
        {"2opt", parse_operator(k2opt)},
        {"3opt_basic", parse_operator(k3optBasic)},
        {"even_swap", parse_operator(kEvenSwap)},
    };
}

Program raw_2opt_variant() { return parse_operator(k2optRaw); }

} // namespace ndl
