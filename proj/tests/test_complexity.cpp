#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "tokprof/complexity.hpp"
#include "tokprof/strategy.hpp"

using namespace tokprof;

namespace {

Monomial term(long long coeff, int k_exp, int p_exp,
              std::vector<std::pair<std::string, int>> constants = {}) {
    Monomial m;
    m.coeff = Rational{coeff, 1};
    m.k_exp = k_exp;
    m.p_exp = p_exp;
    for (const auto& [symbol, exp] : constants) m.constants[symbol] = exp;
    return m;
}

}  // namespace

TEST_CASE("builtin strategies derive to the published polynomials") {
    CHECK(to_string(derive_complexity(build_builtin("vanilla_io", 0, 1))) == "1 + psi");
    CHECK(to_string(derive_complexity(build_builtin("zeroshot_cot", 0, 1))) == "1 + a");
    CHECK(to_string(derive_complexity(build_builtin("vanilla_fewshot", 3, 1))) == "1 + k");
    CHECK(to_string(derive_complexity(build_builtin("fewshot_cot", 8, 1))) == "1 + a + k + k*a");
    CHECK(to_string(derive_complexity(build_builtin("cot_sc", 8, 5))) == "p*(1 + a + k + k*a)");
}

TEST_CASE("builtin strategies simplify to the published classes") {
    const std::vector<std::pair<std::string, std::string>> expected = {
        {"vanilla_io", "O(1)"},     {"zeroshot_cot", "O(1)"}, {"vanilla_fewshot", "O(k)"},
        {"fewshot_cot", "O(k)"},    {"cot_sc", "O(p*k)"},
    };
    for (const auto& [name, cls] : expected) {
        CAPTURE(name);
        const bool zeroshot = name == "vanilla_io" || name == "zeroshot_cot";
        const StrategySpec spec = build_builtin(name, zeroshot ? 0 : 4, name == "cot_sc" ? 5 : 1);
        CHECK(to_string(simplify_to_bigo(derive_complexity(spec))) == cls);
    }
}

TEST_CASE("derivation is structural, not tied to the chosen k and p") {
    // k=0 with an exemplar block still grows linearly in k.
    CHECK(to_string(simplify_to_bigo(derive_complexity(build_builtin("vanilla_fewshot", 0, 1)))) ==
          "O(k)");
    CHECK(to_string(simplify_to_bigo(derive_complexity(build_builtin("cot_sc", 2, 1)))) ==
          "O(p*k)");
}

TEST_CASE("growth rates reproduce the reference grid") {
    const BigOClass constant{0, 0};
    const BigOClass linear{1, 0};
    const BigOClass sampled{1, 1};

    // k per benchmark: bbh 3, gsm8k 8, mmlu 4; p in {5, 10}.
    const long long ks[3] = {3, 8, 4};
    const long long expected[6][3] = {
        {1, 1, 1},     // vanilla_io
        {1, 1, 1},     // zeroshot_cot
        {3, 8, 4},     // vanilla_fewshot
        {3, 8, 4},     // fewshot_cot
        {15, 40, 20},  // 5-chain self-consistency
        {30, 80, 40},  // 10-chain self-consistency
    };
    for (int b = 0; b < 3; ++b) {
        const VarAssignment assign5{ks[b], 5};
        const VarAssignment assign10{ks[b], 10};
        CHECK(growth_rate(constant, assign5) == expected[0][b]);
        CHECK(growth_rate(constant, assign10) == expected[1][b]);
        CHECK(growth_rate(linear, assign5) == expected[2][b]);
        CHECK(growth_rate(linear, assign10) == expected[3][b]);
        CHECK(growth_rate(sampled, assign5) == expected[4][b]);
        CHECK(growth_rate(sampled, assign10) == expected[5][b]);
    }

    CHECK(growth_rate(sampled, VarAssignment{8, 10}) == 80);
    CHECK(growth_rate(linear, VarAssignment{3, std::nullopt}) == 3);
    CHECK(growth_rate(constant, VarAssignment{}) == 1);
}

TEST_CASE("growth rate needs every referenced variable bound") {
    CHECK_THROWS_AS(growth_rate(BigOClass{1, 0}, VarAssignment{std::nullopt, 5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(growth_rate(BigOClass{1, 1}, VarAssignment{3, std::nullopt}),
                    std::invalid_argument);
}

TEST_CASE("theoretical ratios average per-benchmark growth rate ratios") {
    const BigOClass constant{0, 0};
    const BigOClass sampled{1, 1};

    std::vector<AssignmentPair> cells;
    for (const long long k : {3LL, 8LL, 4LL}) {
        cells.push_back({VarAssignment{k, 10}, VarAssignment{k, 1}});
    }
    CHECK(theoretical_ratio(sampled, constant, cells) == doctest::Approx(50.0).epsilon(1e-12));

    std::vector<AssignmentPair> sc_cells;
    for (const long long k : {3LL, 8LL, 4LL}) {
        sc_cells.push_back({VarAssignment{k, 10}, VarAssignment{k, 5}});
    }
    CHECK(theoretical_ratio(sampled, sampled, sc_cells) == doctest::Approx(2.0).epsilon(1e-12));

    std::vector<AssignmentPair> self_cells = {{VarAssignment{3, 1}, VarAssignment{3, 1}}};
    CHECK(theoretical_ratio(constant, constant, self_cells) == 1.0);

    CHECK_THROWS_AS(theoretical_ratio(sampled, constant, {}), std::invalid_argument);
}

TEST_CASE("incomparable maxima are rejected with both candidates named") {
    const ComplexityExpr expr = make_expr({term(1, 0, 0), term(1, 1, 0), term(1, 0, 1)});
    try {
        simplify_to_bigo(expr);
        FAIL("expected an ambiguity error");
    } catch (const std::invalid_argument& e) {
        const std::string message = e.what();
        CHECK(message.find("O(k)") != std::string::npos);
        CHECK(message.find("O(p)") != std::string::npos);
    }
}

TEST_CASE("same-shape monomials merge and ordering stays canonical") {
    const ComplexityExpr expr =
        make_expr({term(1, 0, 0), term(1, 1, 0), term(2, 1, 0), term(1, 0, 0, {{"a", 1}})});
    REQUIRE(expr.terms.size() == 3);
    // canonical order: degree descending
    CHECK(expr.terms[0].k_exp == 1);
    CHECK(expr.terms[0].coeff == Rational{3, 1});
    for (std::size_t i = 1; i < expr.terms.size(); ++i) {
        CHECK(expr.terms[i - 1].total_degree() >= expr.terms[i].total_degree());
    }
    CHECK(to_string(expr) == "1 + a + 3*k");
}

TEST_CASE("simplification is a fixed point") {
    for (const auto& name : builtin_strategy_names()) {
        const bool zeroshot = name == "vanilla_io" || name == "zeroshot_cot";
        const StrategySpec spec = build_builtin(name, zeroshot ? 0 : 2, name == "cot_sc" ? 5 : 1);
        const BigOClass once = simplify_to_bigo(derive_complexity(spec));
        CHECK(simplify_to_bigo(to_expr(once)) == once);
    }
}

TEST_CASE("growth rate is monotone in each variable") {
    for (int k_exp = 0; k_exp <= 2; ++k_exp) {
        for (int p_exp = 0; p_exp <= 2; ++p_exp) {
            const BigOClass cls{k_exp, p_exp};
            long long previous = 0;
            for (long long k = 1; k <= 6; ++k) {
                const long long rate = growth_rate(cls, VarAssignment{k, 3});
                CHECK(rate >= previous);
                previous = rate;
            }
            previous = 0;
            for (long long p = 1; p <= 6; ++p) {
                const long long rate = growth_rate(cls, VarAssignment{3, p});
                CHECK(rate >= previous);
                previous = rate;
            }
        }
    }
}

TEST_CASE("rationals normalize") {
    CHECK(Rational{6, 4} == Rational{3, 2});
    CHECK((Rational{1, 2} + Rational{1, 2}).is_one());
    CHECK(Rational{2, 4} * Rational{2, 1} == Rational{1, 1});
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("exponent sanity bound is enforced") {
    Monomial runaway;
    runaway.k_exp = 9;
    CHECK_THROWS_AS(make_expr({runaway}), std::invalid_argument);
}
