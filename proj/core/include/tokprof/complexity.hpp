#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tokprof/strategy.hpp"

namespace tokprof {

// Symbolic token-complexity engine. A strategy's structure derives to a
// polynomial in the variables k (exemplars) and p (sampled chains) whose
// coefficients may carry uninterpreted overhead constants; simplification
// keeps the dominant monomial and drops constants and coefficients.

// Overhead constants used by the builtin strategies. "a" is the
// reasoning-chain overhead, "psi" the base framing overhead.
inline constexpr const char* kReasoningOverheadSymbol = "a";
inline constexpr const char* kFramingOverheadSymbol = "psi";

struct Rational {
    long long num = 0;
    long long den = 1;  // invariant: den > 0, gcd(|num|, den) == 1

    Rational() = default;
    Rational(long long n, long long d = 1);

    Rational operator+(const Rational& other) const;
    Rational operator*(const Rational& other) const;
    bool operator==(const Rational& other) const = default;
    bool is_one() const { return num == 1 && den == 1; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct Monomial {
    Rational coeff{1, 1};
    std::map<std::string, int> constants;  // symbol -> exponent, all > 0
    int k_exp = 0;
    int p_exp = 0;

    int total_degree() const { return k_exp + p_exp; }
    bool same_shape(const Monomial& other) const {
        return k_exp == other.k_exp && p_exp == other.p_exp && constants == other.constants;
    }
};

struct ComplexityExpr {
    // Canonical order: total variable degree descending, then lexicographic
    // on (k_exp, p_exp, constants). No two terms share a shape.
    std::vector<Monomial> terms;

    bool empty() const { return terms.empty(); }
};

struct BigOClass {
    int k_exp = 0;
    int p_exp = 0;

    bool operator==(const BigOClass& other) const = default;
    bool is_constant() const { return k_exp == 0 && p_exp == 0; }
};

struct VarAssignment {
    std::optional<long long> k;
    std::optional<long long> p;
};

// Merges like terms and restores canonical ordering.
ComplexityExpr make_expr(std::vector<Monomial> terms);

// Structural derivation: the base IO pair contributes 1, each fixed text its
// overhead constant, an exemplar block k (plus k*a with reasoning), and the
// whole sum picks up a factor of p for self-consistency strategies.
ComplexityExpr derive_complexity(const StrategySpec& spec);

// Keeps the dominant monomial (total degree, then componentwise exponents).
// Throws std::invalid_argument when maximal monomials are incomparable,
// naming the candidates.
BigOClass simplify_to_bigo(const ComplexityExpr& expr);

// One-term expression for a class; simplify(to_expr(c)) == c.
ComplexityExpr to_expr(const BigOClass& cls);

// Evaluates the class monomial at a concrete assignment, constants as 1.
// Throws when the class references an unbound variable.
long long growth_rate(const BigOClass& cls, const VarAssignment& assign);

// One (higher, lower) assignment pair per benchmark cell; the two sides may
// bind p differently (e.g. 10-chain vs 5-chain self-consistency).
struct AssignmentPair {
    VarAssignment higher;
    VarAssignment lower;
};

// Mean over cells of growth_rate(higher)/growth_rate(lower): the average of
// ratios, giving each cell equal weight.
double theoretical_ratio(const BigOClass& higher, const BigOClass& lower,
                         const std::vector<AssignmentPair>& cells);

// Paper-style rendering: ascending terms, common monomial factored out,
// e.g. "1 + a + k + k*a" and "p*(1 + a + k + k*a)".
std::string to_string(const ComplexityExpr& expr);
std::string to_string(const Monomial& term);
// "O(1)", "O(k)", "O(p*k)".
std::string to_string(const BigOClass& cls);

}  // namespace tokprof
