#include "tokprof/complexity.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tokprof {

namespace {

constexpr int kMaxExponent = 8;  // sanity bound; nothing here grows past pk

void check_exponents(const Monomial& m) {
    if (m.k_exp < 0 || m.p_exp < 0 || m.k_exp > kMaxExponent || m.p_exp > kMaxExponent) {
        throw std::invalid_argument("monomial variable exponent out of range");
    }
    for (const auto& [symbol, exp] : m.constants) {
        if (symbol.empty() || exp <= 0 || exp > kMaxExponent) {
            throw std::invalid_argument("monomial constant exponent out of range");
        }
    }
    if (m.coeff.num <= 0) {
        throw std::invalid_argument("monomial coefficient must be positive");
    }
}

// Internal canonical order: total variable degree descending, then
// lexicographic on (k_exp, p_exp, constants).
bool canonical_less(const Monomial& lhs, const Monomial& rhs) {
    if (lhs.total_degree() != rhs.total_degree()) {
        return lhs.total_degree() > rhs.total_degree();
    }
    if (lhs.k_exp != rhs.k_exp) return lhs.k_exp < rhs.k_exp;
    if (lhs.p_exp != rhs.p_exp) return lhs.p_exp < rhs.p_exp;
    return lhs.constants < rhs.constants;
}

// Display order matches the written convention: ascending degree, bare terms
// before constant-bearing ones ("1 + a + k + k*a").
bool display_less(const Monomial& lhs, const Monomial& rhs) {
    if (lhs.total_degree() != rhs.total_degree()) {
        return lhs.total_degree() < rhs.total_degree();
    }
    if (lhs.k_exp != rhs.k_exp) return lhs.k_exp < rhs.k_exp;
    if (lhs.p_exp != rhs.p_exp) return lhs.p_exp < rhs.p_exp;
    return lhs.constants < rhs.constants;
}

long long checked_pow(long long base, int exp) {
    long long result = 1;
    for (int i = 0; i < exp; ++i) {
        if (result > std::numeric_limits<long long>::max() / base) {
            throw std::overflow_error("growth rate overflow");
        }
        result *= base;
    }
    return result;
}

std::string variables_string(int k_exp, int p_exp) {
    // p is printed before k, matching the class notation O(p*k).
    std::string out;
    auto append = [&out](const char* name, int exp) {
        if (exp == 0) return;
        if (!out.empty()) out += "*";
        out += name;
        if (exp > 1) out += "^" + std::to_string(exp);
    };
    append("p", p_exp);
    append("k", k_exp);
    return out;
}

}  // namespace

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational Rational::operator+(const Rational& other) const {
    return Rational(num * other.den + other.num * den, den * other.den);
}

Rational Rational::operator*(const Rational& other) const {
    return Rational(num * other.num, den * other.den);
}

ComplexityExpr make_expr(std::vector<Monomial> terms) {
    for (const auto& term : terms) check_exponents(term);
    std::sort(terms.begin(), terms.end(), canonical_less);
    std::vector<Monomial> merged;
    for (auto& term : terms) {
        if (!merged.empty() && merged.back().same_shape(term)) {
            merged.back().coeff = merged.back().coeff + term.coeff;
        } else {
            merged.push_back(std::move(term));
        }
    }
    return ComplexityExpr{std::move(merged)};
}

ComplexityExpr derive_complexity(const StrategySpec& spec) {
    validate(spec);
    std::vector<Monomial> terms;
    terms.push_back(Monomial{});  // the minimally viable IO pair

    int unnamed = 0;
    for (const auto& element : spec.elements) {
        switch (element.kind) {
            case ElementKind::query_slot:
                break;
            case ElementKind::fixed_text: {
                Monomial term;
                std::string symbol = element.symbol;
                if (symbol.empty()) symbol = "c" + std::to_string(++unnamed);
                term.constants[symbol] = 1;
                terms.push_back(std::move(term));
                break;
            }
            case ElementKind::exemplar_block: {
                Monomial linear;
                linear.k_exp = 1;
                terms.push_back(linear);
                if (element.with_reasoning) {
                    Monomial reasoned;
                    reasoned.k_exp = 1;
                    reasoned.constants[kReasoningOverheadSymbol] = 1;
                    terms.push_back(std::move(reasoned));
                }
                break;
            }
        }
    }

    if (spec.aggregation == Aggregation::majority_vote) {
        for (auto& term : terms) term.p_exp += 1;
    }
    return make_expr(std::move(terms));
}

BigOClass simplify_to_bigo(const ComplexityExpr& expr) {
    if (expr.empty()) throw std::invalid_argument("cannot simplify an empty expression");

    const int max_degree =
        std::max_element(expr.terms.begin(), expr.terms.end(), [](const auto& a, const auto& b) {
            return a.total_degree() < b.total_degree();
        })->total_degree();

    // Distinct exponent shapes at the maximal total degree are pairwise
    // incomparable under componentwise order, so more than one is an error.
    std::vector<BigOClass> candidates;
    for (const auto& term : expr.terms) {
        if (term.total_degree() != max_degree) continue;
        BigOClass cls{term.k_exp, term.p_exp};
        if (std::find(candidates.begin(), candidates.end(), cls) == candidates.end()) {
            candidates.push_back(cls);
        }
    }
    if (candidates.size() > 1) {
        std::ostringstream msg;
        msg << "incomparable maximal monomials:";
        for (const auto& cls : candidates) msg << " " << to_string(cls);
        throw std::invalid_argument(msg.str());
    }
    return candidates.front();
}

ComplexityExpr to_expr(const BigOClass& cls) {
    Monomial term;
    term.k_exp = cls.k_exp;
    term.p_exp = cls.p_exp;
    return make_expr({term});
}

long long growth_rate(const BigOClass& cls, const VarAssignment& assign) {
    long long rate = 1;
    if (cls.k_exp > 0) {
        if (!assign.k) throw std::invalid_argument("missing binding for variable k");
        if (*assign.k < 1) throw std::invalid_argument("k must be >= 1");
        rate *= checked_pow(*assign.k, cls.k_exp);
    }
    if (cls.p_exp > 0) {
        if (!assign.p) throw std::invalid_argument("missing binding for variable p");
        if (*assign.p < 1) throw std::invalid_argument("p must be >= 1");
        rate *= checked_pow(*assign.p, cls.p_exp);
    }
    return rate;
}

double theoretical_ratio(const BigOClass& higher, const BigOClass& lower,
                         const std::vector<AssignmentPair>& cells) {
    if (cells.empty()) throw std::invalid_argument("theoretical_ratio needs at least one cell");
    double sum = 0.0;
    for (const auto& cell : cells) {
        const double hi = static_cast<double>(growth_rate(higher, cell.higher));
        const double lo = static_cast<double>(growth_rate(lower, cell.lower));
        sum += hi / lo;
    }
    return sum / static_cast<double>(cells.size());
}

std::string to_string(const Monomial& term) {
    std::string out;
    auto append = [&out](const std::string& part) {
        if (!out.empty()) out += "*";
        out += part;
    };
    if (!term.coeff.is_one()) {
        std::string coeff = std::to_string(term.coeff.num);
        if (term.coeff.den != 1) coeff += "/" + std::to_string(term.coeff.den);
        append(coeff);
    }
    const std::string vars = variables_string(term.k_exp, term.p_exp);
    if (!vars.empty()) append(vars);
    for (const auto& [symbol, exp] : term.constants) {
        append(exp > 1 ? symbol + "^" + std::to_string(exp) : symbol);
    }
    return out.empty() ? "1" : out;
}

std::string to_string(const ComplexityExpr& expr) {
    if (expr.empty()) return "0";

    std::vector<Monomial> terms = expr.terms;
    std::sort(terms.begin(), terms.end(), display_less);

    // Factor out the common monomial (gcd over variables and constants); the
    // self-consistency expressions then read p*(1 + a + k + k*a).
    Monomial common = terms.front();
    common.coeff = Rational{1, 1};
    for (const auto& term : terms) {
        common.k_exp = std::min(common.k_exp, term.k_exp);
        common.p_exp = std::min(common.p_exp, term.p_exp);
        for (auto it = common.constants.begin(); it != common.constants.end();) {
            auto found = term.constants.find(it->first);
            if (found == term.constants.end()) {
                it = common.constants.erase(it);
            } else {
                it->second = std::min(it->second, found->second);
                ++it;
            }
        }
    }

    const bool factored = terms.size() > 1 &&
                          (common.k_exp > 0 || common.p_exp > 0 || !common.constants.empty());
    if (factored) {
        for (auto& term : terms) {
            term.k_exp -= common.k_exp;
            term.p_exp -= common.p_exp;
            for (const auto& [symbol, exp] : common.constants) {
                auto it = term.constants.find(symbol);
                it->second -= exp;
                if (it->second == 0) term.constants.erase(it);
            }
        }
    }

    std::string body;
    for (const auto& term : terms) {
        if (!body.empty()) body += " + ";
        body += to_string(term);
    }
    if (!factored) return body;
    return to_string(common) + "*(" + body + ")";
}

std::string to_string(const BigOClass& cls) {
    if (cls.is_constant()) return "O(1)";
    return "O(" + variables_string(cls.k_exp, cls.p_exp) + ")";
}

}  // namespace tokprof
