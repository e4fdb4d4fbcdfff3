#include <iostream>

#include "commands.hpp"
#include "tokprof/complexity.hpp"
#include "tokprof/strategy.hpp"

namespace tokprof::cli {

int run_derive(const DeriveOptions& options) {
    StrategySpec spec;
    if (!options.spec_path.empty()) {
        spec = load_strategy_file(options.spec_path);
    } else {
        spec = build_builtin(options.strategy, options.k >= 0 ? options.k : 0, options.p);
    }

    const ComplexityExpr expr = derive_complexity(spec);
    const BigOClass cls = simplify_to_bigo(expr);
    std::cout << "strategy: " << strategy_label(spec) << "\n";
    std::cout << "token complexity: " << to_string(expr) << "\n";
    std::cout << "class: " << to_string(cls) << "\n";

    if (options.evaluate) {
        VarAssignment assign;
        if (cls.k_exp > 0) {
            if (options.k < 1) {
                std::cerr << "error: --eval needs --k >= 1 for a class in k\n";
                return kExitUsage;
            }
            assign.k = options.k;
        }
        if (cls.p_exp > 0) assign.p = options.p;
        std::cout << "growth rate (k=" << (assign.k ? std::to_string(*assign.k) : "-")
                  << ", p=" << (assign.p ? std::to_string(*assign.p) : "-")
                  << "): " << growth_rate(cls, assign) << "\n";
    }
    return kExitOk;
}

}  // namespace tokprof::cli
