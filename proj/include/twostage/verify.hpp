#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace twostage {

struct PropertyResult {
    std::string name;
    bool pass = false;
    double margin = 0.0;   // slack to the threshold; negative when failing
    std::string detail;
};

struct VerifyOptions {
    bool quick = false;            // N <= 10^3 variants, sub-minute runtime
    bool inject_sign_bug = false;  // test-only mutation canary: flips a sign in delta
    std::uint64_t seed = 8675309;
};

// Cross-module invariant battery: monotonicity and slope bounds, solver
// residuals, derivative identities, LLN/concentration scaling, small-N
// Monte Carlo equivalence, welfare consistency, ordering at small gamma.
std::vector<PropertyResult> run_property_suite(const VerifyOptions& opts);

} // namespace twostage
