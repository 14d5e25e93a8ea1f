// Acceptance battery: one pass/fail line per criterion, nonzero exit on any
// failure. Run via ctest or directly.

#include "pwlnet/suite.hpp"

#include <cstdio>

int main() {
    pwlnet::SuiteConfig cfg; // pinned defaults: seed 12345, full case counts
    pwlnet::SuiteResult res = pwlnet::run_acceptance_suite(cfg);
    for (const auto& c : res.criteria)
        std::printf("%s criterion %d: %s (%.2fs, limit %.0fs) %s\n", c.pass ? "[PASS]" : "[FAIL]", c.id,
                    c.name.c_str(), c.wall_seconds, c.limit_seconds, c.detail.c_str());
    std::printf("%s\n", res.all_pass ? "ACCEPTANCE: all criteria pass" : "ACCEPTANCE: FAILURES");
    return res.all_pass ? 0 : 1;
}
