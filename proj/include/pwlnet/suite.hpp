#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pwlnet {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SuiteConfig {
    std::uint64_t seed = 12345;
    int bound_fuzz_cases = 500;   // per link flavor
    int lemma_fuzz_cases = 1000;
    int rewrite_cases = 200;
    int lifted_nets = 100;
    int region_nets = 200;        // split evenly between link flavors
    bool enable_long_sawtooth = false; // also run the depth-separation check at k = 3
};

/// Key=value configuration ('#' comments allowed). Unknown keys are errors.
SuiteConfig parse_suite_config(std::istream& in);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double wall_seconds = 0.0; // human output only, kept out of the summary
    double limit_seconds = 0.0;
};

struct SuiteResult {
    std::vector<CriterionResult> criteria;
    bool all_pass = false;
    std::string summary_json; // byte-stable given the seed
};

/// Runs the acceptance battery: exact tightness counts, catalog sawtooth
/// claims, bound/lemma fuzzing, the three separation checks, the first-layer
/// rewrite fuzz, the 2-D region census, and a byte-stability re-run.
SuiteResult run_acceptance_suite(const SuiteConfig& cfg);

} // namespace pwlnet
