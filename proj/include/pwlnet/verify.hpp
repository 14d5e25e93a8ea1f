#pragma once

#include "pwlnet/bounds.hpp"
#include "pwlnet/constructions.hpp"
#include "pwlnet/net.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pwlnet {

struct FuzzConfig {
    std::uint64_t seed = 12345;
    int cases = 100;
    int max_width = 6;
    int max_depth = 4;
    long weight_magnitude = 4;
    long max_denominator = 64;
};

struct FuzzFinding {
    std::string what;
    std::string witness; // serialized counterexample
};

struct FuzzReport {
    std::string kind;
    FuzzConfig config;
    int cases_run = 0;
    int violations = 0;
    std::vector<FuzzFinding> findings;
    /// Largest fraction of the 2w+2 chain budget any case attained, as
    /// "seen/budget"; the cap itself is tracked, not asserted.
    long max_new_seen = 0;
    long budget_of_max = 0;
    bool cap_attained = false;

    bool sound() const { return violations == 0; }
    std::string to_json() const; // byte-stable given the seed
};

/// Random nets of the given link flavor never exceed the closed-form piece
/// bound; any violation is recorded with the serialized net.
FuzzReport fuzz_bound_soundness(const FuzzConfig& cfg, LinkMode mode);

/// Relu mints breakpoints exactly at crossing zeros, and the chained pair
/// stays within its 2w+2 budget, over random rational PWL inputs.
FuzzReport fuzz_breakpoint_lemmas(const FuzzConfig& cfg);

struct SeparationReport {
    std::string theorem_id;
    long k = 0;
    Int deep_pieces;
    Int shallow_ff_bound;
    Int shallow_intra_pieces;
    bool separated = false;
    /// deep witness engine count where a construction exists (matches
    /// deep_pieces exactly when present)
    bool deep_engine_checked = false;
    bool intra_engine_checked = false;
    bool functions_match = false; // rescaled intra witness equals the deep witness
    std::string note;
    double wall_seconds = 0.0;

    std::string to_json(bool include_wall = false) const;
    std::string to_text() const;
};

/// Desk-scale certification of the depth-separation statements:
///   k2_vs_2 - one-hidden-layer all-linked witness vs feedforward width k^2-2
///   k2_vs_3 - two-hidden-layer pairwise-linked witness vs feedforward width k-2
///   k2_vs_k - base-6 mirror sawtooth vs width-(6^k-2) feedforward, matched by
///             the pairwise-linked sawtooth at width 4*6^(k-1)
/// Every integer reported for a separated verdict is recomputed through the
/// exact engine wherever a concrete witness exists and must match the closed
/// form. Throws validation_error for parameters outside desk scale.
SeparationReport check_separation(const std::string& theorem_id, long k);

} // namespace pwlnet
