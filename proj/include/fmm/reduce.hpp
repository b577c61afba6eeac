// fmm: greedy pairwise common-subexpression elimination over linear forms.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fmm/scheme.hpp"
#include "fmm/slp.hpp"

namespace fmm {

/// Sparse linear form: (variable index, coefficient), indices strictly
/// increasing, coefficients nonzero.
using LinearForm = std::vector<std::pair<int, Rational>>;

struct LinearFormSet {
    int variables = 0;  // valid indices are [0, variables)
    Kind kind = Kind::A;
    std::vector<LinearForm> forms;
};

/// t := cx*x + cy*y, where index is the fresh variable the temporary
/// introduces. (cx, cy) is content-1 with cx > 0.
struct TempDef {
    int index;
    int x, y;
    Rational cx, cy;
};

enum class TieBreak : std::uint8_t { Deterministic, SeededRandom };

struct ReductionConfig {
    TieBreak tie_break = TieBreak::Deterministic;
    std::uint64_t seed = 0;
    int restarts = 1;  // SeededRandom only; Deterministic implies 1
};

struct GreedyResult {
    std::vector<TempDef> temps;
    LinearFormSet rewritten;  // variables grown by temps.size()
    int iterations = 0;
};

/// Repeatedly finds the most frequent normalized variable pair across the
/// forms (a pair (c_x, c_y) matches the pattern (c_x, c_y)/g with g making
/// the pair content-1 and positive-leading), introduces a temporary for a
/// maximal-count pattern with count >= 2, substitutes it everywhere, and
/// stops at the fixpoint. Ties break to the lexicographically smallest
/// pattern, or to a seeded random choice among the tied maxima.
/// Substitution is exact: every form's expansion is preserved.
GreedyResult greedy_cse(const LinearFormSet& forms, const ReductionConfig& config);

struct ReductionReport {
    std::int64_t input_naive_additions = 0;
    std::int64_t output_additions = 0;
    int temps_a = 0, temps_b = 0, temps_m = 0;
    std::uint64_t seed_used = 0;
    int iterations = 0;  // greedy steps across the three families
    int restarts_run = 1;
};

/// Reduces the three families (U columns, V columns, W rows) independently
/// and assembles the schedule: A-temps, B-temps, products, M-temps,
/// outputs. The input must verify Valid; the result always does. With
/// restarts > 1 the seeds seed, seed+1, ... are searched and the
/// minimum-addition schedule wins (ties to the lowest seed).
std::pair<Slp, ReductionReport> reduce_scheme(const BilinearScheme& scheme,
                                              const ReductionConfig& config);

/// Rotates every multi-term combination so a positively-signed term leads
/// whenever one exists. Semantics and addition count are unchanged;
/// all-negative combinations are left alone.
Slp rebalance_negations(const Slp& slp);

}  // namespace fmm
