#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "bsl/sign_matrix.hpp"

namespace bsl {

struct ExactCount {
    int n = 0;
    // Singular matrices among the 2^((n-1)^2) representatives with all-ones
    // first row and column; every sign-flip orbit meets this set in exactly
    // one matrix up to the global flip, so singular_count is
    // normalized_count * 2^(2n-1).
    mpz_class normalized_count;
    mpz_class singular_count;
    mpz_class total;
    mpq_class probability;
};

// Exhaustive singularity count by Gray-code walk over the representatives,
// rank recomputed from scratch for every matrix.
ExactCount exact_singularity_count(int n, int threads = 1, int cap = 7);

struct WitnessCount {
    int n = 0;
    mpz_class event_count; // matrices with two rows or columns equal up to sign
    mpz_class total;
    mpq_class probability;
};

// Exhaustive count of the witness event (feasible n <= 6).
WitnessCount witness_count_exhaustive(int n, int threads = 1);

// Exact witness probability for any n: inclusion-exclusion over the lattice
// of column coincidence patterns (Mobius weights), with the row condition
// evaluated on the glued representative matrix.
mpq_class witness_probability(int n);

struct MCEstimate {
    int n = 0;
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    std::uint64_t seed = 0;
    double estimate = 0;
    double ci_halfwidth = 0; // 95% normal approximation
};

MCEstimate mc_singularity_estimate(int n, std::uint64_t trials,
                                   std::uint64_t seed, int threads = 1);

struct BoundRow {
    int n = 0;
    bool exact_available = false; // exhaustive count within the cap
    mpq_class p_exact;
    double p_n = 0;
    double ref_quadratic = 0;      // n^2 2^(1-n)
    double ref_three_quarters = 0; // (3/4)^n
    double ratio_quadratic = 0;
    double ratio_three_quarters = 0;
    bool quadratic_exceeds_one = false;
    mpq_class witness_prob;
    double witness = 0;
    bool witness_cross_checked = false; // exhaustive scan agreed with formula
};

// Comparison table for n = 1..n_max; informational, no pass/fail.  The
// exact column is filled only up to exact_cap; the witness column always.
std::vector<BoundRow> bound_report(int n_max, int threads = 1, int exact_cap = 5);

} // namespace bsl
