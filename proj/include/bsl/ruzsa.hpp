#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "bsl/zset.hpp"

namespace bsl {

struct RuzsaKCheck {
    int k = 0;
    std::uint64_t ka_size = 0;
    bool inclusion_ok = false; // kA inside 2A + (k-2)X
    bool count_ok = false;     // |kA| <= binom(C+k-3, k-2) C |A|
};

struct RuzsaCover {
    ZSet x;                      // translate centers, a subset of 3A
    std::uint64_t a_size = 0;
    std::uint64_t a4_size = 0;
    mpq_class covering_constant; // C = |4A| / |A|
    bool size_ok = false;        // |X| |A| <= |4A|, exact
    std::vector<RuzsaKCheck> checks; // k = 4 .. k_max
    bool all_ok = false;
};

// Greedy maximal disjoint translate system: X subset of 3A such that the
// translates eta + A are pairwise disjoint and cannot be extended.  All three
// covering assertions are then checked by exact set arithmetic.
RuzsaCover ruzsa_cover(const ZSet& a, int k_max,
                       std::uint64_t work_cap = 100000000);

} // namespace bsl
