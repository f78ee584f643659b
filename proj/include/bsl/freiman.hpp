#pragma once

#include <string>

#include <gmpxx.h>

#include "bsl/gap.hpp"
#include "bsl/zset.hpp"

namespace bsl {

struct FreimanFit {
    bool success = false;
    Gap gap; // meaningful only when success
    std::string note;
};

// Bounded-rank search for a proper symmetric gap containing A with box
// volume <= volume_cap * |A|.  Rank 1 is exact (gcd of the members); rank 2
// scans basis pairs drawn from the smallest positive differences of A - A.
// Smallest volume wins, ties broken by lower rank then lexicographic basis.
// Exhaustion is reported as failure, never papered over.
FreimanFit freiman_fit(const ZSet& a, int r_max = 2,
                       const mpq_class& volume_cap = 10);

} // namespace bsl
