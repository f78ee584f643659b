#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "bsl/prime.hpp"

namespace bsl {

// Finite set of integers, either plain or as centered residues mod an odd
// prime.  Members are kept sorted and deduplicated.
class ZSet {
  public:
    ZSet() = default;
    explicit ZSet(std::vector<std::int64_t> members);
    ZSet(std::vector<std::int64_t> members, PrimeModulus ambient);

    bool modular() const { return ambient_.has_value(); }
    const PrimeModulus& ambient() const;

    const std::vector<std::int64_t>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    // Membership after reduction into the ambient (centered when modular).
    bool contains(std::int64_t x) const;
    bool is_symmetric() const; // members == -members

  private:
    std::optional<PrimeModulus> ambient_;
    std::vector<std::int64_t> members_;
};

// A + B, exact.  |A|*|B| above work_cap is refused.
ZSet sumset(const ZSet& a, const ZSet& b, std::uint64_t work_cap = 100000000);

// A + ... + A with k copies, k >= 1.
ZSet iterated_sumset(const ZSet& a, int k, std::uint64_t work_cap = 100000000);

// |A+A| / |A| as an exact rational.
mpq_class doubling(const ZSet& a, std::uint64_t work_cap = 100000000);

} // namespace bsl
