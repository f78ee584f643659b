#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace bsl {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t p);

// Deterministic Miller-Rabin, valid for the whole uint64 range.
bool is_prime_u64(std::uint64_t n);

// Smallest prime strictly greater than x (machine-word result expected).
std::uint64_t next_prime_above_u64(std::uint64_t x);

// Odd prime modulus with verified primality.
class PrimeModulus {
  public:
    explicit PrimeModulus(std::uint64_t p);

    std::uint64_t p() const { return p_; }

    std::uint64_t reduce(std::uint64_t x) const { return x % p_; }
    std::uint64_t reduce(const mpz_class& x) const;

    // Residue representative in (-p/2, p/2].
    std::int64_t centered(std::uint64_t residue) const;
    std::uint64_t from_centered(std::int64_t v) const;

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        std::uint64_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        return a >= b ? a - b : a + p_ - b;
    }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        return mulmod(a, b, p_);
    }
    std::uint64_t pow(std::uint64_t base, std::uint64_t e) const {
        return powmod(base, e, p_);
    }
    std::uint64_t inv(std::uint64_t a) const;
    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }

  private:
    std::uint64_t p_;
};

// Smallest prime p with p^2 > n^n, so |det| < p for an n-by-n sign matrix
// (row norms are sqrt(n)).  Throws OverflowError when p would not fit a
// machine word; big-integer rank mode must be used instead.
PrimeModulus choose_field_prime(int n);

// Smallest prime exceeding max(sum |a_i|, n^(n/2)) for character-sum scans:
// large enough that distinct subset sums of a stay distinct mod p and that
// determinant reduction at size n is faithful when n <= 12.
PrimeModulus choose_scan_prime(const std::vector<std::int64_t>& a);

} // namespace bsl
