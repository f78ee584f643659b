#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "bsl/error.hpp"

namespace bsl {

inline mpz_class mpz_pow(const mpz_class& base, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline mpz_class mpz_isqrt(const mpz_class& x) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
    return r;
}

inline mpz_class pow2(unsigned long e) { return mpz_pow(2, e); }

// floor(log2 x) + 1 for x > 0.
inline unsigned long bit_length(const mpz_class& x) {
    return mpz_sizeinbase(x.get_mpz_t(), 2);
}

inline bool is_power_of_two(const mpz_class& x) {
    return x > 0 && mpz_popcount(x.get_mpz_t()) == 1;
}

inline mpz_class binomial(unsigned long n, unsigned long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

// Generalized binomial C(x, k) = x(x-1)...(x-k+1)/k! for rational x >= 0.
inline mpq_class binomial_rational(const mpq_class& x, unsigned long k) {
    mpq_class num = 1;
    for (unsigned long i = 0; i < k; ++i) num *= x - static_cast<long>(i);
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), k);
    mpq_class r = num / mpq_class(fact);
    r.canonicalize();
    return r;
}

// Centered remainder in [-(p-1)/2, (p-1)/2] for odd p; needs |x| < 2^62.
inline std::int64_t centered_rem(std::int64_t x, std::int64_t p) {
    std::int64_t r = x % p;
    std::int64_t half = (p - 1) / 2;
    if (r > half) r -= p;
    if (r < -half) r += p;
    return r;
}

inline bool fits_int64(const mpz_class& x) {
    return x.fits_slong_p() || mpz_sizeinbase(x.get_mpz_t(), 2) <= 62;
}

inline std::int64_t to_int64(const mpz_class& x) {
    if (!fits_int64(x)) throw OverflowError("value does not fit in 64 bits: " + x.get_str());
    return static_cast<std::int64_t>(mpz_get_si(x.get_mpz_t()));
}

inline std::string rational_str(const mpq_class& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

} // namespace bsl
