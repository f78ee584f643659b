#include "bsl/prime.hpp"

#include <vector>

#include "bsl/error.hpp"
#include "bsl/intutil.hpp"

namespace bsl {

std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    base %= p;
    while (e) {
        if (e & 1) r = mulmod(r, base, p);
        base = mulmod(base, base, p);
        e >>= 1;
    }
    return r;
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // These witnesses decide primality for all n < 3.3e24.
    for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

std::uint64_t next_prime_above_u64(std::uint64_t x) {
    if (x < 2) return 2;
    std::uint64_t c = x + 1;
    if (c % 2 == 0) {
        if (c == 2) return 2;
        ++c;
    }
    while (!is_prime_u64(c)) c += 2;
    return c;
}

PrimeModulus::PrimeModulus(std::uint64_t p) : p_(p) {
    if (!is_prime_u64(p)) {
        throw PreconditionError("modulus " + std::to_string(p) + " is not prime");
    }
}

std::uint64_t PrimeModulus::reduce(const mpz_class& x) const {
    mpz_class r = x % mpz_class(p_);
    if (r < 0) r += mpz_class(p_);
    return mpz_get_ui(r.get_mpz_t());
}

std::int64_t PrimeModulus::centered(std::uint64_t residue) const {
    residue %= p_;
    if (2 * residue > p_) return static_cast<std::int64_t>(residue) - static_cast<std::int64_t>(p_);
    return static_cast<std::int64_t>(residue);
}

std::uint64_t PrimeModulus::from_centered(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    if (r < 0) r += static_cast<std::int64_t>(p_);
    return static_cast<std::uint64_t>(r);
}

std::uint64_t PrimeModulus::inv(std::uint64_t a) const {
    a %= p_;
    if (a == 0) throw PreconditionError("inverse of 0 mod p");
    return powmod(a, p_ - 2, p_);
}

PrimeModulus choose_field_prime(int n) {
    if (n < 1) throw PreconditionError("dimension must be >= 1");
    // p must exceed n^(n/2): equivalently p^2 > n^n, decided exactly.
    const mpz_class nn = mpz_pow(mpz_class(n), static_cast<unsigned long>(n));
    const mpz_class s = mpz_isqrt(nn);
    if (bit_length(s + 1) > 62) {
        throw OverflowError(
            "field prime for n=" + std::to_string(n) +
            " exceeds machine-word capacity; use big-integer rank mode");
    }
    std::uint64_t c = mpz_get_ui(s.get_mpz_t());
    std::uint64_t p = next_prime_above_u64(c);
    while (mpz_class(p) * mpz_class(p) <= nn) p = next_prime_above_u64(p);
    return PrimeModulus(p);
}

PrimeModulus choose_scan_prime(const std::vector<std::int64_t>& a) {
    if (a.empty()) throw PreconditionError("empty coefficient vector");
    const int n = static_cast<int>(a.size());
    mpz_class sum_abs = 0;
    for (std::int64_t v : a) sum_abs += v >= 0 ? mpz_class(v) : mpz_class(-v);
    mpz_class lower = sum_abs;
    if (n <= 12) {
        const mpz_class nn = mpz_pow(mpz_class(n), static_cast<unsigned long>(n));
        const mpz_class s = mpz_isqrt(nn);
        if (s > lower) lower = s;
        std::uint64_t c = mpz_get_ui(lower.get_mpz_t());
        std::uint64_t p = next_prime_above_u64(c);
        while (mpz_class(p) * mpz_class(p) <= nn || mpz_class(p) <= sum_abs)
            p = next_prime_above_u64(p);
        return PrimeModulus(p);
    }
    if (bit_length(lower + 1) > 62) {
        throw OverflowError("scan prime exceeds machine-word capacity");
    }
    return PrimeModulus(next_prime_above_u64(mpz_get_ui(lower.get_mpz_t())));
}

} // namespace bsl
