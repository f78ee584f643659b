#include "bsl/sign_matrix.hpp"

#include <array>

#include "bsl/error.hpp"

namespace bsl {

SignMatrix::SignMatrix(int n) : n_(n), words_(n, 0) {
    if (n < 1 || n > 64) throw PreconditionError("sign matrix size out of range");
}

void SignMatrix::set_sign(int i, int j, int s) {
    if (s != 1 && s != -1) throw PreconditionError("entry must be +1 or -1");
    if (s == -1)
        words_[i] |= 1ULL << j;
    else
        words_[i] &= ~(1ULL << j);
}

std::uint64_t SignMatrix::col_word(int j) const {
    std::uint64_t w = 0;
    for (int i = 0; i < n_; ++i) w |= ((words_[i] >> j) & 1) << i;
    return w;
}

IntMatrix SignMatrix::to_int_matrix() const {
    IntMatrix m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m.at(i, j) = sign(i, j);
    return m;
}

SignMatrix SignMatrix::from_int_matrix(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw PreconditionError("sign matrix must be square");
    SignMatrix s(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (m.at(i, j) == 1)
                ;
            else if (m.at(i, j) == -1)
                s.flip(i, j);
            else
                throw PreconditionError("entry not in {-1,+1}");
        }
    return s;
}

SignMatrix SignMatrix::random(int n, SplitMix64& gen) {
    SignMatrix s(n);
    const std::uint64_t mask = n == 64 ? ~0ULL : (1ULL << n) - 1;
    for (int i = 0; i < n; ++i) s.words_[i] = gen.next() & mask;
    return s;
}

bool has_sign_twin(const SignMatrix& s) {
    const int n = s.n();
    const std::uint64_t mask = n == 64 ? ~0ULL : (1ULL << n) - 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const std::uint64_t x = s.row_word(i) ^ s.row_word(j);
            if (x == 0 || x == mask) return true;
        }
    std::array<std::uint64_t, 64> cols{};
    for (int j = 0; j < n; ++j) cols[j] = s.col_word(j);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const std::uint64_t x = cols[i] ^ cols[j];
            if (x == 0 || x == mask) return true;
        }
    return false;
}

namespace {

// Elimination on a stack matrix; fast path for p < 2^32 (products fit u64).
template <bool Small>
int rank_elim(std::uint64_t* w, int n, std::uint64_t p) {
    auto mul = [p](std::uint64_t a, std::uint64_t b) -> std::uint64_t {
        if constexpr (Small)
            return a * b % p;
        else
            return mulmod(a, b, p);
    };
    int rank = 0;
    for (int col = 0; col < n && rank < n; ++col) {
        int piv = -1;
        for (int i = rank; i < n; ++i) {
            if (w[i * n + col] != 0) { piv = i; break; }
        }
        if (piv < 0) continue;
        if (piv != rank)
            for (int j = col; j < n; ++j) std::swap(w[rank * n + j], w[piv * n + j]);
        const std::uint64_t inv = powmod(w[rank * n + col], p - 2, p);
        for (int i = rank + 1; i < n; ++i) {
            const std::uint64_t lead = w[i * n + col];
            if (lead == 0) continue;
            const std::uint64_t f = mul(lead, inv);
            w[i * n + col] = 0;
            for (int j = col + 1; j < n; ++j) {
                const std::uint64_t t = mul(f, w[rank * n + j]);
                const std::uint64_t v = w[i * n + j];
                w[i * n + j] = v >= t ? v - t : v + p - t;
            }
        }
        ++rank;
    }
    return rank;
}

} // namespace

int sign_rank_mod_p(const SignMatrix& s, const PrimeModulus& pm) {
    const int n = s.n();
    const std::uint64_t p = pm.p();
    std::array<std::uint64_t, 64 * 64> w;
    for (int i = 0; i < n; ++i) {
        const std::uint64_t row = s.row_word(i);
        for (int j = 0; j < n; ++j) w[i * n + j] = (row >> j) & 1 ? p - 1 : 1;
    }
    return p < (1ULL << 32) ? rank_elim<true>(w.data(), n, p)
                            : rank_elim<false>(w.data(), n, p);
}

bool singular_mod_three_primes(const SignMatrix& s) {
    static const std::array<std::uint64_t, 3> primes = [] {
        std::array<std::uint64_t, 3> ps{};
        std::uint64_t c = (1ULL << 61) - 1;
        for (auto& q : ps) {
            while (!is_prime_u64(c)) --c;
            q = c--;
        }
        return ps;
    }();
    const int n = s.n();
    for (std::uint64_t p : primes) {
        std::array<std::uint64_t, 64 * 64> w;
        for (int i = 0; i < n; ++i) {
            const std::uint64_t row = s.row_word(i);
            for (int j = 0; j < n; ++j) w[i * n + j] = (row >> j) & 1 ? p - 1 : 1;
        }
        if (rank_elim<false>(w.data(), n, p) == n) return false;
    }
    return true;
}

} // namespace bsl
