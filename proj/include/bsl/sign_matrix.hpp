#pragma once

#include <cstdint>
#include <vector>

#include "bsl/int_matrix.hpp"
#include "bsl/rng.hpp"

namespace bsl {

// n-by-n matrix with entries in {-1,+1}, one bit per entry (0 encodes +1, so
// the all-zero word is the all-ones matrix).  n <= 64.
class SignMatrix {
  public:
    explicit SignMatrix(int n);

    int n() const { return n_; }

    int sign(int i, int j) const {
        return (words_[i] >> j) & 1 ? -1 : 1;
    }
    void set_sign(int i, int j, int s);
    void flip(int i, int j) { words_[i] ^= 1ULL << j; }

    // Row i as an n-bit word.
    std::uint64_t row_word(int i) const { return words_[i]; }
    std::uint64_t col_word(int j) const;

    IntMatrix to_int_matrix() const;
    static SignMatrix from_int_matrix(const IntMatrix& m);
    static SignMatrix random(int n, SplitMix64& gen);

    bool operator==(const SignMatrix& o) const = default;

  private:
    int n_;
    std::vector<std::uint64_t> words_; // one word per row
};

// Any two rows or two columns equal up to sign?
bool has_sign_twin(const SignMatrix& s);

// Rank of the sign matrix over Z/pZ without materializing an IntMatrix.
int sign_rank_mod_p(const SignMatrix& s, const PrimeModulus& pm);

// Monte-Carlo singularity witness: declared singular only when rank-deficient
// modulo each of three fixed 61-bit primes (false-singular chance < 2^-180
// per sample; a full rank mod any prime certifies nonsingularity).
bool singular_mod_three_primes(const SignMatrix& s);

} // namespace bsl
