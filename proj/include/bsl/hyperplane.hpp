#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "bsl/int_matrix.hpp"

namespace bsl {

// Integer coefficients of a hyperplane {x : a.x = 0}; never all zero.
class NormalVector {
  public:
    explicit NormalVector(std::vector<std::int64_t> coeffs);

    int n() const { return static_cast<int>(coeffs_.size()); }
    const std::vector<std::int64_t>& coeffs() const { return coeffs_; }

    mpz_class content() const; // gcd of absolute values
    NormalVector primitive() const;
    mpz_class sum_abs() const;

  private:
    std::vector<std::int64_t> coeffs_;
};

// |{x in {-1,1}^n : a.x = 0}| by meet-in-the-middle over the two halves.
mpz_class lo_count(const NormalVector& a);

struct CombDim {
    int n = 0;
    mpz_class cube_count;
    long dim_num = 0; // d_pm = dim_num / n, the least multiple of 1/n with
                      // cube_count <= 2^d_pm (then 2^(d_pm - 1/n) < cube_count)
    int dim_den = 1;
    mpq_class d_pm;
    double density = 0;                // 2^(d_pm - n)
    bool below_large_threshold = false; // density < 100/sqrt(n)
    bool above_small_threshold = false; // density > (3/4)^n
    std::string regime;                 // "small" | "medium" | "large"
};

CombDim comb_dimension(const NormalVector& a);

struct ErdosCheck {
    mpz_class max_atom;
    mpz_class bound; // binomial(n, floor(n/2))
    bool ok = false;
};

// Largest atom of the signed-sum distribution vs the classical bound.
// Full histogram; work capped at 2^work_cap_n sums.
ErdosCheck erdos_lo_check(const NormalVector& a, int work_cap_n = 24);

// Law of a coordinate that is 0 with probability 1-mu and +-1 with
// probability mu/2 each.
class SparseLaw {
  public:
    explicit SparseLaw(mpq_class mu);
    static SparseLaw from_eps0(const mpq_class& eps0); // mu = 1/4 - eps0/100

    const mpq_class& mu() const { return mu_; }
    mpq_class p_zero() const { return 1 - mu_; }
    mpq_class p_side() const { return mu_ / 2; }

  private:
    mpq_class mu_;
};

// i.i.d. vector in {-1,0,1}^n; exact atom probabilities, deterministic seed.
std::vector<int> sample_Y(int n, const SparseLaw& law, std::uint64_t seed);

// P(a.Y = 0), exact, by dynamic programming over achievable partial sums.
mpq_class prob_Y_hyperplane(const NormalVector& a, const SparseLaw& law,
                            std::int64_t sum_abs_cap = 1000000);

struct OdlyzkoCheck {
    int n = 0;
    int d = 0; // rank of the spanning set
    bool exact = false;
    mpq_class p_exact;
    double p_hat = 0;
    double ci_halfwidth = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    mpq_class bound; // (1-mu)^(n-d)
    bool ok = false;
};

// P(Y in span(basis rows)) against the sparse-vector bound; exact mode
// enumerates all 3^n weighted points (n <= 12).
OdlyzkoCheck odlyzko_check_exact(const IntMatrix& basis, int n,
                                 const SparseLaw& law);
OdlyzkoCheck odlyzko_check_mc(const IntMatrix& basis, int n,
                              const SparseLaw& law, std::uint64_t samples,
                              std::uint64_t seed);

} // namespace bsl
