#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "bsl/hyperplane.hpp"
#include "bsl/prime.hpp"

namespace bsl {

// The epsilon chain and the sparsity parameter derived from it.
class ParamChain {
  public:
    ParamChain() : ParamChain(1, mpq_class(1, 100), mpq_class(1, 10000)) {}
    ParamChain(mpq_class eps0, mpq_class eps1, mpq_class eps2);

    const mpq_class& eps0() const { return eps0_; }
    const mpq_class& eps1() const { return eps1_; }
    const mpq_class& eps2() const { return eps2_; }
    const mpq_class& mu() const { return mu_; } // 1/4 - eps0/100

    // Nearest integer to eps0 * n / 100 (sample count of the averaging step).
    int sample_count(int n) const;

  private:
    mpq_class eps0_, eps1_, eps2_, mu_;
};

// f(xi) = prod_j (1/2 + 1/2 cos(2 pi a_j xi / p))^(1/2),
// g(xi) = prod_j ((1-mu) + mu cos(2 pi a_j xi / p)); both clamped to [0,1].
double f_value(const NormalVector& a, std::int64_t xi, const PrimeModulus& p);
double g_value(const NormalVector& a, std::int64_t xi, const PrimeModulus& p,
               double mu);

// (1/p) sum_xi prod_j cos(2 pi a_j xi / p): the exact character-sum identity
// for P(a.X = 0); the signed product, not f.
double prob_X_fourier(const NormalVector& a, const PrimeModulus& p,
                      int threads = 1);
// Same with each factor replaced by (1-mu) + mu cos(...): P(a.Y = 0).
double prob_Y_fourier(const NormalVector& a, const PrimeModulus& p, double mu,
                      int threads = 1);

struct ScalarInequalityScan {
    double mu = 0;
    std::uint64_t grid_points = 0;
    std::uint64_t violations = 0;    // |cos x| > (1-mu) + mu cos 2x + 1e-12
    double max_violation = 0;        // max over the grid of the excess
};

// Scan |cos x| <= (1-mu) + mu cos 2x over an even grid on [0, 2 pi]; no
// constraint on mu, so it also probes where the inequality breaks.
ScalarInequalityScan scalar_inequality_scan(double mu,
                                            std::uint64_t grid_points = 1000001);

struct ComparisonReport {
    double mu = 0;
    ScalarInequalityScan scalar;
    std::uint64_t xi_scanned = 0;
    double max_f_vs_chain = 0; // max excess of f over g^(1/4mu)
    double max_chain_vs_g = 0; // max excess of g^(1/4mu) over g
    bool ok = false;           // all violations <= 1e-12
};

// Verifies f <= g^(1/(4 mu)) <= g over F_p (full scan, or an even sample of
// xi_samples residues when full_scan is off) plus the scalar inequality.
ComparisonReport comparison_check(const NormalVector& a, const PrimeModulus& p,
                                  const mpq_class& mu, bool full_scan = true,
                                  std::uint64_t xi_samples = 1000000);

// Lambda = {xi : f(xi) >= eps2}, by full scan of F_p; residues within 1e-12
// of the threshold are included and counted as boundary members.
class Spectrum {
  public:
    Spectrum(NormalVector a, PrimeModulus p, double eps2, int threads = 1);

    const PrimeModulus& prime() const { return p_; }
    const NormalVector& normal() const { return a_; }
    double eps2() const { return eps2_; }
    const std::vector<std::int64_t>& members() const { return members_; }
    std::uint64_t size() const { return members_.size(); }
    int boundary_members() const { return boundary_members_; }
    bool eps2_above_one() const { return eps2_above_one_; }

    // Difference multiset {xi - xi' : xi, xi' in Lambda} as (centered value,
    // multiplicity), built when |Lambda|^2 is within the stated work cap.
    bool has_difference_histogram() const { return !diff_.empty() || members_.empty(); }
    const std::vector<std::pair<std::int64_t, std::uint64_t>>& difference_histogram() const;

    static constexpr std::uint64_t kDiffWorkCap = 100000000;

  private:
    PrimeModulus p_;
    NormalVector a_;
    double eps2_;
    std::vector<std::int64_t> members_;
    int boundary_members_ = 0;
    bool eps2_above_one_ = false;
    std::vector<std::pair<std::int64_t, std::uint64_t>> diff_;
};

Spectrum spectrum(const NormalVector& a, const PrimeModulus& p, double eps2,
                  int threads = 1);

// ||x||_Lambda = ((1/|L|^2) sum over pairs of ||x (xi - xi')/p||^2)^(1/2)
// with ||.|| the distance to the nearest integer.
double lambda_norm(std::int64_t x, const Spectrum& s);

struct BohrReport {
    double threshold = 0;
    std::vector<std::int64_t> members; // centered, sorted
    std::uint64_t size = 0;
    std::uint64_t doubled_size = 0; // |A+A| cyclic
    // |A| / 2^(n - d_pm) and |A+A| / 2^(n - d_pm) when a CombDim is supplied.
    std::optional<double> ratio_size;
    std::optional<double> ratio_doubled;
};

BohrReport bohr_set(const Spectrum& s, double threshold = 0.01,
                    const CombDim* dim = nullptr,
                    std::uint64_t scan_cap = 1000000);

// h(x) = (1/|Lambda|) sum_{xi in Lambda} e^(2 pi i x xi / p).
std::complex<double> h_transform(std::int64_t x, const Spectrum& s);

struct ParsevalReport {
    std::uint64_t p = 0;
    std::uint64_t lambda_size = 0;
    double sum_h_squared = 0;
    double expected = 0; // p / |Lambda|
    double rel_residual = 0;
    // Pointwise bridges |h(x)|^2 >= 1 - 100 ||x||^2 and <= 1 - (1/100)||x||^2.
    double bridge_lower_max_violation = 0;
    double bridge_upper_max_violation = 0;
    bool ok = false;
};

ParsevalReport parseval_check(const Spectrum& s,
                              std::uint64_t work_cap = 200000000);

struct RepCounts {
    int k = 0;
    std::vector<std::uint64_t> counts; // r_k by residue 0..p-1
    std::uint64_t support = 0;         // |k Lambda|
    mpz_class total;                   // sum r_k = |Lambda|^k
    mpz_class sum_squares;
    bool total_ok = false;
    bool cauchy_schwarz_ok = false; // sum r^2 >= |Lambda|^(2k)/|k Lambda|
    double transform_max_rel_err = 0;     // residual relative to |L|^k
    bool transform_ok = false; // sum r e(x xi/p) = |L|^k h(x)^k, sampled x
};

RepCounts rep_counts(const Spectrum& s, int k,
                     std::uint64_t work_cap = 100000000);

struct ExceptionalReport {
    bool exceptional = false;
    mpq_class p_x; // lo_count / 2^n
    mpq_class p_y; // exact DP
};

// Exceptional iff P(X in V) >= eps1 P(Y in V); both sides exact.
ExceptionalReport classify_exceptional(const NormalVector& a,
                                       const PrimeModulus& p,
                                       const ParamChain& params);

struct GrowthRow {
    int k = 0;
    std::uint64_t size = 0; // |k Lambda|
    bool bound_checked = false;
    bool bound_ok = false; // |kL| <= binom(C+k-3, k-2) C |L|, C = |4L|/|L|
};

struct GrowthTable {
    std::vector<GrowthRow> rows;
    double doubling = 0; // |L+L| / |L|
    std::optional<mpq_class> covering_constant;
    bool all_bounds_ok = false;
};

GrowthTable lambda_growth(const Spectrum& s, int k_max,
                          std::uint64_t work_cap = 100000000);

} // namespace bsl
