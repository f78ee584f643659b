#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "bsl/hyperplane.hpp"
#include "bsl/prime.hpp"
#include "bsl/zset.hpp"

namespace bsl {

// Generalized arithmetic progression {offset + sum_j m_j v_j} with the open
// coefficient boxes -M_j/2 < m_j < M_j/2, i.e. |m_j| <= (M_j - 1)/2.
struct Gap {
    std::optional<PrimeModulus> ambient; // empty = plain integers
    std::int64_t offset = 0;             // must be 0 when symmetric
    std::vector<std::int64_t> basis;     // v_j, nonzero in the ambient
    std::vector<std::int64_t> lengths;   // M_j >= 1
    bool symmetric = true;

    int rank() const { return static_cast<int>(basis.size()); }
    std::int64_t coeff_bound(int j) const { return (lengths[j] - 1) / 2; }
    mpz_class box_volume() const;      // prod (2 b_j + 1), admissible tuples
    mpz_class lengths_product() const; // prod M_j
    void validate() const;
};

struct GapImage {
    ZSet set;
    std::uint64_t collisions = 0; // admissible tuples minus distinct values
    bool proper = false;
};

// Full odometer sweep of the coefficient box; box volume above the cap is
// refused.
GapImage enumerate(const Gap& p, std::uint64_t volume_cap = 10000000);
bool is_proper(const Gap& p, std::uint64_t volume_cap = 10000000);

// Coefficient lookup for a proper symmetric gap, built by one enumeration:
// properness makes the coefficient vector of each member unique.
class PNormTable {
  public:
    explicit PNormTable(const Gap& p, std::uint64_t volume_cap = 10000000);

    const Gap& gap() const { return gap_; }
    std::size_t size() const { return table_.size(); }
    bool contains(std::int64_t x) const;
    std::vector<std::int64_t> coefficients(std::int64_t x) const;
    double p_norm(std::int64_t x) const; // sqrt(sum (|m_i| / M_i)^2)

  private:
    std::uint64_t lookup(std::int64_t x) const; // flat odometer index
    Gap gap_;
    std::vector<std::pair<std::int64_t, std::uint64_t>> table_;
};

struct RankReduction {
    Gap gap;
    int steps = 0;
    int initial_rank = 0; // rank of the coefficient matrix at entry
    bool full_rank = false;
    std::vector<std::vector<mpz_class>> relations; // kernel vector per step
};

// Iterated basis substitution: while the coefficient vectors of U span less
// than full rank, eliminate one basis vector along an integer kernel relation
// (largest index with the coefficient invertible mod p) and drop it.  U stays
// inside the gap at every step and the volume never grows.
RankReduction rank_reduce(const Gap& p, const ZSet& u,
                          std::uint64_t volume_cap = 10000000);

struct CommensurabilityWitness {
    std::int64_t u = 0;
    bool found = false;
    std::int64_t num = 0; // p' with u q' = p' v1 in the ambient
    std::int64_t den = 0; // q' != 0
};

struct CommensurabilityReport {
    std::int64_t v1 = 0;
    std::int64_t bound = 0;
    std::vector<CommensurabilityWitness> rows;
    bool all_found = false;
};

// For each u, the smallest-denominator pair |p'|, |q'| <= bound with
// u q' = p' v1 (mod p when modular); meet-in-the-middle over q'.
CommensurabilityReport commensurability_check(const ZSet& u, std::int64_t v1,
                                              std::int64_t bound);

struct GaussianCountReport {
    int n = 0;
    double d_pm = 0;
    double log2_product_form = 0; // n sum_j log2(1 + M_j / sqrt n)
    double log2_joint_form = 0;   // n log2(1 + prod_j M_j / sqrt n)
    double log2_target = 0;       // -(n/2) log2 n + n (n - d_pm)
};

// The counting chain at finite n, in log space; a report, not a pass/fail.
GaussianCountReport gaussian_count_bound(int n, double d_pm, const Gap& p);

struct Certificate {
    Gap gap;              // proper and symmetric
    double pnorm_sum = 0; // claimed sum of squared P-norms of the a_i
    std::int64_t commensurability_bound = 0; // 0 picks n^2
    double volume_ratio = 0;                 // prod M_j / 2^(n - d_pm)
};

struct CertificateReport {
    bool rank_ok = false;     // rank <= C
    bool contains_ok = false; // every a_i in the gap
    bool pnorm_ok = false;    // sum of squared P-norms <= C
    bool volume_ok = false;   // prod M_j <= C 2^(n - d_pm)
    bool commensurable_ok = false;
    double pnorm_sum = 0;    // measured
    double volume_ratio = 0; // measured
    double measured_c = 0;   // max(rank, pnorm_sum, volume_ratio)
    CombDim dim;
    CommensurabilityReport commensurability;
    bool all_ok = false;
};

// Clause-by-clause audit of a structure certificate against the bound C.
CertificateReport structure_certificate_check(const NormalVector& a,
                                              const Certificate& cert,
                                              double c_bound);

} // namespace bsl
