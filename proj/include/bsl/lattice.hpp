#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "bsl/gap.hpp"
#include "bsl/prime.hpp"

namespace bsl {

// Full-rank lattice in d-space, spanned by d rational basis vectors (rows).
struct LatticeBasis {
    std::vector<std::vector<mpq_class>> rows;

    int d() const { return static_cast<int>(rows.size()); }
    mpq_class covolume() const; // |det|
    void validate() const;      // square and nonsingular
};

// Open box {t : |t_j| < halfwidths[j]}.
struct Box {
    std::vector<mpq_class> halfwidths;
    void validate() const;
};

// Nonzero integer vector with content 1.
struct Relation {
    std::vector<std::int64_t> m;
};

struct ReducedBasis {
    LatticeBasis basis;
    double product_ratio = 0;      // prod |w_i| / covolume
    bool product_bound_ok = false; // prod |w_i|^2 <= 2^(2d^2) det^2, exact
};

// LLL with delta = 3/4 over exact rationals; the change of basis is verified
// unimodular, so the lattice is preserved exactly.
ReducedBasis reduced_basis(const LatticeBasis& gamma);

// Mutual membership of the basis vectors, exact.
bool same_lattice(const LatticeBasis& a, const LatticeBasis& b);
bool lattice_contains(const LatticeBasis& gamma,
                      const std::vector<mpq_class>& x);

struct DiscreteJohn {
    LatticeBasis w;              // reduced basis of gamma
    std::vector<std::int64_t> n; // progression lengths N_j
    std::int64_t c = 1;          // least verified expansion factor
    std::uint64_t points = 0;    // |B intersect gamma|
    bool inner_ok = false;       // (-N, N) w inside B intersect gamma
    bool outer_ok = false;       // B intersect gamma inside (-cN, cN) w
};

// Constructive two-sided progression sandwich of a box section of a lattice;
// both inclusions are verified by exact enumeration (d <= 5).
DiscreteJohn discrete_john(const Box& b, const LatticeBasis& gamma,
                           std::uint64_t enum_cap = 10000000);

// Smallest (first in odometer order) nonzero m in the box |m_j| <= n_j with
// m . v = 0 mod p, reduced to content 1 with positive leading entry;
// meet-in-the-middle over the two index halves.
std::optional<Relation> find_relation(const std::vector<std::int64_t>& v,
                                      const std::vector<std::int64_t>& n,
                                      const PrimeModulus& p,
                                      std::uint64_t work_cap = 100000000);

struct ProperizeResult {
    Gap gap;
    int levels = 0;       // descent recursions applied
    mpq_class size_ratio; // |image(out)| / |image(in)|
};

// Embeds a symmetric gap over F_p into a proper symmetric gap of no greater
// rank: find a relation among the basis vectors, quotient it out through a
// rank-(d-1) lattice, carve the lattice with a discrete John sandwich, and
// push the progression back through the induced homomorphism.  Containment
// is asserted by exact enumeration at every level.
ProperizeResult properize(const Gap& p, std::uint64_t volume_cap = 100000);

} // namespace bsl
