#include "bsl/singularity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

#include "bsl/error.hpp"
#include "bsl/intutil.hpp"
#include "bsl/parallel.hpp"
#include "bsl/prime.hpp"

namespace bsl {

namespace {

struct ScanCounts {
    std::uint64_t singular = 0;
    std::uint64_t witness = 0;
};

// Walk the representatives (first row and column all +1) with a Gray code
// over the (n-1)^2 free entries; the tested predicate is recomputed from
// scratch for every matrix.
ScanCounts scan_representatives(int n, int threads, bool want_singular,
                                bool want_witness) {
    const int k = (n - 1) * (n - 1);
    if (k > 40) throw ResourceError("exhaustive scan infeasible for n=" + std::to_string(n));
    const std::uint64_t total = 1ULL << k;
    const PrimeModulus pm = want_singular ? choose_field_prime(n) : PrimeModulus(3);

    auto map_chunk = [&](std::uint64_t lo, std::uint64_t hi) {
        SignMatrix s(n);
        const std::uint64_t g0 = lo ^ (lo >> 1);
        for (int b = 0; b < k; ++b) {
            if ((g0 >> b) & 1) s.flip(1 + b / (n - 1), 1 + b % (n - 1));
        }
        ScanCounts c;
        for (std::uint64_t idx = lo;;) {
            if (want_singular && sign_rank_mod_p(s, pm) < n) ++c.singular;
            if (want_witness && has_sign_twin(s)) ++c.witness;
            if (++idx >= hi) break;
            const int b = std::countr_zero(idx);
            s.flip(1 + b / (n - 1), 1 + b % (n - 1));
        }
        return c;
    };
    return parallel_reduce(
        total, 1ULL << 16, threads, ScanCounts{}, map_chunk,
        [](ScanCounts a, ScanCounts b) {
            return ScanCounts{a.singular + b.singular, a.witness + b.witness};
        });
}

} // namespace

ExactCount exact_singularity_count(int n, int threads, int cap) {
    if (n < 1) throw PreconditionError("dimension must be >= 1");
    if (n > cap) {
        throw ResourceError("exact count for n=" + std::to_string(n) +
                            " exceeds cap " + std::to_string(cap));
    }
    ExactCount r;
    r.n = n;
    if (n == 1) {
        r.normalized_count = 0;
    } else {
        r.normalized_count =
            scan_representatives(n, threads, true, false).singular;
    }
    r.singular_count = r.normalized_count * pow2(2 * n - 1);
    r.total = pow2(static_cast<unsigned long>(n) * n);
    r.probability = mpq_class(r.singular_count, r.total);
    r.probability.canonicalize();
    return r;
}

WitnessCount witness_count_exhaustive(int n, int threads) {
    if (n < 1) throw PreconditionError("dimension must be >= 1");
    WitnessCount r;
    r.n = n;
    const std::uint64_t c =
        n == 1 ? 0 : scan_representatives(n, threads, false, true).witness;
    r.event_count = mpz_class(c) * pow2(2 * n - 1);
    r.total = pow2(static_cast<unsigned long>(n) * n);
    r.probability = mpq_class(r.event_count, r.total);
    r.probability.canonicalize();
    return r;
}

namespace {

// P(all rows of an n-by-g uniform sign matrix pairwise distinct up to sign).
mpq_class rows_distinct_prob(int n, int g) {
    const mpz_class classes = pow2(static_cast<unsigned long>(g));
    mpq_class pr = 1;
    for (int i = 0; i < n; ++i) {
        const mpz_class num = classes - 2 * i;
        if (num <= 0) return 0;
        pr *= mpq_class(num, classes);
    }
    pr.canonicalize();
    return pr;
}

void partition_types(int remaining, int max_part, std::vector<int>& parts,
                     const std::function<void(const std::vector<int>&)>& emit) {
    if (remaining == 0) {
        emit(parts);
        return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        parts.push_back(p);
        partition_types(remaining - p, p, parts, emit);
        parts.pop_back();
    }
}

} // namespace

mpq_class witness_probability(int n) {
    if (n < 1) throw PreconditionError("dimension must be >= 1");
    // Sum over set partitions of the column index set, Mobius weight
    // prod (-1)^(s-1) (s-1)! per block of size s, gluing probability
    // 2^-((n-1)(n - #blocks)), times the row condition on the glued matrix.
    mpq_class no_event = 0;
    std::vector<int> parts;
    partition_types(n, n, parts, [&](const std::vector<int>& type) {
        const int g = static_cast<int>(type.size());
        mpz_class count = 1; // number of set partitions with this type
        {
            mpz_class fact_n;
            mpz_fac_ui(fact_n.get_mpz_t(), n);
            count = fact_n;
            mpz_class denom = 1;
            int run_val = -1, run_len = 0;
            for (int s : type) {
                mpz_class f;
                mpz_fac_ui(f.get_mpz_t(), s);
                denom *= f;
                if (s == run_val) {
                    ++run_len;
                } else {
                    mpz_class rf;
                    mpz_fac_ui(rf.get_mpz_t(), run_len);
                    denom *= rf;
                    run_val = s;
                    run_len = 1;
                }
            }
            mpz_class rf;
            mpz_fac_ui(rf.get_mpz_t(), run_len);
            denom *= rf;
            mpz_divexact(count.get_mpz_t(), count.get_mpz_t(), denom.get_mpz_t());
        }
        mpz_class mobius = 1;
        int sign = 1;
        for (int s : type) {
            mpz_class f;
            mpz_fac_ui(f.get_mpz_t(), s - 1);
            mobius *= f;
            if ((s - 1) % 2) sign = -sign;
        }
        mpq_class term = mpq_class(count * mobius) * rows_distinct_prob(n, g);
        term /= mpq_class(pow2(static_cast<unsigned long>(n - 1) *
                               static_cast<unsigned long>(n - g)));
        term.canonicalize();
        no_event += sign > 0 ? term : -term;
    });
    mpq_class r = 1 - no_event;
    r.canonicalize();
    return r;
}

MCEstimate mc_singularity_estimate(int n, std::uint64_t trials,
                                   std::uint64_t seed, int threads) {
    if (n < 1 || n > 64) throw PreconditionError("dimension out of range");
    if (trials == 0) throw PreconditionError("trials must be >= 1");
    MCEstimate r;
    r.n = n;
    r.trials = trials;
    r.seed = seed;

    const bool small = n <= 12;
    const PrimeModulus pm = small ? choose_field_prime(n) : PrimeModulus(3);
    auto map_chunk = [&](std::uint64_t lo, std::uint64_t hi) {
        std::uint64_t hits = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            SplitMix64 gen(derive_seed(seed, i));
            const SignMatrix s = SignMatrix::random(n, gen);
            const bool singular =
                small ? sign_rank_mod_p(s, pm) < n : singular_mod_three_primes(s);
            if (singular) ++hits;
        }
        return hits;
    };
    r.hits = parallel_reduce(
        trials, 4096, threads, std::uint64_t{0}, map_chunk,
        [](std::uint64_t a, std::uint64_t b) { return a + b; });
    r.estimate = static_cast<double>(r.hits) / static_cast<double>(trials);
    r.ci_halfwidth = 1.96 * std::sqrt(r.estimate * (1.0 - r.estimate) /
                                      static_cast<double>(trials));
    return r;
}

std::vector<BoundRow> bound_report(int n_max, int threads, int exact_cap) {
    if (n_max < 1) throw PreconditionError("n_max must be >= 1");
    std::vector<BoundRow> rows;
    for (int n = 1; n <= n_max; ++n) {
        BoundRow row;
        row.n = n;
        row.ref_quadratic = n * n * std::pow(2.0, 1 - n);
        row.ref_three_quarters = std::pow(0.75, n);
        row.quadratic_exceeds_one = row.ref_quadratic > 1.0;
        row.exact_available = n <= exact_cap;
        if (row.exact_available) {
            const ExactCount ec = exact_singularity_count(n, threads, exact_cap);
            row.p_exact = ec.probability;
            row.p_n = row.p_exact.get_d();
            row.ratio_quadratic = row.p_n / row.ref_quadratic;
            row.ratio_three_quarters = row.p_n / row.ref_three_quarters;
        }
        row.witness_prob = witness_probability(n);
        if (n <= 5) {
            const WitnessCount wc = witness_count_exhaustive(n, threads);
            if (wc.probability != row.witness_prob) {
                throw InvariantError("witness formula disagrees with scan at n=" +
                                     std::to_string(n));
            }
            row.witness_cross_checked = true;
        }
        row.witness = row.witness_prob.get_d();
        if (row.exact_available && row.witness_prob > row.p_exact) {
            throw InvariantError("witness event not dominated by singularity at n=" +
                                 std::to_string(n));
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace bsl
