#include "bsl/hyperplane.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "bsl/error.hpp"
#include "bsl/intutil.hpp"
#include "bsl/rng.hpp"

namespace bsl {

NormalVector::NormalVector(std::vector<std::int64_t> coeffs)
    : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw PreconditionError("empty coefficient vector");
    if (std::all_of(coeffs_.begin(), coeffs_.end(),
                    [](std::int64_t v) { return v == 0; })) {
        throw PreconditionError("coefficient vector must not be all zero");
    }
}

mpz_class NormalVector::content() const {
    mpz_class g = 0;
    for (std::int64_t v : coeffs_) g = gcd(g, mpz_class(v));
    return g;
}

NormalVector NormalVector::primitive() const {
    const std::int64_t g = to_int64(content());
    std::vector<std::int64_t> c = coeffs_;
    for (auto& v : c) v /= g;
    return NormalVector(std::move(c));
}

mpz_class NormalVector::sum_abs() const {
    mpz_class s = 0;
    for (std::int64_t v : coeffs_) s += v >= 0 ? mpz_class(v) : mpz_class(-v);
    return s;
}

namespace {

// All signed sums of a[lo..hi) as 128-bit integers, Gray-code order.
std::vector<__int128> half_sums(const std::vector<std::int64_t>& a, int lo, int hi) {
    const int k = hi - lo;
    std::vector<__int128> out;
    out.reserve(1ULL << k);
    __int128 cur = 0;
    for (int i = lo; i < hi; ++i) cur += a[i];
    out.push_back(cur);
    for (std::uint64_t idx = 1; idx < (1ULL << k); ++idx) {
        const int b = std::countr_zero(idx);
        const std::uint64_t g = idx ^ (idx >> 1);
        cur += ((g >> b) & 1) ? __int128(-2) * a[lo + b] : __int128(2) * a[lo + b];
        out.push_back(cur);
    }
    return out;
}

} // namespace

mpz_class lo_count(const NormalVector& a) {
    const int n = a.n();
    if (n > 34) throw ResourceError("cube scan infeasible for n > 34");
    const int h = n / 2;
    std::vector<__int128> left = half_sums(a.coeffs(), 0, h);
    std::vector<__int128> right = half_sums(a.coeffs(), h, n);
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    // Count pairs l + r = 0 by matched runs.
    mpz_class count = 0;
    std::size_t i = 0;
    std::size_t j = right.size();
    while (i < left.size() && j > 0) {
        const __int128 l = left[i];
        const __int128 r = right[j - 1];
        if (l + r > 0) {
            --j;
        } else if (l + r < 0) {
            ++i;
        } else {
            std::size_t ri = 1;
            while (i + ri < left.size() && left[i + ri] == l) ++ri;
            std::size_t rj = 1;
            while (j > rj && right[j - 1 - rj] == r) ++rj;
            count += mpz_class(static_cast<unsigned long>(ri)) *
                     static_cast<unsigned long>(rj);
            i += ri;
            j -= rj;
        }
    }
    return count;
}

CombDim comb_dimension(const NormalVector& a) {
    CombDim r;
    r.n = a.n();
    r.cube_count = lo_count(a);
    if (r.cube_count == 0) {
        throw PreconditionError(
            "combinatorial dimension undefined: hyperplane misses the cube");
    }
    // Least k with cube_count^n <= 2^k; then 2^(k-1) < cube_count^n.
    const mpz_class cn =
        mpz_pow(r.cube_count, static_cast<unsigned long>(r.n));
    unsigned long k = bit_length(cn);
    if (is_power_of_two(cn)) --k;
    r.dim_num = static_cast<long>(k);
    r.dim_den = r.n;
    r.d_pm = mpq_class(r.dim_num, r.dim_den);
    r.d_pm.canonicalize();
    r.density = std::exp2((static_cast<double>(r.dim_num) -
                           static_cast<double>(r.n) * r.n) /
                          r.n);
    const double large_threshold = 100.0 / std::sqrt(static_cast<double>(r.n));
    const double small_threshold = std::pow(0.75, r.n);
    r.below_large_threshold = r.density < large_threshold;
    r.above_small_threshold = r.density > small_threshold;
    r.regime = !r.below_large_threshold ? "large"
               : r.above_small_threshold ? "medium"
                                         : "small";
    return r;
}

ErdosCheck erdos_lo_check(const NormalVector& a, int work_cap_n) {
    const int n = a.n();
    if (n > 34) throw ResourceError("cube scan infeasible for n > 34");
    for (std::int64_t v : a.coeffs()) {
        if (v == 0) throw PreconditionError("all coefficients must be nonzero");
    }
    if (n > work_cap_n) {
        throw ResourceError("atom histogram for n=" + std::to_string(n) +
                            " exceeds work cap 2^" + std::to_string(work_cap_n));
    }
    std::vector<__int128> sums = half_sums(a.coeffs(), 0, n);
    std::sort(sums.begin(), sums.end());
    std::size_t best = 0, run = 1;
    for (std::size_t i = 1; i < sums.size(); ++i) {
        if (sums[i] == sums[i - 1]) {
            ++run;
        } else {
            best = std::max(best, run);
            run = 1;
        }
    }
    best = std::max(best, run);
    ErdosCheck r;
    r.max_atom = static_cast<unsigned long>(best);
    r.bound = binomial(static_cast<unsigned long>(n),
                       static_cast<unsigned long>(n / 2));
    r.ok = r.max_atom <= r.bound;
    return r;
}

SparseLaw::SparseLaw(mpq_class mu) : mu_(std::move(mu)) {
    mu_.canonicalize();
    if (mu_ < 0 || mu_ > 1) throw PreconditionError("mu must lie in [0,1]");
}

SparseLaw SparseLaw::from_eps0(const mpq_class& eps0) {
    mpq_class mu = mpq_class(1, 4) - eps0 / 100;
    mu.canonicalize();
    return SparseLaw(mu);
}

std::vector<int> sample_Y(int n, const SparseLaw& law, std::uint64_t seed) {
    if (n < 0) throw PreconditionError("negative length");
    // Exact atom probabilities over a common denominator 2*den(mu):
    // (2*(den-num), num, num) for (0, +1, -1).
    const mpz_class num = law.mu().get_num();
    const mpz_class den = law.mu().get_den();
    const std::uint64_t side = mpz_get_ui(num.get_mpz_t());
    const std::uint64_t whole = 2 * mpz_get_ui(den.get_mpz_t());
    if (!den.fits_ulong_p() || whole / 2 != mpz_get_ui(den.get_mpz_t())) {
        throw PreconditionError("mu denominator too large for exact sampling");
    }
    SplitMix64 gen(seed);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (auto& v : y) {
        const std::uint64_t u = gen.next_below(whole);
        v = u < whole - 2 * side ? 0 : u < whole - side ? 1 : -1;
    }
    return y;
}

mpq_class prob_Y_hyperplane(const NormalVector& a, const SparseLaw& law,
                            std::int64_t sum_abs_cap) {
    if (a.sum_abs() > sum_abs_cap) {
        throw ResourceError("sum of |a_i| exceeds cap " +
                            std::to_string(sum_abs_cap));
    }
    const mpq_class p0 = law.p_zero();
    const mpq_class ps = law.p_side();
    std::map<std::int64_t, mpq_class> dist;
    dist[0] = 1;
    for (std::int64_t c : a.coeffs()) {
        std::map<std::int64_t, mpq_class> next;
        for (const auto& [s, w] : dist) {
            next[s] += w * p0;
            if (ps != 0) {
                next[s + c] += w * ps;
                next[s - c] += w * ps;
            }
        }
        dist.swap(next);
    }
    auto it = dist.find(0);
    mpq_class r = it == dist.end() ? mpq_class(0) : it->second;
    r.canonicalize();
    return r;
}

namespace {

struct SpanTester {
    int n;
    int d;
    std::vector<std::vector<std::int64_t>> kernel; // orthogonal complement

    explicit SpanTester(const IntMatrix& basis, int n_) : n(n_) {
        IntMatrix b = basis.rows() == 0 ? IntMatrix(0, n_) : basis;
        if (b.cols() != n_) throw PreconditionError("basis width mismatch");
        d = rank_exact(b);
        for (const auto& k : kernel_basis_exact(b)) {
            std::vector<std::int64_t> ki(n);
            for (int j = 0; j < n; ++j) ki[j] = to_int64(k[j]);
            kernel.push_back(std::move(ki));
        }
    }

    bool contains(const std::vector<int>& y) const {
        for (const auto& k : kernel) {
            __int128 dot = 0;
            for (int j = 0; j < n; ++j) dot += __int128(k[j]) * y[j];
            if (dot != 0) return false;
        }
        return true;
    }
};

} // namespace

OdlyzkoCheck odlyzko_check_exact(const IntMatrix& basis, int n,
                                 const SparseLaw& law) {
    if (n > 12) throw ResourceError("exact 3^n enumeration infeasible for n > 12");
    const SpanTester span(basis, n);
    OdlyzkoCheck r;
    r.n = n;
    r.d = span.d;
    r.exact = true;

    // Count in-span points by number of zero coordinates; attach exact
    // weights (1-mu)^z (mu/2)^(n-z) afterwards.
    std::vector<mpz_class> by_zeros(n + 1, 0);
    std::vector<int> y(n, -1);
    for (;;) {
        if (span.contains(y)) {
            const int z = static_cast<int>(std::count(y.begin(), y.end(), 0));
            ++by_zeros[z];
        }
        int i = 0;
        while (i < n && y[i] == 1) y[i++] = -1;
        if (i == n) break;
        ++y[i];
    }
    mpq_class p = 0;
    for (int z = 0; z <= n; ++z) {
        if (by_zeros[z] == 0) continue;
        mpq_class w = 1;
        for (int t = 0; t < z; ++t) w *= law.p_zero();
        for (int t = 0; t < n - z; ++t) w *= law.p_side();
        p += mpq_class(by_zeros[z]) * w;
    }
    p.canonicalize();
    r.p_exact = p;
    r.p_hat = p.get_d();
    mpq_class bound = 1;
    for (int t = 0; t < n - r.d; ++t) bound *= law.p_zero();
    bound.canonicalize();
    r.bound = bound;
    r.ok = r.p_exact <= r.bound;
    return r;
}

OdlyzkoCheck odlyzko_check_mc(const IntMatrix& basis, int n,
                              const SparseLaw& law, std::uint64_t samples,
                              std::uint64_t seed) {
    if (samples == 0) throw PreconditionError("samples must be >= 1");
    const SpanTester span(basis, n);
    OdlyzkoCheck r;
    r.n = n;
    r.d = span.d;
    r.exact = false;
    r.samples = samples;
    r.seed = seed;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const std::vector<int> y = sample_Y(n, law, derive_seed(seed, i));
        if (span.contains(y)) ++hits;
    }
    r.p_hat = static_cast<double>(hits) / static_cast<double>(samples);
    r.ci_halfwidth = 1.96 * std::sqrt(r.p_hat * (1.0 - r.p_hat) /
                                      static_cast<double>(samples));
    mpq_class bound = 1;
    for (int t = 0; t < n - r.d; ++t) bound *= law.p_zero();
    bound.canonicalize();
    r.bound = bound;
    r.ok = r.p_hat <= bound.get_d() + 4 * r.ci_halfwidth;
    return r;
}

} // namespace bsl
