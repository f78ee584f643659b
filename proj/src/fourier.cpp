#include "bsl/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "bsl/error.hpp"
#include "bsl/intutil.hpp"
#include "bsl/parallel.hpp"
#include "bsl/rng.hpp"

namespace bsl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kCosTableCap = 4000000;

struct Kahan {
    double s = 0, c = 0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

void validate_scan_prime(const NormalVector& a, const PrimeModulus& pm) {
    if (mpz_class(pm.p()) <= a.sum_abs()) {
        throw PreconditionError(
            "prime must exceed sum of |a_i| for cube membership to transfer");
    }
}

// cos(2 pi r / p) for residues r, tabulated when p is small enough.
class CosTable {
  public:
    explicit CosTable(std::uint64_t p) : p_(p) {
        if (p <= kCosTableCap) {
            table_.resize(p);
            for (std::uint64_t r = 0; r < p; ++r) {
                table_[r] = std::cos(kTwoPi * static_cast<double>(r) /
                                     static_cast<double>(p));
            }
        }
    }
    double operator()(std::uint64_t r) const {
        if (!table_.empty()) return table_[r];
        return std::cos(kTwoPi * static_cast<double>(r) / static_cast<double>(p_));
    }

  private:
    std::uint64_t p_;
    std::vector<double> table_;
};

std::vector<std::uint64_t> reduced_steps(const NormalVector& a,
                                         const PrimeModulus& pm) {
    std::vector<std::uint64_t> s(a.coeffs().size());
    for (std::size_t j = 0; j < s.size(); ++j)
        s[j] = pm.from_centered(a.coeffs()[j]);
    return s;
}

double clamp01(double x) { return x < 0 ? 0 : x > 1 ? 1 : x; }

double f_from_cosines(const std::vector<std::uint64_t>& idx, const CosTable& cosv) {
    double prod = 1;
    for (std::uint64_t r : idx) {
        const double base = 0.5 + 0.5 * cosv(r);
        prod *= std::sqrt(base < 0 ? 0 : base);
    }
    return clamp01(prod);
}

double g_from_cosines(const std::vector<std::uint64_t>& idx, const CosTable& cosv,
                      double mu) {
    double prod = 1;
    for (std::uint64_t r : idx) prod *= (1.0 - mu) + mu * cosv(r);
    return clamp01(prod);
}

// Runs fn(xi, idx) for xi in [lo, hi) where idx[j] = a_j xi mod p, maintained
// incrementally; parallel chunks recompute their start indices directly.
template <class Fn>
void scan_residues(const std::vector<std::uint64_t>& steps, const PrimeModulus& pm,
                   Fn&& fn, std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> idx(steps.size());
    for (std::size_t j = 0; j < steps.size(); ++j) idx[j] = pm.mul(steps[j], lo);
    for (std::uint64_t xi = lo; xi < hi; ++xi) {
        fn(xi, idx);
        for (std::size_t j = 0; j < steps.size(); ++j)
            idx[j] = pm.add(idx[j], steps[j]);
    }
}

} // namespace

ParamChain::ParamChain(mpq_class eps0, mpq_class eps1, mpq_class eps2)
    : eps0_(std::move(eps0)), eps1_(std::move(eps1)), eps2_(std::move(eps2)) {
    eps0_.canonicalize();
    eps1_.canonicalize();
    eps2_.canonicalize();
    if (!(0 < eps2_ && eps2_ < eps1_ && eps1_ < eps0_ && eps0_ <= 1)) {
        throw PreconditionError("epsilon chain must satisfy 0 < eps2 < eps1 < eps0 <= 1");
    }
    mu_ = mpq_class(1, 4) - eps0_ / 100;
    mu_.canonicalize();
}

int ParamChain::sample_count(int n) const {
    mpq_class m = eps0_ * n / 100;
    m.canonicalize();
    // Nearest integer, halves rounding up.
    mpz_class num = m.get_num(), den = m.get_den();
    mpz_class q = (2 * num + den) / (2 * den);
    return static_cast<int>(mpz_get_si(q.get_mpz_t()));
}

double f_value(const NormalVector& a, std::int64_t xi, const PrimeModulus& p) {
    validate_scan_prime(a, p);
    const std::uint64_t x = p.from_centered(xi);
    double prod = 1;
    for (std::int64_t aj : a.coeffs()) {
        const std::uint64_t r = p.mul(p.from_centered(aj), x);
        const double c = std::cos(kTwoPi * static_cast<double>(r) /
                                  static_cast<double>(p.p()));
        const double base = 0.5 + 0.5 * c;
        prod *= std::sqrt(base < 0 ? 0 : base);
    }
    return clamp01(prod);
}

double g_value(const NormalVector& a, std::int64_t xi, const PrimeModulus& p,
               double mu) {
    validate_scan_prime(a, p);
    const std::uint64_t x = p.from_centered(xi);
    double prod = 1;
    for (std::int64_t aj : a.coeffs()) {
        const std::uint64_t r = p.mul(p.from_centered(aj), x);
        const double c = std::cos(kTwoPi * static_cast<double>(r) /
                                  static_cast<double>(p.p()));
        prod *= (1.0 - mu) + mu * c;
    }
    return clamp01(prod);
}

namespace {

double character_scan(const NormalVector& a, const PrimeModulus& pm, int threads,
                      bool sparse, double mu) {
    validate_scan_prime(a, pm);
    const CosTable cosv(pm.p());
    const auto steps = reduced_steps(a, pm);
    auto map_chunk = [&](std::uint64_t lo, std::uint64_t hi) {
        Kahan sum;
        scan_residues(steps, pm,
                      [&](std::uint64_t, const std::vector<std::uint64_t>& idx) {
                          double prod = 1;
                          if (sparse) {
                              for (std::uint64_t r : idx)
                                  prod *= (1.0 - mu) + mu * cosv(r);
                          } else {
                              for (std::uint64_t r : idx) prod *= cosv(r);
                          }
                          sum.add(prod);
                      },
                      lo, hi);
        return sum.s;
    };
    const double total = parallel_reduce(
        pm.p(), 1 << 16, threads, 0.0, map_chunk,
        [](double acc, double x) { return acc + x; });
    return total / static_cast<double>(pm.p());
}

} // namespace

double prob_X_fourier(const NormalVector& a, const PrimeModulus& p, int threads) {
    return character_scan(a, p, threads, false, 0);
}

double prob_Y_fourier(const NormalVector& a, const PrimeModulus& p, double mu,
                      int threads) {
    return character_scan(a, p, threads, true, mu);
}

ScalarInequalityScan scalar_inequality_scan(double mu, std::uint64_t grid_points) {
    if (grid_points < 2) throw PreconditionError("grid needs at least 2 points");
    ScalarInequalityScan r;
    r.mu = mu;
    r.grid_points = grid_points;
    for (std::uint64_t i = 0; i < grid_points; ++i) {
        const double x = kTwoPi * static_cast<double>(i) /
                         static_cast<double>(grid_points - 1);
        const double lhs = std::fabs(std::cos(x));
        const double rhs = (1.0 - mu) + mu * std::cos(2 * x);
        const double excess = lhs - rhs;
        if (excess > 1e-12) ++r.violations;
        if (excess > r.max_violation) r.max_violation = excess;
    }
    return r;
}

ComparisonReport comparison_check(const NormalVector& a, const PrimeModulus& p,
                                  const mpq_class& mu, bool full_scan,
                                  std::uint64_t xi_samples) {
    if (!(mu > 0 && mu <= mpq_class(1, 4))) {
        throw PreconditionError("comparison lemma requires 0 < mu <= 1/4");
    }
    validate_scan_prime(a, p);
    ComparisonReport rep;
    rep.mu = mu.get_d();
    rep.scalar = scalar_inequality_scan(rep.mu);
    const double expo = 1.0 / (4.0 * rep.mu);
    const CosTable cosv(p.p());
    const auto steps = reduced_steps(a, p);

    auto consider = [&](const std::vector<std::uint64_t>& idx) {
        const double f = f_from_cosines(idx, cosv);
        const double g = g_from_cosines(idx, cosv, rep.mu);
        const double chain = std::pow(g, expo);
        rep.max_f_vs_chain = std::max(rep.max_f_vs_chain, f - chain);
        rep.max_chain_vs_g = std::max(rep.max_chain_vs_g, chain - g);
        ++rep.xi_scanned;
    };
    if (full_scan || p.p() <= xi_samples) {
        scan_residues(steps, p,
                      [&](std::uint64_t, const std::vector<std::uint64_t>& idx) {
                          consider(idx);
                      },
                      0, p.p());
    } else {
        const std::uint64_t stride = p.p() / xi_samples;
        std::vector<std::uint64_t> idx(steps.size());
        for (std::uint64_t t = 0; t < xi_samples; ++t) {
            const std::uint64_t xi = t * stride;
            for (std::size_t j = 0; j < steps.size(); ++j)
                idx[j] = p.mul(steps[j], xi);
            consider(idx);
        }
    }
    rep.ok = rep.scalar.violations == 0 && rep.max_f_vs_chain <= 1e-12 &&
             rep.max_chain_vs_g <= 1e-12;
    return rep;
}

Spectrum::Spectrum(NormalVector a, PrimeModulus p, double eps2, int threads)
    : p_(p), a_(std::move(a)), eps2_(eps2) {
    validate_scan_prime(a_, p_);
    if (eps2 > 1) eps2_above_one_ = true;
    const CosTable cosv(p_.p());
    const auto steps = reduced_steps(a_, p_);

    struct Part {
        std::vector<std::int64_t> members;
        int boundary = 0;
    };
    auto map_chunk = [&](std::uint64_t lo, std::uint64_t hi) {
        Part part;
        scan_residues(steps, p_,
                      [&](std::uint64_t xi, const std::vector<std::uint64_t>& idx) {
                          const double f = f_from_cosines(idx, cosv);
                          if (f >= eps2_ - 1e-12) {
                              part.members.push_back(
                                  p_.centered(xi));
                              if (std::fabs(f - eps2_) <= 1e-12) ++part.boundary;
                          }
                      },
                      lo, hi);
        return part;
    };
    Part all = parallel_reduce(
        p_.p(), 1 << 16, threads, Part{}, map_chunk, [](Part acc, Part x) {
            acc.members.insert(acc.members.end(), x.members.begin(),
                               x.members.end());
            acc.boundary += x.boundary;
            return acc;
        });
    members_ = std::move(all.members);
    boundary_members_ = all.boundary;
    std::sort(members_.begin(), members_.end());

    const std::uint64_t m = members_.size();
    if (m > 0 && m * m <= kDiffWorkCap) {
        std::vector<std::uint64_t> counts(p_.p(), 0);
        for (std::int64_t xi : members_) {
            const std::uint64_t rxi = p_.from_centered(xi);
            for (std::int64_t xj : members_) {
                ++counts[p_.sub(rxi, p_.from_centered(xj))];
            }
        }
        for (std::uint64_t r = 0; r < p_.p(); ++r) {
            if (counts[r] != 0) diff_.push_back({p_.centered(r), counts[r]});
        }
        std::sort(diff_.begin(), diff_.end());
    }
}

const std::vector<std::pair<std::int64_t, std::uint64_t>>&
Spectrum::difference_histogram() const {
    if (!has_difference_histogram()) {
        throw ResourceError("difference multiset above work cap");
    }
    return diff_;
}

Spectrum spectrum(const NormalVector& a, const PrimeModulus& p, double eps2,
                  int threads) {
    return Spectrum(a, p, eps2, threads);
}

double lambda_norm(std::int64_t x, const Spectrum& s) {
    if (s.size() == 0) throw PreconditionError("empty spectrum has no norm");
    const PrimeModulus& pm = s.prime();
    const std::uint64_t rx = pm.from_centered(x);
    const double p = static_cast<double>(pm.p());
    Kahan sum;
    for (const auto& [delta, count] : s.difference_histogram()) {
        const std::uint64_t rd = pm.mul(rx, pm.from_centered(delta));
        const std::uint64_t dist = std::min(rd, pm.p() - rd);
        const double t = static_cast<double>(dist) / p;
        sum.add(static_cast<double>(count) * t * t);
    }
    const double m = static_cast<double>(s.size());
    const double v = sum.s / (m * m);
    return std::sqrt(v < 0 ? 0 : v);
}

BohrReport bohr_set(const Spectrum& s, double threshold, const CombDim* dim,
                    std::uint64_t scan_cap) {
    if (s.size() == 0) throw PreconditionError("empty spectrum");
    const PrimeModulus& pm = s.prime();
    if (pm.p() > scan_cap) {
        throw ResourceError("Bohr scan over p=" + std::to_string(pm.p()) +
                            " exceeds cap " + std::to_string(scan_cap));
    }
    const std::uint64_t work = pm.p() * s.difference_histogram().size();
    if (work > 400000000ULL) {
        throw ResourceError("Bohr scan work " + std::to_string(work) +
                            " exceeds cap");
    }
    BohrReport rep;
    rep.threshold = threshold;
    for (std::uint64_t x = 0; x < pm.p(); ++x) {
        if (lambda_norm(pm.centered(x), s) <= threshold) {
            rep.members.push_back(pm.centered(x));
        }
    }
    std::sort(rep.members.begin(), rep.members.end());
    rep.size = rep.members.size();

    std::vector<char> seen(pm.p(), 0);
    if (rep.size * rep.size > 400000000ULL) {
        throw ResourceError("Bohr sumset work exceeds cap");
    }
    for (std::int64_t u : rep.members) {
        const std::uint64_t ru = pm.from_centered(u);
        for (std::int64_t v : rep.members) {
            seen[pm.add(ru, pm.from_centered(v))] = 1;
        }
    }
    rep.doubled_size = static_cast<std::uint64_t>(
        std::count(seen.begin(), seen.end(), char(1)));
    if (dim) {
        const double scale = std::exp2(
            static_cast<double>(dim->n) -
            static_cast<double>(dim->dim_num) / static_cast<double>(dim->dim_den));
        rep.ratio_size = static_cast<double>(rep.size) / scale;
        rep.ratio_doubled = static_cast<double>(rep.doubled_size) / scale;
    }
    return rep;
}

std::complex<double> h_transform(std::int64_t x, const Spectrum& s) {
    if (s.size() == 0) throw PreconditionError("empty spectrum");
    const PrimeModulus& pm = s.prime();
    const std::uint64_t rx = pm.from_centered(x);
    Kahan re, im;
    for (std::int64_t xi : s.members()) {
        const std::uint64_t r = pm.mul(rx, pm.from_centered(xi));
        const double t = kTwoPi * static_cast<double>(r) / static_cast<double>(pm.p());
        re.add(std::cos(t));
        im.add(std::sin(t));
    }
    const double m = static_cast<double>(s.size());
    return {re.s / m, im.s / m};
}

ParsevalReport parseval_check(const Spectrum& s, std::uint64_t work_cap) {
    if (s.size() == 0) throw PreconditionError("empty spectrum");
    const PrimeModulus& pm = s.prime();
    const std::uint64_t p = pm.p();
    const auto& hist = s.difference_histogram();
    const std::uint64_t work = p * (s.size() + hist.size());
    if (work > work_cap) {
        throw ResourceError("Parseval scan work " + std::to_string(work) +
                            " exceeds cap " + std::to_string(work_cap));
    }
    const CosTable cosv(p);

    // Incremental residue indices: per member for h, per difference for the
    // norm; one pass over x = 0..p-1.
    const std::size_t m = s.members().size();
    std::vector<std::uint64_t> mstep(m), midx(m, 0);
    for (std::size_t j = 0; j < m; ++j) mstep[j] = pm.from_centered(s.members()[j]);
    const std::size_t hsz = hist.size();
    std::vector<std::uint64_t> hstep(hsz), hidx(hsz, 0);
    std::vector<double> hcount(hsz);
    for (std::size_t j = 0; j < hsz; ++j) {
        hstep[j] = pm.from_centered(hist[j].first);
        hcount[j] = static_cast<double>(hist[j].second);
    }

    ParsevalReport rep;
    rep.p = p;
    rep.lambda_size = s.size();
    const double md = static_cast<double>(m);
    const double pd = static_cast<double>(p);
    Kahan sum_h2;
    for (std::uint64_t x = 0; x < p; ++x) {
        Kahan re, im;
        for (std::size_t j = 0; j < m; ++j) {
            const double t = kTwoPi * static_cast<double>(midx[j]) / pd;
            re.add(std::cos(t));
            im.add(std::sin(t));
            midx[j] = pm.add(midx[j], mstep[j]);
        }
        const double h2 = (re.s * re.s + im.s * im.s) / (md * md);
        sum_h2.add(h2);

        Kahan nrm;
        for (std::size_t j = 0; j < hsz; ++j) {
            const std::uint64_t dist = std::min(hidx[j], p - hidx[j]);
            const double t = static_cast<double>(dist) / pd;
            nrm.add(hcount[j] * t * t);
            hidx[j] = pm.add(hidx[j], hstep[j]);
        }
        const double norm2 = nrm.s / (md * md);
        rep.bridge_lower_max_violation = std::max(
            rep.bridge_lower_max_violation, (1.0 - 100.0 * norm2) - h2);
        rep.bridge_upper_max_violation = std::max(
            rep.bridge_upper_max_violation, h2 - (1.0 - norm2 / 100.0));
    }
    rep.sum_h_squared = sum_h2.s;
    rep.expected = pd / md;
    rep.rel_residual = std::fabs(rep.sum_h_squared - rep.expected) / rep.expected;
    rep.ok = rep.rel_residual <= 1e-6 && rep.bridge_lower_max_violation <= 1e-9 &&
             rep.bridge_upper_max_violation <= 1e-9;
    return rep;
}

RepCounts rep_counts(const Spectrum& s, int k, std::uint64_t work_cap) {
    if (k < 1) throw PreconditionError("k must be >= 1");
    if (s.size() == 0) throw PreconditionError("empty spectrum");
    const PrimeModulus& pm = s.prime();
    const std::uint64_t p = pm.p();
    {
        mpz_class tuples = 1;
        for (int t = 0; t < k; ++t) tuples *= s.size();
        if (tuples > mpz_class(static_cast<unsigned long>(work_cap))) {
            throw ResourceError("|Lambda|^k = " + tuples.get_str() +
                                " exceeds work cap");
        }
    }
    std::vector<std::uint64_t> steps;
    for (std::int64_t xi : s.members()) steps.push_back(pm.from_centered(xi));

    std::vector<std::uint64_t> cur(p, 0), next(p, 0);
    std::vector<std::uint64_t> support;
    for (std::uint64_t r : steps) {
        if (cur[r]++ == 0) support.push_back(r);
    }
    for (int step = 1; step < k; ++step) {
        std::vector<std::uint64_t> nsupport;
        for (std::uint64_t r : support) {
            const std::uint64_t c = cur[r];
            for (std::uint64_t t : steps) {
                const std::uint64_t q = pm.add(r, t);
                if (next[q] == 0) nsupport.push_back(q);
                next[q] += c;
            }
            cur[r] = 0;
        }
        support = std::move(nsupport);
        cur.swap(next);
    }

    RepCounts rep;
    rep.k = k;
    rep.counts = std::move(cur);
    std::sort(support.begin(), support.end());
    rep.support = support.size();

    mpz_class total = 0, sumsq = 0;
    for (std::uint64_t r : support) {
        total += mpz_class(rep.counts[r]);
        sumsq += mpz_class(rep.counts[r]) * mpz_class(rep.counts[r]);
    }
    rep.total = total;
    rep.sum_squares = sumsq;
    mpz_class size_k = 1;
    for (int t = 0; t < k; ++t) size_k *= s.size();
    rep.total_ok = total == size_k;
    rep.cauchy_schwarz_ok =
        sumsq * mpz_class(static_cast<unsigned long>(rep.support)) >=
        size_k * size_k;

    // Transform identity at ten deterministic sample points.
    SplitMix64 gen(0x5eedf00dULL);
    const double pd = static_cast<double>(p);
    double max_rel = 0;
    for (int t = 0; t < 10; ++t) {
        const std::uint64_t x = gen.next_below(p);
        Kahan re, im;
        for (std::uint64_t r : support) {
            const double ang =
                kTwoPi * static_cast<double>(pm.mul(x, r)) / pd;
            const double c = static_cast<double>(rep.counts[r]);
            re.add(c * std::cos(ang));
            im.add(c * std::sin(ang));
        }
        std::complex<double> lhs(re.s, im.s);
        std::complex<double> h = h_transform(pm.centered(x), s);
        std::complex<double> rhs = 1;
        for (int e = 0; e < k; ++e) rhs *= h;
        rhs *= size_k.get_d();
        // both sides carry |L|^k worth of mass, so roundoff is absolute at that
        // scale; normalize by it or the check rejects exact counts on large spectra
        const double rel = std::abs(lhs - rhs) / std::max(std::abs(rhs), size_k.get_d());
        max_rel = std::max(max_rel, rel);
    }
    rep.transform_max_rel_err = max_rel;
    rep.transform_ok = max_rel <= 1e-9;
    return rep;
}

ExceptionalReport classify_exceptional(const NormalVector& a,
                                       const PrimeModulus& p,
                                       const ParamChain& params) {
    validate_scan_prime(a, p);
    ExceptionalReport rep;
    rep.p_x = mpq_class(lo_count(a), pow2(static_cast<unsigned long>(a.n())));
    rep.p_x.canonicalize();
    rep.p_y = prob_Y_hyperplane(a, SparseLaw(params.mu()));
    if (rep.p_x > rep.p_y) {
        throw InvariantError("P(X in V) exceeded P(Y in V)");
    }
    rep.exceptional = rep.p_x >= params.eps1() * rep.p_y;
    return rep;
}

GrowthTable lambda_growth(const Spectrum& s, int k_max, std::uint64_t work_cap) {
    if (k_max < 1) throw PreconditionError("k_max must be >= 1");
    if (s.size() == 0) throw PreconditionError("empty spectrum");
    const PrimeModulus& pm = s.prime();
    const std::uint64_t p = pm.p();
    std::vector<std::uint64_t> base;
    for (std::int64_t xi : s.members()) base.push_back(pm.from_centered(xi));

    GrowthTable table;
    std::vector<std::uint64_t> cur = base;
    std::sort(cur.begin(), cur.end());
    std::vector<std::uint64_t> sizes{cur.size()};
    table.rows.push_back({1, cur.size(), false, true});
    std::vector<char> seen(p, 0);
    for (int k = 2; k <= k_max; ++k) {
        if (cur.size() * base.size() > work_cap) {
            throw ResourceError("sumset work exceeds cap at k=" + std::to_string(k));
        }
        std::fill(seen.begin(), seen.end(), 0);
        std::vector<std::uint64_t> nxt;
        for (std::uint64_t u : cur) {
            for (std::uint64_t v : base) {
                const std::uint64_t w = pm.add(u, v);
                if (!seen[w]) {
                    seen[w] = 1;
                    nxt.push_back(w);
                }
            }
        }
        std::sort(nxt.begin(), nxt.end());
        cur = std::move(nxt);
        sizes.push_back(cur.size());
        table.rows.push_back({k, cur.size(), false, true});
    }
    table.doubling = sizes.size() >= 2 ? static_cast<double>(sizes[1]) /
                                             static_cast<double>(sizes[0])
                                       : 1.0;
    if (k_max >= 4) {
        mpq_class C(mpz_class(static_cast<unsigned long>(sizes[3])),
                    mpz_class(static_cast<unsigned long>(sizes[0])));
        C.canonicalize();
        table.covering_constant = C;
        bool all_ok = true;
        for (auto& row : table.rows) {
            if (row.k < 2) continue;
            const mpq_class bound =
                binomial_rational(C + (row.k - 3), static_cast<unsigned long>(row.k - 2)) *
                C * static_cast<long>(sizes[0]);
            row.bound_checked = true;
            row.bound_ok = mpq_class(static_cast<unsigned long>(row.size)) <= bound;
            all_ok = all_ok && row.bound_ok;
        }
        table.all_bounds_ok = all_ok;
    }
    return table;
}

} // namespace bsl
