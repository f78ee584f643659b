#include "bsl/freiman.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "bsl/error.hpp"
#include "bsl/intutil.hpp"

namespace bsl {

namespace {

constexpr int kPairCandidates = 24; // smallest positive differences kept

std::int64_t egcd(std::int64_t a, std::int64_t b, std::int64_t& x,
                  std::int64_t& y) {
    if (b == 0) {
        x = 1;
        y = 0;
        return a;
    }
    std::int64_t x1, y1;
    std::int64_t g = egcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

struct Candidate {
    std::int64_t volume = 0;
    std::vector<std::int64_t> basis;
    std::vector<std::int64_t> lengths;

    bool operator<(const Candidate& o) const {
        if (volume != o.volume) return volume < o.volume;
        if (basis.size() != o.basis.size()) return basis.size() < o.basis.size();
        return basis < o.basis;
    }
};

// Best (m1, m2) with m1 v1 + m2 v2 = a, minimizing max(|m1|, |m2|); ties
// prefer smaller |m2|, then positive m2.  The valid m2 form an arithmetic
// progression and the cost is unimodal along it, so probing around the
// endpoint and crossing anchors suffices.
bool best_pair_rep(std::int64_t a, std::int64_t v1, std::int64_t v2,
                   std::int64_t& m1_out, std::int64_t& m2_out) {
    std::int64_t g = std::gcd(v1, v2);
    if (a % g != 0) return false;
    std::int64_t step = v1 / g;
    std::int64_t m2_0 = 0;
    if (step > 1) {
        std::int64_t x, y;
        egcd(((v2 / g) % step + step) % step, step, x, y);
        std::int64_t inv = ((x % step) + step) % step;
        std::int64_t rhs = (((a / g) % step) + step) % step;
        m2_0 = static_cast<std::int64_t>(
            static_cast<__int128>(rhs) * inv % step);
    }

    double anchors[4] = {0.0, static_cast<double>(a) / v2,
                         static_cast<double>(a) / (v1 + v2),
                         v2 == v1 ? 0.0 : static_cast<double>(a) / (v2 - v1)};
    bool have = false;
    std::int64_t bm1 = 0, bm2 = 0, bcost = 0;
    for (double t : anchors) {
        std::int64_t base = m2_0;
        if (step > 1)
            base = m2_0 + static_cast<std::int64_t>(
                              std::llround((t - m2_0) / step)) *
                              step;
        else
            base = static_cast<std::int64_t>(std::llround(t));
        for (std::int64_t d = -2; d <= 2; ++d) {
            std::int64_t m2 = base + d * step;
            __int128 rem = static_cast<__int128>(a) -
                           static_cast<__int128>(m2) * v2;
            if (rem % v1 != 0) continue;
            __int128 m1w = rem / v1;
            if (m1w > INT64_MAX || m1w < INT64_MIN) continue;
            std::int64_t m1 = static_cast<std::int64_t>(m1w);
            std::int64_t cost = std::max(std::llabs(m1), std::llabs(m2));
            bool better =
                !have || cost < bcost ||
                (cost == bcost && (std::llabs(m2) < std::llabs(bm2) ||
                                   (std::llabs(m2) == std::llabs(bm2) && m2 > bm2)));
            if (better) {
                have = true;
                bm1 = m1;
                bm2 = m2;
                bcost = cost;
            }
        }
    }
    if (!have) return false;
    m1_out = bm1;
    m2_out = bm2;
    return true;
}

} // namespace

FreimanFit freiman_fit(const ZSet& a, int r_max, const mpq_class& volume_cap) {
    if (a.empty()) throw PreconditionError("freiman_fit: empty set");
    if (a.size() > 1000)
        throw PreconditionError("freiman_fit: |A| above the 10^3 cap");
    if (r_max < 1) throw PreconditionError("freiman_fit: r_max must be >= 1");

    mpz_class budget_z(mpq_class(volume_cap * static_cast<long>(a.size())));
    std::int64_t budget = fits_int64(budget_z) ? to_int64(budget_z) : INT64_MAX;

    std::vector<Candidate> candidates;

    // Rank 1: the minimal symmetric progression through gcd structure.
    {
        std::int64_t g = 0;
        std::int64_t amax = 0;
        for (std::int64_t x : a.members()) {
            g = std::gcd(g, std::llabs(x));
            amax = std::max<std::int64_t>(amax, std::llabs(x));
        }
        Candidate c;
        if (g == 0) { // A = {0}
            c.volume = 1;
            c.basis = {1};
            c.lengths = {1};
        } else {
            std::int64_t b = amax / g;
            c.volume = 2 * b + 1;
            c.basis = {g};
            c.lengths = {2 * b + 1};
        }
        if (c.volume <= budget) candidates.push_back(std::move(c));
    }

    if (r_max >= 2 && a.size() >= 2) {
        std::vector<std::int64_t> neg;
        neg.reserve(a.size());
        for (std::int64_t x : a.members()) neg.push_back(-x);
        ZSet negset = a.modular() ? ZSet(neg, a.ambient()) : ZSet(neg);
        ZSet diffs = sumset(a, negset);

        std::vector<std::int64_t> cand;
        for (std::int64_t d : diffs.members())
            if (d > 0) {
                cand.push_back(d);
                if (static_cast<int>(cand.size()) >= kPairCandidates) break;
            }

        for (std::size_t i = 0; i < cand.size(); ++i) {
            for (std::size_t j = i + 1; j < cand.size(); ++j) {
                std::int64_t v1 = cand[i], v2 = cand[j];
                std::int64_t b1 = 0, b2 = 0;
                bool ok = true;
                for (std::int64_t x : a.members()) {
                    std::int64_t m1, m2;
                    if (!best_pair_rep(x, v1, v2, m1, m2)) {
                        ok = false;
                        break;
                    }
                    b1 = std::max<std::int64_t>(b1, std::llabs(m1));
                    b2 = std::max<std::int64_t>(b2, std::llabs(m2));
                    if (mpz_class(2 * b1 + 1) * mpz_class(2 * b2 + 1) > budget) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                Candidate c;
                c.volume = (2 * b1 + 1) * (2 * b2 + 1);
                c.basis = {v1, v2};
                c.lengths = {2 * b1 + 1, 2 * b2 + 1};
                candidates.push_back(std::move(c));
            }
        }
    }

    std::sort(candidates.begin(), candidates.end());
    for (const Candidate& c : candidates) {
        Gap g;
        if (a.modular()) g.ambient = a.ambient();
        g.basis = c.basis;
        g.lengths = c.lengths;
        g.symmetric = true;
        GapImage img = enumerate(g);
        if (!img.proper) continue;
        bool contains_all = true;
        for (std::int64_t x : a.members())
            if (!img.set.contains(x)) {
                contains_all = false;
                break;
            }
        if (!contains_all) continue;
        FreimanFit fit;
        fit.success = true;
        fit.note = c.basis.size() == 1 ? "rank-1 fit" : "rank-2 fit";
        fit.gap = std::move(g);
        return fit;
    }

    FreimanFit fit;
    fit.success = false;
    fit.note = "no proper fit within volume cap " + rational_str(volume_cap) +
               " * |A|";
    return fit;
}

} // namespace bsl
