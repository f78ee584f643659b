#include "bsl/gap.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "bsl/error.hpp"
#include "bsl/int_matrix.hpp"
#include "bsl/intutil.hpp"

namespace bsl {

namespace {

constexpr auto modc = centered_rem;

} // namespace

mpz_class Gap::box_volume() const {
    mpz_class v = 1;
    for (int j = 0; j < rank(); ++j) v *= 2 * coeff_bound(j) + 1;
    return v;
}

mpz_class Gap::lengths_product() const {
    mpz_class v = 1;
    for (std::int64_t m : lengths) v *= m;
    return v;
}

void Gap::validate() const {
    if (basis.empty()) throw PreconditionError("gap: rank must be >= 1");
    if (basis.size() != lengths.size())
        throw PreconditionError("gap: basis and lengths sizes differ");
    if (symmetric && offset != 0)
        throw PreconditionError("gap: symmetric gap with nonzero offset");
    for (std::int64_t m : lengths)
        if (m < 1) throw PreconditionError("gap: lengths must be positive");
    for (std::int64_t v : basis) {
        if (v == 0) throw PreconditionError("gap: zero basis vector");
        if (ambient && modc(v, static_cast<std::int64_t>(ambient->p())) == 0)
            throw PreconditionError("gap: basis vector vanishes mod p");
    }
}

namespace {

// Odometer sweep over the coefficient box in row-major order (last index
// fastest); calls out(value, flat_index).
template <class Out>
void sweep_box(const Gap& g, Out&& out) {
    int r = g.rank();
    std::vector<std::int64_t> b(r), m(r);
    for (int j = 0; j < r; ++j) {
        b[j] = g.coeff_bound(j);
        m[j] = -b[j];
    }
    bool modular = g.ambient.has_value();
    std::int64_t p = modular ? static_cast<std::int64_t>(g.ambient->p()) : 0;

    // partial[j] = offset + sum_{i<j} m_i v_i, centered when modular.
    std::vector<__int128> partial(r + 1);
    std::vector<std::int64_t> partial_m(r + 1);
    partial[0] = g.offset;
    partial_m[0] = modular ? modc(g.offset % p, p) : 0;
    auto refill = [&](int from) {
        for (int j = from; j < r; ++j) {
            partial[j + 1] = partial[j] + static_cast<__int128>(m[j]) * g.basis[j];
            if (modular) {
                __int128 term = static_cast<__int128>(modc(m[j] % p, p)) *
                                modc(g.basis[j], p);
                partial_m[j + 1] = modc(
                    partial_m[j] + static_cast<std::int64_t>(term % p), p);
            }
        }
    };
    refill(0);

    std::uint64_t flat = 0;
    for (;;) {
        if (modular) {
            out(partial_m[r], flat);
        } else {
            __int128 v = partial[r];
            if (v > INT64_MAX || v < INT64_MIN)
                throw OverflowError("gap enumeration overflows 64 bits");
            out(static_cast<std::int64_t>(v), flat);
        }
        ++flat;
        int j = r - 1;
        while (j >= 0 && m[j] == b[j]) {
            m[j] = -b[j];
            --j;
        }
        if (j < 0) break;
        ++m[j];
        refill(j);
    }
}

} // namespace

GapImage enumerate(const Gap& p, std::uint64_t volume_cap) {
    p.validate();
    mpz_class vol = p.box_volume();
    if (vol > volume_cap)
        throw ResourceError("gap enumeration: box volume " + vol.get_str() +
                            " exceeds the cap");
    std::uint64_t v = vol.get_ui();
    std::vector<std::int64_t> values;
    values.reserve(v);
    sweep_box(p, [&](std::int64_t x, std::uint64_t) { values.push_back(x); });

    ZSet set = p.ambient ? ZSet(values, *p.ambient) : ZSet(values);
    GapImage img{std::move(set), 0, false};
    img.collisions = v - img.set.size();
    img.proper = img.collisions == 0;
    return img;
}

bool is_proper(const Gap& p, std::uint64_t volume_cap) {
    return enumerate(p, volume_cap).proper;
}

PNormTable::PNormTable(const Gap& p, std::uint64_t volume_cap) : gap_(p) {
    gap_.validate();
    if (!gap_.symmetric)
        throw PreconditionError("P-norm requires a symmetric gap");
    mpz_class vol = gap_.box_volume();
    if (vol > volume_cap)
        throw ResourceError("P-norm table: box volume exceeds the cap");
    table_.reserve(vol.get_ui());
    sweep_box(gap_, [&](std::int64_t x, std::uint64_t flat) {
        table_.emplace_back(x, flat);
    });
    std::sort(table_.begin(), table_.end());
    for (std::size_t i = 1; i < table_.size(); ++i)
        if (table_[i].first == table_[i - 1].first)
            throw PreconditionError("P-norm requires a proper gap");
}

std::uint64_t PNormTable::lookup(std::int64_t x) const {
    std::int64_t v = x;
    if (gap_.ambient)
        v = modc(x, static_cast<std::int64_t>(gap_.ambient->p()));
    auto it = std::lower_bound(table_.begin(), table_.end(),
                               std::make_pair(v, std::uint64_t{0}));
    if (it == table_.end() || it->first != v)
        throw MembershipError("value is not in the gap");
    return it->second;
}

bool PNormTable::contains(std::int64_t x) const {
    try {
        lookup(x);
        return true;
    } catch (const MembershipError&) {
        return false;
    }
}

std::vector<std::int64_t> PNormTable::coefficients(std::int64_t x) const {
    std::uint64_t flat = lookup(x);
    int r = gap_.rank();
    std::vector<std::int64_t> m(r);
    for (int j = r - 1; j >= 0; --j) {
        std::int64_t radix = 2 * gap_.coeff_bound(j) + 1;
        m[j] = static_cast<std::int64_t>(flat % radix) - gap_.coeff_bound(j);
        flat /= radix;
    }
    return m;
}

double PNormTable::p_norm(std::int64_t x) const {
    std::vector<std::int64_t> m = coefficients(x);
    double s = 0;
    for (int j = 0; j < gap_.rank(); ++j) {
        double t = static_cast<double>(std::llabs(m[j])) /
                   static_cast<double>(gap_.lengths[j]);
        s += t * t;
    }
    return std::sqrt(s);
}

RankReduction rank_reduce(const Gap& p, const ZSet& u,
                          std::uint64_t volume_cap) {
    if (!p.ambient)
        throw PreconditionError("rank_reduce requires a prime-field ambient");
    const PrimeModulus& pm = *p.ambient;
    std::int64_t pp = static_cast<std::int64_t>(pm.p());

    PNormTable table(p, volume_cap); // proper symmetric or throws
    std::vector<std::vector<std::int64_t>> coeffs;
    coeffs.reserve(u.size());
    for (std::int64_t x : u.members())
        coeffs.push_back(table.coefficients(x)); // membership or throws

    RankReduction out;
    out.gap = p;
    auto coeff_matrix = [&]() {
        int rows = static_cast<int>(std::max<std::size_t>(coeffs.size(), 1));
        IntMatrix m(rows, out.gap.rank());
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            for (int j = 0; j < out.gap.rank(); ++j)
                m.at(static_cast<int>(i), j) = coeffs[i][j];
        return m;
    };

    out.initial_rank = static_cast<int>(rank_exact(coeff_matrix()));
    for (;;) {
        int r = out.gap.rank();
        int rank = static_cast<int>(rank_exact(coeff_matrix()));
        if (rank == r || r == 1) {
            out.full_rank = rank == r;
            break;
        }
        std::vector<mpz_class> alpha = kernel_vector_exact(coeff_matrix());
        int j = -1;
        for (int i = r - 1; i >= 0; --i)
            if (mpz_class(alpha[i] % pp) != 0) {
                j = i;
                break;
            }
        if (j < 0)
            throw InvariantError("rank_reduce: kernel vector vanishes mod p");
        std::uint64_t aj = pm.reduce(mpz_class(alpha[j]) % pp + pp);
        std::uint64_t w = pm.mul(pm.from_centered(modc(out.gap.basis[j], pp)),
                                 pm.inv(aj));

        Gap next;
        next.ambient = pm;
        next.symmetric = true;
        std::vector<int> kept;
        for (int i = 0; i < r; ++i) {
            if (i == j) continue;
            std::uint64_t ai = pm.reduce(mpz_class(alpha[i]) % pp + pp);
            std::uint64_t vi = pm.sub(pm.from_centered(modc(out.gap.basis[i], pp)),
                                      pm.mul(ai, w));
            if (vi == 0) continue; // inert after substitution
            next.basis.push_back(pm.centered(vi));
            next.lengths.push_back(out.gap.lengths[i]);
            kept.push_back(i);
        }
        if (next.basis.empty())
            throw InvariantError("rank_reduce: basis collapsed to nothing");

        // The coefficients of each u are unchanged on the kept coordinates:
        // u = sum_i m_i v_i = sum_{i != j} m_i v_i' because alpha . m = 0.
        std::vector<std::vector<std::int64_t>> next_coeffs(coeffs.size());
        for (std::size_t t = 0; t < coeffs.size(); ++t) {
            for (int i : kept) next_coeffs[t].push_back(coeffs[t][i]);
            __int128 acc = 0;
            for (std::size_t q = 0; q < next_coeffs[t].size(); ++q)
                acc += static_cast<__int128>(next_coeffs[t][q]) * next.basis[q];
            std::int64_t got = modc(static_cast<std::int64_t>(acc % pp), pp);
            if (got != modc(u.members()[t], pp))
                throw InvariantError("rank_reduce: containment lost");
        }

        out.relations.push_back(std::move(alpha));
        out.gap = std::move(next);
        coeffs = std::move(next_coeffs);
        ++out.steps;
    }
    return out;
}

CommensurabilityReport commensurability_check(const ZSet& u, std::int64_t v1,
                                              std::int64_t bound) {
    if (v1 == 0) throw PreconditionError("commensurability: v1 must be nonzero");
    if (bound < 1) throw PreconditionError("commensurability: bound must be >= 1");
    CommensurabilityReport rep;
    rep.v1 = v1;
    rep.bound = bound;
    rep.all_found = true;

    if (u.modular()) {
        const PrimeModulus& pm = u.ambient();
        std::uint64_t v1r = pm.from_centered(modc(v1, static_cast<std::int64_t>(pm.p())));
        // residue of p' v1 -> p', preferring small |p'| and the positive sign.
        std::unordered_map<std::uint64_t, std::int64_t> lhs;
        lhs.reserve(2 * bound + 1);
        for (std::int64_t a = 0; a <= bound; ++a) {
            for (std::int64_t s : {a, -a}) {
                std::uint64_t key =
                    s >= 0 ? pm.mul(static_cast<std::uint64_t>(s), v1r)
                           : pm.neg(pm.mul(static_cast<std::uint64_t>(-s), v1r));
                lhs.emplace(key, s);
                if (a == 0) break;
            }
        }
        for (std::int64_t x : u.members()) {
            CommensurabilityWitness w;
            w.u = x;
            std::uint64_t xr = pm.from_centered(modc(x, static_cast<std::int64_t>(pm.p())));
            for (std::int64_t q = 1; q <= bound && !w.found; ++q) {
                auto it = lhs.find(pm.mul(xr, static_cast<std::uint64_t>(q)));
                if (it != lhs.end()) {
                    w.found = true;
                    w.num = it->second;
                    w.den = q;
                }
            }
            rep.all_found = rep.all_found && w.found;
            rep.rows.push_back(w);
        }
        return rep;
    }

    for (std::int64_t x : u.members()) {
        CommensurabilityWitness w;
        w.u = x;
        for (std::int64_t q = 1; q <= bound && !w.found; ++q) {
            __int128 prod = static_cast<__int128>(x) * q;
            if (prod % v1 != 0) continue;
            __int128 num = prod / v1;
            if (num > bound || num < -bound) continue;
            w.found = true;
            w.num = static_cast<std::int64_t>(num);
            w.den = q;
        }
        rep.all_found = rep.all_found && w.found;
        rep.rows.push_back(w);
    }
    return rep;
}

GaussianCountReport gaussian_count_bound(int n, double d_pm, const Gap& p) {
    if (n < 1) throw PreconditionError("gaussian_count_bound: n must be >= 1");
    p.validate();
    GaussianCountReport rep;
    rep.n = n;
    rep.d_pm = d_pm;
    double rs = std::sqrt(static_cast<double>(n));
    double sum = 0, logprod = 0;
    for (std::int64_t m : p.lengths) {
        sum += std::log2(1.0 + static_cast<double>(m) / rs);
        logprod += std::log2(static_cast<double>(m));
    }
    rep.log2_product_form = n * sum;
    double ratio_log = logprod - 0.5 * std::log2(static_cast<double>(n));
    rep.log2_joint_form =
        n * (ratio_log > 50 ? ratio_log
                            : std::log2(1.0 + std::exp2(ratio_log)));
    rep.log2_target = -0.5 * n * std::log2(static_cast<double>(n)) +
                      static_cast<double>(n) * (n - d_pm);
    return rep;
}

CertificateReport structure_certificate_check(const NormalVector& a,
                                              const Certificate& cert,
                                              double c_bound) {
    GapImage img = enumerate(cert.gap);
    if (!img.proper || !cert.gap.symmetric)
        throw PreconditionError(
            "certificate gap must be proper and symmetric");

    CertificateReport rep;
    rep.dim = comb_dimension(a);
    PNormTable table(cert.gap);

    rep.rank_ok = cert.gap.rank() <= c_bound;
    rep.contains_ok = true;
    double s = 0;
    for (std::int64_t ai : a.coeffs()) {
        if (!table.contains(ai)) {
            rep.contains_ok = false;
            continue;
        }
        double t = table.p_norm(ai);
        s += t * t;
    }
    rep.pnorm_sum = s;
    rep.pnorm_ok = rep.contains_ok && s <= c_bound;

    // prod M_j <= C 2^(n - d_pm), compared in log2.
    double log2_vol = 0;
    for (std::int64_t m : cert.gap.lengths) log2_vol += std::log2(static_cast<double>(m));
    double d = rep.dim.d_pm.get_d();
    rep.volume_ratio = std::exp2(log2_vol - (a.n() - d));
    rep.volume_ok = rep.volume_ratio <= c_bound;

    std::int64_t bound = cert.commensurability_bound > 0
                             ? cert.commensurability_bound
                             : static_cast<std::int64_t>(a.n()) * a.n();
    ZSet u = cert.gap.ambient ? ZSet(a.coeffs(), *cert.gap.ambient)
                              : ZSet(a.coeffs());
    rep.commensurability = commensurability_check(u, cert.gap.basis[0], bound);
    rep.commensurable_ok = rep.commensurability.all_found;

    rep.measured_c = std::max({static_cast<double>(cert.gap.rank()),
                               rep.pnorm_sum, rep.volume_ratio});
    rep.all_ok = rep.rank_ok && rep.contains_ok && rep.pnorm_ok &&
                 rep.volume_ok && rep.commensurable_ok;
    return rep;
}

} // namespace bsl
