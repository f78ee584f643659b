#include "bsl/zset.hpp"

#include <algorithm>
#include <limits>

#include "bsl/error.hpp"

namespace bsl {

namespace {

std::int64_t reduce_centered(const PrimeModulus& pm, std::int64_t x) {
    if (x >= 0) return pm.centered(pm.reduce(static_cast<std::uint64_t>(x)));
    std::uint64_t r = pm.reduce(static_cast<std::uint64_t>(-x));
    return pm.centered(pm.neg(r));
}

void sort_unique(std::vector<std::int64_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void check_compatible(const ZSet& a, const ZSet& b) {
    if (a.modular() != b.modular())
        throw PreconditionError("sumset: mixed plain/modular ambients");
    if (a.modular() && a.ambient().p() != b.ambient().p())
        throw PreconditionError("sumset: mismatched moduli");
}

} // namespace

ZSet::ZSet(std::vector<std::int64_t> members) : members_(std::move(members)) {
    sort_unique(members_);
}

ZSet::ZSet(std::vector<std::int64_t> members, PrimeModulus ambient)
    : ambient_(ambient) {
    members_.reserve(members.size());
    for (std::int64_t x : members) members_.push_back(reduce_centered(*ambient_, x));
    sort_unique(members_);
}

const PrimeModulus& ZSet::ambient() const {
    if (!ambient_) throw PreconditionError("ZSet has no modulus");
    return *ambient_;
}

bool ZSet::contains(std::int64_t x) const {
    std::int64_t v = ambient_ ? reduce_centered(*ambient_, x) : x;
    return std::binary_search(members_.begin(), members_.end(), v);
}

bool ZSet::is_symmetric() const {
    for (std::int64_t x : members_)
        if (!std::binary_search(members_.begin(), members_.end(), -x)) return false;
    return true;
}

ZSet sumset(const ZSet& a, const ZSet& b, std::uint64_t work_cap) {
    check_compatible(a, b);
    auto rewrap = [&](std::vector<std::int64_t> v) {
        return a.modular() ? ZSet(std::move(v), a.ambient()) : ZSet(std::move(v));
    };
    if (a.empty() || b.empty()) return rewrap({});

    std::uint64_t work = static_cast<std::uint64_t>(a.size()) * b.size();
    if (work > work_cap)
        throw ResourceError("sumset: |A|*|B| exceeds the work cap");

    if (a.modular()) {
        const PrimeModulus& pm = a.ambient();
        std::int64_t half = static_cast<std::int64_t>(pm.p() / 2);
        std::vector<std::int64_t> out;
        if (pm.p() <= 20000000) {
            // Dense pass over canonical residues.
            std::vector<std::uint8_t> seen(pm.p(), 0);
            for (std::int64_t x : a.members())
                for (std::int64_t y : b.members()) {
                    std::int64_t s = x + y; // |x|,|y| <= p/2, no overflow
                    if (s < 0) s += static_cast<std::int64_t>(pm.p());
                    else if (s >= static_cast<std::int64_t>(pm.p()))
                        s -= static_cast<std::int64_t>(pm.p());
                    seen[static_cast<std::uint64_t>(s)] = 1;
                }
            for (std::uint64_t r = 0; r < pm.p(); ++r)
                if (seen[r]) out.push_back(pm.centered(r));
        } else {
            if (work > 25000000)
                throw ResourceError("sumset: modulus too large for the dense "
                                    "pass and pair list too large to sort");
            out.reserve(work);
            for (std::int64_t x : a.members())
                for (std::int64_t y : b.members()) {
                    std::int64_t s = x + y;
                    if (s < -half) s += static_cast<std::int64_t>(pm.p());
                    else if (s > half) s -= static_cast<std::int64_t>(pm.p());
                    out.push_back(s);
                }
        }
        return rewrap(std::move(out));
    }

    std::int64_t lo = a.members().front() + b.members().front();
    std::int64_t hi = a.members().back() + b.members().back();
    __int128 lo_w = static_cast<__int128>(a.members().front()) + b.members().front();
    __int128 hi_w = static_cast<__int128>(a.members().back()) + b.members().back();
    if (lo_w != lo || hi_w != hi) throw OverflowError("sumset: sum overflows 64 bits");

    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    std::vector<std::int64_t> out;
    if (span <= 200000000) {
        std::vector<std::uint64_t> bits((span + 63) / 64, 0);
        for (std::int64_t x : a.members())
            for (std::int64_t y : b.members()) {
                std::uint64_t k = static_cast<std::uint64_t>(x + y - lo);
                bits[k >> 6] |= 1ull << (k & 63);
            }
        for (std::uint64_t k = 0; k < span; ++k)
            if (bits[k >> 6] >> (k & 63) & 1)
                out.push_back(lo + static_cast<std::int64_t>(k));
    } else {
        if (work > 25000000)
            throw ResourceError("sumset: span too wide for the dense pass and "
                                "pair list too large to sort");
        out.reserve(work);
        for (std::int64_t x : a.members())
            for (std::int64_t y : b.members()) out.push_back(x + y);
        sort_unique(out);
    }
    return rewrap(std::move(out));
}

ZSet iterated_sumset(const ZSet& a, int k, std::uint64_t work_cap) {
    if (k < 1) throw PreconditionError("iterated_sumset: k must be >= 1");
    ZSet acc = a;
    for (int i = 1; i < k; ++i) acc = sumset(acc, a, work_cap);
    return acc;
}

mpq_class doubling(const ZSet& a, std::uint64_t work_cap) {
    if (a.empty()) throw PreconditionError("doubling: empty set");
    ZSet twice = sumset(a, a, work_cap);
    mpq_class r(static_cast<unsigned long>(twice.size()),
                static_cast<unsigned long>(a.size()));
    r.canonicalize();
    return r;
}

} // namespace bsl
