#include "bsl/ruzsa.hpp"

#include <algorithm>

#include "bsl/error.hpp"
#include "bsl/intutil.hpp"

namespace bsl {

RuzsaCover ruzsa_cover(const ZSet& a, int k_max, std::uint64_t work_cap) {
    if (a.empty()) throw PreconditionError("ruzsa_cover: empty set");
    if (!a.is_symmetric())
        throw PreconditionError("ruzsa_cover: A must satisfy A = -A");
    if (k_max < 4 || k_max > 12)
        throw PreconditionError("ruzsa_cover: k must be in [4, 12]");

    ZSet a2 = sumset(a, a, work_cap); // = A - A by symmetry
    ZSet a3 = sumset(a2, a, work_cap);
    ZSet a4 = sumset(a3, a, work_cap);

    RuzsaCover out;
    out.a_size = a.size();
    out.a4_size = a4.size();
    out.covering_constant =
        mpq_class(static_cast<unsigned long>(a4.size()),
                  static_cast<unsigned long>(a.size()));
    out.covering_constant.canonicalize();

    // eta + A and x + A are disjoint iff eta - x is outside A - A = 2A.
    std::vector<std::int64_t> chosen;
    for (std::int64_t eta : a3.members()) {
        bool disjoint = true;
        for (std::int64_t x : chosen)
            if (a2.contains(eta - x)) {
                disjoint = false;
                break;
            }
        if (disjoint) chosen.push_back(eta);
    }
    out.x = a.modular() ? ZSet(chosen, a.ambient()) : ZSet(chosen);
    out.size_ok = mpz_class(out.x.size()) * mpz_class(a.size()) <= mpz_class(a4.size());

    out.all_ok = out.size_ok;
    ZSet ka = a4;               // k copies of A, extended incrementally
    ZSet rhs = sumset(a2, out.x, work_cap);
    rhs = sumset(rhs, out.x, work_cap); // 2A + 2X, matching k = 4
    for (int k = 4; k <= k_max; ++k) {
        if (k > 4) {
            ka = sumset(ka, a, work_cap);
            rhs = sumset(rhs, out.x, work_cap);
        }
        RuzsaKCheck chk;
        chk.k = k;
        chk.ka_size = ka.size();
        chk.inclusion_ok =
            std::includes(rhs.members().begin(), rhs.members().end(),
                          ka.members().begin(), ka.members().end());
        mpq_class bound =
            binomial_rational(out.covering_constant + (k - 3),
                              static_cast<unsigned long>(k - 2)) *
            out.covering_constant * mpz_class(a.size());
        chk.count_ok = mpq_class(static_cast<unsigned long>(ka.size()), 1) <= bound;
        out.all_ok = out.all_ok && chk.inclusion_ok && chk.count_ok;
        out.checks.push_back(chk);
    }
    return out;
}

} // namespace bsl
