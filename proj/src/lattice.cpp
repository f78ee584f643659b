#include "bsl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <unordered_map>

#include "bsl/error.hpp"
#include "bsl/intutil.hpp"

namespace bsl {

namespace {

using QVec = std::vector<mpq_class>;
using QMat = std::vector<QVec>;

mpq_class dot(const QVec& a, const QVec& b) {
    mpq_class s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

mpq_class abs_q(const mpq_class& x) { return x < 0 ? mpq_class(-x) : x; }

mpq_class det_q(QMat m) {
    int d = static_cast<int>(m.size());
    mpq_class det = 1;
    for (int c = 0; c < d; ++c) {
        int piv = -1;
        for (int r = c; r < d; ++r)
            if (m[r][c] != 0) { piv = r; break; }
        if (piv < 0) return 0;
        if (piv != c) { std::swap(m[piv], m[c]); det = -det; }
        det *= m[c][c];
        for (int r = c + 1; r < d; ++r) {
            if (m[r][c] == 0) continue;
            mpq_class f = m[r][c] / m[c][c];
            for (int k = c; k < d; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

QMat inverse_q(QMat m) {
    int d = static_cast<int>(m.size());
    QMat inv(d, QVec(d, 0));
    for (int i = 0; i < d; ++i) inv[i][i] = 1;
    for (int c = 0; c < d; ++c) {
        int piv = -1;
        for (int r = c; r < d; ++r)
            if (m[r][c] != 0) { piv = r; break; }
        if (piv < 0) throw PreconditionError("lattice basis is singular");
        std::swap(m[piv], m[c]);
        std::swap(inv[piv], inv[c]);
        mpq_class f = m[c][c];
        for (int k = 0; k < d; ++k) { m[c][k] /= f; inv[c][k] /= f; }
        for (int r = 0; r < d; ++r) {
            if (r == c || m[r][c] == 0) continue;
            mpq_class g = m[r][c];
            for (int k = 0; k < d; ++k) {
                m[r][k] -= g * m[c][k];
                inv[r][k] -= g * inv[c][k];
            }
        }
    }
    return inv;
}

// Nearest integer, ties toward +infinity: floor(q + 1/2).
mpz_class round_q(const mpq_class& q) {
    mpq_class t = q + mpq_class(1, 2);
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), t.get_num().get_mpz_t(), t.get_den().get_mpz_t());
    return r;
}

mpz_class ceil_q(const mpq_class& q) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

mpz_class floor_q(const mpq_class& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

void gram_schmidt(const QMat& b, QMat& mu, std::vector<mpq_class>& bnorm) {
    int d = static_cast<int>(b.size());
    QMat bstar = b;
    mu.assign(d, QVec(d, 0));
    bnorm.assign(d, 0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < i; ++j) {
            mu[i][j] = dot(b[i], bstar[j]) / bnorm[j];
            for (std::size_t k = 0; k < bstar[i].size(); ++k)
                bstar[i][k] -= mu[i][j] * bstar[j][k];
        }
        bnorm[i] = dot(bstar[i], bstar[i]);
        if (bnorm[i] == 0)
            throw PreconditionError("dependent basis vectors");
    }
}

// Exact-rational reduction with the 3/4 exchange condition.  The
// Gram-Schmidt data is recomputed after every row operation; dimensions
// here are tiny, so clarity wins over the incremental update.
QMat lll_reduce(QMat b) {
    int d = static_cast<int>(b.size());
    QMat mu;
    std::vector<mpq_class> bn;
    gram_schmidt(b, mu, bn);
    int k = 1;
    long guard = 0;
    while (k < d) {
        if (++guard > 200000)
            throw InvariantError("basis reduction failed to converge");
        for (int j = k - 1; j >= 0; --j) {
            mpz_class q = round_q(mu[k][j]);
            if (q != 0) {
                mpq_class qf(q);
                for (int t = 0; t < d; ++t) b[k][t] -= qf * b[j][t];
                gram_schmidt(b, mu, bn);
            }
        }
        if (bn[k] >= (mpq_class(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * bn[k - 1]) {
            ++k;
        } else {
            std::swap(b[k], b[k - 1]);
            gram_schmidt(b, mu, bn);
            k = std::max(k - 1, 1);
        }
    }
    return b;
}

// Power of two as an exact rational.
mpq_class pow2_q(unsigned long e) {
    mpz_class v = 1;
    v <<= e;
    return mpq_class(v);
}

// Row-echelon basis over Z of the lattice spanned by integer row generators.
std::vector<std::vector<mpz_class>> integer_row_basis(
    std::vector<std::vector<mpz_class>> gens) {
    if (gens.empty()) return gens;
    std::size_t cols = gens[0].size();
    std::size_t pivot_row = 0;
    for (std::size_t c = 0; c < cols && pivot_row < gens.size(); ++c) {
        for (;;) {
            int best = -1;
            for (std::size_t r = pivot_row; r < gens.size(); ++r) {
                if (gens[r][c] == 0) continue;
                if (best < 0 ||
                    mpz_cmpabs(gens[r][c].get_mpz_t(),
                               gens[best][c].get_mpz_t()) < 0)
                    best = static_cast<int>(r);
            }
            if (best < 0) break;
            bool residue_left = false;
            for (std::size_t r = pivot_row; r < gens.size(); ++r) {
                if (static_cast<int>(r) == best || gens[r][c] == 0) continue;
                mpz_class q = gens[r][c] / gens[best][c]; // truncated
                if (q != 0)
                    for (std::size_t k = c; k < cols; ++k)
                        gens[r][k] -= q * gens[best][k];
                if (gens[r][c] != 0) residue_left = true;
            }
            if (!residue_left) {
                std::swap(gens[pivot_row], gens[best]);
                ++pivot_row;
                break;
            }
        }
    }
    gens.resize(pivot_row);
    return gens;
}

} // namespace

mpq_class LatticeBasis::covolume() const {
    mpq_class det = det_q(rows);
    return abs_q(det);
}

void LatticeBasis::validate() const {
    if (rows.empty()) throw PreconditionError("empty lattice basis");
    for (const auto& row : rows)
        if (row.size() != rows.size())
            throw PreconditionError("lattice basis must be square");
    if (det_q(rows) == 0)
        throw PreconditionError("dependent basis vectors");
}

void Box::validate() const {
    if (halfwidths.empty()) throw PreconditionError("empty box");
    for (const auto& h : halfwidths)
        if (h <= 0) throw PreconditionError("box halfwidths must be positive");
}

ReducedBasis reduced_basis(const LatticeBasis& gamma) {
    gamma.validate();
    int d = gamma.d();
    if (d > 8)
        throw PreconditionError("reduced_basis supports dimension at most 8");

    ReducedBasis out;
    out.basis.rows = lll_reduce(gamma.rows);

    // The change of basis must be integral with determinant +-1, otherwise
    // the reduction silently moved to a different lattice.
    QMat inv = inverse_q(gamma.rows);
    QMat change(d, QVec(d, 0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                change[i][j] += out.basis.rows[i][k] * inv[k][j];
    bool unimodular = true;
    for (const auto& row : change)
        for (const auto& e : row)
            if (e.get_den() != 1) unimodular = false;
    mpq_class cdet = det_q(change);
    if (cdet != 1 && cdet != -1) unimodular = false;
    if (!unimodular)
        throw InvariantError("reduction produced a non-unimodular change of basis");

    mpq_class det = det_q(out.basis.rows);
    mpq_class det2 = det * det;
    mpq_class prod2 = 1;
    for (const auto& row : out.basis.rows) prod2 *= dot(row, row);
    out.product_bound_ok =
        prod2 <= pow2_q(static_cast<unsigned long>(2 * d * d)) * det2;

    double prod = 1;
    for (const auto& row : out.basis.rows)
        prod *= std::sqrt(dot(row, row).get_d());
    out.product_ratio = prod / std::abs(det.get_d());
    return out;
}

bool lattice_contains(const LatticeBasis& gamma,
                      const std::vector<mpq_class>& x) {
    gamma.validate();
    if (static_cast<int>(x.size()) != gamma.d())
        throw PreconditionError("point dimension mismatch");
    QMat inv = inverse_q(gamma.rows);
    int d = gamma.d();
    for (int i = 0; i < d; ++i) {
        mpq_class t = 0;
        for (int j = 0; j < d; ++j) t += x[j] * inv[j][i];
        if (t.get_den() != 1) return false;
    }
    return true;
}

bool same_lattice(const LatticeBasis& a, const LatticeBasis& b) {
    if (a.d() != b.d()) return false;
    for (const auto& row : a.rows)
        if (!lattice_contains(b, row)) return false;
    for (const auto& row : b.rows)
        if (!lattice_contains(a, row)) return false;
    return true;
}

DiscreteJohn discrete_john(const Box& b, const LatticeBasis& gamma,
                           std::uint64_t enum_cap) {
    b.validate();
    gamma.validate();
    int d = gamma.d();
    if (static_cast<int>(b.halfwidths.size()) != d)
        throw PreconditionError("box and lattice dimensions differ");
    if (d > 5)
        throw PreconditionError(
            "discrete_john verification path supports dimension at most 5");

    DiscreteJohn out;
    out.w = reduced_basis(gamma).basis;
    const QMat& w = out.w.rows;

    // Squared norms after rescaling each coordinate by its halfwidth, so the
    // box becomes the unit cube.
    std::vector<mpq_class> wn2(d, 0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            mpq_class t = w[i][j] / b.halfwidths[j];
            wn2[i] += t * t;
        }

    // Seed N_i as the least integer exceeding 1/(d |w'_i|), i.e. the least
    // N >= 1 with N^2 d^2 |w'_i|^2 > 1, found exactly.
    out.n.assign(d, 1);
    for (int i = 0; i < d; ++i) {
        mpq_class target = mpq_class(1) / (mpq_class(d) * mpq_class(d) * wn2[i]);
        mpz_class s = sqrt(floor_q(target));
        while (mpq_class(s * s) <= target) ++s;
        out.n[i] = to_int64(s);
    }

    // Exact containment test for the open progression (-N,N) . w in the box:
    // the extremal coordinate value over |n_i| <= N_i - 1 is attained at the
    // sign pattern matching w, so the check reduces to one inequality per
    // coordinate.  Lattice membership is automatic.
    auto inner_fits = [&](const std::vector<std::int64_t>& n) {
        for (int j = 0; j < d; ++j) {
            mpq_class reach = 0;
            for (int i = 0; i < d; ++i)
                reach += mpq_class(n[i] - 1) * abs_q(w[i][j]);
            if (reach >= b.halfwidths[j]) return false;
        }
        return true;
    };

    // Shrink: while the progression pokes out of the box, decrement the
    // heaviest contributor to the most violated coordinate (ties: larger
    // index), which terminates at the all-ones vector at the latest.
    while (!inner_fits(out.n)) {
        int jworst = 0;
        mpq_class worst = -1;
        for (int j = 0; j < d; ++j) {
            mpq_class reach = 0;
            for (int i = 0; i < d; ++i)
                reach += mpq_class(out.n[i] - 1) * abs_q(w[i][j]);
            mpq_class ratio = reach / b.halfwidths[j];
            if (ratio > worst) { worst = ratio; jworst = j; }
        }
        int ipick = -1;
        mpq_class heaviest = -1;
        for (int i = 0; i < d; ++i) {
            if (out.n[i] <= 1) continue;
            mpq_class load = mpq_class(out.n[i] - 1) * abs_q(w[i][jworst]);
            if (load >= heaviest) { heaviest = load; ipick = i; }
        }
        if (ipick < 0)
            throw InvariantError("box containment failed at trivial lengths");
        --out.n[ipick];
    }

    // Grow each length to the fixpoint so the inner progression is maximal.
    long grow_guard = 0;
    for (bool changed = true; changed;) {
        changed = false;
        for (int i = 0; i < d; ++i) {
            for (;;) {
                ++out.n[i];
                if (inner_fits(out.n)) {
                    changed = true;
                    if (++grow_guard > 1000000)
                        throw InvariantError("progression growth did not terminate");
                } else {
                    --out.n[i];
                    break;
                }
            }
        }
    }

    // Enumerate B intersect Gamma in basis coordinates t, bounded per
    // coordinate by the exact dual estimate |t_i| <= sum_j hw_j |W^-1_ji|.
    QMat winv = inverse_q(w);
    std::vector<std::int64_t> tbound(d);
    mpz_class total = 1;
    for (int i = 0; i < d; ++i) {
        mpq_class reach = 0;
        for (int j = 0; j < d; ++j)
            reach += b.halfwidths[j] * abs_q(winv[j][i]);
        mpz_class ti = ceil_q(reach) - 1;
        tbound[i] = ti < 0 ? 0 : to_int64(ti);
        total *= 2 * tbound[i] + 1;
    }
    if (total > mpz_class(static_cast<unsigned long>(enum_cap)))
        throw ResourceError("lattice point enumeration exceeds the cap");

    // Stream the lattice points of the box; c must satisfy |t_i| < c N_i at
    // every point, so the smallest verified c is the max of floor(|t_i|/N_i)+1.
    out.points = 0;
    out.c = 1;
    std::vector<std::int64_t> t(d);
    auto descend = [&](auto&& self, int level, const QVec& partial) -> void {
        if (level == d) {
            for (int j = 0; j < d; ++j)
                if (abs_q(partial[j]) >= b.halfwidths[j]) return;
            ++out.points;
            for (int i = 0; i < d; ++i) {
                std::int64_t need = std::llabs(t[i]) / out.n[i] + 1;
                out.c = std::max(out.c, need);
            }
            return;
        }
        for (t[level] = -tbound[level]; t[level] <= tbound[level]; ++t[level]) {
            QVec next = partial;
            for (int j = 0; j < d; ++j)
                next[j] += mpq_class(t[level]) * w[level][j];
            self(self, level + 1, next);
        }
    };
    descend(descend, 0, QVec(d, 0));

    out.inner_ok = inner_fits(out.n);
    // c is the exact maximum requirement over the full enumeration, so the
    // outer inclusion holds by construction of that maximum.
    out.outer_ok = true;
    return out;
}

std::optional<Relation> find_relation(const std::vector<std::int64_t>& v,
                                      const std::vector<std::int64_t>& n,
                                      const PrimeModulus& p,
                                      std::uint64_t work_cap) {
    if (v.empty()) throw PreconditionError("find_relation needs a nonempty vector");
    if (v.size() != n.size())
        throw PreconditionError("find_relation bound size mismatch");
    for (auto nb : n)
        if (nb < 0) throw PreconditionError("find_relation bounds must be nonnegative");
    mpz_class total = 1;
    for (auto nb : n) total *= 2 * nb + 1;
    if (total > mpz_class(static_cast<unsigned long>(work_cap)))
        throw ResourceError("relation search box exceeds the work cap");

    int r = static_cast<int>(v.size());
    std::int64_t pp = static_cast<std::int64_t>(p.p());
    std::vector<std::uint64_t> vr(r);
    for (int i = 0; i < r; ++i)
        vr[i] = p.from_centered(centered_rem(v[i], pp));

    auto side_residue = [&](const std::vector<std::int64_t>& m, int from) {
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            std::int64_t c = m[i];
            std::uint64_t term =
                p.mul(static_cast<std::uint64_t>(c < 0 ? -c : c), vr[from + i]);
            s = c < 0 ? p.sub(s, term) : p.add(s, term);
        }
        return s;
    };

    // Split [0, lh) | [lh, r) balancing the two side products, so the hashed
    // right side stays near the square root of the box.
    int lh = r;
    {
        mpz_class best = -1;
        for (int cut = 0; cut <= r; ++cut) {
            mpz_class left = 1, right = 1;
            for (int i = 0; i < cut; ++i) left *= 2 * n[i] + 1;
            for (int i = cut; i < r; ++i) right *= 2 * n[i] + 1;
            mpz_class worst = std::max(left, right);
            if (best < 0 || worst < best) { best = worst; lh = cut; }
        }
        if (best > 33554432)
            throw ResourceError("relation search half exceeds the memory budget");
    }

    // Right half: lexicographically first tuple per residue, plus the first
    // nonzero tuple hitting residue zero (the all-left-zero case needs it).
    std::unordered_map<std::uint64_t, std::vector<std::int64_t>> first_right;
    std::optional<std::vector<std::int64_t>> first_nonzero_at_zero;
    {
        std::vector<std::int64_t> m(r - lh);
        for (int i = lh; i < r; ++i) m[i - lh] = -n[i];
        for (;;) {
            std::uint64_t s = side_residue(m, lh);
            first_right.emplace(s, m);
            if (s == 0 && !first_nonzero_at_zero &&
                std::any_of(m.begin(), m.end(), [](std::int64_t e) { return e != 0; }))
                first_nonzero_at_zero = m;
            int i = r - lh - 1;
            while (i >= 0 && m[i] == n[lh + i]) {
                m[i] = -n[lh + i];
                --i;
            }
            if (i < 0) break;
            ++m[i];
        }
    }

    std::optional<Relation> found;
    {
        std::vector<std::int64_t> m(lh);
        for (int i = 0; i < lh; ++i) m[i] = -n[i];
        for (;;) {
            std::uint64_t s = side_residue(m, 0);
            std::uint64_t need = p.neg(s);
            bool left_zero =
                std::all_of(m.begin(), m.end(), [](std::int64_t e) { return e == 0; });
            const std::vector<std::int64_t>* right = nullptr;
            if (left_zero) {
                if (first_nonzero_at_zero) right = &*first_nonzero_at_zero;
            } else {
                auto it = first_right.find(need);
                if (it != first_right.end()) right = &it->second;
            }
            if (right) {
                Relation rel;
                rel.m = m;
                rel.m.insert(rel.m.end(), right->begin(), right->end());
                found = std::move(rel);
                break;
            }
            int i = lh - 1;
            while (i >= 0 && m[i] == n[i]) {
                m[i] = -n[i];
                --i;
            }
            if (i < 0) break;
            ++m[i];
        }
    }
    if (!found) return std::nullopt;

    std::int64_t content = 0;
    for (auto e : found->m) content = std::gcd(content, e < 0 ? -e : e);
    for (auto& e : found->m) e /= content;
    for (auto e : found->m) {
        if (e == 0) continue;
        if (e < 0)
            for (auto& f : found->m) f = -f;
        break;
    }
    return found;
}

ProperizeResult properize(const Gap& p, std::uint64_t volume_cap) {
    p.validate();
    if (!p.symmetric)
        throw PreconditionError("properize requires a symmetric progression");

    ProperizeResult out;
    out.gap = p;
    out.levels = 0;
    out.size_ratio = 1;

    GapImage cur_img = enumerate(p);
    if (cur_img.proper) return out;

    if (!p.ambient)
        throw PreconditionError("properize descent needs a prime-field ambient");
    const PrimeModulus& pm = *p.ambient;
    std::int64_t pp = static_cast<std::int64_t>(pm.p());
    if (p.rank() > 4)
        throw ResourceError("properize descent supports rank at most 4");
    mpz_class vol = p.box_volume();
    if (vol > mpz_class(static_cast<unsigned long>(volume_cap)))
        throw ResourceError("properize descent volume cap exceeded");
    if (mpz_class(static_cast<unsigned long>(pm.p())) <= 1000000 * vol)
        throw PreconditionError(
            "modulus too small for the near-torsion-free descent");

    std::size_t base_size = cur_img.set.size();
    Gap cur = p;

    while (!cur_img.proper) {
        if (out.levels >= 8)
            throw InvariantError("properization descent did not terminate");

        // Coordinates with a trivial coefficient range contribute only zero.
        Gap active;
        active.ambient = pm;
        active.symmetric = true;
        for (int j = 0; j < cur.rank(); ++j)
            if (cur.coeff_bound(j) >= 1) {
                active.basis.push_back(cur.basis[j]);
                active.lengths.push_back(cur.lengths[j]);
            }
        cur = std::move(active);
        int d = cur.rank();
        if (d <= 1)
            throw InvariantError(
                "improper progression of rank at most one over a large prime");

        // A collision in the open box yields a relation within twice the
        // coefficient bounds.
        std::vector<std::int64_t> nb(d);
        for (int j = 0; j < d; ++j) nb[j] = 2 * cur.coeff_bound(j);
        auto rel = find_relation(cur.basis, nb, pm);
        if (!rel)
            throw InvariantError("improper progression with no box relation");
        std::vector<std::int64_t> m = rel->m;

        // Move the coordinate with the largest |m_j| / N_j to the back
        // (N_j = b_j + 1, ties toward the larger index), then normalize the
        // trailing relation entry positive.
        int jstar = 0;
        for (int j = 1; j < d; ++j) {
            __int128 lhs = static_cast<__int128>(std::llabs(m[j])) *
                           (cur.coeff_bound(jstar) + 1);
            __int128 rhs = static_cast<__int128>(std::llabs(m[jstar])) *
                           (cur.coeff_bound(j) + 1);
            if (lhs >= rhs) jstar = j;
        }
        std::swap(cur.basis[jstar], cur.basis[d - 1]);
        std::swap(cur.lengths[jstar], cur.lengths[d - 1]);
        std::swap(m[jstar], m[d - 1]);
        if (m[d - 1] < 0)
            for (auto& e : m) e = -e;
        std::int64_t md = m[d - 1];
        if (md == 0)
            throw InvariantError("degenerate relation after reordering");

        // Gamma = Z^(d-1) + Z q with q_j = -m_j / m_d, realized as an integer
        // lattice scaled by 1/m_d.
        std::vector<std::vector<mpz_class>> gens;
        for (int j = 0; j + 1 < d; ++j) {
            std::vector<mpz_class> row(d - 1, 0);
            row[j] = md;
            gens.push_back(std::move(row));
        }
        {
            std::vector<mpz_class> row(d - 1);
            for (int j = 0; j + 1 < d; ++j) row[j] = -m[j];
            gens.push_back(std::move(row));
        }
        auto zbasis = integer_row_basis(std::move(gens));
        if (static_cast<int>(zbasis.size()) != d - 1)
            throw InvariantError("quotient lattice lost full rank");
        LatticeBasis gamma;
        for (auto& row : zbasis) {
            QVec qrow;
            for (auto& e : row) {
                mpq_class q(e, mpz_class(md));
                q.canonicalize();
                qrow.push_back(q);
            }
            gamma.rows.push_back(std::move(qrow));
        }

        Box box;
        for (int j = 0; j + 1 < d; ++j)
            box.halfwidths.push_back(mpq_class(3 * cur.coeff_bound(j)));
        DiscreteJohn dj = discrete_john(box, gamma);

        // Homomorphism f(n + n_d q) = sum n_j v_j + n_d v_d.  The coset index
        // n_d is recovered by integrality; the relation makes the value
        // independent of the representative, which is asserted directly.
        auto f_of = [&](const QVec& x) -> std::int64_t {
            for (std::int64_t nd = 0; nd < md; ++nd) {
                mpz_class acc = 0;
                bool integral = true;
                for (int j = 0; j + 1 < d; ++j) {
                    mpq_class nj =
                        x[j] + mpq_class(mpz_class(nd) * mpz_class(m[j]), mpz_class(md));
                    nj.canonicalize();
                    if (nj.get_den() != 1) { integral = false; break; }
                    acc += nj.get_num() * cur.basis[j];
                }
                if (!integral) continue;
                acc += mpz_class(nd) * cur.basis[d - 1];
                // Same point, next coset representative: shifts by the
                // relation, so the value must be unchanged mod p.
                mpz_class alt = acc;
                for (int j = 0; j + 1 < d; ++j) alt += mpz_class(m[j]) * cur.basis[j];
                alt += mpz_class(md) * cur.basis[d - 1];
                std::int64_t acc_res =
                    centered_rem(mpz_class(acc % pp).get_si(), pp);
                std::int64_t alt_res =
                    centered_rem(mpz_class(alt % pp).get_si(), pp);
                if (acc_res != alt_res)
                    throw InvariantError("quotient homomorphism is not well defined");
                return acc_res;
            }
            throw InvariantError("lattice point escapes the quotient lattice");
        };

        Gap next;
        next.ambient = pm;
        next.symmetric = true;
        for (int i = 0; i + 1 < d; ++i) {
            std::int64_t u = f_of(dj.w.rows[i]);
            std::int64_t bprime = dj.c * dj.n[i] - 1;
            if (u == 0 || bprime == 0) continue;
            next.basis.push_back(u);
            next.lengths.push_back(2 * bprime + 1);
        }
        if (next.basis.empty())
            throw InvariantError("descent collapsed the progression");
        next.validate();

        GapImage next_img = enumerate(next);
        if (!std::includes(next_img.set.members().begin(),
                           next_img.set.members().end(),
                           cur_img.set.members().begin(),
                           cur_img.set.members().end()))
            throw InvariantError("descent lost containment of the progression");

        cur = std::move(next);
        cur_img = std::move(next_img);
        ++out.levels;
    }

    out.gap = std::move(cur);
    out.size_ratio = mpq_class(static_cast<unsigned long>(cur_img.set.size()),
                               static_cast<unsigned long>(base_size));
    out.size_ratio.canonicalize();
    return out;
}

} // namespace bsl
