#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <vector>

#include "bsl/error.hpp"
#include "bsl/gap.hpp"
#include "bsl/lattice.hpp"
#include "bsl/prime.hpp"
#include "bsl/rng.hpp"
#include "bsl/zset.hpp"

using namespace bsl;

namespace {

LatticeBasis basis_of(std::vector<std::vector<std::int64_t>> rows) {
    LatticeBasis b;
    for (const auto& r : rows) {
        std::vector<mpq_class> row;
        for (std::int64_t x : r) row.emplace_back(x);
        b.rows.push_back(std::move(row));
    }
    return b;
}

LatticeBasis random_basis(SplitMix64& gen, int d, std::int64_t bound) {
    for (;;) {
        LatticeBasis b;
        for (int i = 0; i < d; ++i) {
            std::vector<mpq_class> row;
            for (int j = 0; j < d; ++j) row.emplace_back(gen.next_in(-bound, bound));
            b.rows.push_back(std::move(row));
        }
        if (b.covolume() != 0) return b;
    }
}

Gap make_gap(std::vector<std::int64_t> basis, std::vector<std::int64_t> lengths,
             const PrimeModulus& p) {
    Gap g;
    g.basis = std::move(basis);
    g.lengths = std::move(lengths);
    g.ambient = p;
    return g;
}

} // namespace

TEST_CASE("basis validation and covolume") {
    LatticeBasis empty;
    CHECK_THROWS_AS(empty.validate(), PreconditionError);
    LatticeBasis ragged = basis_of({{1, 2}, {3}});
    CHECK_THROWS_AS(ragged.validate(), PreconditionError);
    LatticeBasis singular = basis_of({{1, 2}, {2, 4}});
    CHECK_THROWS_AS(singular.validate(), PreconditionError);
    CHECK(basis_of({{2, 0}, {0, 3}}).covolume() == 6);
    CHECK(basis_of({{0, 1}, {1, 0}}).covolume() == 1);
}

TEST_CASE("reduction preserves the lattice and certifies the product bound") {
    SplitMix64 gen(900);
    for (int t = 0; t < 25; ++t) {
        const int d = 1 + static_cast<int>(gen.next_below(4));
        const LatticeBasis b = random_basis(gen, d, 9);
        const ReducedBasis r = reduced_basis(b);
        CHECK(same_lattice(b, r.basis));
        CHECK(r.product_bound_ok);
        CHECK(r.product_ratio >= 1.0 - 1e-9);
        CHECK(r.basis.covolume() == b.covolume());
    }
    // A known skew basis reduces to the identity lattice shape.
    const ReducedBasis r = reduced_basis(basis_of({{1, 0}, {99, 1}}));
    CHECK(r.product_ratio == doctest::Approx(1.0));
}

TEST_CASE("membership in a lattice is exact") {
    const LatticeBasis b = basis_of({{2, 1}, {0, 3}});
    CHECK(lattice_contains(b, {mpq_class(2), mpq_class(1)}));
    CHECK(lattice_contains(b, {mpq_class(2), mpq_class(4)}));
    CHECK(lattice_contains(b, {mpq_class(0), mpq_class(0)}));
    CHECK(!lattice_contains(b, {mpq_class(1), mpq_class(0)}));
    CHECK(!lattice_contains(b, {mpq_class(1, 2), mpq_class(1)}));
    CHECK(same_lattice(b, basis_of({{2, 4}, {0, 3}})));
    CHECK(!same_lattice(b, basis_of({{1, 0}, {0, 1}})));
}

TEST_CASE("box sandwich on the integer lattice") {
    Box b;
    b.halfwidths = {mpq_class(5), mpq_class(5)};
    const DiscreteJohn dj = discrete_john(b, basis_of({{1, 0}, {0, 1}}));
    CHECK(dj.n == std::vector<std::int64_t>{5, 5});
    CHECK(dj.c == 1);
    CHECK(dj.points == 81);
    CHECK(dj.inner_ok);
    CHECK(dj.outer_ok);
}

TEST_CASE("box sandwich in one dimension") {
    Box b;
    b.halfwidths = {mpq_class(15, 2)};
    const DiscreteJohn dj = discrete_john(b, basis_of({{1}}));
    CHECK(dj.n == std::vector<std::int64_t>{8});
    CHECK(dj.c == 1);
    CHECK(dj.points == 15);
    CHECK(dj.inner_ok);
    CHECK(dj.outer_ok);
}

TEST_CASE("box sandwich inclusions hold on random instances") {
    SplitMix64 gen(901);
    for (int t = 0; t < 25; ++t) {
        const int d = 1 + static_cast<int>(gen.next_below(3));
        const LatticeBasis gb = random_basis(gen, d, 4);
        Box b;
        for (int j = 0; j < d; ++j) {
            mpq_class h(gen.next_in(2, 12), gen.next_in(1, 2));
            h.canonicalize();
            b.halfwidths.push_back(h);
        }
        const DiscreteJohn dj = discrete_john(b, gb);
        CHECK(dj.inner_ok);
        CHECK(dj.outer_ok);
        CHECK(dj.points >= 1); // 0 is always a section point
        CHECK(dj.c >= 1);
        for (std::int64_t nj : dj.n) CHECK(nj >= 1);
    }
}

TEST_CASE("relation search matches the worked examples") {
    const PrimeModulus p(10000000019ULL);
    const auto r = find_relation({1, 2}, {2, 1}, p);
    REQUIRE(r.has_value());
    CHECK(r->m == std::vector<std::int64_t>{2, -1});
    CHECK(!find_relation({1, 3}, {1, 1}, p).has_value());
}

TEST_CASE("relation search equals the naive first odometer hit") {
    SplitMix64 gen(902);
    const PrimeModulus p(101);
    const std::int64_t pp = 101;
    for (int t = 0; t < 60; ++t) {
        const int d = 1 + static_cast<int>(gen.next_below(4));
        std::vector<std::int64_t> v(d), n(d);
        for (int j = 0; j < d; ++j) {
            v[j] = gen.next_in(1, 100);
            n[j] = gen.next_in(0, 3);
        }
        // Naive: first nonzero m with m.v = 0 mod p, scanning each entry
        // from -n_j to n_j with the last index moving fastest.
        std::optional<std::vector<std::int64_t>> naive;
        std::vector<std::int64_t> m(d);
        for (int j = 0; j < d; ++j) m[j] = -n[j];
        for (;;) {
            std::int64_t s = 0;
            bool zero = true;
            for (int j = 0; j < d; ++j) {
                s += m[j] * v[j];
                zero &= m[j] == 0;
            }
            if (!zero && ((s % pp) + pp) % pp == 0) {
                naive = m;
                break;
            }
            int j = d - 1;
            while (j >= 0 && m[j] == n[j]) {
                m[j] = -n[j];
                --j;
            }
            if (j < 0) break;
            ++m[j];
        }
        if (naive) {
            // Canonicalize the naive hit the same way: content one, first
            // nonzero entry positive.
            std::int64_t g = 0;
            for (std::int64_t x : *naive) g = std::gcd(g, std::llabs(x));
            for (std::int64_t& x : *naive) x /= g;
            for (std::int64_t x : *naive) {
                if (x == 0) continue;
                if (x < 0)
                    for (std::int64_t& y : *naive) y = -y;
                break;
            }
        }
        const auto got = find_relation(v, n, p);
        CHECK(got.has_value() == naive.has_value());
        if (got && naive) CHECK(got->m == *naive);
    }
}

TEST_CASE("properization of the worked improper example") {
    const PrimeModulus p(10000000019ULL);
    const ProperizeResult r = properize(make_gap({1, 2}, {5, 3}, p));
    CHECK(r.levels == 1);
    CHECK(r.gap.rank() == 1);
    CHECK(r.gap.basis == std::vector<std::int64_t>{1});
    CHECK(r.gap.lengths == std::vector<std::int64_t>{11});
    CHECK(r.size_ratio == mpq_class(11, 9));
    CHECK(is_proper(r.gap));
}

TEST_CASE("properization collapses a fully degenerate pair") {
    const PrimeModulus p(10000000019ULL);
    const ProperizeResult r = properize(make_gap({1, 1}, {3, 3}, p));
    CHECK(r.gap.rank() == 1);
    CHECK(r.gap.lengths == std::vector<std::int64_t>{5});
    CHECK(r.size_ratio == 1);
    const GapImage in = enumerate(make_gap({1, 1}, {3, 3}, p));
    const GapImage out = enumerate(r.gap);
    for (std::int64_t x : in.set.members()) CHECK(out.set.contains(x));
}

TEST_CASE("proper input passes through unchanged") {
    const PrimeModulus p(10000000019ULL);
    const Gap g = make_gap({1, 100}, {5, 3}, p);
    const ProperizeResult r = properize(g);
    CHECK(r.levels == 0);
    CHECK(r.size_ratio == 1);
    CHECK(r.gap.basis == g.basis);
    CHECK(r.gap.lengths == g.lengths);
}

TEST_CASE("properization rejects unusable inputs") {
    const PrimeModulus small(17);
    // Improper input needs the big-prime precondition on the descent path.
    CHECK_THROWS_AS(properize(make_gap({1, 2}, {5, 3}, small)),
                    PreconditionError);
    Gap plain;
    plain.basis = {1, 2};
    plain.lengths = {5, 3};
    CHECK_THROWS_AS(properize(plain), PreconditionError);
    Gap asym = make_gap({1, 2}, {5, 3}, PrimeModulus(10000000019ULL));
    asym.symmetric = false;
    asym.offset = 1;
    CHECK_THROWS_AS(properize(asym), PreconditionError);
}

TEST_CASE("properized output contains the input on random improper gaps") {
    SplitMix64 gen(903);
    const PrimeModulus p(10000000019ULL);
    for (int t = 0; t < 20; ++t) {
        // Construct a guaranteed collision: m1 v1 + m2 v2 = 0 mod p with
        // coefficients inside the box.
        const std::int64_t v1 = gen.next_in(1, 50);
        const std::int64_t m1 = gen.next_in(1, 2), m2 = gen.next_in(1, 2);
        const std::uint64_t v2u =
            p.mul(p.from_centered(-m1 * v1), p.inv(p.from_centered(m2)));
        const std::int64_t v2 = p.centered(v2u);
        const std::int64_t l1 = 2 * gen.next_in(m1, 4) + 1;
        const std::int64_t l2 = 2 * gen.next_in(m2, 4) + 1;
        const Gap g = make_gap({v1, v2}, {l1, l2}, p);
        REQUIRE(!is_proper(g));
        const ProperizeResult r = properize(g);
        CHECK(is_proper(r.gap));
        CHECK(r.gap.rank() <= g.rank());
        CHECK(r.levels >= 1);
        const GapImage in = enumerate(g);
        const GapImage out = enumerate(r.gap);
        for (std::int64_t x : in.set.members()) CHECK(out.set.contains(x));
        mpq_class ratio(out.set.size(), in.set.size());
        ratio.canonicalize();
        CHECK(r.size_ratio == ratio);
    }
}
