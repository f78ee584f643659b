#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "bsl/error.hpp"
#include "bsl/fourier.hpp"
#include "bsl/hyperplane.hpp"
#include "bsl/intutil.hpp"
#include "bsl/rng.hpp"
#include "bsl/zset.hpp"
#include "oracles.hpp"

using namespace bsl;

TEST_CASE("epsilon chain validation and derived quantities") {
    const ParamChain def;
    CHECK(def.eps0() == 1);
    CHECK(def.eps1() == mpq_class(1, 100));
    CHECK(def.eps2() == mpq_class(1, 10000));
    CHECK(def.mu() == mpq_class(6, 25));
    CHECK(def.sample_count(100) == 1);
    CHECK(def.sample_count(1000) == 10);
    CHECK(def.sample_count(50) == 1); // halves round up
    CHECK(def.sample_count(10) == 0);
    CHECK_THROWS_AS(ParamChain(2, mpq_class(1, 100), mpq_class(1, 10000)),
                    PreconditionError);
    CHECK_THROWS_AS(ParamChain(1, mpq_class(1, 10000), mpq_class(1, 100)),
                    PreconditionError);
}

TEST_CASE("pointwise transforms stay in range and are even") {
    const NormalVector a({1, 2, 3});
    const PrimeModulus p = choose_scan_prime(a.coeffs());
    for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(p.p()); ++xi) {
        const double f = f_value(a, xi, p);
        const double gv = g_value(a, xi, p, 0.24);
        CHECK(f >= 0);
        CHECK(f <= 1);
        CHECK(gv >= 0);
        CHECK(gv <= 1);
        const std::int64_t mirror = static_cast<std::int64_t>(p.p()) - xi;
        if (xi > 0) {
            CHECK(f == doctest::Approx(f_value(a, mirror, p)).epsilon(1e-12));
        }
    }
    CHECK(f_value(a, 0, p) == doctest::Approx(1.0));
    CHECK(g_value(a, 0, p, 0.24) == doctest::Approx(1.0));
}

TEST_CASE("character sum reproduces the cube count bridge") {
    SplitMix64 gen(600);
    for (int t = 0; t < 12; ++t) {
        const int n = 2 + static_cast<int>(gen.next_below(9));
        const NormalVector a(oracle::random_coeffs(gen, n, 20));
        const PrimeModulus p = choose_scan_prime(a.coeffs());
        const double exact = mpq_class(lo_count(a), pow2(n)).get_d();
        CHECK(std::abs(prob_X_fourier(a, p, 2) - exact) <= 1e-9);
    }
}

TEST_CASE("sparse character sum reproduces the dynamic programming value") {
    SplitMix64 gen(601);
    const SparseLaw law = SparseLaw::from_eps0(1);
    for (int t = 0; t < 8; ++t) {
        const int n = 2 + static_cast<int>(gen.next_below(6));
        const NormalVector a(oracle::random_coeffs(gen, n, 12));
        const PrimeModulus p = choose_scan_prime(a.coeffs());
        const double exact = prob_Y_hyperplane(a, law).get_d();
        CHECK(std::abs(prob_Y_fourier(a, p, law.mu().get_d(), 2) - exact) <= 1e-9);
    }
}

TEST_CASE("scalar inequality holds at mu = 1/4 and breaks just above") {
    const ScalarInequalityScan good = scalar_inequality_scan(0.25);
    CHECK(good.violations == 0);
    const ScalarInequalityScan bad = scalar_inequality_scan(0.26);
    CHECK(bad.violations > 0);
    CHECK(bad.max_violation > 0);
}

TEST_CASE("pointwise domination chain f <= g^(1/4mu) <= g") {
    SplitMix64 gen(602);
    for (int t = 0; t < 5; ++t) {
        const int n = 2 + static_cast<int>(gen.next_below(5));
        const NormalVector a(oracle::random_coeffs(gen, n, 15));
        const PrimeModulus p = choose_scan_prime(a.coeffs());
        const ComparisonReport rep = comparison_check(a, p, mpq_class(6, 25));
        CHECK(rep.ok);
        CHECK(rep.scalar.violations == 0);
        CHECK(rep.max_f_vs_chain <= 1e-12);
        CHECK(rep.max_chain_vs_g <= 1e-12);
    }
}

TEST_CASE("spectrum of the all-ones vector is frozen") {
    const NormalVector a({1, 1, 1, 1});
    const PrimeModulus p(17);
    const Spectrum s(a, p, 1e-4, 2);
    CHECK(s.size() == 15);
    CHECK(s.prime().p() == 17);
    // f is even, so the member set is symmetric and contains 0.
    bool has_zero = false;
    for (std::int64_t xi : s.members()) {
        has_zero |= xi == 0;
        bool mirrored = false;
        for (std::int64_t other : s.members()) mirrored |= other == -xi;
        CHECK(mirrored);
    }
    CHECK(has_zero);
    // Threads must not change the member list.
    const Spectrum s1(a, p, 1e-4, 1);
    CHECK(s1.members() == s.members());
}

TEST_CASE("difference histogram covers all pairs") {
    const NormalVector a({1, 1, 1, 1});
    const Spectrum s(a, PrimeModulus(17), 1e-4, 1);
    REQUIRE(s.has_difference_histogram());
    std::uint64_t total = 0;
    for (const auto& [v, mult] : s.difference_histogram()) total += mult;
    CHECK(total == s.size() * s.size());
}

TEST_CASE("lambda norm basics") {
    const NormalVector a({1, 1, 1, 1});
    const Spectrum s(a, PrimeModulus(17), 1e-4, 1);
    CHECK(lambda_norm(0, s) == doctest::Approx(0.0));
    for (std::int64_t x = 1; x < 17; ++x) {
        CHECK(lambda_norm(x, s) >= 0);
        CHECK(lambda_norm(x, s) == doctest::Approx(lambda_norm(17 - x, s)));
    }
}

TEST_CASE("bohr set of the all-ones spectrum is the origin") {
    const NormalVector a({1, 1, 1, 1});
    const Spectrum s(a, PrimeModulus(17), 1e-4, 1);
    const CombDim d = comb_dimension(a);
    const BohrReport b = bohr_set(s, 0.01, &d);
    CHECK(b.size == 1);
    REQUIRE(b.members.size() == 1);
    CHECK(b.members[0] == 0);
    CHECK(b.doubled_size == 1);
    REQUIRE(b.ratio_size.has_value());
    CHECK(*b.ratio_size == doctest::Approx(std::exp2(2.75 - 4.0)));
}

TEST_CASE("transform normalization") {
    const NormalVector a({1, 1, 1, 1});
    const Spectrum s(a, PrimeModulus(17), 1e-4, 1);
    CHECK(std::abs(h_transform(0, s) - std::complex<double>(1, 0)) < 1e-12);
    for (std::int64_t x = 0; x < 17; ++x) {
        CHECK(std::abs(h_transform(x, s)) <= 1 + 1e-12);
    }
}

TEST_CASE("parseval identity holds on constructed spectra") {
    SplitMix64 gen(603);
    for (int t = 0; t < 6; ++t) {
        const int n = 3 + static_cast<int>(gen.next_below(5));
        const NormalVector a(oracle::random_coeffs(gen, n, 10));
        const PrimeModulus p = choose_scan_prime(a.coeffs());
        const Spectrum s(a, p, 1e-4, 2);
        if (s.size() == 0) continue;
        const ParsevalReport rep = parseval_check(s);
        CHECK(rep.ok);
        CHECK(rep.rel_residual <= 1e-6);
        CHECK(rep.bridge_lower_max_violation <= 1e-9);
        CHECK(rep.bridge_upper_max_violation <= 1e-9);
    }
}

TEST_CASE("representation counts satisfy the exact identities") {
    const NormalVector a({1, 1, 1, 1});
    const Spectrum s(a, PrimeModulus(17), 1e-4, 1);
    for (int k = 2; k <= 4; ++k) {
        const RepCounts rc = rep_counts(s, k);
        CHECK(rc.total_ok);
        CHECK(rc.cauchy_schwarz_ok);
        CHECK(rc.transform_ok);
        mpz_class total = 0;
        for (std::uint64_t c : rc.counts) total += c;
        CHECK(total == rc.total);
        CHECK(rc.total == mpz_pow(mpz_class(s.size()), k));
        // Support equals the iterated cyclic sumset of the member list.
        ZSet lam(s.members(), PrimeModulus(17));
        CHECK(rc.support == iterated_sumset(lam, k).size());
    }
}

TEST_CASE("exceptional classification at the frozen example") {
    const NormalVector a({1, 1, 1, 1});
    const ExceptionalReport r =
        classify_exceptional(a, PrimeModulus(17), ParamChain());
    CHECK(r.exceptional);
    CHECK(r.p_x == mpq_class(3, 8));
    CHECK(r.p_y == mpq_class(33959, 78125));

    // A lacunary vector misses the cube entirely and cannot be exceptional.
    const NormalVector b({1, 2, 4, 8});
    const ExceptionalReport rb =
        classify_exceptional(b, choose_scan_prime(b.coeffs()), ParamChain());
    CHECK(!rb.exceptional);
    CHECK(rb.p_x == 0);
}

TEST_CASE("spectrum growth bounds hold with the covering constant") {
    const NormalVector a({1, 1, 1, 1});
    const Spectrum s(a, PrimeModulus(17), 1e-4, 1);
    const GrowthTable t = lambda_growth(s, 8);
    CHECK(t.all_bounds_ok);
    CHECK(t.doubling >= 1.0);
    REQUIRE(t.covering_constant.has_value());
    CHECK(*t.covering_constant >= 1);
    std::uint64_t prev = 0;
    for (const GrowthRow& r : t.rows) {
        CHECK(r.size >= prev); // 0 is a member, so iterated sums nest
        prev = r.size;
        if (r.bound_checked) CHECK(r.bound_ok);
    }
}
