#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>

#include "bsl/error.hpp"
#include "bsl/intutil.hpp"
#include "bsl/singularity.hpp"
#include "oracles.hpp"

using namespace bsl;

TEST_CASE("exact counts equal the naive full enumeration for n <= 4") {
    for (int n = 1; n <= 4; ++n) {
        const ExactCount ec = exact_singularity_count(n, 2);
        CHECK(ec.singular_count == oracle::singular_count_naive(n));
        CHECK(ec.total == pow2(static_cast<unsigned long>(n) * n));
        CHECK(ec.singular_count == ec.normalized_count * pow2(2 * n - 1));
        mpq_class p(ec.singular_count, ec.total);
        p.canonicalize();
        CHECK(ec.probability == p);
    }
    CHECK(exact_singularity_count(2, 1).probability == mpq_class(1, 2));
    CHECK(exact_singularity_count(3, 1).probability == mpq_class(5, 8));
    CHECK(exact_singularity_count(4, 1).probability == mpq_class(169, 256));
}

TEST_CASE("n = 5 representative count is frozen against an external recount") {
    // 42976 singular representatives among 2^16, recomputed independently
    // from a full cofactor sweep of the first-row-and-column-ones matrices.
    const ExactCount ec = exact_singularity_count(5, 4);
    CHECK(ec.normalized_count == 42976);
    CHECK(ec.probability == mpq_class(1343, 2048));
}

TEST_CASE("counts are identical for every worker count") {
    const ExactCount one = exact_singularity_count(4, 1);
    const ExactCount many = exact_singularity_count(4, 8);
    CHECK(one.singular_count == many.singular_count);
}

TEST_CASE("size cap is enforced") {
    CHECK_THROWS_AS(exact_singularity_count(9, 1), ResourceError);
    CHECK_THROWS_AS(exact_singularity_count(0, 1), PreconditionError);
}

TEST_CASE("witness scan equals the naive event count for n <= 4") {
    for (int n = 2; n <= 4; ++n) {
        const WitnessCount wc = witness_count_exhaustive(n, 2);
        CHECK(wc.event_count == oracle::witness_count_naive(n));
    }
}

TEST_CASE("witness formula matches the scan and known closed values") {
    for (int n = 2; n <= 5; ++n) {
        const WitnessCount wc = witness_count_exhaustive(n, 4);
        CHECK(witness_probability(n) == wc.probability);
    }
    CHECK(witness_probability(2) == mpq_class(1, 2));
    CHECK(witness_probability(3) == mpq_class(5, 8));
    CHECK(witness_probability(4) == mpq_class(169, 256));
    CHECK(witness_probability(5) == mpq_class(5147, 8192));
    CHECK(witness_probability(6) == mpq_class(2294539, 4194304));
    CHECK(witness_probability(7) == mpq_class("947010773/2147483648"));
}

TEST_CASE("monte carlo estimates are deterministic and calibrated") {
    const MCEstimate a = mc_singularity_estimate(4, 20000, 42, 1);
    const MCEstimate b = mc_singularity_estimate(4, 20000, 42, 8);
    CHECK(a.hits == b.hits);
    CHECK(a.estimate == b.estimate);
    const MCEstimate c = mc_singularity_estimate(4, 20000, 43, 1);
    CHECK(a.hits != c.hits); // different seed, different stream

    const double exact = mpq_class(169, 256).get_d();
    CHECK(std::abs(a.estimate - exact) < 5 * a.ci_halfwidth);
}

TEST_CASE("bound report fills the exact column only up to the cap") {
    const auto rows = bound_report(7, 2, 5);
    REQUIRE(rows.size() == 7);
    for (const BoundRow& r : rows) {
        CHECK(r.exact_available == (r.n <= 5));
        CHECK(r.witness_prob >= 0);
        if (r.exact_available) {
            // The witness event forces singularity, so its probability is a
            // lower bound on the exact one.
            CHECK(r.witness_prob <= r.p_exact);
        }
        CHECK(r.witness_cross_checked == (r.n <= 5));
        CHECK(r.ref_quadratic == doctest::Approx(r.n * r.n * std::pow(2.0, 1 - r.n)));
        CHECK(r.ref_three_quarters == doctest::Approx(std::pow(0.75, r.n)));
    }
    CHECK(rows[0].quadratic_exceeds_one == false); // n=1: 1*2^0 = 1
    CHECK(rows[1].quadratic_exceeds_one == true);  // n=2: 4*2^-1 = 2
    CHECK(rows[6].quadratic_exceeds_one == false); // n=7: 49*2^-6 < 1
}
