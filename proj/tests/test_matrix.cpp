#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "bsl/int_matrix.hpp"
#include "bsl/prime.hpp"
#include "bsl/rng.hpp"
#include "bsl/sign_matrix.hpp"
#include "oracles.hpp"

using namespace bsl;

namespace {

IntMatrix random_matrix(SplitMix64& gen, int rows, int cols, std::int64_t bound) {
    IntMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m.at(i, j) = gen.next_in(-bound, bound);
    return m;
}

} // namespace

TEST_CASE("bareiss determinant equals cofactor expansion") {
    SplitMix64 gen(2024);
    for (int n = 1; n <= 5; ++n) {
        for (int t = 0; t < 40; ++t) {
            const IntMatrix m = random_matrix(gen, n, n, 9);
            CHECK(det_bareiss(m) == oracle::det_cofactor(m));
        }
    }
    // Forced singular instance: duplicate row.
    IntMatrix s = random_matrix(gen, 4, 4, 9);
    for (int j = 0; j < 4; ++j) s.at(3, j) = s.at(0, j);
    CHECK(det_bareiss(s) == 0);
}

TEST_CASE("modular rank agrees with exact rank away from bad primes") {
    SplitMix64 gen(77);
    const PrimeModulus p(10000000019ULL);
    for (int t = 0; t < 60; ++t) {
        const int rows = 1 + static_cast<int>(gen.next_below(5));
        const int cols = 1 + static_cast<int>(gen.next_below(5));
        const IntMatrix m = random_matrix(gen, rows, cols, 9);
        CHECK(rank_mod_p(m, p) == rank_exact(m));
    }
    CHECK(rank_exact(IntMatrix::identity(4)) == 4);
    CHECK(rank_exact(IntMatrix(3, 3)) == 0);
}

TEST_CASE("small prime can undercount rank, big prime cannot") {
    // 17 = 0 mod 17, so this rank-1 matrix drops to rank 0 mod 17.
    const IntMatrix m = IntMatrix::from_rows({{17}});
    CHECK(rank_exact(m) == 1);
    CHECK(rank_mod_p(m, PrimeModulus(17)) == 0);
    CHECK(rank_mod_p(m, PrimeModulus(19)) == 1);
}

TEST_CASE("kernel vectors are exact kernel members in lowest terms") {
    SplitMix64 gen(31337);
    for (int t = 0; t < 60; ++t) {
        const int rows = 1 + static_cast<int>(gen.next_below(4));
        const int cols = 1 + static_cast<int>(gen.next_below(4));
        const IntMatrix m = random_matrix(gen, rows, cols, 6);
        const std::vector<mpz_class> k = kernel_vector_exact(m);
        if (k.empty()) {
            CHECK(rank_exact(m) == m.cols());
            continue;
        }
        REQUIRE(static_cast<int>(k.size()) == m.cols());
        mpz_class content = 0;
        mpz_class first = 0;
        for (const mpz_class& e : k) {
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), content.get_mpz_t(), e.get_mpz_t());
            content = g;
            if (first == 0) first = e;
        }
        CHECK(content == 1);
        CHECK(first > 0);
        for (int i = 0; i < m.rows(); ++i) {
            mpz_class dot = 0;
            for (int j = 0; j < m.cols(); ++j) dot += m.at(i, j) * k[j];
            CHECK(dot == 0);
        }
    }
}

TEST_CASE("kernel basis spans the full kernel") {
    SplitMix64 gen(555);
    for (int t = 0; t < 40; ++t) {
        const int rows = 1 + static_cast<int>(gen.next_below(4));
        const int cols = 1 + static_cast<int>(gen.next_below(5));
        const IntMatrix m = random_matrix(gen, rows, cols, 5);
        const auto basis = kernel_basis_exact(m);
        CHECK(static_cast<int>(basis.size()) == m.cols() - rank_exact(m));
        for (const auto& k : basis) {
            for (int i = 0; i < m.rows(); ++i) {
                mpz_class dot = 0;
                for (int j = 0; j < m.cols(); ++j) dot += m.at(i, j) * k[j];
                CHECK(dot == 0);
            }
        }
    }
}

TEST_CASE("row span membership") {
    const IntMatrix basis = IntMatrix::from_rows({{1, 2, 3}, {0, 1, 1}});
    CHECK(in_row_span(basis, {1, 2, 3}));
    CHECK(in_row_span(basis, {2, 5, 7}));  // row0 + row1
    CHECK(in_row_span(basis, {1, 0, 1}));  // row0 - 2 row1
    CHECK(!in_row_span(basis, {0, 0, 1}));
    CHECK(in_row_span(basis, {0, 0, 0}));
}

TEST_CASE("sign matrix bit packing round-trips") {
    SplitMix64 gen(1);
    for (int t = 0; t < 20; ++t) {
        const int n = 1 + static_cast<int>(gen.next_below(8));
        SignMatrix s = SignMatrix::random(n, gen);
        const IntMatrix m = s.to_int_matrix();
        CHECK(SignMatrix::from_int_matrix(m) == s);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) CHECK(m.at(i, j) == s.sign(i, j));
        // Column words transpose the row words.
        for (int j = 0; j < n; ++j) {
            const std::uint64_t w = s.col_word(j);
            for (int i = 0; i < n; ++i)
                CHECK((((w >> i) & 1) ? -1 : 1) == s.sign(i, j));
        }
    }
}

TEST_CASE("sign twin detection matches a direct scan") {
    SplitMix64 gen(42);
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + static_cast<int>(gen.next_below(4));
        SignMatrix s = SignMatrix::random(n, gen);
        bool naive = false;
        for (int a = 0; a < n && !naive; ++a) {
            for (int b = a + 1; b < n && !naive; ++b) {
                bool re = true, rf = true, ce = true, cf = true;
                for (int k = 0; k < n; ++k) {
                    re &= s.sign(a, k) == s.sign(b, k);
                    rf &= s.sign(a, k) == -s.sign(b, k);
                    ce &= s.sign(k, a) == s.sign(k, b);
                    cf &= s.sign(k, a) == -s.sign(k, b);
                }
                naive = re || rf || ce || cf;
            }
        }
        CHECK(has_sign_twin(s) == naive);
    }
}

TEST_CASE("modular sign rank matches the exact rank") {
    SplitMix64 gen(4242);
    const PrimeModulus p = choose_field_prime(6);
    for (int t = 0; t < 100; ++t) {
        SignMatrix s = SignMatrix::random(6, gen);
        CHECK(sign_rank_mod_p(s, p) == rank_exact(s.to_int_matrix()));
    }
}

TEST_CASE("three-prime singularity test equals exact singularity") {
    SplitMix64 gen(987);
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + static_cast<int>(gen.next_below(5));
        SignMatrix s = SignMatrix::random(n, gen);
        CHECK(singular_mod_three_primes(s) ==
              (det_bareiss(s.to_int_matrix()) == 0));
    }
}
