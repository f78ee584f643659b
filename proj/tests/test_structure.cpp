#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "bsl/error.hpp"
#include "bsl/fourier.hpp"
#include "bsl/gap.hpp"
#include "bsl/hyperplane.hpp"
#include "bsl/structure.hpp"

using namespace bsl;

namespace {

const std::vector<std::string> full_pipeline = {
    "prime",     "dimension", "classification", "spectrum",    "bohr",
    "fit",       "extend",    "properize",      "reduce",      "certificate"};

std::vector<std::string> stage_names(const StructureScan& s) {
    std::vector<std::string> names;
    for (const auto& st : s.stages) names.push_back(st.name);
    return names;
}

bool all_stages_ok(const StructureScan& s) {
    for (const auto& st : s.stages)
        if (!st.ok) return false;
    return true;
}

} // namespace

TEST_CASE("full scan of the all-ones vector at n = 4") {
    const StructureScan s = structure_scan(NormalVector({1, 1, 1, 1}));
    CHECK(s.completed);
    CHECK(s.stopped_at.empty());
    CHECK(stage_names(s) == full_pipeline);
    CHECK(all_stages_ok(s));

    CHECK(s.p == 17);
    REQUIRE(s.dim.has_value());
    CHECK(s.dim->dim_num == 11);
    CHECK(s.dim->regime == "medium");
    REQUIRE(s.classification.has_value());
    CHECK(s.classification->exceptional);
    CHECK(s.spectrum_size == 15);
    CHECK(s.bohr_size == 1);
    CHECK(s.outside_count == 4);
    REQUIRE(s.fit.has_value());
    CHECK(s.fit->success);
    CHECK(s.fit->gap.lengths == std::vector<std::int64_t>{1});
    CHECK(s.extension_count == 1);
    CHECK(s.properize_levels == 0);
    CHECK(s.coeff_rank == 1);
    REQUIRE(s.gap.has_value());
    CHECK(s.gap->basis == std::vector<std::int64_t>{1});
    CHECK(s.gap->lengths == std::vector<std::int64_t>{3});
    CHECK(is_proper(*s.gap));
    REQUIRE(s.certificate.has_value());
    CHECK(s.certificate->all_ok);
    CHECK(s.measured_c == doctest::Approx(1.2613446228805718).epsilon(1e-12));
}

TEST_CASE("full scan of the all-ones vector at n = 6") {
    const StructureScan s = structure_scan(NormalVector({1, 1, 1, 1, 1, 1}));
    CHECK(s.completed);
    CHECK(all_stages_ok(s));
    CHECK(s.p == 223);
    REQUIRE(s.dim.has_value());
    CHECK(s.dim->dim_num == 26);
    CHECK(s.dim->regime == "medium");
    CHECK(s.spectrum_size == 193);
    CHECK(s.bohr_size == 1);
    CHECK(s.outside_count == 6);
    REQUIRE(s.gap.has_value());
    CHECK(s.gap->basis == std::vector<std::int64_t>{1});
    CHECK(s.gap->lengths == std::vector<std::int64_t>{3});
    REQUIRE(s.certificate.has_value());
    CHECK(s.certificate->all_ok);
    CHECK(s.measured_c == doctest::Approx(1.0));
    CHECK(s.measured_c <= 10.0);
}

TEST_CASE("unexceptional input ends the scan after classification") {
    ScanOptions opt;
    opt.chain = ParamChain(1, mpq_class(1, 2), mpq_class(1, 10000));
    const StructureScan s = structure_scan(NormalVector({1, 2, 3, 6}), opt);
    CHECK(s.completed);
    CHECK(s.stopped_at.empty());
    REQUIRE(s.stages.size() == 3);
    CHECK(stage_names(s) ==
          std::vector<std::string>{"prime", "dimension", "classification"});
    CHECK(all_stages_ok(s));
    REQUIRE(s.classification.has_value());
    CHECK(!s.classification->exceptional);
    CHECK(s.spectrum_size == 0);
    CHECK(!s.fit.has_value());
    CHECK(!s.gap.has_value());
    CHECK(!s.certificate.has_value());
}

TEST_CASE("a vector with no orthogonal sign pattern stops at the dimension stage") {
    const StructureScan s = structure_scan(NormalVector({1, 2, 4, 8}));
    CHECK(!s.completed);
    CHECK(s.stopped_at == "dimension");
    REQUIRE(s.stages.size() == 2);
    CHECK(s.stages[0].ok);
    CHECK(!s.stages[1].ok);
    CHECK(s.p == 17);
    CHECK(!s.classification.has_value());
    CHECK(!s.certificate.has_value());
}

TEST_CASE("an over-extended progression stops at the properize stage") {
    // Four distinct coefficient values grafted onto a rank-1 fit push the
    // progression past the descent's rank cap; the failure is recorded under
    // its stage, not masked.
    const StructureScan s = structure_scan(NormalVector({1, 2, 3, 4}));
    CHECK(!s.completed);
    CHECK(s.stopped_at == "properize");
    REQUIRE(s.stages.size() == 8);
    CHECK(s.stages.back().name == "properize");
    CHECK(!s.stages.back().ok);
    CHECK(s.extension_count == 4);
    CHECK(!s.certificate.has_value());
}

TEST_CASE("an unreachable fit volume cap stops at the fit stage") {
    ScanOptions opt;
    opt.fit_volume_cap = 0;
    const StructureScan s = structure_scan(NormalVector({1, 1, 1, 1}), opt);
    CHECK(!s.completed);
    CHECK(s.stopped_at == "fit");
    REQUIRE(s.stages.size() == 6);
    CHECK(!s.stages.back().ok);
    REQUIRE(s.fit.has_value());
    CHECK(!s.fit->success);
    CHECK(!s.gap.has_value());
}

TEST_CASE("the scan rejects oversized inputs") {
    CHECK_THROWS_AS(
        structure_scan(NormalVector(std::vector<std::int64_t>(13, 1))),
        PreconditionError);
}

TEST_CASE("scan results do not depend on the worker count") {
    ScanOptions one, many;
    one.threads = 1;
    many.threads = 4;
    const NormalVector a({1, 1, 1, 1, 1, 1});
    const StructureScan s1 = structure_scan(a, one);
    const StructureScan s4 = structure_scan(a, many);
    CHECK(s1.completed == s4.completed);
    CHECK(s1.spectrum_size == s4.spectrum_size);
    CHECK(s1.bohr_size == s4.bohr_size);
    CHECK(s1.measured_c == s4.measured_c);
    REQUIRE(s1.stages.size() == s4.stages.size());
    for (std::size_t i = 0; i < s1.stages.size(); ++i) {
        CHECK(s1.stages[i].ok == s4.stages[i].ok);
        CHECK(s1.stages[i].detail == s4.stages[i].detail);
    }
}
