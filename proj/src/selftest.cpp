#include "bsl/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "bsl/error.hpp"
#include "bsl/fourier.hpp"
#include "bsl/freiman.hpp"
#include "bsl/gap.hpp"
#include "bsl/hyperplane.hpp"
#include "bsl/int_matrix.hpp"
#include "bsl/lattice.hpp"
#include "bsl/parallel.hpp"
#include "bsl/prime.hpp"
#include "bsl/ruzsa.hpp"
#include "bsl/singularity.hpp"
#include "bsl/structure.hpp"
#include "bsl/zset.hpp"

namespace bsl {

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        os << v[i];
    }
    return os.str();
}

struct Recorder {
    SelftestReport report;

    void add(const std::string& name, bool ok, const std::string& expect,
             const std::string& got) {
        nlohmann::ordered_json j;
        j["check"] = name;
        j["ok"] = ok;
        j["expect"] = expect;
        j["got"] = got;
        report.lines.push_back(j.dump());
        if (!ok) ++report.failures;
    }

    template <class F>
    void guarded(const std::string& name, F&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            add(name, false, "completes without exception",
                std::string("exception: ") + e.what());
        }
    }
};

} // namespace

SelftestReport run_selftest(int threads) {
    Recorder rec;
    const NormalVector ones4(std::vector<std::int64_t>(4, 1));
    const PrimeModulus p17(17);

    rec.guarded("field_primes", [&] {
        std::vector<std::uint64_t> expect = {3, 7, 17, 59, 223, 911, 4099};
        std::vector<std::uint64_t> got;
        for (int n = 2; n <= 8; ++n) got.push_back(choose_field_prime(n).p());
        rec.add("field_primes", got == expect, join(expect), join(got));
    });

    rec.guarded("scan_primes", [&] {
        std::uint64_t a = choose_scan_prime({1, 1, 1, 1}).p();
        std::uint64_t b = choose_scan_prime({1, 2, 3}).p();
        rec.add("scan_primes", a == 17 && b == 7, "17,7",
                std::to_string(a) + "," + std::to_string(b));
    });

    rec.guarded("determinants", [&] {
        mpz_class d1 = det_bareiss(IntMatrix::from_rows({{1, 1}, {1, -1}}));
        mpz_class d2 = det_bareiss(IntMatrix::identity(3));
        mpz_class d3 = det_bareiss(IntMatrix::from_rows({{1, 1}, {1, 1}}));
        mpz_class d4 = det_bareiss(IntMatrix::from_rows({{2, 3}, {5, 7}}));
        std::string got = d1.get_str() + "," + d2.get_str() + "," +
                          d3.get_str() + "," + d4.get_str();
        rec.add("determinants", got == "-2,1,0,-1", "-2,1,0,-1", got);
    });

    rec.guarded("exact_singular_counts", [&] {
        std::vector<std::string> norm, sing;
        for (int n = 1; n <= 4; ++n) {
            ExactCount c = exact_singularity_count(n, threads);
            norm.push_back(c.normalized_count.get_str());
            sing.push_back(c.singular_count.get_str());
        }
        std::string got = join(norm) + "|" + join(sing);
        rec.add("exact_singular_counts", got == "0,1,10,338|0,8,320,43264",
                "0,1,10,338|0,8,320,43264", got);
    });

    rec.guarded("witness_formula_vs_exhaustive", [&] {
        bool ok = true;
        std::vector<std::string> got;
        for (int n = 2; n <= 4; ++n) {
            mpq_class formula = witness_probability(n);
            mpq_class scan = witness_count_exhaustive(n, threads).probability;
            ok = ok && formula == scan;
            got.push_back(formula.get_str());
        }
        rec.add("witness_formula_vs_exhaustive", ok && join(got) == "1/2,5/8,169/256",
                "1/2,5/8,169/256", join(got));
    });

    rec.guarded("witness_formula_frozen", [&] {
        std::string expect =
            "5147/8192,2294539/4194304,947010773/2147483648";
        std::vector<std::string> got;
        for (int n = 5; n <= 7; ++n)
            got.push_back(witness_probability(n).get_str());
        rec.add("witness_formula_frozen", join(got) == expect, expect, join(got));
    });

    rec.guarded("mc_thread_determinism", [&] {
        MCEstimate one = mc_singularity_estimate(8, 20000, 424242, 1);
        MCEstimate many = mc_singularity_estimate(8, 20000, 424242, 4);
        rec.add("mc_thread_determinism", one.hits == many.hits,
                "equal hit counts",
                std::to_string(one.hits) + "," + std::to_string(many.hits));
    });

    rec.guarded("lo_counts", [&] {
        std::vector<std::string> got = {
            lo_count(NormalVector({1, 2, 3})).get_str(),
            lo_count(ones4).get_str(),
            lo_count(NormalVector(std::vector<std::int64_t>(6, 1))).get_str(),
            lo_count(NormalVector(std::vector<std::int64_t>(8, 1))).get_str()};
        rec.add("lo_counts", join(got) == "2,6,20,70", "2,6,20,70", join(got));
    });

    rec.guarded("comb_dimension_frozen", [&] {
        std::vector<long> got;
        for (int n : {4, 6, 8})
            got.push_back(
                comb_dimension(NormalVector(std::vector<std::int64_t>(n, 1)))
                    .dim_num);
        rec.add("comb_dimension_frozen", join(got) == "11,26,50", "11,26,50",
                join(got));
    });

    rec.guarded("erdos_all_ones", [&] {
        ErdosCheck c =
            erdos_lo_check(NormalVector(std::vector<std::int64_t>(12, 1)));
        std::string got = c.max_atom.get_str() + "<=" + c.bound.get_str();
        rec.add("erdos_all_ones", c.ok && got == "924<=924", "924<=924", got);
    });

    const SparseLaw law = SparseLaw::from_eps0(1);
    rec.guarded("sparse_law_mu", [&] {
        rec.add("sparse_law_mu", law.mu() == mpq_class(6, 25), "6/25",
                law.mu().get_str());
    });

    rec.guarded("prob_y_exact", [&] {
        std::string a = prob_Y_hyperplane(ones4, law).get_str();
        std::string b = prob_Y_hyperplane(NormalVector({1, 1}), law).get_str();
        rec.add("prob_y_exact", a == "33959/78125" && b == "379/625",
                "33959/78125,379/625", a + "," + b);
    });

    rec.guarded("odlyzko_exact", [&] {
        OdlyzkoCheck c =
            odlyzko_check_exact(IntMatrix::from_rows({{1, 0, 0, 0}}), 4, law);
        std::string got = c.p_exact.get_str() + " vs " + c.bound.get_str();
        rec.add("odlyzko_exact", c.ok && c.p_exact == mpq_class(6859, 15625),
                "6859/15625 vs 6859/15625", got);
    });

    rec.guarded("prob_x_fourier_bridge", [&] {
        double px = prob_X_fourier(ones4, p17, threads);
        rec.add("prob_x_fourier_bridge", std::fabs(px - 0.375) <= 1e-9,
                "0.375", fmt_double(px));
    });

    rec.guarded("prob_y_fourier_bridge", [&] {
        double py = prob_Y_fourier(ones4, p17, 0.24, threads);
        double expect = 33959.0 / 78125.0;
        rec.add("prob_y_fourier_bridge", std::fabs(py - expect) <= 1e-9,
                fmt_double(expect), fmt_double(py));
    });

    rec.guarded("scalar_inequality", [&] {
        std::uint64_t at25 = scalar_inequality_scan(0.25).violations;
        std::uint64_t at26 = scalar_inequality_scan(0.26).violations;
        rec.add("scalar_inequality", at25 == 0 && at26 >= 1,
                "0 at mu=0.25, >=1 at mu=0.26",
                std::to_string(at25) + "," + std::to_string(at26));
    });

    rec.guarded("pointwise_comparison", [&] {
        ComparisonReport c = comparison_check(ones4, p17, mpq_class(24, 100));
        rec.add("pointwise_comparison", c.ok, "f <= g^(1/4mu) <= g",
                c.ok ? "holds" : "violated");
    });

    Spectrum spec(ones4, p17, 1e-4, threads);
    rec.guarded("spectrum_size", [&] {
        rec.add("spectrum_size", spec.size() == 15, "15",
                std::to_string(spec.size()));
    });

    rec.guarded("parseval", [&] {
        ParsevalReport c = parseval_check(spec);
        rec.add("parseval", c.ok && c.rel_residual <= 1e-6, "residual <= 1e-6",
                fmt_double(c.rel_residual));
    });

    rec.guarded("rep_counts", [&] {
        RepCounts c = rep_counts(spec, 2);
        bool ok = c.total_ok && c.cauchy_schwarz_ok && c.transform_ok;
        rec.add("rep_counts", ok, "total, Cauchy-Schwarz, transform identities",
                ok ? "hold" : "violated");
    });

    rec.guarded("lambda_growth", [&] {
        GrowthTable t = lambda_growth(spec, 6);
        rec.add("lambda_growth", t.all_bounds_ok, "iterated sumset bounds",
                t.all_bounds_ok ? "hold" : "violated");
    });

    rec.guarded("bohr_set", [&] {
        BohrReport b = bohr_set(spec);
        bool ok = b.members == std::vector<std::int64_t>{0};
        rec.add("bohr_set", ok, "{0}", "{" + join(b.members) + "}");
    });

    rec.guarded("sumset_doubling", [&] {
        ZSet a({0, 1, 2, 3});
        std::uint64_t s = sumset(a, a).size();
        mpq_class d = doubling(a);
        rec.add("sumset_doubling", s == 7 && d == mpq_class(7, 4), "7, 7/4",
                std::to_string(s) + ", " + d.get_str());
    });

    rec.guarded("gap_enumerate", [&] {
        Gap proper_gap;
        proper_gap.basis = {1, 10};
        proper_gap.lengths = {3, 3};
        GapImage a = enumerate(proper_gap);
        Gap improper_gap;
        improper_gap.basis = {1, 2};
        improper_gap.lengths = {5, 3};
        GapImage b = enumerate(improper_gap);
        bool ok = a.set.size() == 9 && a.proper && b.set.size() == 9 &&
                  !b.proper && b.collisions == 6;
        rec.add("gap_enumerate", ok, "9 proper | 9 improper 6 collisions",
                std::to_string(a.set.size()) + (a.proper ? " proper" : "") +
                    " | " + std::to_string(b.set.size()) +
                    (b.proper ? " proper" : " improper") + " " +
                    std::to_string(b.collisions) + " collisions");
    });

    rec.guarded("pnorm_lookup", [&] {
        Gap g;
        g.basis = {1, 10};
        g.lengths = {3, 3};
        PNormTable t(g);
        double norm = t.p_norm(11);
        auto coeffs = t.coefficients(11);
        bool ok = std::fabs(norm - std::sqrt(2.0) / 3.0) <= 1e-12 &&
                  coeffs == std::vector<std::int64_t>{1, 1};
        rec.add("pnorm_lookup", ok, "sqrt(2)/3 at (1,1)",
                fmt_double(norm) + " at (" + join(coeffs) + ")");
    });

    rec.guarded("ruzsa_cover", [&] {
        RuzsaCover c = ruzsa_cover(ZSet({-2, -1, 0, 1, 2}), 8);
        bool ok = c.all_ok && c.covering_constant == mpq_class(17, 5);
        rec.add("ruzsa_cover", ok, "all inclusions, C = 17/5",
                std::string(c.all_ok ? "inclusions hold" : "inclusion failed") +
                    ", C = " + c.covering_constant.get_str());
    });

    rec.guarded("freiman_fit", [&] {
        FreimanFit a = freiman_fit(ZSet({0, 1, 10, 11}));
        FreimanFit b = freiman_fit(ZSet({0, 2, 4}));
        bool ok = a.success && a.gap.basis == std::vector<std::int64_t>{1, 10} &&
                  a.gap.lengths == std::vector<std::int64_t>{3, 3} &&
                  b.success && b.gap.basis == std::vector<std::int64_t>{2} &&
                  b.gap.lengths == std::vector<std::int64_t>{5};
        rec.add("freiman_fit", ok, "(1,10)x(3,3) | (2)x(5)",
                "(" + join(a.gap.basis) + ")x(" + join(a.gap.lengths) + ") | (" +
                    join(b.gap.basis) + ")x(" + join(b.gap.lengths) + ")");
    });

    rec.guarded("rank_reduce", [&] {
        Gap g;
        g.ambient = p17;
        g.basis = {1, 1};
        g.lengths = {1, 3};
        RankReduction rr = rank_reduce(g, ZSet({1}, p17));
        bool ok = rr.full_rank && rr.steps == 1 && rr.initial_rank == 1 &&
                  rr.gap.basis == std::vector<std::int64_t>{1} &&
                  rr.gap.lengths == std::vector<std::int64_t>{3};
        rec.add("rank_reduce", ok, "one step to (1)x(3)",
                std::to_string(rr.steps) + " steps to (" + join(rr.gap.basis) +
                    ")x(" + join(rr.gap.lengths) + ")");
    });

    rec.guarded("commensurability", [&] {
        CommensurabilityReport c = commensurability_check(ZSet({2, 3, 4}), 2, 10);
        std::ostringstream os;
        for (const auto& w : c.rows) os << w.num << "/" << w.den << " ";
        bool ok = c.all_found && os.str() == "1/1 3/2 2/1 ";
        rec.add("commensurability", ok, "1/1 3/2 2/1", os.str());
    });

    rec.guarded("lattice_reduce", [&] {
        LatticeBasis skew;
        skew.rows = {{mpq_class(1), mpq_class(0)},
                     {mpq_class(100), mpq_class(1)}};
        ReducedBasis red = reduced_basis(skew);
        bool ok = red.product_ratio == 1.0 && red.product_bound_ok &&
                  same_lattice(red.basis, skew);
        rec.add("lattice_reduce", ok, "ratio 1, same lattice",
                "ratio " + fmt_double(red.product_ratio));
    });

    rec.guarded("discrete_john", [&] {
        LatticeBasis z2;
        z2.rows = {{mpq_class(1), mpq_class(0)}, {mpq_class(0), mpq_class(1)}};
        Box b5;
        b5.halfwidths = {mpq_class(5), mpq_class(5)};
        DiscreteJohn a = discrete_john(b5, z2);
        LatticeBasis z1;
        z1.rows = {{mpq_class(1)}};
        Box bh;
        bh.halfwidths = {mpq_class(15, 2)};
        DiscreteJohn c = discrete_john(bh, z1);
        bool ok = a.n == std::vector<std::int64_t>{5, 5} && a.c == 1 &&
                  a.points == 81 && a.inner_ok && a.outer_ok &&
                  c.n == std::vector<std::int64_t>{8} && c.c == 1 &&
                  c.points == 15 && c.inner_ok && c.outer_ok;
        rec.add("discrete_john", ok, "N=(5,5) c=1 81 pts | N=(8) c=1 15 pts",
                "N=(" + join(a.n) + ") c=" + std::to_string(a.c) + " " +
                    std::to_string(a.points) + " pts | N=(" + join(c.n) +
                    ") c=" + std::to_string(c.c) + " " +
                    std::to_string(c.points) + " pts");
    });

    const PrimeModulus big(10000000019ULL);
    rec.guarded("find_relation", [&] {
        auto hit = find_relation({1, 2}, {2, 1}, big);
        auto miss = find_relation({1, 3}, {1, 1}, big);
        bool ok = hit && hit->m == std::vector<std::int64_t>{2, -1} && !miss;
        rec.add("find_relation", ok, "(2,-1) | none",
                (hit ? "(" + join(hit->m) + ")" : "none") +
                    std::string(" | ") + (miss ? "found" : "none"));
    });

    rec.guarded("properize", [&] {
        Gap g1;
        g1.ambient = big;
        g1.basis = {1, 2};
        g1.lengths = {5, 3};
        ProperizeResult a = properize(g1);
        Gap g2;
        g2.ambient = big;
        g2.basis = {1, 1};
        g2.lengths = {3, 3};
        ProperizeResult b = properize(g2);
        bool ok = a.gap.rank() == 1 &&
                  a.gap.lengths == std::vector<std::int64_t>{11} &&
                  a.size_ratio == mpq_class(11, 9) && a.levels == 1 &&
                  b.gap.rank() == 1 &&
                  b.gap.lengths == std::vector<std::int64_t>{5} &&
                  b.size_ratio == 1 && b.levels == 1;
        rec.add("properize", ok, "(11) ratio 11/9 | (5) ratio 1",
                "(" + join(a.gap.lengths) + ") ratio " + a.size_ratio.get_str() +
                    " | (" + join(b.gap.lengths) + ") ratio " +
                    b.size_ratio.get_str());
    });

    rec.guarded("structure_scan", [&] {
        ScanOptions opt;
        opt.threads = threads;
        StructureScan s = structure_scan(ones4, opt);
        bool ok = s.completed && s.certificate && s.certificate->all_ok &&
                  s.measured_c <= 10 && s.spectrum_size == 15 &&
                  s.bohr_size == 1;
        rec.add("structure_scan", ok,
                "completed, certificate holds, C <= 10",
                s.completed
                    ? "completed, C = " + fmt_double(s.measured_c)
                    : "stopped at " + s.stopped_at);
    });

    rec.guarded("parallel_determinism", [&] {
        auto sum = parallel_reduce<std::uint64_t>(
            100000, 997, threads, 0,
            [](std::uint64_t lo, std::uint64_t hi) {
                std::uint64_t s = 0;
                for (std::uint64_t i = lo; i < hi; ++i) s += i;
                return s;
            },
            [](std::uint64_t a, std::uint64_t b) { return a + b; });
        rec.add("parallel_determinism", sum == 4999950000ULL, "4999950000",
                std::to_string(sum));
    });

    return rec.report;
}

} // namespace bsl
