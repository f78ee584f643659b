#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsl/error.hpp"
#include "bsl/fourier.hpp"
#include "bsl/freiman.hpp"
#include "bsl/gap.hpp"
#include "bsl/hyperplane.hpp"
#include "bsl/lattice.hpp"
#include "bsl/prime.hpp"
#include "bsl/ruzsa.hpp"
#include "bsl/selftest.hpp"
#include "bsl/singularity.hpp"
#include "bsl/structure.hpp"
#include "bsl/zset.hpp"

namespace {

using nlohmann::ordered_json;
using namespace bsl;

constexpr const char* tool_version = "0.1.0";
constexpr std::size_t elide_above = 10000;

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex16(std::uint64_t x) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
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

std::int64_t parse_i64(const std::string& s) {
    std::int64_t x = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size())
        throw PreconditionError("not an integer: '" + s + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size())
        throw PreconditionError("not an unsigned integer: '" + s + "'");
    return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::int64_t> parse_i64_list(const std::string& s) {
    if (s.empty()) throw PreconditionError("empty integer list");
    std::vector<std::int64_t> out;
    for (const std::string& tok : split(s, ',')) out.push_back(parse_i64(tok));
    return out;
}

mpq_class parse_mpq(const std::string& s) {
    const std::size_t slash = s.find('/');
    try {
        if (slash == std::string::npos) return mpq_class(mpz_class(s));
        mpz_class num(s.substr(0, slash));
        mpz_class den(s.substr(slash + 1));
        if (den == 0) throw PreconditionError("zero denominator in '" + s + "'");
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw PreconditionError("not a rational: '" + s + "'");
    }
}

std::vector<mpq_class> parse_mpq_list(const std::string& s) {
    if (s.empty()) throw PreconditionError("empty rational list");
    std::vector<mpq_class> out;
    for (const std::string& tok : split(s, ',')) out.push_back(parse_mpq(tok));
    return out;
}

std::vector<std::vector<mpq_class>> parse_rows(const std::string& s) {
    std::vector<std::vector<mpq_class>> out;
    for (const std::string& row : split(s, ';')) out.push_back(parse_mpq_list(row));
    return out;
}

std::string q_str(const mpq_class& q) { return q.get_str(); }
std::string z_str(const mpz_class& z) { return z.get_str(); }

// Member lists above the elision threshold are replaced by a count plus a
// FNV-1a hash of the comma-joined decimal rendering.
ordered_json members_json(const std::vector<std::int64_t>& v) {
    if (v.size() <= elide_above) return ordered_json(v);
    return ordered_json{{"count", v.size()}, {"fnv1a", hex16(fnv1a64(join(v)))}};
}

std::string double_str(double x) { return ordered_json(x).dump(); }

ordered_json gap_json(const Gap& g) {
    ordered_json j;
    j["rank"] = g.rank();
    j["modulus"] = g.ambient ? g.ambient->p() : 0;
    j["offset"] = g.offset;
    j["symmetric"] = g.symmetric;
    j["basis"] = g.basis;
    j["lengths"] = g.lengths;
    j["box_volume"] = z_str(g.box_volume());
    return j;
}

ordered_json dim_json(const CombDim& d) {
    ordered_json j;
    j["n"] = d.n;
    j["cube_count"] = z_str(d.cube_count);
    j["d_pm_num"] = d.dim_num;
    j["d_pm_den"] = d.dim_den;
    j["d_pm"] = q_str(d.d_pm);
    j["density"] = d.density;
    j["regime"] = d.regime;
    return j;
}

ordered_json fit_json(const FreimanFit& f) {
    ordered_json j;
    j["success"] = f.success;
    j["note"] = f.note;
    if (f.success) j["gap"] = gap_json(f.gap);
    return j;
}

ordered_json cert_json(const CertificateReport& r) {
    ordered_json j;
    j["rank_ok"] = r.rank_ok;
    j["contains_ok"] = r.contains_ok;
    j["pnorm_ok"] = r.pnorm_ok;
    j["volume_ok"] = r.volume_ok;
    j["commensurable_ok"] = r.commensurable_ok;
    j["pnorm_sum"] = r.pnorm_sum;
    j["volume_ratio"] = r.volume_ratio;
    j["measured_c"] = r.measured_c;
    j["commensurability"] = ordered_json{{"v1", r.commensurability.v1},
                                         {"bound", r.commensurability.bound},
                                         {"all_found", r.commensurability.all_found}};
    j["all_ok"] = r.all_ok;
    return j;
}

struct Globals {
    std::string format = "json";
    std::uint64_t seed = 0;
    int threads = 1;
};

// Sorted key=value rendering of the effective configuration; the thread
// count is execution plumbing, not configuration, so records stay identical
// across worker counts.
std::string canonical_of(const std::string& command,
                         std::map<std::string, std::string> cfg,
                         const Globals& g) {
    cfg["command"] = command;
    cfg["format"] = g.format;
    cfg["seed"] = std::to_string(g.seed);
    std::string out;
    for (const auto& [k, v] : cfg) {
        if (!out.empty()) out += ' ';
        out += k + "=" + v;
    }
    return out;
}

struct Emit {
    const Globals* g = nullptr;
    std::string canonical;

    ordered_json rec(const char* tolerance) const {
        ordered_json j;
        j["tool_version"] = tool_version;
        j["config_canonical"] = canonical;
        j["seed"] = g->seed;
        j["tolerance"] = tolerance;
        return j;
    }

    void out(const ordered_json& j) const {
        if (g->format == "human") {
            for (const auto& [k, v] : j.items())
                std::cout << k << ": " << v.dump() << "\n";
        } else {
            std::cout << j.dump() << "\n";
        }
    }

    // Leading comment line carrying the record envelope for csv tables.
    void csv_comment(const char* tolerance) const {
        std::cout << "# tool_version=" << tool_version << "; tolerance="
                  << tolerance << "; seed=" << g->seed << "; config="
                  << canonical << "\n";
    }
};

struct GapSpecOpt {
    std::string basis;
    std::string lengths;
    std::uint64_t modulus = 0;
    std::int64_t offset = 0;
    bool asymmetric = false;
};

void add_gap_flags(CLI::App* a, GapSpecOpt& o) {
    a->add_option("--basis", o.basis, "progression basis, comma separated")->required();
    a->add_option("--lengths", o.lengths, "progression lengths, comma separated")->required();
    a->add_option("--modulus", o.modulus, "prime ambient; 0 means plain integers");
    a->add_option("--offset", o.offset, "offset, asymmetric progressions only");
    a->add_flag("--asymmetric", o.asymmetric, "drop the symmetry requirement");
}

Gap build_gap(const GapSpecOpt& o) {
    Gap g;
    g.basis = parse_i64_list(o.basis);
    g.lengths = parse_i64_list(o.lengths);
    if (o.modulus) g.ambient = PrimeModulus(o.modulus);
    g.offset = o.offset;
    g.symmetric = !o.asymmetric;
    g.validate();
    return g;
}

void gap_cfg(std::map<std::string, std::string>& cfg, const Gap& g) {
    cfg["basis"] = join(g.basis);
    cfg["lengths"] = join(g.lengths);
    cfg["modulus"] = std::to_string(g.ambient ? g.ambient->p() : 0);
    cfg["offset"] = std::to_string(g.offset);
    cfg["symmetric"] = g.symmetric ? "true" : "false";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale toolkit for sign-matrix singularity structure"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read option defaults from a key=value file");

    Globals g;
    std::string seed_str;
    int threads_opt = 0;
    app.add_option("--seed", seed_str, "64-bit seed; env BSL_SEED is the fallback, then 0");
    app.add_option("--threads", threads_opt, "worker threads; 0 picks the hardware count");
    app.add_option("--format", g.format, "json, csv (tables only) or human")
        ->check(CLI::IsMember({"json", "csv", "human"}));

    struct Cmd {
        CLI::App* leaf = nullptr;
        bool csv_ok = false;
        std::function<int()> run;
    };
    std::vector<Cmd> cmds;
    auto reg = [&cmds](CLI::App* leaf, bool csv_ok, std::function<int()> run) {
        leaf->fallthrough();
        cmds.push_back(Cmd{leaf, csv_ok, std::move(run)});
    };

    // ---- pn ----------------------------------------------------------
    CLI::App* pn = app.add_subcommand("pn", "singularity probability of a random sign matrix");
    pn->require_subcommand(1);
    pn->fallthrough();

    int pn_n = 0, pn_cap = 7;
    CLI::App* pn_exact = pn->add_subcommand("exact", "exhaustive count");
    pn_exact->add_option("--n", pn_n, "matrix size")->required();
    pn_exact->add_option("--cap", pn_cap, "refuse sizes above this cap");

    std::uint64_t mc_trials = 100000;
    int mc_n = 0;
    CLI::App* pn_mc = pn->add_subcommand("mc", "monte carlo estimate");
    pn_mc->add_option("--n", mc_n, "matrix size")->required();
    pn_mc->add_option("--trials", mc_trials, "sample count");

    int rep_nmax = 7, rep_cap = 5;
    CLI::App* pn_report = pn->add_subcommand("report", "finite-size comparison table");
    pn_report->add_option("--n-max", rep_nmax, "last row of the table");
    pn_report->add_option("--exact-cap", rep_cap, "largest n with the exact column filled");

    // ---- lo ----------------------------------------------------------
    CLI::App* lo = app.add_subcommand("lo", "signed subset-sum concentration");
    lo->require_subcommand(1);
    lo->fallthrough();

    std::string lo_coeffs;
    int erdos_cap = 24;
    CLI::App* lo_count_cmd = lo->add_subcommand("count", "zero sign-combinations of the coefficients");
    lo_count_cmd->add_option("--coeffs", lo_coeffs, "coefficients, comma separated")->required();
    CLI::App* lo_dim = lo->add_subcommand("dim", "combinatorial dimension of the hyperplane");
    lo_dim->add_option("--coeffs", lo_coeffs, "coefficients, comma separated")->required();
    CLI::App* lo_erdos = lo->add_subcommand("erdos", "largest atom against the central binomial");
    lo_erdos->add_option("--coeffs", lo_coeffs, "coefficients, comma separated")->required();
    lo_erdos->add_option("--work-cap", erdos_cap, "refuse above 2^cap sums");

    // ---- fourier -----------------------------------------------------
    CLI::App* fourier = app.add_subcommand("fourier", "character sums over a prime field");
    fourier->require_subcommand(1);
    fourier->fallthrough();

    std::string f_coeffs, f_p = "auto", f_mu;
    double f_eps2 = 0.0001, f_threshold = 0.01;
    int f_kmax = 8;
    std::uint64_t f_work = 100000000;

    CLI::App* f_probs = fourier->add_subcommand("probs", "walk probabilities by character sum");
    f_probs->add_option("--coeffs", f_coeffs, "coefficients, comma separated")->required();
    f_probs->add_option("--p", f_p, "prime modulus or 'auto'");
    f_probs->add_option("--mu", f_mu, "sparse-law weight as a rational");

    CLI::App* f_spec = fourier->add_subcommand("spectrum", "high half-cosine residues");
    f_spec->add_option("--coeffs", f_coeffs, "coefficients, comma separated")->required();
    f_spec->add_option("--p", f_p, "prime modulus or 'auto'");
    f_spec->add_option("--eps2", f_eps2, "spectrum threshold");

    CLI::App* f_bohr = fourier->add_subcommand("bohr", "small-norm residues of the spectrum");
    f_bohr->add_option("--coeffs", f_coeffs, "coefficients, comma separated")->required();
    f_bohr->add_option("--p", f_p, "prime modulus or 'auto'");
    f_bohr->add_option("--eps2", f_eps2, "spectrum threshold");
    f_bohr->add_option("--threshold", f_threshold, "norm threshold");

    CLI::App* f_growth = fourier->add_subcommand("growth", "iterated sumset sizes of the spectrum");
    f_growth->add_option("--coeffs", f_coeffs, "coefficients, comma separated")->required();
    f_growth->add_option("--p", f_p, "prime modulus or 'auto'");
    f_growth->add_option("--eps2", f_eps2, "spectrum threshold");
    f_growth->add_option("--k-max", f_kmax, "last sumset order");
    f_growth->add_option("--work-cap", f_work, "sumset work cap");

    // ---- gap ---------------------------------------------------------
    CLI::App* gap_cmd = app.add_subcommand("gap", "generalized arithmetic progressions");
    gap_cmd->require_subcommand(1);
    gap_cmd->fallthrough();

    GapSpecOpt gs;
    std::uint64_t gap_volume_cap = 10000000;
    std::int64_t pnorm_x = 0;
    std::string set_a, set_b, set_u, fit_cap = "10";
    std::uint64_t set_modulus = 0, set_work = 100000000;
    int cover_kmax = 8, fit_rmax = 2;
    std::string cert_coeffs;
    double cert_c = 10;
    std::int64_t cert_comm_bound = 0;

    CLI::App* gap_enum = gap_cmd->add_subcommand("enum", "full member image");
    add_gap_flags(gap_enum, gs);
    gap_enum->add_option("--volume-cap", gap_volume_cap, "refuse box volumes above this");

    CLI::App* gap_proper = gap_cmd->add_subcommand("proper", "injectivity of the coefficient map");
    add_gap_flags(gap_proper, gs);
    gap_proper->add_option("--volume-cap", gap_volume_cap, "refuse box volumes above this");

    CLI::App* gap_pnorm = gap_cmd->add_subcommand("pnorm", "coefficients and scaled norm of a member");
    add_gap_flags(gap_pnorm, gs);
    gap_pnorm->add_option("--x", pnorm_x, "member to look up")->required();
    gap_pnorm->add_option("--volume-cap", gap_volume_cap, "refuse box volumes above this");

    CLI::App* gap_sumset = gap_cmd->add_subcommand("sumset", "A + B of two explicit sets");
    gap_sumset->add_option("--a", set_a, "first set, comma separated")->required();
    gap_sumset->add_option("--b", set_b, "second set, comma separated")->required();
    gap_sumset->add_option("--modulus", set_modulus, "prime ambient; 0 means plain integers");
    gap_sumset->add_option("--work-cap", set_work, "refuse |A||B| above this");

    CLI::App* gap_double = gap_cmd->add_subcommand("double", "doubling ratio of an explicit set");
    gap_double->add_option("--a", set_a, "set members, comma separated")->required();
    gap_double->add_option("--modulus", set_modulus, "prime ambient; 0 means plain integers");
    gap_double->add_option("--work-cap", set_work, "refuse |A|^2 above this");

    CLI::App* gap_cover = gap_cmd->add_subcommand("cover", "translate covering of iterated sumsets");
    gap_cover->add_option("--a", set_a, "symmetric set with 0, comma separated")->required();
    gap_cover->add_option("--modulus", set_modulus, "prime ambient; 0 means plain integers");
    gap_cover->add_option("--k-max", cover_kmax, "last sumset order checked");
    gap_cover->add_option("--work-cap", set_work, "sumset work cap");

    CLI::App* gap_fit = gap_cmd->add_subcommand("fit", "bounded-rank progression around a set");
    gap_fit->add_option("--a", set_a, "set members, comma separated")->required();
    gap_fit->add_option("--modulus", set_modulus, "prime ambient; 0 means plain integers");
    gap_fit->add_option("--r-max", fit_rmax, "largest rank tried");
    gap_fit->add_option("--volume-cap", fit_cap, "box volume cap as a multiple of |A|");

    CLI::App* gap_reduce = gap_cmd->add_subcommand("reduce", "drop basis directions unused by a subset");
    add_gap_flags(gap_reduce, gs);
    gap_reduce->add_option("--u", set_u, "members that must stay inside")->required();
    gap_reduce->add_option("--volume-cap", gap_volume_cap, "refuse box volumes above this");

    CLI::App* gap_certify = gap_cmd->add_subcommand("certify", "audit a structure certificate");
    add_gap_flags(gap_certify, gs);
    gap_certify->add_option("--coeffs", cert_coeffs, "hyperplane coefficients")->required();
    gap_certify->add_option("--c", cert_c, "certificate bound");
    gap_certify->add_option("--commensurability-bound", cert_comm_bound,
                            "numerator/denominator cap; 0 picks n^2");

    // ---- structure scan (gap scan is the same command) ----------------
    CLI::App* structure = app.add_subcommand("structure", "end-to-end structure pipeline");
    structure->require_subcommand(1);
    structure->fallthrough();

    std::string scan_coeffs, scan_eps0 = "1", scan_eps1 = "1/100", scan_eps2 = "1/10000";
    std::string scan_fit_cap = "10";
    double scan_threshold = 0.01, scan_c = 10;
    int scan_fit_rmax = 2;
    std::int64_t scan_comm_bound = 0;

    auto add_scan_flags = [&](CLI::App* a) {
        a->add_option("--coeffs", scan_coeffs, "hyperplane coefficients")->required();
        a->add_option("--eps0", scan_eps0, "sparsity parameter, rational");
        a->add_option("--eps1", scan_eps1, "exceptionality threshold, rational");
        a->add_option("--eps2", scan_eps2, "spectrum threshold, rational");
        a->add_option("--threshold", scan_threshold, "norm threshold of the small-norm set");
        a->add_option("--fit-volume-cap", scan_fit_cap, "progression fit volume cap, rational");
        a->add_option("--fit-rank-max", scan_fit_rmax, "progression fit rank cap");
        a->add_option("--c", scan_c, "certificate bound");
        a->add_option("--commensurability-bound", scan_comm_bound, "cap; 0 picks n^2");
    };
    CLI::App* structure_scan_cmd = structure->add_subcommand("scan", "run the full pipeline");
    add_scan_flags(structure_scan_cmd);
    CLI::App* gap_scan = gap_cmd->add_subcommand("scan", "run the full pipeline");
    add_scan_flags(gap_scan);

    // ---- lattice -----------------------------------------------------
    CLI::App* lattice = app.add_subcommand("lattice", "exact lattice constructions");
    lattice->require_subcommand(1);
    lattice->fallthrough();

    std::string lat_rows, lat_box, lat_v, lat_n;
    std::uint64_t lat_p = 0, lat_enum_cap = 10000000, lat_work = 100000000;
    std::uint64_t prop_volume_cap = 100000;

    CLI::App* lat_reduce = lattice->add_subcommand("reduce", "short basis of the same lattice");
    lat_reduce->add_option("--rows", lat_rows, "basis rows 'a,b;c,d', rational entries")->required();

    CLI::App* lat_john = lattice->add_subcommand("john", "progression sandwich of a box section");
    lat_john->add_option("--rows", lat_rows, "basis rows 'a,b;c,d', rational entries")->required();
    lat_john->add_option("--box", lat_box, "box halfwidths, comma separated rationals")->required();
    lat_john->add_option("--enum-cap", lat_enum_cap, "refuse enumerations above this");

    CLI::App* lat_relation = lattice->add_subcommand("relation", "first binding coefficient vector");
    lat_relation->add_option("--v", lat_v, "values, comma separated")->required();
    lat_relation->add_option("--n", lat_n, "coefficient box bounds, comma separated")->required();
    lat_relation->add_option("--p", lat_p, "prime modulus")->required();
    lat_relation->add_option("--work-cap", lat_work, "meet-in-the-middle work cap");

    CLI::App* lat_properize = lattice->add_subcommand("properize", "embed into a proper progression");
    add_gap_flags(lat_properize, gs);
    lat_properize->add_option("--volume-cap", prop_volume_cap, "descent volume cap");

    // ---- selftest ------------------------------------------------------
    CLI::App* selftest_cmd = app.add_subcommand("selftest", "cross-module invariant suite");

    // ---- handlers ------------------------------------------------------
    Emit em;
    em.g = &g;

    reg(pn_exact, false, [&]() {
        std::map<std::string, std::string> cfg{{"n", std::to_string(pn_n)},
                                               {"cap", std::to_string(pn_cap)}};
        em.canonical = canonical_of("pn.exact", cfg, g);
        const ExactCount ec = exact_singularity_count(pn_n, g.threads, pn_cap);
        ordered_json j = em.rec("exact");
        j["n"] = ec.n;
        j["normalized_count"] = z_str(ec.normalized_count);
        j["singular_count"] = z_str(ec.singular_count);
        j["total"] = z_str(ec.total);
        j["p_exact"] = q_str(ec.probability);
        j["p_n"] = ec.probability.get_d();
        em.out(j);
        return 0;
    });

    reg(pn_mc, false, [&]() {
        std::map<std::string, std::string> cfg{{"n", std::to_string(mc_n)},
                                               {"trials", std::to_string(mc_trials)}};
        em.canonical = canonical_of("pn.mc", cfg, g);
        const MCEstimate mc = mc_singularity_estimate(mc_n, mc_trials, g.seed, g.threads);
        ordered_json j = em.rec("statistical");
        j["n"] = mc.n;
        j["trials"] = mc.trials;
        j["hits"] = mc.hits;
        j["estimate"] = mc.estimate;
        j["ci_halfwidth"] = mc.ci_halfwidth;
        em.out(j);
        return 0;
    });

    reg(pn_report, true, [&]() {
        std::map<std::string, std::string> cfg{{"n_max", std::to_string(rep_nmax)},
                                               {"exact_cap", std::to_string(rep_cap)}};
        em.canonical = canonical_of("pn.report", cfg, g);
        const std::vector<BoundRow> rows = bound_report(rep_nmax, g.threads, rep_cap);
        if (g.format == "csv") {
            em.csv_comment("float-1e-9");
            std::cout << "n,exact_available,p_exact,p_n,ref_quadratic,ref_three_quarters,"
                         "ratio_quadratic,ratio_three_quarters,quadratic_exceeds_one,"
                         "witness_prob,witness,witness_cross_checked\n";
            for (const BoundRow& r : rows) {
                std::cout << r.n << ',' << (r.exact_available ? "true" : "false") << ','
                          << (r.exact_available ? q_str(r.p_exact) : "") << ','
                          << (r.exact_available ? double_str(r.p_n) : "") << ','
                          << double_str(r.ref_quadratic) << ','
                          << double_str(r.ref_three_quarters) << ','
                          << (r.exact_available ? double_str(r.ratio_quadratic) : "") << ','
                          << (r.exact_available ? double_str(r.ratio_three_quarters) : "") << ','
                          << (r.quadratic_exceeds_one ? "true" : "false") << ','
                          << q_str(r.witness_prob) << ',' << double_str(r.witness) << ','
                          << (r.witness_cross_checked ? "true" : "false") << "\n";
            }
            return 0;
        }
        ordered_json j = em.rec("float-1e-9");
        ordered_json arr = ordered_json::array();
        for (const BoundRow& r : rows) {
            ordered_json row;
            row["n"] = r.n;
            row["exact_available"] = r.exact_available;
            if (r.exact_available) {
                row["p_exact"] = q_str(r.p_exact);
                row["p_n"] = r.p_n;
            }
            row["ref_quadratic"] = r.ref_quadratic;
            row["ref_three_quarters"] = r.ref_three_quarters;
            if (r.exact_available) {
                row["ratio_quadratic"] = r.ratio_quadratic;
                row["ratio_three_quarters"] = r.ratio_three_quarters;
            }
            row["quadratic_exceeds_one"] = r.quadratic_exceeds_one;
            row["witness_prob"] = q_str(r.witness_prob);
            row["witness"] = r.witness;
            row["witness_cross_checked"] = r.witness_cross_checked;
            arr.push_back(row);
        }
        j["rows"] = arr;
        em.out(j);
        return 0;
    });

    reg(lo_count_cmd, false, [&]() {
        const NormalVector a(parse_i64_list(lo_coeffs));
        std::map<std::string, std::string> cfg{{"coeffs", join(a.coeffs())}};
        em.canonical = canonical_of("lo.count", cfg, g);
        ordered_json j = em.rec("exact");
        j["coeffs"] = a.coeffs();
        j["count"] = z_str(lo_count(a));
        em.out(j);
        return 0;
    });

    reg(lo_dim, false, [&]() {
        const NormalVector a(parse_i64_list(lo_coeffs));
        std::map<std::string, std::string> cfg{{"coeffs", join(a.coeffs())}};
        em.canonical = canonical_of("lo.dim", cfg, g);
        const CombDim d = comb_dimension(a);
        ordered_json j = em.rec("exact");
        j["coeffs"] = a.coeffs();
        j["count"] = z_str(d.cube_count);
        j["d_pm_num"] = d.dim_num;
        j["d_pm_den"] = d.dim_den;
        j["d_pm"] = q_str(d.d_pm);
        j["density"] = d.density;
        j["below_large_threshold"] = d.below_large_threshold;
        j["above_small_threshold"] = d.above_small_threshold;
        j["regime"] = d.regime;
        em.out(j);
        return 0;
    });

    reg(lo_erdos, false, [&]() {
        const NormalVector a(parse_i64_list(lo_coeffs));
        std::map<std::string, std::string> cfg{{"coeffs", join(a.coeffs())},
                                               {"work_cap", std::to_string(erdos_cap)}};
        em.canonical = canonical_of("lo.erdos", cfg, g);
        const ErdosCheck c = erdos_lo_check(a, erdos_cap);
        ordered_json j = em.rec("exact");
        j["coeffs"] = a.coeffs();
        j["max_atom"] = z_str(c.max_atom);
        j["bound"] = z_str(c.bound);
        j["ok"] = c.ok;
        em.out(j);
        return 0;
    });

    auto resolve_prime = [&](const NormalVector& a) {
        if (f_p == "auto") return choose_scan_prime(a.coeffs());
        return PrimeModulus(parse_u64(f_p));
    };

    reg(f_probs, false, [&]() {
        const NormalVector a(parse_i64_list(f_coeffs));
        const PrimeModulus p = resolve_prime(a);
        const mpq_class mu = f_mu.empty() ? ParamChain().mu() : parse_mpq(f_mu);
        std::map<std::string, std::string> cfg{{"coeffs", join(a.coeffs())},
                                               {"p", std::to_string(p.p())},
                                               {"mu", q_str(mu)}};
        em.canonical = canonical_of("fourier.probs", cfg, g);
        const double px = prob_X_fourier(a, p, g.threads);
        mpq_class px_exact(lo_count(a), mpz_class(1) << a.n());
        px_exact.canonicalize();
        const double py = prob_Y_fourier(a, p, mu.get_d(), g.threads);
        const mpq_class py_exact = prob_Y_hyperplane(a, SparseLaw(mu));
        ordered_json j = em.rec("float-1e-9");
        j["coeffs"] = a.coeffs();
        j["p"] = p.p();
        j["mu"] = q_str(mu);
        j["p_x"] = px;
        j["p_x_exact"] = q_str(px_exact);
        j["p_x_residual"] = std::abs(px - px_exact.get_d());
        j["p_y"] = py;
        j["p_y_exact"] = q_str(py_exact);
        j["p_y_residual"] = std::abs(py - py_exact.get_d());
        em.out(j);
        return 0;
    });

    reg(f_spec, false, [&]() {
        const NormalVector a(parse_i64_list(f_coeffs));
        const PrimeModulus p = resolve_prime(a);
        std::map<std::string, std::string> cfg{{"coeffs", join(a.coeffs())},
                                               {"p", std::to_string(p.p())},
                                               {"eps2", double_str(f_eps2)}};
        em.canonical = canonical_of("fourier.spectrum", cfg, g);
        const Spectrum s(a, p, f_eps2, g.threads);
        ordered_json j = em.rec("float-1e-9");
        j["coeffs"] = a.coeffs();
        j["p"] = p.p();
        j["eps2"] = f_eps2;
        j["size"] = s.size();
        j["boundary_members"] = s.boundary_members();
        j["eps2_above_one"] = s.eps2_above_one();
        j["members"] = members_json(s.members());
        em.out(j);
        return 0;
    });

    reg(f_bohr, false, [&]() {
        const NormalVector a(parse_i64_list(f_coeffs));
        const PrimeModulus p = resolve_prime(a);
        std::map<std::string, std::string> cfg{{"coeffs", join(a.coeffs())},
                                               {"p", std::to_string(p.p())},
                                               {"eps2", double_str(f_eps2)},
                                               {"threshold", double_str(f_threshold)}};
        em.canonical = canonical_of("fourier.bohr", cfg, g);
        const Spectrum s(a, p, f_eps2, g.threads);
        const CombDim d = comb_dimension(a);
        const BohrReport b = bohr_set(s, f_threshold, &d);
        ordered_json j = em.rec("float-1e-9");
        j["coeffs"] = a.coeffs();
        j["p"] = p.p();
        j["eps2"] = f_eps2;
        j["threshold"] = b.threshold;
        j["size"] = b.size;
        j["doubled_size"] = b.doubled_size;
        if (b.ratio_size) j["ratio_size"] = *b.ratio_size;
        if (b.ratio_doubled) j["ratio_doubled"] = *b.ratio_doubled;
        j["members"] = members_json(b.members);
        em.out(j);
        return 0;
    });

    reg(f_growth, true, [&]() {
        const NormalVector a(parse_i64_list(f_coeffs));
        const PrimeModulus p = resolve_prime(a);
        std::map<std::string, std::string> cfg{{"coeffs", join(a.coeffs())},
                                               {"p", std::to_string(p.p())},
                                               {"eps2", double_str(f_eps2)},
                                               {"k_max", std::to_string(f_kmax)},
                                               {"work_cap", std::to_string(f_work)}};
        em.canonical = canonical_of("fourier.growth", cfg, g);
        const Spectrum s(a, p, f_eps2, g.threads);
        const GrowthTable t = lambda_growth(s, f_kmax, f_work);
        if (g.format == "csv") {
            em.csv_comment("exact");
            std::cout << "# doubling=" << double_str(t.doubling) << "; covering_constant="
                      << (t.covering_constant ? q_str(*t.covering_constant) : "")
                      << "; all_bounds_ok=" << (t.all_bounds_ok ? "true" : "false") << "\n";
            std::cout << "k,size,bound_checked,bound_ok\n";
            for (const GrowthRow& r : t.rows) {
                std::cout << r.k << ',' << r.size << ','
                          << (r.bound_checked ? "true" : "false") << ','
                          << (r.bound_ok ? "true" : "false") << "\n";
            }
            return 0;
        }
        ordered_json j = em.rec("exact");
        j["coeffs"] = a.coeffs();
        j["p"] = p.p();
        j["eps2"] = f_eps2;
        ordered_json arr = ordered_json::array();
        for (const GrowthRow& r : t.rows) {
            arr.push_back(ordered_json{{"k", r.k},
                                       {"size", r.size},
                                       {"bound_checked", r.bound_checked},
                                       {"bound_ok", r.bound_ok}});
        }
        j["rows"] = arr;
        j["doubling"] = t.doubling;
        if (t.covering_constant) j["covering_constant"] = q_str(*t.covering_constant);
        j["all_bounds_ok"] = t.all_bounds_ok;
        em.out(j);
        return 0;
    });

    reg(gap_enum, false, [&]() {
        const Gap gp = build_gap(gs);
        std::map<std::string, std::string> cfg{{"volume_cap", std::to_string(gap_volume_cap)}};
        gap_cfg(cfg, gp);
        em.canonical = canonical_of("gap.enum", cfg, g);
        const GapImage img = enumerate(gp, gap_volume_cap);
        ordered_json j = em.rec("exact");
        j["gap"] = gap_json(gp);
        j["size"] = img.set.size();
        j["collisions"] = img.collisions;
        j["proper"] = img.proper;
        j["members"] = members_json(img.set.members());
        em.out(j);
        return 0;
    });

    reg(gap_proper, false, [&]() {
        const Gap gp = build_gap(gs);
        std::map<std::string, std::string> cfg{{"volume_cap", std::to_string(gap_volume_cap)}};
        gap_cfg(cfg, gp);
        em.canonical = canonical_of("gap.proper", cfg, g);
        const GapImage img = enumerate(gp, gap_volume_cap);
        ordered_json j = em.rec("exact");
        j["gap"] = gap_json(gp);
        j["proper"] = img.proper;
        j["collisions"] = img.collisions;
        em.out(j);
        return 0;
    });

    reg(gap_pnorm, false, [&]() {
        const Gap gp = build_gap(gs);
        std::map<std::string, std::string> cfg{{"volume_cap", std::to_string(gap_volume_cap)},
                                               {"x", std::to_string(pnorm_x)}};
        gap_cfg(cfg, gp);
        em.canonical = canonical_of("gap.pnorm", cfg, g);
        const PNormTable t(gp, gap_volume_cap);
        ordered_json j = em.rec("float-1e-9");
        j["gap"] = gap_json(gp);
        j["x"] = pnorm_x;
        j["coefficients"] = t.coefficients(pnorm_x);
        j["p_norm"] = t.p_norm(pnorm_x);
        em.out(j);
        return 0;
    });

    auto build_zset = [&](const std::string& text) {
        const std::vector<std::int64_t> m = parse_i64_list(text);
        return set_modulus ? ZSet(m, PrimeModulus(set_modulus)) : ZSet(m);
    };

    reg(gap_sumset, false, [&]() {
        const ZSet a = build_zset(set_a);
        const ZSet b = build_zset(set_b);
        std::map<std::string, std::string> cfg{{"a", join(a.members())},
                                               {"b", join(b.members())},
                                               {"modulus", std::to_string(set_modulus)},
                                               {"work_cap", std::to_string(set_work)}};
        em.canonical = canonical_of("gap.sumset", cfg, g);
        const ZSet s = sumset(a, b, set_work);
        ordered_json j = em.rec("exact");
        j["a_size"] = a.size();
        j["b_size"] = b.size();
        j["size"] = s.size();
        j["members"] = members_json(s.members());
        em.out(j);
        return 0;
    });

    reg(gap_double, false, [&]() {
        const ZSet a = build_zset(set_a);
        std::map<std::string, std::string> cfg{{"a", join(a.members())},
                                               {"modulus", std::to_string(set_modulus)},
                                               {"work_cap", std::to_string(set_work)}};
        em.canonical = canonical_of("gap.double", cfg, g);
        const ZSet s = sumset(a, a, set_work);
        const mpq_class ratio = doubling(a, set_work);
        ordered_json j = em.rec("exact");
        j["size"] = a.size();
        j["doubled_size"] = s.size();
        j["ratio"] = q_str(ratio);
        j["ratio_double"] = ratio.get_d();
        em.out(j);
        return 0;
    });

    reg(gap_cover, false, [&]() {
        const ZSet a = build_zset(set_a);
        std::map<std::string, std::string> cfg{{"a", join(a.members())},
                                               {"modulus", std::to_string(set_modulus)},
                                               {"k_max", std::to_string(cover_kmax)},
                                               {"work_cap", std::to_string(set_work)}};
        em.canonical = canonical_of("gap.cover", cfg, g);
        const RuzsaCover c = ruzsa_cover(a, cover_kmax, set_work);
        ordered_json j = em.rec("exact");
        j["a_size"] = c.a_size;
        j["a4_size"] = c.a4_size;
        j["x_size"] = c.x.size();
        j["x_members"] = members_json(c.x.members());
        j["covering_constant"] = q_str(c.covering_constant);
        j["size_ok"] = c.size_ok;
        ordered_json arr = ordered_json::array();
        for (const RuzsaKCheck& k : c.checks) {
            arr.push_back(ordered_json{{"k", k.k},
                                       {"ka_size", k.ka_size},
                                       {"inclusion_ok", k.inclusion_ok},
                                       {"count_ok", k.count_ok}});
        }
        j["checks"] = arr;
        j["all_ok"] = c.all_ok;
        em.out(j);
        return 0;
    });

    reg(gap_fit, false, [&]() {
        const ZSet a = build_zset(set_a);
        const mpq_class cap = parse_mpq(fit_cap);
        std::map<std::string, std::string> cfg{{"a", join(a.members())},
                                               {"modulus", std::to_string(set_modulus)},
                                               {"r_max", std::to_string(fit_rmax)},
                                               {"volume_cap", q_str(cap)}};
        em.canonical = canonical_of("gap.fit", cfg, g);
        const FreimanFit f = freiman_fit(a, fit_rmax, cap);
        ordered_json j = em.rec("exact");
        j.update(fit_json(f));
        em.out(j);
        return 0;
    });

    reg(gap_reduce, false, [&]() {
        const Gap gp = build_gap(gs);
        const std::vector<std::int64_t> um = parse_i64_list(set_u);
        const ZSet u = gp.ambient ? ZSet(um, *gp.ambient) : ZSet(um);
        std::map<std::string, std::string> cfg{{"volume_cap", std::to_string(gap_volume_cap)},
                                               {"u", join(u.members())}};
        gap_cfg(cfg, gp);
        em.canonical = canonical_of("gap.reduce", cfg, g);
        const RankReduction r = rank_reduce(gp, u, gap_volume_cap);
        ordered_json j = em.rec("exact");
        j["initial_rank"] = r.initial_rank;
        j["steps"] = r.steps;
        j["full_rank"] = r.full_rank;
        j["gap"] = gap_json(r.gap);
        ordered_json rel = ordered_json::array();
        for (const auto& k : r.relations) {
            ordered_json one = ordered_json::array();
            for (const mpz_class& e : k) one.push_back(z_str(e));
            rel.push_back(one);
        }
        j["relations"] = rel;
        em.out(j);
        return 0;
    });

    reg(gap_certify, false, [&]() {
        const Gap gp = build_gap(gs);
        const NormalVector a(parse_i64_list(cert_coeffs));
        std::map<std::string, std::string> cfg{{"coeffs", join(a.coeffs())},
                                               {"c", double_str(cert_c)},
                                               {"commensurability_bound",
                                                std::to_string(cert_comm_bound)}};
        gap_cfg(cfg, gp);
        em.canonical = canonical_of("gap.certify", cfg, g);
        Certificate cert;
        cert.gap = gp;
        cert.commensurability_bound = cert_comm_bound;
        const CertificateReport r = structure_certificate_check(a, cert, cert_c);
        ordered_json j = em.rec("float-1e-9");
        j["gap"] = gap_json(gp);
        j["d_pm"] = q_str(r.dim.d_pm);
        j.update(cert_json(r));
        em.out(j);
        return 0;
    });

    auto run_scan = [&]() {
        const NormalVector a(parse_i64_list(scan_coeffs));
        ScanOptions opt;
        opt.chain = ParamChain(parse_mpq(scan_eps0), parse_mpq(scan_eps1), parse_mpq(scan_eps2));
        opt.bohr_threshold = scan_threshold;
        opt.fit_volume_cap = parse_mpq(scan_fit_cap);
        opt.fit_rank_max = scan_fit_rmax;
        opt.certificate_c = scan_c;
        opt.commensurability_bound = scan_comm_bound;
        opt.threads = g.threads;
        std::map<std::string, std::string> cfg{
            {"coeffs", join(a.coeffs())},
            {"eps0", q_str(opt.chain.eps0())},
            {"eps1", q_str(opt.chain.eps1())},
            {"eps2", q_str(opt.chain.eps2())},
            {"threshold", double_str(scan_threshold)},
            {"fit_volume_cap", q_str(opt.fit_volume_cap)},
            {"fit_rank_max", std::to_string(scan_fit_rmax)},
            {"c", double_str(scan_c)},
            {"commensurability_bound", std::to_string(scan_comm_bound)}};
        em.canonical = canonical_of("structure.scan", cfg, g);
        const StructureScan s = structure_scan(a, opt);
        ordered_json j = em.rec("float-1e-9");
        j["coeffs"] = a.coeffs();
        ordered_json stages = ordered_json::array();
        for (const ScanStage& st : s.stages) {
            stages.push_back(ordered_json{{"name", st.name}, {"ok", st.ok}, {"detail", st.detail}});
        }
        j["stages"] = stages;
        j["completed"] = s.completed;
        j["stopped_at"] = s.stopped_at;
        j["p"] = s.p;
        if (s.dim) j["dim"] = dim_json(*s.dim);
        if (s.classification) {
            j["classification"] = ordered_json{{"exceptional", s.classification->exceptional},
                                               {"p_x", q_str(s.classification->p_x)},
                                               {"p_y", q_str(s.classification->p_y)}};
        }
        j["spectrum_size"] = s.spectrum_size;
        j["bohr_size"] = s.bohr_size;
        j["outside_count"] = s.outside_count;
        j["extension_count"] = s.extension_count;
        if (s.fit) j["fit"] = fit_json(*s.fit);
        j["properize_levels"] = s.properize_levels;
        j["coeff_rank"] = s.coeff_rank;
        if (s.gap) j["gap"] = gap_json(*s.gap);
        if (s.certificate) j["certificate"] = cert_json(*s.certificate);
        j["measured_c"] = s.measured_c;
        em.out(j);
        return 0;
    };
    reg(structure_scan_cmd, false, run_scan);
    reg(gap_scan, false, run_scan);

    reg(lat_reduce, false, [&]() {
        LatticeBasis lb;
        lb.rows = parse_rows(lat_rows);
        std::map<std::string, std::string> cfg{{"rows", lat_rows}};
        em.canonical = canonical_of("lattice.reduce", cfg, g);
        const ReducedBasis rb = reduced_basis(lb);
        ordered_json j = em.rec("exact");
        j["d"] = rb.basis.d();
        j["covolume"] = q_str(rb.basis.covolume());
        ordered_json rows = ordered_json::array();
        for (const auto& row : rb.basis.rows) {
            ordered_json one = ordered_json::array();
            for (const mpq_class& e : row) one.push_back(q_str(e));
            rows.push_back(one);
        }
        j["rows"] = rows;
        j["product_ratio"] = rb.product_ratio;
        j["product_bound_ok"] = rb.product_bound_ok;
        em.out(j);
        return 0;
    });

    reg(lat_john, false, [&]() {
        LatticeBasis lb;
        lb.rows = parse_rows(lat_rows);
        Box box;
        box.halfwidths = parse_mpq_list(lat_box);
        std::map<std::string, std::string> cfg{{"rows", lat_rows},
                                               {"box", lat_box},
                                               {"enum_cap", std::to_string(lat_enum_cap)}};
        em.canonical = canonical_of("lattice.john", cfg, g);
        const DiscreteJohn dj = discrete_john(box, lb, lat_enum_cap);
        ordered_json j = em.rec("exact");
        ordered_json rows = ordered_json::array();
        for (const auto& row : dj.w.rows) {
            ordered_json one = ordered_json::array();
            for (const mpq_class& e : row) one.push_back(q_str(e));
            rows.push_back(one);
        }
        j["w"] = rows;
        j["n"] = dj.n;
        j["c"] = dj.c;
        j["points"] = dj.points;
        j["inner_ok"] = dj.inner_ok;
        j["outer_ok"] = dj.outer_ok;
        em.out(j);
        return 0;
    });

    reg(lat_relation, false, [&]() {
        const std::vector<std::int64_t> v = parse_i64_list(lat_v);
        const std::vector<std::int64_t> n = parse_i64_list(lat_n);
        const PrimeModulus p(lat_p);
        std::map<std::string, std::string> cfg{{"v", join(v)},
                                               {"n", join(n)},
                                               {"p", std::to_string(lat_p)},
                                               {"work_cap", std::to_string(lat_work)}};
        em.canonical = canonical_of("lattice.relation", cfg, g);
        const std::optional<Relation> r = find_relation(v, n, p, lat_work);
        ordered_json j = em.rec("exact");
        j["found"] = r.has_value();
        if (r) j["m"] = r->m;
        em.out(j);
        return 0;
    });

    reg(lat_properize, false, [&]() {
        const Gap gp = build_gap(gs);
        std::map<std::string, std::string> cfg{{"volume_cap", std::to_string(prop_volume_cap)}};
        gap_cfg(cfg, gp);
        em.canonical = canonical_of("lattice.properize", cfg, g);
        const ProperizeResult r = properize(gp, prop_volume_cap);
        ordered_json j = em.rec("exact");
        j["levels"] = r.levels;
        j["size_ratio"] = q_str(r.size_ratio);
        j["gap"] = gap_json(r.gap);
        em.out(j);
        return 0;
    });

    reg(selftest_cmd, false, [&]() {
        em.canonical = canonical_of("selftest", {}, g);
        const SelftestReport r = run_selftest(g.threads);
        for (const std::string& line : r.lines) {
            const ordered_json check = ordered_json::parse(line);
            if (g.format == "human") {
                if (check["ok"].get<bool>()) {
                    std::cout << "PASS " << check["check"].get<std::string>() << "\n";
                } else {
                    std::cout << "FAIL " << check["check"].get<std::string>()
                              << " expect=" << check["expect"].dump()
                              << " got=" << check["got"].dump() << "\n";
                }
                continue;
            }
            ordered_json j = em.rec("exact");
            for (const auto& [k, v] : check.items()) j[k] = v;
            std::cout << j.dump() << "\n";
        }
        ordered_json j = em.rec("exact");
        j["checks"] = r.lines.size();
        j["failures"] = r.failures;
        j["ok"] = r.failures == 0;
        em.out(j);
        return r.failures == 0 ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!seed_str.empty()) {
            g.seed = parse_u64(seed_str);
        } else if (const char* env = std::getenv("BSL_SEED")) {
            g.seed = parse_u64(env);
        }
        g.threads = threads_opt > 0
                        ? threads_opt
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        for (const Cmd& c : cmds) {
            if (!c.leaf->parsed()) continue;
            if (g.format == "csv" && !c.csv_ok) {
                throw PreconditionError(
                    "csv output is only available for pn report and fourier growth");
            }
            return c.run();
        }
        return 2;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 1;
    } catch (const ResourceError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 3;
    } catch (const PreconditionError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const MembershipError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const OverflowError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
