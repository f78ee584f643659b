#include "bsl/structure.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "bsl/error.hpp"
#include "bsl/intutil.hpp"
#include "bsl/lattice.hpp"
#include "bsl/prime.hpp"
#include "bsl/zset.hpp"

namespace bsl {

namespace {

std::string gap_brief(const Gap& g) {
    std::ostringstream os;
    os << "rank " << g.rank() << ", lengths";
    for (auto m : g.lengths) os << ' ' << m;
    return os.str();
}

} // namespace

StructureScan structure_scan(const NormalVector& a, const ScanOptions& opt) {
    if (a.n() > 12)
        throw PreconditionError("structure_scan supports n at most 12");

    StructureScan out;
    auto stage = [&](const char* name, auto&& body) {
        ScanStage s;
        s.name = name;
        try {
            s.detail = body();
            s.ok = true;
        } catch (const std::exception& e) {
            s.detail = e.what();
        }
        out.stages.push_back(s);
        if (!s.ok) out.stopped_at = name;
        return s.ok;
    };

    std::optional<PrimeModulus> pm;
    if (!stage("prime", [&] {
            pm = choose_scan_prime(a.coeffs());
            out.p = pm->p();
            return "p = " + std::to_string(out.p);
        }))
        return out;
    std::int64_t pp = static_cast<std::int64_t>(pm->p());

    if (!stage("dimension", [&] {
            out.dim = comb_dimension(a);
            return "d_pm = " + out.dim->d_pm.get_str() + ", regime " +
                   out.dim->regime;
        }))
        return out;

    if (!stage("classification", [&] {
            out.classification = classify_exceptional(a, *pm, opt.chain);
            return std::string(out.classification->exceptional
                                   ? "exceptional"
                                   : "unexceptional");
        }))
        return out;
    if (!out.classification->exceptional) {
        out.completed = true;
        return out;
    }

    std::optional<Spectrum> spec;
    if (!stage("spectrum", [&] {
            spec.emplace(a, *pm, opt.chain.eps2().get_d(), opt.threads);
            out.spectrum_size = spec->size();
            return "|Lambda| = " + std::to_string(out.spectrum_size);
        }))
        return out;

    BohrReport bohr;
    if (!stage("bohr", [&] {
            bohr = bohr_set(*spec, opt.bohr_threshold,
                            out.dim ? &*out.dim : nullptr);
            out.bohr_size = bohr.size;
            out.outside_count = 0;
            for (auto c : a.coeffs())
                if (!std::binary_search(bohr.members.begin(),
                                        bohr.members.end(),
                                        centered_rem(c, pp)))
                    ++out.outside_count;
            return "|A| = " + std::to_string(out.bohr_size) + ", outside = " +
                   std::to_string(out.outside_count);
        }))
        return out;

    if (!stage("fit", [&] {
            FreimanFit fit = freiman_fit(ZSet(bohr.members, *pm),
                                         opt.fit_rank_max, opt.fit_volume_cap);
            out.fit = fit;
            if (!fit.success)
                throw InvariantError("progression fit failed: " + fit.note);
            return gap_brief(fit.gap);
        }))
        return out;

    if (!stage("extend", [&] {
            GapImage img = enumerate(out.fit->gap);
            std::set<std::int64_t> missing;
            for (auto c : a.coeffs()) {
                std::int64_t v = centered_rem(c, pp);
                if (!img.set.contains(v)) missing.insert(v);
            }
            Gap g = out.fit->gap;
            for (auto v : missing) {
                g.basis.push_back(v);
                g.lengths.push_back(3);
            }
            g.validate();
            out.extension_count = static_cast<int>(missing.size());
            out.gap = std::move(g);
            return std::to_string(out.extension_count) +
                   " coefficient values grafted on";
        }))
        return out;

    if (!stage("properize", [&] {
            ProperizeResult pr = properize(*out.gap);
            out.properize_levels = pr.levels;
            out.gap = pr.gap;
            std::ostringstream os;
            os << "levels = " << pr.levels << ", size ratio = "
               << pr.size_ratio.get_str() << ", " << gap_brief(*out.gap);
            return os.str();
        }))
        return out;
    Gap proper_gap = *out.gap;

    if (!stage("reduce", [&] {
            std::vector<std::int64_t> vals;
            for (auto c : a.coeffs()) vals.push_back(centered_rem(c, pp));
            RankReduction rr = rank_reduce(*out.gap, ZSet(vals, *pm));
            out.coeff_rank = rr.initial_rank;
            out.gap = rr.gap;
            return "coefficient rank " + std::to_string(rr.initial_rank) +
                   ", steps " + std::to_string(rr.steps);
        }))
        return out;

    if (!stage("certificate", [&] {
            std::string note;
            Gap certify = *out.gap;
            if (!is_proper(certify)) {
                // Basis substitution can lose properness; the certified
                // object is then the properized progression, which still
                // contains every coefficient.
                certify = proper_gap;
                note = " (on the pre-reduction progression)";
            }
            Certificate cert;
            cert.gap = certify;
            cert.commensurability_bound = opt.commensurability_bound;
            CertificateReport rep =
                structure_certificate_check(a, cert, opt.certificate_c);
            out.certificate = rep;
            out.gap = std::move(certify);
            out.measured_c = rep.measured_c;
            std::ostringstream os;
            os << "measured C = " << rep.measured_c << ", "
               << (rep.all_ok ? "all clauses hold" : "clause failure") << note;
            return os.str();
        }))
        return out;

    out.completed = true;
    return out;
}

} // namespace bsl
