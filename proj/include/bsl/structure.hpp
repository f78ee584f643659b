#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "bsl/fourier.hpp"
#include "bsl/freiman.hpp"
#include "bsl/gap.hpp"
#include "bsl/hyperplane.hpp"

namespace bsl {

struct ScanOptions {
    ParamChain chain;
    double bohr_threshold = 0.01;
    mpq_class fit_volume_cap = 10;
    int fit_rank_max = 2;
    double certificate_c = 10;
    std::int64_t commensurability_bound = 0; // 0 picks n^2
    int threads = 1;
};

struct ScanStage {
    std::string name;
    bool ok = false;
    std::string detail;
};

// Full pipeline report; optional fields stay empty past the stage that
// stopped the scan.
struct StructureScan {
    std::vector<ScanStage> stages;
    bool completed = false;  // every attempted stage succeeded
    std::string stopped_at;  // name of the failing stage, empty otherwise

    std::uint64_t p = 0;
    std::optional<CombDim> dim;
    std::optional<ExceptionalReport> classification;
    std::uint64_t spectrum_size = 0;
    std::uint64_t bohr_size = 0;
    int outside_count = 0;   // coefficients outside the Bohr set
    int extension_count = 0; // distinct coefficient values grafted on
    std::optional<FreimanFit> fit;
    int properize_levels = 0;
    int coeff_rank = 0; // coefficient-matrix rank entering rank reduction
    std::optional<Gap> gap; // progression the certificate was checked on
    std::optional<CertificateReport> certificate;
    double measured_c = 0;
};

// Scan prime, combinatorial dimension, exceptional / unexceptional split,
// spectrum, Bohr set, bounded progression fit of the Bohr set, extension by
// the coefficients the fit missed (length 3 each), properization, rank
// reduction against the coefficient set, and the final certificate.  An
// unexceptional input ends the scan after classification; a stage failure is
// recorded under its stage name and stops the scan, never masked.
StructureScan structure_scan(const NormalVector& a,
                             const ScanOptions& opt = {});

} // namespace bsl
