#pragma once

#include <string>
#include <vector>

namespace bsl {

struct SelftestReport {
    std::vector<std::string> lines; // one canonical JSON record per check
    int failures = 0;
};

// Cross-module invariant suite with frozen expected values.  The emitted
// lines are byte-identical for any thread count and any run.
SelftestReport run_selftest(int threads = 1);

} // namespace bsl
