#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace hardedge {

struct CheckResult {
    int criterion = 0;
    std::string title;
    bool pass = false;
    nlohmann::ordered_json measured;
};

struct ValidationConfig {
    std::uint64_t seed = 20240611;
    /// Criteria to run (1..10); empty means all.
    std::set<int> only;
};

/// Runs the acceptance suite. Criterion 10 reruns the other selected
/// criteria (all of 1..9 when it is selected alone) under a different worker
/// count and compares the serialized reports byte for byte.
std::vector<CheckResult> run_validation(const ValidationConfig& config);

/// Report document: seed, per-check results and the overall verdict.
/// Contains no timings, so equal seeds give byte-identical reports.
nlohmann::ordered_json validation_report(const std::vector<CheckResult>& results,
                                         const ValidationConfig& config);

/// One human-readable line per check.
std::string summary_line(const CheckResult& result);

}  // namespace hardedge
