#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ablab/io.hpp"

namespace ablab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string summary;  ///< one human-readable line
    json checks = json::array();
    double seconds = 0.0;  ///< wall time, kept out of the JSON report
};

struct AcceptanceOptions {
    std::uint64_t seed = 42;
    /// Replica counts divided by ten (floor 500); for smoke runs only.
    bool quick = false;
    /// Reruns criteria 1-10 with a different worker count and compares the JSON bytes.
    bool verify_determinism = true;
};

struct AcceptanceReport {
    std::vector<CriterionResult> results;
    [[nodiscard]] bool pass() const;
    /// Deterministic JSON body (no timings).
    [[nodiscard]] json to_json(const AcceptanceOptions& options) const;
};

/// Runs every criterion in order, calling on_result after each one finishes.
AcceptanceReport run_acceptance(const AcceptanceOptions& options,
                                const std::function<void(const CriterionResult&)>& on_result = {});

/// A single criterion (1-10) without the determinism rerun.
[[nodiscard]] CriterionResult run_criterion(int id, const AcceptanceOptions& options);

/// "criterion  3 PASS  stationary law: ..." (fixed layout for logs).
[[nodiscard]] std::string format_result_line(const CriterionResult& r);

}  // namespace ablab
