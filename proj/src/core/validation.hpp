#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qrtc {

struct ValidationConfig {
    std::int64_t samples = 100000;  // per Monte Carlo suite
    std::uint64_t seed = 20260809;
    double rho = 1.0;       // emission rate for the epoch suite
    double epsilon = 0.1;   // guard fraction for the epoch suite
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
    std::uint64_t seed = 0;
    double seconds = 0.0;
};

/// Runs every cross-validation suite (analytic vs brute force vs Monte Carlo).
std::vector<CheckResult> run_validation(const ValidationConfig& config);

/// JSON report. Timings live in a separate "timings" array so the "results"
/// subtree is identical across runs with the same seed.
std::string validation_report_json(std::span<const CheckResult> results,
                                   const ValidationConfig& config);

} // namespace qrtc
