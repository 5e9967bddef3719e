#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "canyon/config.hpp"

namespace canyon {

// One observer record. minimum is the post-step minimum with the chain's
// empty sentinel (1 for the full chain, the cutoff for the restricted one);
// threshold_counts is populated only when a grid is attached.
struct StepRecord {
    std::uint64_t k = 0;  // 1-based step index
    StepOutcome outcome = StepOutcome::Noop;
    double removed = 0.0;  // meaningful when outcome removed something
    double minimum = 1.0;
    std::uint64_t size = 0;
    std::vector<std::int64_t> threshold_counts;
};

struct RunOptions {
    std::uint64_t seed = 42;
    std::uint64_t replica = 0;
    std::uint64_t steps = 0;
    bool restricted = false;
    double cutoff = 0.0;             // restricted mode only
    std::vector<double> thresholds;  // full mode: attach count index when nonempty
    std::uint64_t stride = 1;        // observer sees every stride-th step
};

// Drives the chain for opt.steps steps from the empty configuration,
// invoking the observer at every stride-th step. steps = 0 yields no
// records.
void run(const RunOptions& opt, const std::function<void(const StepRecord&)>& observer);

struct MinOnlyResult {
    // Max of the post-step minimum over steps k in [window_start, steps];
    // 0 when the window is empty.
    double max_min_in_window = 0.0;
    double final_min = 1.0;  // sentinel 1 when the final configuration is empty
    std::uint64_t final_size = 0;
};

// Tight full-chain loop tracking only the minimum: no observers, no
// threshold index, storage preallocated. This is the throughput-critical
// mode; everything else layers on the observer path.
MinOnlyResult run_full_min_only(std::uint64_t seed, std::uint64_t replica, std::uint64_t steps,
                                std::uint64_t window_start);

}  // namespace canyon
