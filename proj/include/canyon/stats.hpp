#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace canyon {

struct EstimateWithCI {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
    // "plain-iid" for independent-sample functionals, "batch-means" for
    // time averages over one trajectory.
    std::string method = "plain-iid";
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for a binomial proportion. Unlike the normal
// interval it stays inside [0,1] and gives a nonzero upper bound at zero
// successes, which the transience verdicts rely on. Default z is two-sided
// 95%.
Interval wilson_interval(std::uint64_t successes, std::uint64_t n,
                         double z = 1.959963984540054);

// Mean and plain i.i.d. standard error from exact integer accumulators
// (sums of positive-integer samples). Integer sums make merged results
// independent of accumulation order.
EstimateWithCI mean_from_sums(std::uint64_t n, std::uint64_t sum, unsigned __int128 sumsq);

// Mean and batch-means standard error from per-batch averages of equal-sized
// batches; total_n only annotates the sample size.
EstimateWithCI batch_means(const std::vector<double>& batch_values, std::uint64_t total_n);

}  // namespace canyon
