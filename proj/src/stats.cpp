#include "canyon/stats.hpp"

#include <cmath>

#include "canyon/common.hpp"

namespace canyon {

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
    require(n >= 1, "interval needs at least one trial");
    require(successes <= n, "successes exceed trials");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // center - half is analytically 0 at successes == 0 (and symmetrically 1
    // at successes == n) but the sqrt leaves a tiny residual; pin the edges.
    double lo = successes == 0 ? 0.0 : center - half;
    double hi = successes == n ? 1.0 : center + half;
    if (lo < 0.0) lo = 0.0;
    if (hi > 1.0) hi = 1.0;
    return {lo, hi};
}

EstimateWithCI mean_from_sums(std::uint64_t n, std::uint64_t sum, unsigned __int128 sumsq) {
    require(n >= 1, "mean needs at least one sample");
    EstimateWithCI e;
    e.n = n;
    e.method = "plain-iid";
    const double nn = static_cast<double>(n);
    e.mean = static_cast<double>(sum) / nn;
    if (n >= 2) {
        // sum of squared deviations = sumsq - sum^2/n, computed in long
        // double to keep the cancellation benign at large n
        const long double ss = static_cast<long double>(sumsq) -
                               static_cast<long double>(sum) * static_cast<long double>(sum) / nn;
        const long double var = ss > 0 ? ss / (n - 1) : 0.0L;
        e.std_error = static_cast<double>(std::sqrt(static_cast<double>(var) / nn));
    }
    return e;
}

EstimateWithCI batch_means(const std::vector<double>& batch_values, std::uint64_t total_n) {
    require(batch_values.size() >= 2, "batch means need at least two batches");
    EstimateWithCI e;
    e.n = total_n;
    e.method = "batch-means";
    const std::size_t b = batch_values.size();
    double mean = 0.0;
    for (double v : batch_values) mean += v;
    mean /= static_cast<double>(b);
    double ss = 0.0;
    for (double v : batch_values) ss += (v - mean) * (v - mean);
    const double var_of_mean = ss / static_cast<double>(b - 1) / static_cast<double>(b);
    e.mean = mean;
    e.std_error = std::sqrt(var_of_mean);
    return e;
}

}  // namespace canyon
