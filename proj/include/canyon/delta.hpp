#pragma once

#include <cstdint>
#include <vector>

#include "canyon/common.hpp"
#include "canyon/stats.hpp"

namespace canyon {

// Four-way classification of a one-step change in the count of particles at
// or below a threshold: empty-and-stays-empty, nonempty-and-unchanged,
// decrement, increment.
enum class DeltaSymbol { Under0, Over0, Minus1, Plus1 };

// pre: |f_now - f_prev| <= 1; anything larger means the count stream is
// corrupted (one step moves at most one particle across a threshold).
inline DeltaSymbol classify_delta(std::int64_t f_prev, std::int64_t f_now) {
    const std::int64_t d = f_now - f_prev;
    require(d >= -1 && d <= 1, "threshold count changed by more than 1 in one step");
    if (d == 0) return f_now == 0 ? DeltaSymbol::Under0 : DeltaSymbol::Over0;
    return d < 0 ? DeltaSymbol::Minus1 : DeltaSymbol::Plus1;
}

struct DeltaDensities {
    double p_under0 = 0.0;
    double p_over0 = 0.0;
    double p_minus1 = 0.0;
    double p_plus1 = 0.0;
};

// Stationary symbol probabilities at threshold t (exponential coordinates):
// ((1-t)e^{-t}, 1-(1+t)e^{-t}, te^{-t}, te^{-t}). Only defined for t < 1,
// where the count at the threshold keeps returning to zero.
DeltaDensities closed_form_delta_densities(double t);

struct DeltaDensityEstimate {
    double t = 0.0;
    DeltaDensities freq;
    DeltaDensities std_error;  // batch-means standard errors
    std::uint64_t steps = 0;
    std::uint64_t burnin = 0;
};

// Long-run symbol frequencies of the full chain started empty, measured at
// every threshold of t_grid (exponential coordinates, each < 1)
// simultaneously via the streaming count index. burnin steps are discarded,
// then steps steps are tallied; standard errors use 30 equal batches.
std::vector<DeltaDensityEstimate> estimate_delta_densities(const std::vector<double>& t_grid,
                                                           std::uint64_t steps,
                                                           std::uint64_t burnin,
                                                           std::uint64_t seed);

}  // namespace canyon
