#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "canyon/config.hpp"
#include "canyon/rng.hpp"
#include "canyon/stats.hpp"

namespace canyon {

// One excursion of the restricted chain away from the empty state.
// censored means the horizon was hit before the return; then length equals
// the horizon and the true return time is strictly larger.
struct ExcursionSample {
    std::uint64_t length = 0;     // return time, >= 1
    std::uint64_t peak_size = 0;  // largest configuration size seen
    bool censored = false;
};

// Expected return time to the empty state: 1/(1+ln(1-q)) below the critical
// cutoff, +infinity at and above it.
double closed_form_mean_return(double q);

// Runs the restricted chain at cutoff q from empty until it is empty again
// or horizon steps have elapsed. pre: q in [0,1), horizon >= 1.
ExcursionSample sample_return_time(RngStream& rng, double q, std::uint64_t horizon);

// Same, reusing caller-owned storage; cfg's cutoff must equal q and it is
// cleared on entry. The workhorse behind every excursion estimator.
ExcursionSample run_excursion(RngStream& rng, RestrictedConfig& cfg, std::uint64_t horizon);

struct MeanReturnEstimate {
    EstimateWithCI estimate;
    std::uint64_t censored = 0;  // nonzero: the mean is a lower bound
    double closed_form = 0.0;    // +inf at and above the critical cutoff
};

// Mean return time over n independent excursions (replica r uses stream
// (seed, r)), with plain i.i.d. standard error. pre: n >= 2.
MeanReturnEstimate estimate_mean_return(double q, std::uint64_t n, std::uint64_t seed,
                                        std::uint64_t horizon = 100000000ULL,
                                        unsigned threads = 1);

// Empirical distribution of the return time over n excursions: counts[k]
// holds #{tau = k} for k = 1..k_top, overflow holds #{tau > k_top}.
struct ReturnTimeHistogram {
    std::vector<std::uint64_t> counts;  // index 0 unused, 1..k_top
    std::uint64_t overflow = 0;
    std::uint64_t n = 0;
};

ReturnTimeHistogram sample_return_histogram(double q, std::uint64_t n, std::uint64_t k_top,
                                            std::uint64_t seed,
                                            std::uint64_t horizon = 100000000ULL,
                                            unsigned threads = 1);

// Summary view of one emitted stationary state.
struct StationaryVisit {
    std::uint64_t size = 0;
    double min_or_cutoff = 0.0;  // cutoff when empty
};

// Regeneration sampling: runs complete excursions from empty and emits every
// post-step state of each cycle exactly once (the cycle's final empty state
// included, the initial empty state not). The empirical law of the emitted
// states estimates the chain's stationary law; no burn-in is involved.
// Cycle c uses stream (seed, c). A cycle hitting the horizon throws
// StatGuardError. pre: q < critical cutoff, cycles >= 1.
void sample_stationary_states(double q, std::uint64_t cycles, std::uint64_t seed,
                              std::uint64_t horizon,
                              const std::function<void(std::uint64_t cycle,
                                                       const StationaryVisit&)>& sink);

struct StationarySummary {
    std::uint64_t cycles = 0;
    std::uint64_t states = 0;
    std::uint64_t empty_states = 0;
    double empty_fraction = 0.0;       // estimates 1 - t at cutoff q = 1-e^{-t}
    double mean_states_per_cycle = 0.0;  // estimates the mean return time
    double max_cdf_deviation = 0.0;    // see stationary_min_uniformity
};

// Detail grid for the minimum-law check: at grid point s (exponential
// coordinates, s = t_plus * i / grid_points) the stationary minimum exceeds
// s with probability 1 - s.
struct MinLawGrid {
    double t_plus = 0.0;
    std::vector<double> s;          // grid points
    std::vector<double> empirical;  // empirical P[minimum > s]
    std::vector<double> target;     // 1 - s
};

// Runs whole regeneration cycles until at least min_states states have been
// emitted and checks the stationary minimum against its uniform law in
// exponential coordinates: empty states count as the atom at
// t_plus = to_exp(q). Returns the summary plus the 100-point comparison
// grid. q = 0 is the degenerate atom and reports zero deviation.
StationarySummary stationary_pass(double q, std::uint64_t min_states, std::uint64_t seed,
                                  std::uint64_t horizon = 100000000ULL,
                                  MinLawGrid* grid_out = nullptr);

// Convenience wrapper returning just the sup-deviation over the grid.
double stationary_min_uniformity(double q, std::uint64_t n_samples, std::uint64_t seed,
                                 std::uint64_t horizon = 100000000ULL);

}  // namespace canyon
