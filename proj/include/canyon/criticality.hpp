#pragma once

#include <cstdint>
#include <vector>

#include "canyon/stats.hpp"

namespace canyon {

struct SurvivalEstimate {
    double q = 0.0;
    std::uint64_t horizon = 0;
    std::uint64_t replicas = 0;
    std::uint64_t survivors = 0;
    double surviving_fraction = 0.0;
    double ci_halfwidth = 0.0;  // half the Wilson 95% interval width
    Interval ci;                // the Wilson interval itself
};

// Fraction of excursions still running after horizon steps, the
// finite-horizon stand-in for the survival probability (true survival is not
// observable in finite time; at a recurrent cutoff this fraction decays to 0
// as the horizon grows, at a transient one it converges to the survival
// probability from above). Replica r uses stream (seed, r), so estimates at
// different cutoffs with one seed are coupled pathwise and monotone in q.
// horizon = 0 trivially reports fraction 1.
SurvivalEstimate estimate_survival(double q, std::uint64_t horizon, std::uint64_t replicas,
                                   std::uint64_t seed, unsigned threads = 1);

struct CriticalPointEstimate {
    double lo = 0.0;
    double hi = 0.0;
    double estimate = 0.0;  // midpoint of the final bracket
    std::uint64_t replicas_per_probe = 0;
    std::uint64_t horizon = 0;
    std::uint64_t probes_used = 0;
};

// One probe's record, for reporting.
struct ProbeRecord {
    double q = 0.0;
    double fraction = 0.0;
    Interval ci;
    // "recurrent", "transient", or "indeterminate"
    const char* verdict = "indeterminate";
    std::uint64_t replicas = 0;
};

// Bisection on the survival indicator: a probe is recurrent when the Wilson
// upper bound is below 1e-3, transient when the lower bound is above 1e-3.
// An indeterminate probe is retried once at doubled replicas; if still
// indeterminate, the bracket shrinks symmetrically toward the probe and
// bisection continues. Both endpoints are validated first; same verdict at
// both ends raises StatGuardError. Stops when hi-lo <= tol or max_probes
// midpoint probes were spent.
CriticalPointEstimate estimate_critical_point(double lo, double hi, std::uint64_t max_probes,
                                              std::uint64_t horizon, std::uint64_t replicas,
                                              std::uint64_t seed, double tol = 0.01,
                                              unsigned threads = 1,
                                              std::vector<ProbeRecord>* probe_log = nullptr);

enum class TailFitFlag { Ok, NonPowerLaw, Degenerate };

struct TailFit {
    double exponent = 0.0;   // positive: fitted decay power of P[tau > k]
    double std_error = 0.0;  // bootstrap standard error of the exponent
    std::uint64_t k_lo = 0;  // first and last grid points actually used
    std::uint64_t k_hi = 0;
    double fit_quality = 0.0;  // R^2 of the log-log regression
    TailFitFlag flag = TailFitFlag::Degenerate;
    std::vector<std::uint64_t> k_used;
    std::vector<double> survival_used;  // empirical P[tau > k] at k_used
};

const char* tail_fit_flag_name(TailFitFlag flag);

// Least-squares slope of log P[tau > k] against log k over a geometric
// k-grid, from `replicas` excursions censored at the largest grid point.
// The smallest decade of the grid (k below 10 * min k) is discarded as
// pre-asymptotic, keeping at least 3 points; grid points with fewer than 10
// surviving excursions are dropped with the fit range truncated. Flags:
// Degenerate when fewer than 3 usable points remain or the survival curve
// plateaus (transient cutoff); NonPowerLaw when R^2 < 0.98. The bootstrap
// (200 resamples of the excursion-category counts) gives the exponent's
// standard error.
TailFit estimate_tail_exponent(double q, const std::vector<std::uint64_t>& k_grid,
                               std::uint64_t replicas, std::uint64_t seed,
                               unsigned threads = 1);

// Lower bound on the linear growth rate of the count at threshold t > 1:
// sup over an s-grid in [0,1) of (e^{-s} - e^{-t}) - (1-s). The supremum
// sits at s -> 1, giving e^{-1} - e^{-t}.
double growth_bound(double t);

// Empirical growth rate: count of particles at or below threshold t
// (exponential coordinates) after `steps` full-chain steps, divided by
// steps.
double empirical_growth_rate(double t, std::uint64_t steps, std::uint64_t seed);

// Max of the full chain's post-step minimum over steps in
// [window_start, steps]. pre: 1 <= window_start < steps.
double running_max_min(std::uint64_t seed, std::uint64_t steps, std::uint64_t window_start);

}  // namespace canyon
