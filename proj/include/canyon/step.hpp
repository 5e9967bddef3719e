#pragma once

#include <cmath>

#include "canyon/common.hpp"
#include "canyon/config.hpp"
#include "canyon/rng.hpp"

namespace canyon {

// t = -ln(1-q) maps [0,1) to [0,inf). Simulation runs in uniform coordinates
// throughout; this view is applied only at the edges, which keeps exp/log out
// of hot loops and avoids precision loss near 1.
inline double to_exp(double q) {
    require_domain(q >= 0.0 && q <= 1.0, "position must lie in [0,1)");
    require_domain(q < 1.0, "position 1 overflows the exponential coordinate");
    return -std::log1p(-q);
}

inline double from_exp(double t) {
    require_domain(t >= 0.0, "exponential coordinate must be nonnegative");
    return -std::expm1(-t);
}

// One step of the unrestricted chain: the arrival u is always inserted, and
// if it lands strictly right of the pre-step minimum, that minimum is
// removed. An arrival exactly equal to the minimum takes the add-only branch
// (ties are probability-zero; resolving them toward "add" is deterministic
// and never removes more than the rule allows).
inline StepResult step_full(FullConfig& cfg, double u) {
    const double m = cfg.minimum_or_one();
    if (u > m) {
        const double removed = cfg.pop_min();
        cfg.insert(u);
        return {StepOutcome::Displaced, removed};
    }
    cfg.insert(u);
    return {StepOutcome::Added, 0.0};
}

// One step of the restricted chain. Outside arrivals act purely as removals
// of the window minimum; inside arrivals are inserted and displace the
// minimum exactly when they land strictly right of it. Equal positions take
// the add-only branch, matching step_full.
inline StepResult step_restricted(RestrictedConfig& cfg, const RestrictedArrival& a) {
    if (a.is_inside) {
        require(a.pos <= cfg.cutoff(), "inside arrival must not exceed the cutoff");
        if (cfg.empty() || a.pos <= cfg.peek_min()) {
            cfg.insert(a.pos);
            return {StepOutcome::Added, 0.0};
        }
        const double removed = cfg.pop_min();
        cfg.insert(a.pos);
        return {StepOutcome::Displaced, removed};
    }
    if (cfg.empty()) return {StepOutcome::Noop, 0.0};
    return {StepOutcome::RemovedMin, cfg.pop_min()};
}

// Converts one uniform draw on [0,1) into a restricted arrival at cutoff q:
// draws at or below q land inside at their own position, everything else is
// the lumped outside event. Reusing u itself as the inside position couples
// restrictions of one trajectory at different cutoffs pathwise: the chain
// watched at cutoff q1 < q2 is exactly the q2 chain intersected with [0,q1]
// when both consume the same draw sequence. q = 0 always yields outside.
inline RestrictedArrival arrival_from_uniform(double u, double q) {
    if (q > 0.0 && u <= q) return RestrictedArrival::inside(u);
    return RestrictedArrival::outside();
}

// Outside with probability 1-q, otherwise inside at a uniform position on
// [0,q].
inline RestrictedArrival sample_restricted_arrival(RngStream& rng, double q) {
    require(q >= 0.0 && q < 1.0, "cutoff must lie in [0,1)");
    return arrival_from_uniform(rng.next_unit(), q);
}

}  // namespace canyon
