#include "canyon/excursions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "canyon/parallel.hpp"
#include "canyon/step.hpp"

namespace canyon {

double closed_form_mean_return(double q) {
    require(q >= 0.0 && q < 1.0, "cutoff must lie in [0,1)");
    const double denom = 1.0 + std::log1p(-q);
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / denom;
}

ExcursionSample run_excursion(RngStream& rng, RestrictedConfig& cfg, std::uint64_t horizon) {
    require(horizon >= 1, "horizon must be at least 1");
    cfg.clear();
    const double q = cfg.cutoff();
    ExcursionSample s;
    for (std::uint64_t k = 1; k <= horizon; ++k) {
        step_restricted(cfg, sample_restricted_arrival(rng, q));
        if (cfg.size() > s.peak_size) s.peak_size = cfg.size();
        if (cfg.empty()) {
            s.length = k;
            return s;
        }
    }
    s.length = horizon;
    s.censored = true;
    return s;
}

ExcursionSample sample_return_time(RngStream& rng, double q, std::uint64_t horizon) {
    RestrictedConfig cfg(q);
    return run_excursion(rng, cfg, horizon);
}

namespace {

struct MeanBlock {
    std::uint64_t n = 0;
    std::uint64_t sum = 0;
    unsigned __int128 sumsq = 0;
    std::uint64_t censored = 0;
};

}  // namespace

MeanReturnEstimate estimate_mean_return(double q, std::uint64_t n, std::uint64_t seed,
                                        std::uint64_t horizon, unsigned threads) {
    require(q >= 0.0 && q < 1.0, "cutoff must lie in [0,1)");
    require(n >= 2, "need at least two excursions");

    const BlockPartition part = BlockPartition::for_replicas(n);
    auto blocks = run_blocks<MeanBlock>(part.n_blocks, threads, [&](std::uint64_t b) {
        MeanBlock acc;
        RestrictedConfig cfg(q);
        for (std::uint64_t r = part.begin(b); r < part.end(b, n); ++r) {
            RngStream rng(seed, r);
            const ExcursionSample s = run_excursion(rng, cfg, horizon);
            acc.n += 1;
            acc.sum += s.length;
            acc.sumsq += static_cast<unsigned __int128>(s.length) * s.length;
            acc.censored += s.censored ? 1 : 0;
        }
        return acc;
    });

    MeanBlock total;
    for (const MeanBlock& b : blocks) {
        total.n += b.n;
        total.sum += b.sum;
        total.sumsq += b.sumsq;
        total.censored += b.censored;
    }

    MeanReturnEstimate out;
    out.estimate = mean_from_sums(total.n, total.sum, total.sumsq);
    out.censored = total.censored;
    out.closed_form = closed_form_mean_return(q);
    return out;
}

ReturnTimeHistogram sample_return_histogram(double q, std::uint64_t n, std::uint64_t k_top,
                                            std::uint64_t seed, std::uint64_t horizon,
                                            unsigned threads) {
    require(q >= 0.0 && q < 1.0, "cutoff must lie in [0,1)");
    require(k_top >= 1, "histogram needs at least one bin");
    require(horizon > k_top, "horizon must exceed the top bin");

    const BlockPartition part = BlockPartition::for_replicas(n);
    auto blocks = run_blocks<ReturnTimeHistogram>(part.n_blocks, threads, [&](std::uint64_t b) {
        ReturnTimeHistogram h;
        h.counts.assign(k_top + 1, 0);
        RestrictedConfig cfg(q);
        for (std::uint64_t r = part.begin(b); r < part.end(b, n); ++r) {
            RngStream rng(seed, r);
            const ExcursionSample s = run_excursion(rng, cfg, horizon);
            h.n += 1;
            if (!s.censored && s.length <= k_top)
                h.counts[s.length] += 1;
            else
                h.overflow += 1;
        }
        return h;
    });

    ReturnTimeHistogram total;
    total.counts.assign(k_top + 1, 0);
    for (const ReturnTimeHistogram& h : blocks) {
        total.n += h.n;
        total.overflow += h.overflow;
        for (std::size_t i = 0; i <= k_top; ++i) total.counts[i] += h.counts[i];
    }
    return total;
}

void sample_stationary_states(double q, std::uint64_t cycles, std::uint64_t seed,
                              std::uint64_t horizon,
                              const std::function<void(std::uint64_t,
                                                       const StationaryVisit&)>& sink) {
    require(q >= 0.0 && q < kCriticalQ, "cutoff must lie below the critical point");
    require(cycles >= 1, "need at least one cycle");

    RestrictedConfig cfg(q);
    for (std::uint64_t c = 0; c < cycles; ++c) {
        RngStream rng(seed, c);
        cfg.clear();
        bool returned = false;
        for (std::uint64_t k = 1; k <= horizon; ++k) {
            step_restricted(cfg, sample_restricted_arrival(rng, q));
            sink(c, {cfg.size(), cfg.minimum_or_cutoff()});
            if (cfg.empty()) {
                returned = true;
                break;
            }
        }
        if (!returned)
            throw StatGuardError(
                "regeneration cycle censored at the horizon; stationary sample is biased");
    }
}

StationarySummary stationary_pass(double q, std::uint64_t min_states, std::uint64_t seed,
                                  std::uint64_t horizon, MinLawGrid* grid_out) {
    require(q >= 0.0 && q < kCriticalQ, "cutoff must lie below the critical point");
    require(min_states >= 1, "need at least one state");

    constexpr std::size_t kGridPoints = 100;
    StationarySummary out;

    if (q == 0.0) {
        // Every cycle is one outside arrival on the empty set: the stationary
        // law is the point mass on empty and the minimum law is degenerate.
        out.cycles = min_states;
        out.states = min_states;
        out.empty_states = min_states;
        out.empty_fraction = 1.0;
        out.mean_states_per_cycle = 1.0;
        out.max_cdf_deviation = 0.0;
        if (grid_out) {
            grid_out->t_plus = 0.0;
            grid_out->s.clear();
            grid_out->empirical.clear();
            grid_out->target.clear();
        }
        return out;
    }

    const double t_plus = to_exp(q);
    // Grid in exponential coordinates, precomputed in uniform coordinates so
    // the per-state bucketing needs no log. below[i] counts states whose
    // minimum exceeds grid point i... accumulated as "number of grid points
    // strictly below the minimum" histogram, turned into exceedance counts
    // at the end.
    std::vector<double> grid_s(kGridPoints), grid_u(kGridPoints);
    for (std::size_t i = 0; i < kGridPoints; ++i) {
        grid_s[i] = t_plus * static_cast<double>(i) / static_cast<double>(kGridPoints);
        grid_u[i] = from_exp(grid_s[i]);
    }
    std::vector<std::uint64_t> strictly_below(kGridPoints + 1, 0);

    RestrictedConfig cfg(q);
    std::uint64_t cycle = 0;
    while (out.states < min_states) {
        RngStream rng(seed, cycle);
        cfg.clear();
        bool returned = false;
        for (std::uint64_t k = 1; k <= horizon; ++k) {
            step_restricted(cfg, sample_restricted_arrival(rng, q));
            const double nmin = cfg.minimum_or_cutoff();
            // number of grid points with grid_u < nmin (exceedance is strict)
            const std::size_t b = static_cast<std::size_t>(
                std::lower_bound(grid_u.begin(), grid_u.end(), nmin) - grid_u.begin());
            strictly_below[b] += 1;
            out.states += 1;
            if (cfg.empty()) {
                out.empty_states += 1;
                returned = true;
                break;
            }
        }
        if (!returned)
            throw StatGuardError(
                "regeneration cycle censored at the horizon; stationary sample is biased");
        cycle += 1;
    }

    out.cycles = cycle;
    out.empty_fraction = static_cast<double>(out.empty_states) / static_cast<double>(out.states);
    out.mean_states_per_cycle = static_cast<double>(out.states) / static_cast<double>(out.cycles);

    // exceed[i] = #states whose minimum is > grid_u[i] = sum of buckets > i
    double max_dev = 0.0;
    std::vector<double> empirical(kGridPoints), target(kGridPoints);
    std::uint64_t suffix = 0;
    for (std::size_t i = kGridPoints; i-- > 0;) {
        suffix += strictly_below[i + 1];
        empirical[i] = static_cast<double>(suffix) / static_cast<double>(out.states);
        target[i] = 1.0 - grid_s[i];
        const double dev = std::abs(empirical[i] - target[i]);
        if (dev > max_dev) max_dev = dev;
    }
    out.max_cdf_deviation = max_dev;

    if (grid_out) {
        grid_out->t_plus = t_plus;
        grid_out->s = std::move(grid_s);
        grid_out->empirical = std::move(empirical);
        grid_out->target = std::move(target);
    }
    return out;
}

double stationary_min_uniformity(double q, std::uint64_t n_samples, std::uint64_t seed,
                                 std::uint64_t horizon) {
    return stationary_pass(q, n_samples, seed, horizon).max_cdf_deviation;
}

}  // namespace canyon
