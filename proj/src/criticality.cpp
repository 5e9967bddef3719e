#include "canyon/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "canyon/excursions.hpp"
#include "canyon/parallel.hpp"
#include "canyon/runner.hpp"
#include "canyon/step.hpp"

namespace canyon {

namespace {

// A probe counts as decided only when its whole 95% interval clears this
// level; otherwise the verdict is indeterminate.
constexpr double kSurvivalDecisionLevel = 1e-3;

}  // namespace

SurvivalEstimate estimate_survival(double q, std::uint64_t horizon, std::uint64_t replicas,
                                   std::uint64_t seed, unsigned threads) {
    require(q >= 0.0 && q < 1.0, "cutoff must lie in [0,1)");
    require(replicas >= 1, "need at least one replica");

    SurvivalEstimate out;
    out.q = q;
    out.horizon = horizon;
    out.replicas = replicas;

    if (horizon == 0) {
        // Nothing can return in zero steps.
        out.survivors = replicas;
        out.surviving_fraction = 1.0;
        out.ci = wilson_interval(replicas, replicas);
        out.ci_halfwidth = (out.ci.hi - out.ci.lo) / 2.0;
        return out;
    }

    const BlockPartition part = BlockPartition::for_replicas(replicas);
    auto blocks = run_blocks<std::uint64_t>(part.n_blocks, threads, [&](std::uint64_t b) {
        std::uint64_t survived = 0;
        RestrictedConfig cfg(q);
        for (std::uint64_t r = part.begin(b); r < part.end(b, replicas); ++r) {
            RngStream rng(seed, r);
            survived += run_excursion(rng, cfg, horizon).censored ? 1 : 0;
        }
        return survived;
    });
    for (std::uint64_t s : blocks) out.survivors += s;

    out.surviving_fraction =
        static_cast<double>(out.survivors) / static_cast<double>(replicas);
    out.ci = wilson_interval(out.survivors, replicas);
    out.ci_halfwidth = (out.ci.hi - out.ci.lo) / 2.0;
    return out;
}

namespace {

enum class Verdict { Recurrent, Transient, Indeterminate };

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Recurrent: return "recurrent";
        case Verdict::Transient: return "transient";
        default: return "indeterminate";
    }
}

Verdict classify(const SurvivalEstimate& e) {
    if (e.ci.hi < kSurvivalDecisionLevel) return Verdict::Recurrent;
    if (e.ci.lo > kSurvivalDecisionLevel) return Verdict::Transient;
    return Verdict::Indeterminate;
}

// One probe; an indeterminate first reading is retried once at doubled
// replicas before the caller falls back to shrinking the bracket.
Verdict probe(double q, std::uint64_t horizon, std::uint64_t replicas, std::uint64_t seed,
              unsigned threads, std::vector<ProbeRecord>* log) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::uint64_t n = attempt == 0 ? replicas : replicas * 2;
        const SurvivalEstimate e = estimate_survival(q, horizon, n, seed, threads);
        const Verdict v = classify(e);
        if (log)
            log->push_back({q, e.surviving_fraction, e.ci, verdict_name(v), n});
        if (v != Verdict::Indeterminate) return v;
    }
    return Verdict::Indeterminate;
}

}  // namespace

CriticalPointEstimate estimate_critical_point(double lo, double hi, std::uint64_t max_probes,
                                              std::uint64_t horizon, std::uint64_t replicas,
                                              std::uint64_t seed, double tol, unsigned threads,
                                              std::vector<ProbeRecord>* probe_log) {
    require(lo >= 0.0 && hi < 1.0 && lo < hi, "bracket must satisfy 0 <= lo < hi < 1");
    require(tol > 0.0, "tolerance must be positive");
    require(horizon >= 1 && replicas >= 1, "horizon and replicas must be at least 1");

    CriticalPointEstimate out;
    out.replicas_per_probe = replicas;
    out.horizon = horizon;

    if (hi - lo <= tol) {
        out.lo = lo;
        out.hi = hi;
        out.estimate = (lo + hi) / 2.0;
        return out;
    }

    const Verdict at_lo = probe(lo, horizon, replicas, seed, threads, probe_log);
    const Verdict at_hi = probe(hi, horizon, replicas, seed, threads, probe_log);
    if (at_lo != Verdict::Recurrent || at_hi != Verdict::Transient)
        throw StatGuardError(
            "bracket endpoints do not separate the transition (want a recurrent low end and "
            "a transient high end); widen the bracket or raise horizon/replicas");

    std::uint64_t used = 0;
    while (hi - lo > tol && used < max_probes) {
        const double mid = (lo + hi) / 2.0;
        const Verdict v = probe(mid, horizon, replicas, seed, threads, probe_log);
        used += 1;
        if (v == Verdict::Recurrent) {
            lo = mid;
        } else if (v == Verdict::Transient) {
            hi = mid;
        } else {
            // Still unreadable after doubling: split the difference on both
            // sides and keep going.
            lo = (lo + mid) / 2.0;
            hi = (mid + hi) / 2.0;
        }
    }

    out.lo = lo;
    out.hi = hi;
    out.estimate = (lo + hi) / 2.0;
    out.probes_used = used;
    return out;
}

const char* tail_fit_flag_name(TailFitFlag flag) {
    switch (flag) {
        case TailFitFlag::Ok: return "ok";
        case TailFitFlag::NonPowerLaw: return "non-power-law";
        default: return "degenerate";
    }
}

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

}  // namespace

TailFit estimate_tail_exponent(double q, const std::vector<std::uint64_t>& k_grid,
                               std::uint64_t replicas, std::uint64_t seed, unsigned threads) {
    require(q >= 0.0 && q < 1.0, "cutoff must lie in [0,1)");
    require(k_grid.size() >= 3, "need at least three grid points");
    require(std::is_sorted(k_grid.begin(), k_grid.end()) &&
                std::adjacent_find(k_grid.begin(), k_grid.end()) == k_grid.end(),
            "grid must be strictly increasing");
    require(k_grid.front() >= 1, "grid points must be positive");
    require(replicas >= 100, "tail fitting needs a real sample");

    const std::size_t J = k_grid.size();
    const std::uint64_t horizon = k_grid.back();

    // Category of an excursion = number of grid points its return time
    // exceeds (a censored excursion exceeds them all). Everything downstream,
    // bootstrap included, works off these J+1 integer counts.
    const BlockPartition part = BlockPartition::for_replicas(replicas);
    auto blocks =
        run_blocks<std::vector<std::uint64_t>>(part.n_blocks, threads, [&](std::uint64_t b) {
            std::vector<std::uint64_t> cats(J + 1, 0);
            RestrictedConfig cfg(q);
            for (std::uint64_t r = part.begin(b); r < part.end(b, replicas); ++r) {
                RngStream rng(seed, r);
                const ExcursionSample s = run_excursion(rng, cfg, horizon);
                std::size_t idx = J;
                if (!s.censored)
                    idx = static_cast<std::size_t>(
                        std::lower_bound(k_grid.begin(), k_grid.end(), s.length) -
                        k_grid.begin());
                // idx = #grid points strictly below tau ... tau > k_j iff j < idx
                cats[idx] += 1;
            }
            return cats;
        });
    std::vector<std::uint64_t> cats(J + 1, 0);
    for (const auto& b : blocks)
        for (std::size_t i = 0; i <= J; ++i) cats[i] += b[i];

    // survivors[j] = #{tau > k_grid[j]}
    std::vector<std::uint64_t> survivors(J, 0);
    {
        std::uint64_t suffix = 0;
        for (std::size_t j = J; j-- > 0;) {
            suffix += cats[j + 1];
            survivors[j] = suffix;
        }
    }

    TailFit out;

    // Discard the pre-asymptotic smallest decade; if the grid is too short to
    // afford that, keep all of it and let fit_quality judge.
    std::size_t start = 0;
    while (start < J && k_grid[start] < 10 * k_grid.front()) start += 1;
    if (J - start < 3) start = 0;

    // Truncate grid points whose survivor counts are too thin to log.
    std::size_t end = J;
    while (end > start && survivors[end - 1] < 10) end -= 1;

    if (end - start < 3) {
        out.flag = TailFitFlag::Degenerate;
        out.k_lo = k_grid[start];
        out.k_hi = k_grid[end > start ? end - 1 : start];
        return out;
    }

    std::vector<double> xs, ys;
    std::vector<std::uint64_t> k_used;
    std::vector<double> surv_used;
    for (std::size_t j = start; j < end; ++j) {
        const double p = static_cast<double>(survivors[j]) / static_cast<double>(replicas);
        xs.push_back(std::log(static_cast<double>(k_grid[j])));
        ys.push_back(std::log(p));
        k_used.push_back(k_grid[j]);
        surv_used.push_back(p);
    }
    out.k_lo = k_used.front();
    out.k_hi = k_used.back();
    out.k_used = k_used;
    out.survival_used = surv_used;

    // A transient cutoff leaves the curve flat at the survival probability.
    if (surv_used.back() > 0.8 * surv_used.front()) {
        out.flag = TailFitFlag::Degenerate;
        const LineFit f = least_squares(xs, ys);
        out.exponent = -f.slope;
        out.fit_quality = f.r2;
        return out;
    }

    const LineFit f = least_squares(xs, ys);
    out.exponent = -f.slope;
    out.fit_quality = f.r2;
    out.flag = f.r2 < 0.98 ? TailFitFlag::NonPowerLaw : TailFitFlag::Ok;

    // Bootstrap over the category counts: resample the replicas as i.i.d.
    // draws from the empirical category law and refit. Streams are indexed
    // far above replica indices so they never collide.
    constexpr int kBoot = 200;
    std::vector<std::uint64_t> cum(J + 1);
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i <= J; ++i) {
        acc += cats[i];
        cum[i] = acc;
    }
    std::vector<double> slopes;
    slopes.reserve(kBoot);
    for (int brep = 0; brep < kBoot; ++brep) {
        RngStream rng(seed, 0x8000000000000000ULL + static_cast<std::uint64_t>(brep));
        std::vector<std::uint64_t> bcats(J + 1, 0);
        for (std::uint64_t r = 0; r < replicas; ++r) {
            std::uint64_t pick = static_cast<std::uint64_t>(
                rng.next_unit() * static_cast<double>(replicas));
            if (pick >= replicas) pick = replicas - 1;
            const std::size_t idx = static_cast<std::size_t>(
                std::upper_bound(cum.begin(), cum.end(), pick) - cum.begin());
            bcats[idx] += 1;
        }
        std::uint64_t suffix = 0;
        std::vector<double> by;
        bool usable = true;
        std::vector<std::uint64_t> bsurv(J, 0);
        for (std::size_t j = J; j-- > 0;) {
            suffix += bcats[j + 1];
            bsurv[j] = suffix;
        }
        for (std::size_t j = start; j < end; ++j) {
            if (bsurv[j] == 0) {
                usable = false;
                break;
            }
            by.push_back(
                std::log(static_cast<double>(bsurv[j]) / static_cast<double>(replicas)));
        }
        if (!usable) continue;
        slopes.push_back(least_squares(xs, by).slope);
    }
    if (slopes.size() >= 2) {
        double m = 0;
        for (double s : slopes) m += s;
        m /= static_cast<double>(slopes.size());
        double ss = 0;
        for (double s : slopes) ss += (s - m) * (s - m);
        out.std_error = std::sqrt(ss / static_cast<double>(slopes.size() - 1));
    }
    return out;
}

double growth_bound(double t) {
    require_domain(t > 1.0, "threshold must exceed 1 in exponential coordinates");
    const double emt = std::exp(-t);
    double best = 0.0;
    constexpr int kGrid = 1000000;
    for (int i = 0; i < kGrid; ++i) {
        const double s = static_cast<double>(i) / kGrid;
        const double v = std::exp(-s) - emt - (1.0 - s);
        if (v > best) best = v;
    }
    return best;
}

double empirical_growth_rate(double t, std::uint64_t steps, std::uint64_t seed) {
    require(t > 0.0, "threshold must be positive");
    require(steps >= 1, "need at least one step");
    const double q = from_exp(t);
    RngStream rng(seed, 0);
    FullConfig cfg;
    cfg.reserve_for_steps(steps);
    for (std::uint64_t k = 0; k < steps; ++k) step_full(cfg, rng.next_unit());
    return static_cast<double>(cfg.count_in_range(0.0, q)) / static_cast<double>(steps);
}

double running_max_min(std::uint64_t seed, std::uint64_t steps, std::uint64_t window_start) {
    require(window_start >= 1 && window_start < steps, "window must start inside the run");
    return run_full_min_only(seed, 0, steps, window_start).max_min_in_window;
}

}  // namespace canyon
