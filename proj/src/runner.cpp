#include "canyon/runner.hpp"

#include "canyon/common.hpp"
#include "canyon/rng.hpp"
#include "canyon/step.hpp"

namespace canyon {

void run(const RunOptions& opt, const std::function<void(const StepRecord&)>& observer) {
    require(opt.stride >= 1, "stride must be at least 1");
    RngStream rng(opt.seed, opt.replica);
    StepRecord rec;

    if (opt.restricted) {
        require(opt.thresholds.empty(), "threshold counting applies to the full chain only");
        RestrictedConfig cfg(opt.cutoff);
        for (std::uint64_t k = 1; k <= opt.steps; ++k) {
            const RestrictedArrival a = sample_restricted_arrival(rng, opt.cutoff);
            const StepResult r = step_restricted(cfg, a);
            if (k % opt.stride == 0) {
                rec.k = k;
                rec.outcome = r.outcome;
                rec.removed = r.removed;
                rec.minimum = cfg.minimum_or_cutoff();
                rec.size = cfg.size();
                observer(rec);
            }
        }
        return;
    }

    FullConfig cfg;
    if (!opt.thresholds.empty()) cfg.enable_threshold_index(opt.thresholds);
    const ThresholdIndex* index = cfg.threshold_index();
    for (std::uint64_t k = 1; k <= opt.steps; ++k) {
        const StepResult r = step_full(cfg, rng.next_unit());
        if (k % opt.stride == 0) {
            rec.k = k;
            rec.outcome = r.outcome;
            rec.removed = r.removed;
            rec.minimum = cfg.minimum_or_one();
            rec.size = cfg.size();
            if (index) {
                rec.threshold_counts.resize(index->thresholds().size());
                for (std::size_t j = 0; j < rec.threshold_counts.size(); ++j)
                    rec.threshold_counts[j] = index->count_at_or_below(j);
            }
            observer(rec);
        }
    }
}

MinOnlyResult run_full_min_only(std::uint64_t seed, std::uint64_t replica, std::uint64_t steps,
                                std::uint64_t window_start) {
    RngStream rng(seed, replica);
    FullConfig cfg;
    cfg.reserve_for_steps(steps);
    MinOnlyResult res;
    for (std::uint64_t k = 1; k <= steps; ++k) {
        step_full(cfg, rng.next_unit());
        if (k >= window_start) {
            const double m = cfg.minimum_or_one();
            if (m > res.max_min_in_window) res.max_min_in_window = m;
        }
    }
    res.final_min = cfg.minimum_or_one();
    res.final_size = cfg.size();
    return res;
}

}  // namespace canyon
