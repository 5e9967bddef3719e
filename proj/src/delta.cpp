#include "canyon/delta.hpp"

#include <algorithm>
#include <cmath>

#include "canyon/config.hpp"
#include "canyon/rng.hpp"
#include "canyon/step.hpp"

namespace canyon {

DeltaDensities closed_form_delta_densities(double t) {
    require_domain(t >= 0.0, "threshold must be nonnegative");
    require_domain(t < 1.0,
                   "threshold must lie strictly below 1; at and above it the count at the "
                   "threshold stops returning to zero and the four-symbol law degenerates");
    const double e = std::exp(-t);
    return {(1.0 - t) * e, 1.0 - (1.0 + t) * e, t * e, t * e};
}

std::vector<DeltaDensityEstimate> estimate_delta_densities(const std::vector<double>& t_grid,
                                                           std::uint64_t steps,
                                                           std::uint64_t burnin,
                                                           std::uint64_t seed) {
    require(!t_grid.empty(), "threshold grid must be nonempty");
    for (double t : t_grid)
        require(t >= 0.0 && t < 1.0, "every threshold must lie in [0,1) in exponential coordinates");
    require(std::is_sorted(t_grid.begin(), t_grid.end()), "threshold grid must be sorted ascending");
    require(steps >= 1, "need at least one measured step");

    constexpr std::size_t kBatches = 30;
    const std::size_t g = t_grid.size();

    std::vector<double> q_grid(g);
    for (std::size_t j = 0; j < g; ++j) q_grid[j] = from_exp(t_grid[j]);

    FullConfig cfg;
    cfg.enable_threshold_index(q_grid);
    const ThresholdIndex& index = *cfg.threshold_index();
    RngStream rng(seed, 0);

    for (std::uint64_t k = 0; k < burnin; ++k) step_full(cfg, rng.next_unit());

    std::vector<std::int64_t> prev(g);
    for (std::size_t j = 0; j < g; ++j) prev[j] = index.count_at_or_below(j);

    // counts[batch][threshold][symbol]
    std::vector<std::uint64_t> counts(kBatches * g * 4, 0);
    const std::uint64_t batch_len = (steps + kBatches - 1) / kBatches;

    for (std::uint64_t k = 0; k < steps; ++k) {
        step_full(cfg, rng.next_unit());
        const std::size_t batch = static_cast<std::size_t>(k / batch_len);
        for (std::size_t j = 0; j < g; ++j) {
            const std::int64_t now = index.count_at_or_below(j);
            const DeltaSymbol sym = classify_delta(prev[j], now);
            counts[(batch * g + j) * 4 + static_cast<std::size_t>(sym)] += 1;
            prev[j] = now;
        }
    }

    std::vector<DeltaDensityEstimate> out(g);
    for (std::size_t j = 0; j < g; ++j) {
        DeltaDensityEstimate& e = out[j];
        e.t = t_grid[j];
        e.steps = steps;
        e.burnin = burnin;

        double freq[4];
        double se[4];
        for (std::size_t sym = 0; sym < 4; ++sym) {
            std::uint64_t total = 0;
            std::vector<double> batch_fracs;
            batch_fracs.reserve(kBatches);
            for (std::size_t b = 0; b < kBatches; ++b) {
                const std::uint64_t start = b * batch_len;
                if (start >= steps) break;
                const std::uint64_t len = std::min(batch_len, steps - start);
                const std::uint64_t c = counts[(b * g + j) * 4 + sym];
                batch_fracs.push_back(static_cast<double>(c) / static_cast<double>(len));
                total += c;
            }
            freq[sym] = static_cast<double>(total) / static_cast<double>(steps);
            se[sym] = batch_fracs.size() >= 2 ? batch_means(batch_fracs, steps).std_error : 0.0;
        }
        e.freq = {freq[0], freq[1], freq[2], freq[3]};
        e.std_error = {se[0], se[1], se[2], se[3]};
    }
    return out;
}

}  // namespace canyon
