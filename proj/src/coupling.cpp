#include "canyon/coupling.hpp"

#include <algorithm>
#include <vector>

#include "canyon/rng.hpp"
#include "canyon/step.hpp"

namespace canyon {

namespace {

// Every removal in either chain takes the current minimum, so a sorted
// mirror can be maintained from the step outcome alone: insert at the upper
// bound, erase the front on a removal. The mirror makes the per-step
// containment checks linear; it is verified against the engine's own
// contents at the end of each trial.

void mirror_insert(std::vector<double>& v, double p) {
    v.insert(std::upper_bound(v.begin(), v.end(), p), p);
}

void mirror_apply(std::vector<double>& v, const StepResult& r, double inserted,
                  bool has_insert) {
    if (r.has_removed()) v.erase(v.begin());
    if (has_insert) mirror_insert(v, inserted);
}

// x dominated by y: sorted decreasing, |x| <= |y| and x_i <= y_i pairwise.
// Arguments are ascending; the largest pairs with the largest.
bool dominated(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() > y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[x.size() - 1 - i] > y[y.size() - 1 - i]) return false;
    return true;
}

}  // namespace

std::uint64_t run_monotone_coupling_trials(std::uint64_t trials, std::uint64_t steps,
                                           std::uint64_t seed) {
    std::uint64_t violations = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        RngStream rng(seed, trial);

        // y: random small configuration; x: random sub-multiset of y
        std::vector<double> xs, ys;
        const int ny = static_cast<int>(rng.next_unit() * 8);
        for (int i = 0; i < ny; ++i) {
            const double p = rng.next_unit();
            mirror_insert(ys, p);
            if (rng.next_unit() < 0.5) mirror_insert(xs, p);
        }
        FullConfig x(xs), y(ys);

        bool ok = true;
        for (std::uint64_t k = 0; k < steps; ++k) {
            const double u = rng.next_unit();
            mirror_apply(xs, step_full(x, u), u, true);
            mirror_apply(ys, step_full(y, u), u, true);
            if (!std::includes(ys.begin(), ys.end(), xs.begin(), xs.end())) {
                ok = false;
                break;
            }
        }
        if (ok && (x.sorted_particles() != xs || y.sorted_particles() != ys))
            ok = false;  // mirror drifted: the engine removed something else
        if (!ok) violations += 1;
    }
    return violations;
}

std::uint64_t run_domination_trials(std::uint64_t trials, std::uint64_t steps,
                                    std::uint64_t seed) {
    std::uint64_t violations = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        RngStream rng(seed, trial);
        const double q = 0.1 + 0.8 * rng.next_unit();

        // Random dominated pair: y gets a few particles; walking y's
        // particles from the largest down, each kept one anchors an x
        // particle at or below it, which preserves pairwise domination
        // after sorting.
        std::vector<double> ys, xs;
        const int ny = static_cast<int>(rng.next_unit() * 6);
        for (int i = 0; i < ny; ++i) ys.push_back(q * rng.next_unit());
        std::sort(ys.begin(), ys.end());
        for (std::size_t i = ys.size(); i-- > 0;)
            if (rng.next_unit() < 0.6) xs.push_back(ys[i] * rng.next_unit());
        std::sort(xs.begin(), xs.end());

        RestrictedConfig x(q, xs), y(q, ys);

        bool ok = dominated(xs, ys);
        for (std::uint64_t k = 0; ok && k < steps; ++k) {
            const RestrictedArrival a = sample_restricted_arrival(rng, q);
            mirror_apply(xs, step_restricted(x, a), a.pos, a.is_inside);
            mirror_apply(ys, step_restricted(y, a), a.pos, a.is_inside);
            if (!dominated(xs, ys)) ok = false;
        }
        if (ok && (x.sorted_particles() != xs || y.sorted_particles() != ys))
            ok = false;  // mirror drifted: the engine removed something else
        if (!ok) violations += 1;
    }
    return violations;
}

}  // namespace canyon
