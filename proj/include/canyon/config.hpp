#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "canyon/common.hpp"
#include "canyon/fenwick.hpp"

namespace canyon {

// Cutoff position below which the chain's minimum keeps returning and above
// which arrivals eventually persist: 1 - 1/e. In exponential coordinates the
// same point is t = 1.
inline constexpr double kCriticalQ = 0.6321205588285577;
inline constexpr double kCriticalT = 1.0;

enum class StepOutcome { Added, Displaced, RemovedMin, Noop };

struct StepResult {
    StepOutcome outcome;
    double removed = 0.0;  // meaningful for Displaced and RemovedMin only

    bool has_removed() const {
        return outcome == StepOutcome::Displaced || outcome == StepOutcome::RemovedMin;
    }
};

// Arrival event for the restricted chain: either a concrete position inside
// [0, cutoff], or the single lumped "somewhere right of the cutoff" event.
// Outside arrivals never need a position; their only effect is a removal.
struct RestrictedArrival {
    bool is_inside;
    double pos;  // meaningful when is_inside

    static RestrictedArrival inside(double p) { return {true, p}; }
    static RestrictedArrival outside() { return {false, 0.0}; }
};

// Particle multiset of the unrestricted chain. The dynamics only ever insert,
// inspect the minimum, or remove it, so storage is a pair of array-backed
// min-heaps split at kCriticalQ. Particles right of the split are popped only
// on the rare steps where the left side is empty, so the left heap (the one
// every other pop touches) stays small and cache-resident while the right one
// just accumulates. Both halves together behave exactly like one min-heap.
class FullConfig {
public:
    FullConfig() = default;

    explicit FullConfig(const std::vector<double>& particles) {
        for (double p : particles) insert(p);
    }

    bool empty() const { return low_.empty() && high_.empty(); }
    std::size_t size() const { return low_.size() + high_.size(); }

    // Sizes the backing arrays for a run of the given length, assuming the
    // long-run survivor fraction of about 1/e plus slack, so the hot loop
    // never reallocates.
    void reserve_for_steps(std::uint64_t steps) {
        low_.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(steps, 1u << 16)));
        high_.reserve(static_cast<std::size_t>(steps * 0.372) + 64);
    }

    void insert(double p) {
        require(p >= 0.0 && p < 1.0, "particle position must lie in [0,1)");
        if (p < kCriticalQ) {
            low_.push_back(p);
            std::push_heap(low_.begin(), low_.end(), std::greater<>{});
        } else {
            high_.push_back(p);
            std::push_heap(high_.begin(), high_.end(), std::greater<>{});
        }
        if (index_) index_->on_insert(p);
    }

    // pre: !empty()
    double peek_min() const { return low_.empty() ? high_.front() : low_.front(); }

    double pop_min() {
        require(!empty(), "pop from empty configuration");
        std::vector<double>& h = low_.empty() ? high_ : low_;
        std::pop_heap(h.begin(), h.end(), std::greater<>{});
        const double m = h.back();
        h.pop_back();
        if (index_) index_->on_remove(m);
        return m;
    }

    // The step rule compares arrivals against min(particles ∪ {1}); an empty
    // configuration therefore reports 1, which no arrival in [0,1) exceeds.
    double minimum_or_one() const { return empty() ? 1.0 : peek_min(); }

    // Attaches (or replaces) a streaming count index over the given sorted
    // threshold grid and registers all current particles with it.
    void enable_threshold_index(std::vector<double> thresholds) {
        index_.emplace(std::move(thresholds));
        for (double p : low_) index_->on_insert(p);
        for (double p : high_) index_->on_insert(p);
    }

    const ThresholdIndex* threshold_index() const { return index_ ? &*index_ : nullptr; }

    // Closed-endpoint count of particles in [s, q]. Linear scan; fine off the
    // hot path, use the threshold index for per-step streaming counts.
    std::int64_t count_in_range(double s, double q) const {
        require(s <= q, "range lower end must not exceed upper end");
        auto part = [&](const std::vector<double>& h) {
            return std::count_if(h.begin(), h.end(), [&](double p) { return s <= p && p <= q; });
        };
        return part(low_) + part(high_);
    }

    std::vector<double> sorted_particles() const {
        std::vector<double> out;
        out.reserve(size());
        out.insert(out.end(), low_.begin(), low_.end());
        out.insert(out.end(), high_.begin(), high_.end());
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::vector<double> low_;   // min-heap of particles < kCriticalQ
    std::vector<double> high_;  // min-heap of particles >= kCriticalQ
    std::optional<ThresholdIndex> index_;
};

// Particle multiset of the chain watched through the window [0, cutoff].
// Everything outside the window is forgotten; outside arrivals reach it only
// as removal events, so memory stays proportional to the window population.
class RestrictedConfig {
public:
    explicit RestrictedConfig(double cutoff) : cutoff_(cutoff) {
        require(cutoff >= 0.0 && cutoff < 1.0, "cutoff must lie in [0,1)");
    }

    RestrictedConfig(double cutoff, const std::vector<double>& particles)
        : RestrictedConfig(cutoff) {
        for (double p : particles) insert(p);
    }

    double cutoff() const { return cutoff_; }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

    void insert(double p) {
        require(p >= 0.0 && p <= cutoff_, "particle must lie in [0, cutoff]");
        heap_.push_back(p);
        std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
    }

    // pre: !empty()
    double peek_min() const { return heap_.front(); }

    double pop_min() {
        require(!empty(), "pop from empty configuration");
        std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
        const double m = heap_.back();
        heap_.pop_back();
        return m;
    }

    // The restricted chain's minimum uses the cutoff itself as the empty
    // sentinel: min(particles ∪ {cutoff}).
    double minimum_or_cutoff() const { return heap_.empty() ? cutoff_ : heap_.front(); }

    std::int64_t count_in_range(double s, double q) const {
        require(s <= q, "range lower end must not exceed upper end");
        return std::count_if(heap_.begin(), heap_.end(),
                             [&](double p) { return s <= p && p <= q; });
    }

    std::vector<double> sorted_particles() const {
        std::vector<double> out(heap_.begin(), heap_.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    // Drops all particles; used to recycle one configuration across many
    // excursions without reallocating.
    void clear() { heap_.clear(); }

private:
    double cutoff_;
    std::vector<double> heap_;  // min-heap
};

}  // namespace canyon
