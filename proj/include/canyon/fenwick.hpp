#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "canyon/common.hpp"

namespace canyon {

// Fenwick (binary indexed) tree over int64 counters.
// Public indices are 0-based; the classic 1-based layout is internal.
class Fenwick {
public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

    void add(std::size_t i, std::int64_t delta) {
        for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += delta;
    }

    // Sum of entries [0..i].
    std::int64_t prefix(std::size_t i) const {
        std::int64_t s = 0;
        for (std::size_t j = std::min(i + 1, tree_.size() - 1); j > 0; j -= j & (~j + 1))
            s += tree_[j];
        return s;
    }

    std::size_t size() const { return tree_.size() - 1; }

private:
    std::vector<std::int64_t> tree_;
};

// Streaming particle counts against a fixed sorted grid of thresholds.
// cell(p) is the first grid index whose threshold is >= p, so the
// prefix sum through index j counts exactly the particles with p <= grid[j]
// (closed endpoint). Positions above the whole grid land in an overflow
// cell that no query reaches. Updates and queries are O(log grid).
class ThresholdIndex {
public:
    explicit ThresholdIndex(std::vector<double> thresholds)
        : thresholds_(std::move(thresholds)), tree_(thresholds_.size() + 1) {
        require(!thresholds_.empty(), "threshold grid must be nonempty");
        require(std::is_sorted(thresholds_.begin(), thresholds_.end()),
                "threshold grid must be sorted ascending");
    }

    void on_insert(double p) { tree_.add(cell(p), +1); }
    void on_remove(double p) { tree_.add(cell(p), -1); }

    std::int64_t count_at_or_below(std::size_t grid_index) const {
        require(grid_index < thresholds_.size(), "grid index out of range");
        return tree_.prefix(grid_index);
    }

    const std::vector<double>& thresholds() const { return thresholds_; }

private:
    std::size_t cell(double p) const {
        return static_cast<std::size_t>(
            std::lower_bound(thresholds_.begin(), thresholds_.end(), p) - thresholds_.begin());
    }

    std::vector<double> thresholds_;
    Fenwick tree_;
};

}  // namespace canyon
