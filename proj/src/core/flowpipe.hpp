#pragma once

// Flowpipes over a fixed time step. Segment k covers local time [k*delta, (k+1)*delta]
// and is computed on demand, so long flowpipes cost nothing until queried.

#include "geometry.hpp"

#include <utility>

namespace hyreach {

/// Half-open range [first, last) of segment indices.
struct SegmentRange {
    std::size_t first = 0;
    std::size_t last = 0;

    bool empty() const { return first >= last; }
    std::size_t size() const { return empty() ? 0 : last - first; }
    SegmentRange meet(const SegmentRange& o) const {
        return {std::max(first, o.first), std::min(last, o.last)};
    }

    friend bool operator==(const SegmentRange&, const SegmentRange&) = default;
};

class LazyFlowpipe {
public:
    /// `entry` is clipped to the invariant. A zero-dwell flowpipe has the single segment `entry`.
    LazyFlowpipe(const StateSet& entry, std::vector<double> rates, Condition invariant, double delta,
                 std::size_t max_segments, bool zero_dwell, double slack = 0.0);

    const StateSet& entry() const { return entry_; }
    bool zero_dwell() const { return zero_dwell_; }
    double delta() const { return delta_; }
    const Condition& invariant() const { return invariant_; }
    /// Number of leading nonempty segments.
    std::size_t length() const { return length_; }

    StateSet segment(std::size_t k) const;
    /// Union of segments [r.first, r.last), over-approximated in the set's representation.
    StateSet hull(SegmentRange r) const;
    /// Segments within `within` that intersect `guard`; these always form one contiguous range.
    SegmentRange enabling(const Condition& guard, SegmentRange within) const;
    SegmentRange all() const { return {0, length_}; }

    /// Local time interval of segment k.
    Interval segment_time(std::size_t k) const;

private:
    // Local-time interval on which (entry + rates*tau) meets cond and the invariant; false if
    // the constraints are not separable per variable.
    bool feasible_time(const Condition& cond, Interval& tau) const;
    bool nonempty_with(std::size_t k, const Condition& guard) const;

    StateSet entry_;
    std::vector<double> rates_;
    Condition invariant_;
    double delta_;
    std::size_t cap_;
    bool zero_dwell_;
    double slack_;
    std::size_t length_ = 0;
};

/// Materialized flowpipe: the nonempty leading segments.
std::vector<StateSet> flowpipe(const StateSet& entry, const std::vector<double>& rates, const Condition& invariant,
                               double delta, double horizon, bool zero_dwell, double slack = 0.0);

/// Hull over the segments of transform(segment & guard, reset), intersected with the target invariant.
StateSet jump_successor(const std::vector<StateSet>& segments, const Condition& guard, const AffineReset& reset,
                        const Condition& target_invariant, double slack = 0.0);

std::size_t segment_cap(double delta, double horizon);

}  // namespace hyreach
