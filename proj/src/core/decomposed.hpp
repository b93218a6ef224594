#pragma once

// Decomposed analysis: one state set per component, flowpipes synchronized by
// segment index, composed jumps discovered on demand.

#include "reach.hpp"

#include <functional>
#include <stdexcept>

namespace hyreach {

class UnsupportedFeature : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EnablingWindow {
    std::optional<std::size_t> label;
    std::vector<LocalMove> moves;           // ordered by component
    SegmentRange segments;                  // joint segment range
    Interval time = Interval::all();        // joint global-time interval (explicit time only)

    friend bool operator==(const EnablingWindow&, const EnablingWindow&) = default;
};

/// Per-component flowpipes of one composed location.
class SubspaceFlowpipes {
public:
    SubspaceFlowpipes(const NetworkIndex& idx, const ComposedLocation& loc, const std::vector<StateSet>& entry,
                      double delta, std::size_t max_segments, double slack,
                      std::vector<std::optional<VarIndex>> time_vars);

    std::size_t size() const { return pipes_.size(); }
    const LazyFlowpipe& operator[](std::size_t c) const { return pipes_[c]; }
    const ComposedLocation& location() const { return loc_; }
    bool zero_dwell() const { return zero_dwell_; }
    /// Segments on which every component's flowpipe is nonempty.
    SegmentRange all() const { return {0, length_}; }
    const std::optional<VarIndex>& time_var(std::size_t c) const { return time_vars_[c]; }
    bool explicit_time() const { return !time_vars_.empty() && time_vars_.front().has_value(); }

private:
    ComposedLocation loc_;
    std::vector<LazyFlowpipe> pipes_;
    std::vector<std::optional<VarIndex>> time_vars_;
    bool zero_dwell_ = false;
    std::size_t length_ = 0;
};

/// Combinations of local jumps carrying `label` that can be taken together. The optimized
/// variant abandons a combination as soon as its prefix has no common enabling segment.
std::vector<EnablingWindow> enumerate_combos(const NetworkIndex& idx, const SubspaceFlowpipes& fps, std::size_t label,
                                             bool optimized, ReachStats* stats = nullptr);
/// Unlabeled composed jumps: every nonempty subset of components moving together.
std::vector<EnablingWindow> enumerate_unlabeled(const NetworkIndex& idx, const SubspaceFlowpipes& fps, bool optimized,
                                                ReachStats* stats = nullptr);

/// Per-component states at the jump: union of the window's segments, restricted by the
/// guard of each moving component.
std::vector<StateSet> enabling_sets(const NetworkIndex& idx, const SubspaceFlowpipes& fps, const EnablingWindow& w);

/// Intersects every set with the time window on its time variable.
std::vector<StateSet> tighten_by_time(const std::vector<StateSet>& sets,
                                      const std::vector<std::optional<VarIndex>>& time_vars, Interval window);

struct Successor {
    EnablingWindow window;
    ComposedLocation target;
    std::vector<StateSet> enabling;
    std::vector<StateSet> sets;
};

/// Successor of a window, or nothing when some component's post-state is empty.
std::optional<Successor> make_successor(const NetworkIndex& idx, const SubspaceFlowpipes& fps, const EnablingWindow& w,
                                        double slack);
/// Recomputes the post-states of a successor from its enabling sets.
bool apply_jump(const NetworkIndex& idx, Successor& s, double slack);

using ClosureFn = std::function<std::vector<std::pair<ComposedLocation, std::vector<StateSet>>>(const Successor&)>;

/// Merges successors of windows that overlap in time: windows with identical per-component
/// resets and target are combined into one (enabling sets hulled); with a closure function,
/// a successor whose closure equals that of an earlier one is dropped.
std::vector<Successor> dedup_successors(const NetworkIndex& idx, std::vector<Successor> successors, double slack,
                                        const ClosureFn& closure = {}, ReachStats* stats = nullptr);

/// True iff every clock of every component is exactly zero.
bool detect_synchronization(const std::vector<StateSet>& sets, const std::vector<std::vector<VarIndex>>& clocks);

ReachResult analyze_decomposed(const Network& network, const AnalysisConfig& cfg,
                               const std::vector<BadSet>& bad = {});

}  // namespace hyreach
