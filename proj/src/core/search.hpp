#pragma once

// Tree exploration shared by the monolithic and decomposed engines.

#include "reach.hpp"

namespace hyreach::detail {

struct Candidate {
    ComposedLocation location;
    std::vector<StateSet> sets;
    std::optional<ComposedJump> via;
    Interval window = Interval::empty();
    SegmentRange enabled;
};

struct Expansion {
    std::vector<Candidate> successors;
    std::size_t segment_count = 0;
    std::vector<std::vector<StateSet>> segments;
    bool bad_hit = false;
};

class SearchProblem {
public:
    virtual ~SearchProblem() = default;
    virtual std::vector<Candidate> roots() = 0;
    virtual bool zero_dwell(const ComposedLocation& loc) const = 0;
    virtual Expansion expand(const ReachNode& node, bool want_segments) = 0;

    ReachStats stats;
};

/// `skeleton` carries the scopes, names and clocks; nodes and the verdict are filled in.
ReachResult explore(SearchProblem& problem, const AnalysisConfig& cfg, ReachResult skeleton);

bool all_clocks_zero(const std::vector<StateSet>& sets, const std::vector<std::vector<VarIndex>>& clocks);

bool location_matches(const ReachResult& result, const ComposedLocation& loc, const BadSet& bad);

}  // namespace hyreach::detail
