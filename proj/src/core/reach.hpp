#pragma once

// Reachability trees built by flowpipe construction, and the monolithic engine.

#include "composer.hpp"
#include "flowpipe.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hyreach {

enum class SearchOrder { breadth_first, depth_first };
enum class Representation { box, octagon };
enum class Termination { depth_bounded, synchronization };
enum class Verdict { safe, unsafe_possible, depth_bound_hit, synchronized };

const char* to_string(Verdict v);
const char* to_string(SearchOrder o);
const char* to_string(Representation r);
const char* to_string(Termination t);

struct AnalysisConfig {
    double delta = 0.01;
    double horizon = 10.0;
    std::size_t depth = 20;
    SearchOrder order = SearchOrder::breadth_first;
    Representation representation = Representation::box;
    bool fixed_point = false;
    Termination termination = Termination::depth_bounded;
    // decomposed engine only
    bool explicit_time = false;
    bool dedup = false;
    bool optimized_enumeration = false;

    double slack = 0.0;
    std::size_t max_nodes = 0;  // 0: unlimited
    bool store_segments = false;

    /// Throws std::invalid_argument.
    void validate() const;
};

enum class NodeStatus { open, expanded, depth_limit, dead_end, fixed_point, synchronized, node_limit };

const char* to_string(NodeStatus s);

struct ReachNode {
    std::size_t id = 0;
    std::optional<std::size_t> parent;
    std::size_t depth = 0;
    ComposedLocation location;
    bool zero_dwell = false;
    std::vector<StateSet> entry;  // one per subspace
    std::optional<ComposedJump> via;
    Interval window = Interval::empty();  // global-time window of the jump taken, when known
    SegmentRange enabled;                  // parent segments the jump was taken from
    std::vector<std::size_t> children;
    NodeStatus status = NodeStatus::open;
    std::optional<std::size_t> subsumer;
    std::size_t segment_count = 0;
    std::vector<std::vector<StateSet>> segments;  // [k][subspace], only when stored
    bool bad_hit = false;
};

struct ReachStats {
    std::size_t jumps_considered = 0;
    std::size_t combinations_pruned = 0;
    std::size_t successors_merged = 0;
    std::size_t fixed_point_hits = 0;
};

struct ReachResult {
    std::string engine;
    std::vector<ReachNode> nodes;
    /// Variable names of each subspace; the monolithic engine has a single subspace.
    std::vector<std::vector<std::string>> scopes;
    /// Local location names of each component (monolithic: composed location names).
    std::vector<std::vector<std::string>> location_names;
    /// Per subspace: indices of clock variables (neither shared nor time).
    std::vector<std::vector<VarIndex>> clocks;
    /// Label names addressed by ComposedJump::label.
    std::vector<std::string> labels;
    std::size_t max_depth = 0;
    Verdict verdict = Verdict::safe;
    ReachStats stats;
    double delta = 0.0;

    std::size_t node_count() const { return nodes.size(); }
    std::string location_name(const ComposedLocation& loc) const;
};

struct NamedTerm {
    std::string var;
    double coeff = 1.0;
};

struct NamedConstraint {
    std::vector<NamedTerm> terms;
    Relation rel = Relation::le;
    double bound = 0.0;
};

/// Set of states to avoid: a conjunction over variable names, in one location or in all ("*").
struct BadSet {
    std::string location = "*";
    std::vector<NamedConstraint> constraints;
};

/// True when the product of the given subspace sets may intersect the bad set.
bool may_intersect(const std::vector<StateSet>& sets, const std::vector<std::vector<std::string>>& scopes,
                   const BadSet& bad);

/// Monolithic analysis of a single automaton (typically a composition) with boxes.
ReachResult analyze(const HybridAutomaton& automaton, const AnalysisConfig& cfg,
                    const std::vector<BadSet>& bad = {});
/// As above with explicit initial sets instead of the automaton's init entries.
ReachResult analyze(const HybridAutomaton& automaton, const std::vector<std::pair<LocIndex, Box>>& init,
                    const AnalysisConfig& cfg, const std::vector<BadSet>& bad = {});

/// Post-hoc safety verdict over the stored segments (entry sets where segments were not stored).
Verdict check_safety(const ReachResult& result, const std::vector<BadSet>& bad);

}  // namespace hyreach
