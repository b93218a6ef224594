#pragma once

// Replays an oracle trace against a reachability tree: every sampled clock
// valuation and every flash event must be covered by stored flowpipe segments
// along some discrete path of the tree.

#include "reach.hpp"
#include "swarm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hyreach {

enum class CoverageKind { initial, sample, pre_event, post_event };

const char* to_string(CoverageKind k);

struct ContainmentViolation {
    CoverageKind kind = CoverageKind::sample;
    double time = 0.0;
    std::optional<std::size_t> event;
    std::vector<double> clocks;
    std::string message;
};

struct ContainmentReport {
    std::size_t samples_checked = 0;
    std::size_t events_checked = 0;
    /// Set when the replay ran into a depth, node or synchronization leaf before the trace ended.
    std::optional<double> bounded_at;
    std::vector<ContainmentViolation> violations;

    bool ok() const { return violations.empty(); }
};

/// Clock variables are matched by name (x1, x2, ...); time variables (t_*) take the trace
/// time; other variables are not constrained. The result must carry stored segments.
/// Throws std::invalid_argument when segments are missing.
ContainmentReport check_containment(const OracleTrace& trace, const ReachResult& result, double tol = 1e-9);

}  // namespace hyreach
