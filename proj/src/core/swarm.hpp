#pragma once

// Pulse-coupled swarm synchronization benchmark: model generator for the four
// encodings and an exact event-driven simulator of the clock update rule
//
//   x_j' = alpha * x_j   if alpha * x_j < f
//   x_j' = 0             otherwise
//
// applied to every non-flashing robot whenever some clock reaches f.

#include "model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hyreach {

enum class Variant { lsync1, lsync2, shd1, shd2 };

const char* to_string(Variant v);
/// Accepts lsync1/lsync2/shd1/shd2 as well as lsync-I, lsync-II, shd-I, shd-II.
std::optional<Variant> parse_variant(std::string_view text);

struct SwarmSpec {
    Variant variant = Variant::lsync1;
    std::size_t n = 3;
    double f = 1.0;
    double alpha = 1.1;
    double width = 0.0;
    /// Anchors a_i; empty means (i-1)/n.
    std::vector<double> anchors;

    double anchor(std::size_t i) const;  // 0-based robot index
    /// Throws std::invalid_argument.
    void validate() const;
};

std::string robot_name(std::size_t i);  // 0-based index -> "robot1"
std::string clock_name(std::size_t i);  // 0-based index -> "x1"

Network generate_model(const SwarmSpec& spec);

struct FlashEvent {
    double time = 0.0;
    std::string exact_time;           // rational, "p/q"
    std::vector<std::size_t> flashers;  // 0-based
    std::vector<double> pre;
    std::vector<double> post;
};

struct TraceSample {
    double time = 0.0;
    std::vector<double> clocks;
};

struct OracleTrace {
    SwarmSpec spec;
    double horizon = 0.0;
    double delta = 0.0;
    std::vector<FlashEvent> events;
    std::vector<TraceSample> samples;
    /// Joint flash events up to and including the first one after which all clocks are equal;
    /// the number of events within the horizon when that never happens.
    std::size_t flash_count = 0;
    std::optional<double> sync_time;
    std::optional<std::size_t> sync_event;
};

/// Exact rational simulation. Events and samples cover [0, horizon]; delta = 0 disables sampling.
OracleTrace simulate_oracle(const SwarmSpec& spec, double horizon, double delta,
                            std::size_t max_events = 1000000);

/// Post-event clocks computed from the pre-event clocks with the update rule (double precision).
std::vector<double> apply_flash_rule(const std::vector<double>& pre, double f, double alpha,
                                     const std::vector<std::size_t>& flashers);

}  // namespace hyreach
