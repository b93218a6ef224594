#pragma once

// JSON encodings of analysis reports, oracle traces, containment reports and
// run manifests, plus CSV/SVG export of stored flowpipe segments.

#include "containment.hpp"
#include "reach.hpp"
#include "swarm.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hyreach {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "hyreach";
inline constexpr const char* kToolVersion = "0.3.0";

/// Throws std::invalid_argument on malformed documents.
Json to_json(const AnalysisConfig& cfg);
AnalysisConfig config_from_json(const Json& j);

Json to_json(const SwarmSpec& spec);
SwarmSpec spec_from_json(const Json& j);

Json to_json(const StateSet& s);
StateSet state_set_from_json(const Json& j);

/// Segments are included only when `emit_segments` is set and the result stored them.
Json report_to_json(const ReachResult& result, const AnalysisConfig& cfg, bool emit_segments);
ReachResult report_from_json(const Json& j);

Json to_json(const OracleTrace& trace);
OracleTrace trace_from_json(const Json& j);

Json to_json(const ContainmentReport& report);

struct InputFile {
    std::string path;
    std::string hash;  // FNV-1a 64, hex
};

struct RunManifest {
    std::string version = kToolVersion;
    std::vector<InputFile> models;
    std::optional<InputFile> bad;
    std::optional<SwarmSpec> spec;
    std::string engine = "monolithic";
    AnalysisConfig config;
    bool emit_segments = false;
    std::string report;
    Verdict verdict = Verdict::safe;
    std::size_t nodes = 0;
    std::size_t max_depth = 0;
    double wall_seconds = 0.0;
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

std::string fnv1a_hex(std::string_view data);

/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);
/// Throws std::invalid_argument with the parser's message.
Json parse_json(std::string_view text);

/// Columns: node, depth, path, segment, t_lo, t_hi, then <var>_lo, <var>_hi per projected
/// variable. An empty projection selects every variable of every subspace.
std::string export_csv(const ReachResult& result, const std::vector<std::string>& projection = {});
/// Rectangles over global time (horizontal) for every projected variable; with exactly two
/// projected variables other than "t", the first is drawn horizontally and the second vertically.
std::string export_svg(const ReachResult& result, const std::vector<std::string>& projection = {});

/// Global-time interval at which each node is entered.
std::vector<Interval> entry_times(const ReachResult& result);

}  // namespace hyreach
