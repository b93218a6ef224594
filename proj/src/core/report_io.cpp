#include "report_io.hpp"

#include "model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hyreach {

namespace {

Json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double to_num(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::nan("");
    }
    throw std::invalid_argument("expected a number");
}

Json interval_json(Interval i) {
    if (i.is_empty()) return nullptr;
    return Json::array({num(i.lo), num(i.hi)});
}

Interval interval_from(const Json& j) {
    if (j.is_null()) return Interval::empty();
    return {to_num(j.at(0)), to_num(j.at(1))};
}

template <typename E, std::size_t N>
E enum_from(const Json& j, const std::array<E, N>& values, const char* what) {
    const std::string s = j.get<std::string>();
    for (E v : values) {
        if (s == to_string(v)) return v;
    }
    throw std::invalid_argument(std::string("unknown ") + what + " '" + s + "'");
}

constexpr std::array kOrders{SearchOrder::breadth_first, SearchOrder::depth_first};
constexpr std::array kReps{Representation::box, Representation::octagon};
constexpr std::array kTerms{Termination::depth_bounded, Termination::synchronization};
constexpr std::array kVerdicts{Verdict::safe, Verdict::unsafe_possible, Verdict::depth_bound_hit,
                               Verdict::synchronized};
constexpr std::array kStatuses{NodeStatus::open,         NodeStatus::expanded,    NodeStatus::depth_limit,
                               NodeStatus::dead_end,     NodeStatus::fixed_point, NodeStatus::synchronized,
                               NodeStatus::node_limit};

Json jump_json(const ComposedJump& j, const std::vector<std::string>& labels) {
    Json moves = Json::array();
    for (const LocalMove& m : j.moves) moves.push_back(Json::array({m.component, m.jump}));
    Json out;
    out["source"] = j.source;
    out["target"] = j.target;
    out["moves"] = moves;
    out["label"] = j.label && *j.label < labels.size() ? Json(labels[*j.label]) : Json(nullptr);
    out["urgent"] = j.urgent;
    return out;
}

ComposedJump jump_from(const Json& j, const std::vector<std::string>& labels) {
    ComposedJump out;
    out.source = j.at("source").get<ComposedLocation>();
    out.target = j.at("target").get<ComposedLocation>();
    for (const Json& m : j.at("moves")) out.moves.push_back({m.at(0).get<std::size_t>(), m.at(1).get<std::size_t>()});
    if (!j.at("label").is_null()) {
        const std::string name = j.at("label").get<std::string>();
        auto it = std::find(labels.begin(), labels.end(), name);
        if (it == labels.end()) throw std::invalid_argument("unknown label '" + name + "'");
        out.label = static_cast<std::size_t>(it - labels.begin());
    }
    out.urgent = j.at("urgent").get<bool>();
    return out;
}

Json sets_json(const std::vector<StateSet>& sets) {
    Json out = Json::array();
    for (const StateSet& s : sets) out.push_back(to_json(s));
    return out;
}

std::vector<StateSet> sets_from(const Json& j) {
    std::vector<StateSet> out;
    for (const Json& s : j) out.push_back(state_set_from_json(s));
    return out;
}

}  // namespace

Json to_json(const AnalysisConfig& cfg) {
    Json j;
    j["delta"] = cfg.delta;
    j["horizon"] = cfg.horizon;
    j["depth"] = cfg.depth;
    j["order"] = to_string(cfg.order);
    j["representation"] = to_string(cfg.representation);
    j["fixed_point"] = cfg.fixed_point;
    j["termination"] = to_string(cfg.termination);
    j["explicit_time"] = cfg.explicit_time;
    j["dedup"] = cfg.dedup;
    j["optimized_enumeration"] = cfg.optimized_enumeration;
    j["slack"] = cfg.slack;
    j["max_nodes"] = cfg.max_nodes;
    return j;
}

AnalysisConfig config_from_json(const Json& j) {
    try {
        AnalysisConfig c;
        c.delta = j.at("delta").get<double>();
        c.horizon = j.at("horizon").get<double>();
        c.depth = j.at("depth").get<std::size_t>();
        c.order = enum_from(j.at("order"), kOrders, "search order");
        c.representation = enum_from(j.at("representation"), kReps, "representation");
        c.fixed_point = j.at("fixed_point").get<bool>();
        c.termination = enum_from(j.at("termination"), kTerms, "termination");
        c.explicit_time = j.at("explicit_time").get<bool>();
        c.dedup = j.at("dedup").get<bool>();
        c.optimized_enumeration = j.at("optimized_enumeration").get<bool>();
        c.slack = j.value("slack", 0.0);
        c.max_nodes = j.value("max_nodes", std::size_t{0});
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed config: ") + e.what());
    }
}

Json to_json(const SwarmSpec& spec) {
    Json j;
    j["variant"] = to_string(spec.variant);
    j["n"] = spec.n;
    j["f"] = spec.f;
    j["alpha"] = spec.alpha;
    j["width"] = spec.width;
    j["anchors"] = spec.anchors;
    return j;
}

SwarmSpec spec_from_json(const Json& j) {
    try {
        SwarmSpec s;
        auto v = parse_variant(j.at("variant").get<std::string>());
        if (!v) throw std::invalid_argument("unknown variant");
        s.variant = *v;
        s.n = j.at("n").get<std::size_t>();
        s.f = j.at("f").get<double>();
        s.alpha = j.at("alpha").get<double>();
        s.width = j.value("width", 0.0);
        s.anchors = j.value("anchors", std::vector<double>{});
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed swarm parameters: ") + e.what());
    }
}

Json to_json(const StateSet& s) {
    Json j;
    if (s.is_box()) {
        const Box& b = s.box();
        j["kind"] = "box";
        j["empty"] = b.is_empty();
        Json dims = Json::array();
        for (const Interval& i : b.intervals()) dims.push_back(Json::array({num(i.lo), num(i.hi)}));
        j["dims"] = dims;
    } else {
        const Octagon2D& o = s.octagon();
        j["kind"] = "octagon";
        j["x"] = o.x_var();
        j["t"] = o.t_var();
        j["empty"] = o.is_empty();
        Json off = Json::array();
        for (double v : o.offsets()) off.push_back(num(v));
        j["offsets"] = off;
    }
    return j;
}

StateSet state_set_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const bool empty = j.at("empty").get<bool>();
    if (kind == "box") {
        std::vector<Interval> dims;
        for (const Json& d : j.at("dims")) dims.push_back({to_num(d.at(0)), to_num(d.at(1))});
        if (empty) return Box::empty(dims.size());
        return Box(std::move(dims));
    }
    if (kind == "octagon") {
        const auto x = j.at("x").get<VarIndex>();
        const auto t = j.at("t").get<VarIndex>();
        if (empty) return Octagon2D::empty(x, t);
        Octagon2D::Offsets off{};
        const Json& arr = j.at("offsets");
        if (arr.size() != off.size()) throw std::invalid_argument("octagon needs 8 offsets");
        for (std::size_t k = 0; k < off.size(); ++k) off[k] = to_num(arr.at(k));
        return Octagon2D(x, t, off);
    }
    throw std::invalid_argument("unknown state set kind '" + kind + "'");
}

Json report_to_json(const ReachResult& r, const AnalysisConfig& cfg, bool emit_segments) {
    Json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["engine"] = r.engine;
    j["config"] = to_json(cfg);
    j["verdict"] = to_string(r.verdict);
    j["nodes"] = r.node_count();
    j["max_depth"] = r.max_depth;
    j["delta"] = r.delta;
    j["stats"] = {{"jumps_considered", r.stats.jumps_considered},
                  {"combinations_pruned", r.stats.combinations_pruned},
                  {"successors_merged", r.stats.successors_merged},
                  {"fixed_point_hits", r.stats.fixed_point_hits}};
    j["scopes"] = r.scopes;
    j["clocks"] = r.clocks;
    j["location_names"] = r.location_names;
    j["labels"] = r.labels;
    bool with_segments = false;
    Json tree = Json::array();
    for (const ReachNode& n : r.nodes) {
        Json node;
        node["id"] = n.id;
        node["parent"] = n.parent ? Json(*n.parent) : Json(nullptr);
        node["depth"] = n.depth;
        node["location"] = r.location_name(n.location);
        node["location_index"] = n.location;
        node["zero_dwell"] = n.zero_dwell;
        node["status"] = to_string(n.status);
        node["subsumer"] = n.subsumer ? Json(*n.subsumer) : Json(nullptr);
        node["via"] = n.via ? jump_json(*n.via, r.labels) : Json(nullptr);
        node["window"] = interval_json(n.window);
        node["enabled"] = Json::array({n.enabled.first, n.enabled.last});
        node["children"] = n.children;
        node["segment_count"] = n.segment_count;
        node["bad_hit"] = n.bad_hit;
        node["entry"] = sets_json(n.entry);
        if (emit_segments && !n.segments.empty()) {
            Json segs = Json::array();
            for (const auto& seg : n.segments) segs.push_back(sets_json(seg));
            node["segments"] = segs;
            with_segments = true;
        }
        tree.push_back(std::move(node));
    }
    j["segments_included"] = with_segments;
    j["tree"] = std::move(tree);
    return j;
}

ReachResult report_from_json(const Json& j) {
    try {
        ReachResult r;
        r.engine = j.at("engine").get<std::string>();
        r.verdict = enum_from(j.at("verdict"), kVerdicts, "verdict");
        r.max_depth = j.at("max_depth").get<std::size_t>();
        r.delta = j.at("delta").get<double>();
        const Json& st = j.at("stats");
        r.stats.jumps_considered = st.value("jumps_considered", std::size_t{0});
        r.stats.combinations_pruned = st.value("combinations_pruned", std::size_t{0});
        r.stats.successors_merged = st.value("successors_merged", std::size_t{0});
        r.stats.fixed_point_hits = st.value("fixed_point_hits", std::size_t{0});
        r.scopes = j.at("scopes").get<std::vector<std::vector<std::string>>>();
        r.clocks = j.at("clocks").get<std::vector<std::vector<VarIndex>>>();
        r.location_names = j.at("location_names").get<std::vector<std::vector<std::string>>>();
        r.labels = j.at("labels").get<std::vector<std::string>>();
        for (const Json& node : j.at("tree")) {
            ReachNode n;
            n.id = node.at("id").get<std::size_t>();
            if (!node.at("parent").is_null()) n.parent = node.at("parent").get<std::size_t>();
            n.depth = node.at("depth").get<std::size_t>();
            n.location = node.at("location_index").get<ComposedLocation>();
            n.zero_dwell = node.at("zero_dwell").get<bool>();
            n.status = enum_from(node.at("status"), kStatuses, "node status");
            if (!node.at("subsumer").is_null()) n.subsumer = node.at("subsumer").get<std::size_t>();
            if (!node.at("via").is_null()) n.via = jump_from(node.at("via"), r.labels);
            n.window = interval_from(node.at("window"));
            n.enabled = {node.at("enabled").at(0).get<std::size_t>(), node.at("enabled").at(1).get<std::size_t>()};
            n.children = node.at("children").get<std::vector<std::size_t>>();
            n.segment_count = node.at("segment_count").get<std::size_t>();
            n.bad_hit = node.value("bad_hit", false);
            n.entry = sets_from(node.at("entry"));
            if (node.contains("segments")) {
                for (const Json& seg : node.at("segments")) n.segments.push_back(sets_from(seg));
            }
            if (n.id != r.nodes.size()) throw std::invalid_argument("node ids are not consecutive");
            r.nodes.push_back(std::move(n));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed report: ") + e.what());
    }
}

Json to_json(const OracleTrace& t) {
    Json j;
    j["tool"] = kToolName;
    j["spec"] = to_json(t.spec);
    j["horizon"] = t.horizon;
    j["delta"] = t.delta;
    j["flash_count"] = t.flash_count;
    j["sync_time"] = t.sync_time ? Json(*t.sync_time) : Json(nullptr);
    j["sync_event"] = t.sync_event ? Json(*t.sync_event) : Json(nullptr);
    Json events = Json::array();
    for (const FlashEvent& e : t.events) {
        std::vector<std::size_t> robots;
        for (std::size_t f : e.flashers) robots.push_back(f + 1);
        events.push_back({{"time", e.time}, {"exact_time", e.exact_time}, {"flashers", robots}, {"pre", e.pre},
                          {"post", e.post}});
    }
    j["events"] = std::move(events);
    Json samples = Json::array();
    for (const TraceSample& s : t.samples) samples.push_back({{"t", s.time}, {"clocks", s.clocks}});
    j["samples"] = std::move(samples);
    return j;
}

OracleTrace trace_from_json(const Json& j) {
    try {
        OracleTrace t;
        t.spec = spec_from_json(j.at("spec"));
        t.horizon = j.at("horizon").get<double>();
        t.delta = j.at("delta").get<double>();
        t.flash_count = j.at("flash_count").get<std::size_t>();
        if (!j.at("sync_time").is_null()) t.sync_time = j.at("sync_time").get<double>();
        if (!j.at("sync_event").is_null()) t.sync_event = j.at("sync_event").get<std::size_t>();
        for (const Json& e : j.at("events")) {
            FlashEvent ev;
            ev.time = e.at("time").get<double>();
            ev.exact_time = e.value("exact_time", std::string{});
            for (std::size_t r : e.at("flashers").get<std::vector<std::size_t>>()) {
                if (r == 0) throw std::invalid_argument("robot numbers start at 1");
                ev.flashers.push_back(r - 1);
            }
            ev.pre = e.at("pre").get<std::vector<double>>();
            ev.post = e.at("post").get<std::vector<double>>();
            t.events.push_back(std::move(ev));
        }
        for (const Json& s : j.at("samples")) {
            t.samples.push_back({s.at("t").get<double>(), s.at("clocks").get<std::vector<double>>()});
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed trace: ") + e.what());
    }
}

Json to_json(const ContainmentReport& r) {
    Json j;
    j["samples_checked"] = r.samples_checked;
    j["events_checked"] = r.events_checked;
    j["bounded_at"] = r.bounded_at ? Json(*r.bounded_at) : Json(nullptr);
    Json v = Json::array();
    for (const ContainmentViolation& x : r.violations) {
        v.push_back({{"kind", to_string(x.kind)},
                     {"time", x.time},
                     {"event", x.event ? Json(*x.event) : Json(nullptr)},
                     {"clocks", x.clocks},
                     {"message", x.message}});
    }
    j["violations"] = std::move(v);
    return j;
}

Json to_json(const RunManifest& m) {
    auto file = [](const InputFile& f) { return Json{{"path", f.path}, {"fnv1a", f.hash}}; };
    Json j;
    j["tool"] = kToolName;
    j["version"] = m.version;
    Json models = Json::array();
    for (const InputFile& f : m.models) models.push_back(file(f));
    j["models"] = std::move(models);
    j["bad"] = m.bad ? file(*m.bad) : Json(nullptr);
    j["spec"] = m.spec ? to_json(*m.spec) : Json(nullptr);
    j["engine"] = m.engine;
    j["config"] = to_json(m.config);
    j["emit_segments"] = m.emit_segments;
    j["report"] = m.report;
    j["result"] = {{"verdict", to_string(m.verdict)},
                   {"nodes", m.nodes},
                   {"max_depth", m.max_depth},
                   {"wall_seconds", m.wall_seconds}};
    return j;
}

RunManifest manifest_from_json(const Json& j) {
    try {
        auto file = [](const Json& f) {
            return InputFile{f.at("path").get<std::string>(), f.at("fnv1a").get<std::string>()};
        };
        RunManifest m;
        m.version = j.at("version").get<std::string>();
        for (const Json& f : j.at("models")) m.models.push_back(file(f));
        if (!j.at("bad").is_null()) m.bad = file(j.at("bad"));
        if (!j.at("spec").is_null()) m.spec = spec_from_json(j.at("spec"));
        m.engine = j.at("engine").get<std::string>();
        m.config = config_from_json(j.at("config"));
        m.emit_segments = j.value("emit_segments", false);
        m.report = j.value("report", std::string{});
        const Json& r = j.at("result");
        m.verdict = enum_from(r.at("verdict"), kVerdicts, "verdict");
        m.nodes = r.at("nodes").get<std::size_t>();
        m.max_depth = r.at("max_depth").get<std::size_t>();
        m.wall_seconds = r.value("wall_seconds", 0.0);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed manifest: ") + e.what());
    }
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(e.what());
    }
}

std::vector<Interval> entry_times(const ReachResult& r) {
    std::vector<Interval> out(r.nodes.size(), Interval::point(0.0));
    for (const ReachNode& n : r.nodes) {
        if (!n.parent) continue;
        const ReachNode& p = r.nodes[*n.parent];
        const Interval base = out[p.id];
        Interval local = Interval::point(0.0);
        if (!p.zero_dwell && !n.enabled.empty()) {
            local = {static_cast<double>(n.enabled.first) * r.delta, static_cast<double>(n.enabled.last) * r.delta};
        }
        Interval t{base.lo + local.lo, base.hi + local.hi};
        if (!n.window.is_empty()) {
            const Interval m = t.meet(n.window);
            t = m.is_empty() ? n.window : m;
        }
        out[n.id] = t;
    }
    return out;
}

namespace {

struct VarRef {
    std::string name;
    std::size_t subspace = 0;
    VarIndex var = 0;
};

std::vector<VarRef> resolve_projection(const ReachResult& r, const std::vector<std::string>& projection) {
    std::vector<VarRef> out;
    if (projection.empty()) {
        for (std::size_t s = 0; s < r.scopes.size(); ++s) {
            for (VarIndex v = 0; v < r.scopes[s].size(); ++v) out.push_back({r.scopes[s][v], s, v});
        }
        return out;
    }
    for (const std::string& name : projection) {
        if (name == "t") continue;
        bool found = false;
        for (std::size_t s = 0; s < r.scopes.size() && !found; ++s) {
            for (VarIndex v = 0; v < r.scopes[s].size(); ++v) {
                if (r.scopes[s][v] == name) {
                    out.push_back({name, s, v});
                    found = true;
                    break;
                }
            }
        }
        if (!found) throw std::invalid_argument("unknown variable '" + name + "' in projection");
    }
    return out;
}

// Global time covered by segment k of node n.
Interval segment_time(const ReachResult& r, const ReachNode& n, std::size_t k, Interval start,
                      const std::vector<StateSet>& seg) {
    for (std::size_t s = 0; s < r.scopes.size() && s < seg.size(); ++s) {
        for (VarIndex v = 0; v < r.scopes[s].size(); ++v) {
            if (r.scopes[s][v].rfind("t_", 0) == 0) return seg[s].bounds(v);
        }
    }
    if (n.zero_dwell) return start;
    return {start.lo + static_cast<double>(k) * r.delta, start.hi + static_cast<double>(k + 1) * r.delta};
}

struct Row {
    std::size_t node, depth, path, segment;
    Interval time;
    std::vector<Interval> vars;
};

std::vector<Row> collect_rows(const ReachResult& r, const std::vector<VarRef>& vars) {
    const std::vector<Interval> starts = entry_times(r);
    std::map<std::vector<std::string>, std::size_t> path_ids;
    std::vector<std::vector<std::string>> paths(r.nodes.size());
    std::vector<Row> rows;
    for (const ReachNode& n : r.nodes) {
        if (n.parent) paths[n.id] = paths[*n.parent];
        paths[n.id].push_back(r.location_name(n.location));
        const std::size_t path = path_ids.emplace(paths[n.id], path_ids.size()).first->second;
        for (std::size_t k = 0; k < n.segments.size(); ++k) {
            const auto& seg = n.segments[k];
            Row row{n.id, n.depth, path, k, segment_time(r, n, k, starts[n.id], seg), {}};
            bool empty = false;
            for (const VarRef& v : vars) {
                const Interval b = v.subspace < seg.size() ? seg[v.subspace].bounds(v.var) : Interval::empty();
                empty = empty || b.is_empty();
                row.vars.push_back(b);
            }
            if (!empty) rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string fmt(double v) { return std::isfinite(v) ? format_number(v) : (v > 0 ? "inf" : "-inf"); }

}  // namespace

std::string export_csv(const ReachResult& r, const std::vector<std::string>& projection) {
    const auto vars = resolve_projection(r, projection);
    std::ostringstream os;
    os << "node,depth,path,segment,t_lo,t_hi";
    for (const VarRef& v : vars) os << "," << v.name << "_lo," << v.name << "_hi";
    os << "\n";
    for (const Row& row : collect_rows(r, vars)) {
        os << row.node << "," << row.depth << "," << row.path << "," << row.segment << "," << fmt(row.time.lo) << ","
           << fmt(row.time.hi);
        for (const Interval& b : row.vars) os << "," << fmt(b.lo) << "," << fmt(b.hi);
        os << "\n";
    }
    return os.str();
}

std::string export_svg(const ReachResult& r, const std::vector<std::string>& projection) {
    auto vars = resolve_projection(r, projection);
    const bool has_t = std::find(projection.begin(), projection.end(), "t") != projection.end();
    const bool planar = !has_t && vars.size() == 2;
    if (projection.empty()) {
        std::erase_if(vars, [](const VarRef& v) { return v.name.rfind("t_", 0) == 0; });
    }
    const auto rows = collect_rows(r, vars);

    struct Rect {
        Interval h, v;
        std::size_t series;
    };
    std::vector<Rect> rects;
    for (const Row& row : rows) {
        if (planar) {
            rects.push_back({row.vars[0], row.vars[1], 0});
        } else {
            for (std::size_t i = 0; i < vars.size(); ++i) rects.push_back({row.time, row.vars[i], i});
        }
    }
    Interval hx = Interval::empty(), vy = Interval::empty();
    for (const Rect& rc : rects) {
        if (!std::isfinite(rc.h.lo) || !std::isfinite(rc.h.hi) || !std::isfinite(rc.v.lo) || !std::isfinite(rc.v.hi))
            continue;
        hx = hx.join(rc.h);
        vy = vy.join(rc.v);
    }
    if (hx.is_empty()) hx = {0, 1};
    if (vy.is_empty()) vy = {0, 1};
    if (hx.hi == hx.lo) hx.hi = hx.lo + 1;
    if (vy.hi == vy.lo) vy.hi = vy.lo + 1;

    const double W = 800, H = 400, M = 40;
    auto px = [&](double x) { return M + (x - hx.lo) / (hx.hi - hx.lo) * (W - 2 * M); };
    auto py = [&](double y) { return H - M - (y - vy.lo) / (vy.hi - vy.lo) * (H - 2 * M); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

    std::ostringstream os;
    char buf[64];
    auto p = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.3f", v);
        return std::string(buf);
    };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << " " << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<g class=\"axes\" stroke=\"black\" fill=\"none\"><line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\""
       << W - M << "\" y2=\"" << H - M << "\"/><line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M << "\" y2=\""
       << H - M << "\"/></g>\n";
    const std::string hname = planar ? vars[0].name : "t";
    const std::string vname = planar ? vars[1].name : (vars.size() == 1 ? vars[0].name : "value");
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\" font-size=\"12\">" << hname << " [" << fmt(hx.lo) << ", "
       << fmt(hx.hi) << "]</text>\n";
    os << "<text x=\"4\" y=\"16\" font-size=\"12\">" << vname << " [" << fmt(vy.lo) << ", " << fmt(vy.hi)
       << "]</text>\n";
    for (const Rect& rc : rects) {
        if (!std::isfinite(rc.h.lo) || !std::isfinite(rc.h.hi) || !std::isfinite(rc.v.lo) || !std::isfinite(rc.v.hi))
            continue;
        const double x0 = px(rc.h.lo), x1 = px(rc.h.hi), y0 = py(rc.v.hi), y1 = py(rc.v.lo);
        os << "<rect class=\"segment\" x=\"" << p(x0) << "\" y=\"" << p(y0) << "\" width=\"" << p(x1 - x0)
           << "\" height=\"" << p(y1 - y0) << "\" fill=\"" << colors[rc.series % 8]
           << "\" fill-opacity=\"0.35\" stroke=\"" << colors[rc.series % 8] << "\" stroke-width=\"0.3\" data-h=\""
           << fmt(rc.h.lo) << "," << fmt(rc.h.hi) << "\" data-v=\"" << fmt(rc.v.lo) << "," << fmt(rc.v.hi)
           << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace hyreach
