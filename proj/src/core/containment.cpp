#include "containment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace hyreach {

const char* to_string(CoverageKind k) {
    switch (k) {
        case CoverageKind::initial: return "initial";
        case CoverageKind::sample: return "sample";
        case CoverageKind::pre_event: return "pre-event";
        case CoverageKind::post_event: return "post-event";
    }
    return "?";
}

namespace {

enum class Source { none, clock, time };

struct Binding {
    Source source = Source::none;
    std::size_t clock = 0;
};

// x<i> binds to robot i's clock, t_<name> to the global time.
Binding bind(const std::string& name, std::size_t n) {
    if (name.rfind("t_", 0) == 0) return {Source::time, 0};
    if (name.size() > 1 && name[0] == 'x') {
        std::size_t i = 0;
        for (std::size_t k = 1; k < name.size(); ++k) {
            if (name[k] < '0' || name[k] > '9') return {};
            i = i * 10 + static_cast<std::size_t>(name[k] - '0');
        }
        if (i >= 1 && i <= n) return {Source::clock, i - 1};
    }
    return {};
}

struct Cursor {
    std::size_t node = 0;
    double entered = 0.0;
};

class Replay {
public:
    Replay(const OracleTrace& trace, const ReachResult& result, double tol)
        : trace_(trace), result_(result), tol_(tol) {
        for (const auto& scope : result.scopes) {
            std::vector<Binding> b;
            for (const auto& name : scope) b.push_back(bind(name, trace.spec.n));
            bindings_.push_back(std::move(b));
        }
    }

    bool covers(const std::vector<StateSet>& sets, const std::vector<double>& clocks, double time) const {
        for (std::size_t s = 0; s < sets.size() && s < bindings_.size(); ++s) {
            if (!covers(sets[s], bindings_[s], clocks, time)) return false;
        }
        return true;
    }

    /// Segment of `node` at local time `local` covers the valuation.
    bool covers_at(const ReachNode& node, double local, const std::vector<double>& clocks, double time) const {
        if (node.segments.empty()) return false;
        const double d = result_.delta > 0 ? result_.delta : 1.0;
        const auto k0 = static_cast<long long>(std::floor(local / d));
        for (long long k = k0 - 1; k <= k0 + 1; ++k) {
            if (k < 0 || k >= static_cast<long long>(node.segments.size())) continue;
            if (covers(node.segments[static_cast<std::size_t>(k)], clocks, time)) return true;
        }
        return false;
    }

    const ReachNode& resolve(std::size_t id) const {
        const ReachNode* n = &result_.nodes[id];
        while (n->status == NodeStatus::fixed_point && n->subsumer) n = &result_.nodes[*n->subsumer];
        return *n;
    }

    static bool terminal(const ReachNode& n) {
        return n.status == NodeStatus::node_limit || n.status == NodeStatus::synchronized ||
               (n.status == NodeStatus::depth_limit && n.segments.empty());
    }

    /// Non-zero-dwell descendants reached through zero-dwell chains whose entry covers `post`.
    void settle(std::size_t id, const std::vector<double>& post, double time, std::vector<Cursor>& out,
                bool& bounded, std::set<std::size_t>& visited) const {
        const ReachNode& own = result_.nodes[id];
        const ReachNode& n = resolve(id);
        if (!n.zero_dwell) {
            if (!covers(own.entry, post, time)) return;
            if (terminal(n)) {
                bounded = true;
                return;
            }
            const bool seen = std::any_of(out.begin(), out.end(), [&](const Cursor& c) { return c.node == n.id; });
            if (!seen) out.push_back({n.id, time});
            return;
        }
        if (!visited.insert(n.id).second) return;
        if (terminal(n) || n.status == NodeStatus::depth_limit) {
            bounded = true;
            return;
        }
        for (std::size_t c : n.children) settle(c, post, time, out, bounded, visited);
    }

private:
    bool covers(const StateSet& set, const std::vector<Binding>& b, const std::vector<double>& clocks,
                double time) const {
        if (set.is_empty()) return false;
        auto value = [&](std::size_t v) -> std::optional<double> {
            if (v >= b.size()) return std::nullopt;
            switch (b[v].source) {
                case Source::clock: return clocks[b[v].clock];
                case Source::time: return time;
                case Source::none: break;
            }
            return std::nullopt;
        };
        if (set.is_octagon()) {
            const Octagon2D& o = set.octagon();
            auto x = value(o.x_var());
            auto t = value(o.t_var());
            if (x && t) return o.contains(*x, *t, tol_);
            if (x) return o.x_range().contains(*x, tol_);
            if (t) return o.t_range().contains(*t, tol_);
            return true;
        }
        const Box& box = set.box();
        for (std::size_t v = 0; v < box.dimension(); ++v) {
            if (auto x = value(v); x && !box[v].contains(*x, tol_)) return false;
        }
        return true;
    }

    const OracleTrace& trace_;
    const ReachResult& result_;
    double tol_;
    std::vector<std::vector<Binding>> bindings_;
};

}  // namespace

ContainmentReport check_containment(const OracleTrace& trace, const ReachResult& result, double tol) {
    ContainmentReport report;
    if (trace.samples.empty() && trace.events.empty()) return report;
    for (const ReachNode& n : result.nodes) {
        const bool expanded = n.status == NodeStatus::expanded || n.status == NodeStatus::dead_end ||
                              n.status == NodeStatus::depth_limit;
        if (expanded && n.segment_count > 0 && n.segments.empty()) {
            throw std::invalid_argument("reach result carries no stored segments");
        }
    }

    Replay replay(trace, result, tol);
    const std::size_t n = trace.spec.n;
    std::vector<double> init(n);
    for (std::size_t i = 0; i < n; ++i) init[i] = trace.spec.anchor(i);

    auto fail = [&](CoverageKind kind, double time, std::optional<std::size_t> event, const std::vector<double>& clocks,
                    std::string message) {
        report.violations.push_back({kind, time, event, clocks, std::move(message)});
        return report;
    };

    bool bounded = false;
    std::vector<Cursor> active;
    for (const ReachNode& root : result.nodes) {
        if (root.parent) continue;
        std::set<std::size_t> visited;
        replay.settle(root.id, init, 0.0, active, bounded, visited);
    }
    if (active.empty()) {
        if (bounded) {
            report.bounded_at = 0.0;
            return report;
        }
        return fail(CoverageKind::initial, 0.0, std::nullopt, init, "no root covers the initial valuation");
    }

    std::size_t next_sample = 0;
    auto check_samples_before = [&](double limit, bool inclusive) -> bool {
        while (next_sample < trace.samples.size()) {
            const TraceSample& s = trace.samples[next_sample];
            if (inclusive ? s.time > limit + 1e-12 : s.time >= limit - 1e-12) break;
            std::vector<Cursor> keep;
            for (const Cursor& c : active) {
                if (replay.covers_at(result.nodes[c.node], s.time - c.entered, s.clocks, s.time)) keep.push_back(c);
            }
            ++report.samples_checked;
            ++next_sample;
            if (keep.empty()) {
                fail(CoverageKind::sample, s.time, std::nullopt, s.clocks, "sample not covered by any segment");
                return false;
            }
            active = std::move(keep);
        }
        return true;
    };

    for (std::size_t e = 0; e < trace.events.size(); ++e) {
        const FlashEvent& ev = trace.events[e];
        if (!check_samples_before(ev.time, false)) return report;

        std::vector<Cursor> next;
        std::set<std::size_t> visited;
        bool any_pre = false;
        for (const Cursor& c : active) {
            const ReachNode& node = result.nodes[c.node];
            if (!replay.covers_at(node, ev.time - c.entered, ev.pre, ev.time)) continue;
            any_pre = true;
            if (node.status == NodeStatus::depth_limit) {
                bounded = true;
                continue;
            }
            for (std::size_t child : node.children) replay.settle(child, ev.post, ev.time, next, bounded, visited);
        }
        ++report.events_checked;
        if (!any_pre) {
            return fail(CoverageKind::pre_event, ev.time, e, ev.pre, "pre-event valuation not covered");
        }
        if (next.empty()) {
            if (bounded) {
                report.bounded_at = ev.time;
                return report;
            }
            return fail(CoverageKind::post_event, ev.time, e, ev.post, "no successor node covers the post-event valuation");
        }
        active = std::move(next);
    }
    check_samples_before(trace.horizon, true);
    return report;
}

}  // namespace hyreach
