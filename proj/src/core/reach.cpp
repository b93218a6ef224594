#include "reach.hpp"

#include "search.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace hyreach {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::safe: return "safe";
        case Verdict::unsafe_possible: return "unsafe-possible";
        case Verdict::depth_bound_hit: return "depth-bound-hit";
        case Verdict::synchronized: return "synchronized";
    }
    return "?";
}

const char* to_string(SearchOrder o) { return o == SearchOrder::breadth_first ? "bfs" : "dfs"; }

const char* to_string(Representation r) { return r == Representation::box ? "box" : "octagon"; }

const char* to_string(Termination t) {
    return t == Termination::depth_bounded ? "depth-bounded" : "synchronization";
}

const char* to_string(NodeStatus s) {
    switch (s) {
        case NodeStatus::open: return "open";
        case NodeStatus::expanded: return "expanded";
        case NodeStatus::depth_limit: return "depth-limit";
        case NodeStatus::dead_end: return "dead-end";
        case NodeStatus::fixed_point: return "fixed-point";
        case NodeStatus::synchronized: return "synchronized";
        case NodeStatus::node_limit: return "node-limit";
    }
    return "?";
}

void AnalysisConfig::validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("time step must be positive");
    if (!(horizon >= delta)) throw std::invalid_argument("horizon must be at least the time step");
    if (!(slack >= 0.0)) throw std::invalid_argument("slack must be non-negative");
}

std::string ReachResult::location_name(const ComposedLocation& loc) const {
    std::string out;
    for (std::size_t c = 0; c < loc.size(); ++c) {
        if (c) out += '.';
        out += location_names.at(c).at(loc[c]);
    }
    return out;
}

bool may_intersect(const std::vector<StateSet>& sets, const std::vector<std::vector<std::string>>& scopes,
                   const BadSet& bad) {
    for (const StateSet& s : sets)
        if (s.is_empty()) return false;
    auto resolve = [&](const std::string& name) -> std::pair<std::size_t, VarIndex> {
        for (std::size_t s = 0; s < scopes.size(); ++s) {
            for (VarIndex v = 0; v < scopes[s].size(); ++v)
                if (scopes[s][v] == name) return {s, v};
        }
        throw ModelError("bad set refers to unknown variable '" + name + "'");
    };
    std::vector<Condition> local(sets.size());
    for (const NamedConstraint& nc : bad.constraints) {
        std::vector<std::pair<std::size_t, Term>> terms;
        for (const NamedTerm& t : nc.terms) {
            auto [s, v] = resolve(t.var);
            terms.push_back({s, {v, t.coeff}});
        }
        const bool single = std::all_of(terms.begin(), terms.end(),
                                        [&](const auto& p) { return p.first == terms.front().first; });
        if (terms.empty() || single) {
            std::vector<Term> ts;
            for (const auto& p : terms) ts.push_back(p.second);
            const LinearConstraint lc(std::move(ts), nc.rel, nc.bound);
            if (terms.empty()) {
                if (intersect(sets.front(), Condition{{lc}}).is_empty()) return false;
            } else {
                local[terms.front().first].add(lc);
            }
            continue;
        }
        double lo = 0.0, hi = 0.0;
        for (const auto& [s, t] : terms) {
            const Interval b = sets[s].bounds(t.var);
            lo += t.coeff > 0 ? t.coeff * b.lo : t.coeff * b.hi;
            hi += t.coeff > 0 ? t.coeff * b.hi : t.coeff * b.lo;
        }
        switch (nc.rel) {
            case Relation::le:
            case Relation::lt:
                if (lo > nc.bound) return false;
                break;
            case Relation::ge:
            case Relation::gt:
                if (hi < nc.bound) return false;
                break;
            case Relation::eq:
                if (lo > nc.bound || hi < nc.bound) return false;
                break;
        }
    }
    for (std::size_t s = 0; s < sets.size(); ++s) {
        if (!local[s].is_true() && intersect(sets[s], local[s]).is_empty()) return false;
    }
    return true;
}

namespace detail {

bool all_clocks_zero(const std::vector<StateSet>& sets, const std::vector<std::vector<VarIndex>>& clocks) {
    bool any = false;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        if (sets[s].is_empty()) return false;
        for (VarIndex v : clocks[s]) {
            const Interval b = sets[s].bounds(v);
            if (b.lo != 0.0 || b.hi != 0.0) return false;
            any = true;
        }
    }
    return any;
}

bool location_matches(const ReachResult& result, const ComposedLocation& loc, const BadSet& bad) {
    return bad.location == "*" || bad.location == result.location_name(loc);
}

ReachResult explore(SearchProblem& problem, const AnalysisConfig& cfg, ReachResult result) {
    const bool sync_mode = cfg.termination == Termination::synchronization;
    std::deque<std::size_t> frontier;
    std::map<ComposedLocation, std::vector<std::size_t>> recorded;
    std::unordered_map<std::size_t, Expansion> lookahead;
    bool bound_hit = false;
    bool bad_hit = false;
    bool truncated = false;

    auto limit_reached = [&] { return cfg.max_nodes > 0 && result.nodes.size() >= cfg.max_nodes; };

    auto admit = [&](Candidate c, std::optional<std::size_t> parent, std::size_t depth) -> bool {
        if (limit_reached()) {
            truncated = true;
            return false;
        }
        ReachNode n;
        n.id = result.nodes.size();
        n.parent = parent;
        n.depth = depth;
        n.location = std::move(c.location);
        n.zero_dwell = problem.zero_dwell(n.location);
        n.entry = std::move(c.sets);
        n.via = std::move(c.via);
        n.window = c.window;
        n.enabled = c.enabled;
        if (parent && sync_mode) {
            if (all_clocks_zero(n.entry, result.clocks)) {
                n.status = NodeStatus::synchronized;
            } else if (n.zero_dwell) {
                Expansion look = problem.expand(n, cfg.store_segments);
                const bool synced =
                    !look.successors.empty() &&
                    std::all_of(look.successors.begin(), look.successors.end(),
                                [&](const Candidate& s) { return all_clocks_zero(s.sets, result.clocks); });
                if (synced) {
                    n.status = NodeStatus::synchronized;
                    n.segment_count = look.segment_count;
                    n.segments = std::move(look.segments);
                    n.bad_hit = look.bad_hit;
                    bad_hit = bad_hit || look.bad_hit;
                } else {
                    lookahead.emplace(n.id, std::move(look));
                }
            }
        }
        if (cfg.fixed_point && n.status == NodeStatus::open) {
            auto& seen = recorded[n.location];
            for (std::size_t other : seen) {
                const auto& e = result.nodes[other].entry;
                bool covered = true;
                for (std::size_t s = 0; s < e.size() && covered; ++s) covered = e[s].contains(n.entry[s], cfg.slack);
                if (covered) {
                    n.status = NodeStatus::fixed_point;
                    n.subsumer = other;
                    ++problem.stats.fixed_point_hits;
                    break;
                }
            }
            if (n.status == NodeStatus::open) seen.push_back(n.id);
        }
        if (parent) result.nodes[*parent].children.push_back(n.id);
        result.max_depth = std::max(result.max_depth, depth);
        const bool open = n.status == NodeStatus::open;
        result.nodes.push_back(std::move(n));
        if (open) frontier.push_back(result.nodes.size() - 1);
        return true;
    };

    for (Candidate& c : problem.roots()) {
        if (!admit(std::move(c), std::nullopt, 0)) break;
    }

    while (!frontier.empty() && !truncated) {
        std::size_t id;
        if (cfg.order == SearchOrder::breadth_first) {
            id = frontier.front();
            frontier.pop_front();
        } else {
            id = frontier.back();
            frontier.pop_back();
        }
        Expansion exp;
        if (auto it = lookahead.find(id); it != lookahead.end()) {
            exp = std::move(it->second);
            lookahead.erase(it);
        } else {
            exp = problem.expand(result.nodes[id], cfg.store_segments);
        }
        {
            ReachNode& n = result.nodes[id];
            n.segment_count = exp.segment_count;
            n.segments = std::move(exp.segments);
            n.bad_hit = exp.bad_hit;
            bad_hit = bad_hit || exp.bad_hit;
        }
        const std::size_t depth = result.nodes[id].depth;
        if (depth >= cfg.depth) {
            const bool more = !exp.successors.empty();
            result.nodes[id].status = more ? NodeStatus::depth_limit : NodeStatus::dead_end;
            bound_hit = bound_hit || more;
            continue;
        }
        std::vector<Candidate> succ = std::move(exp.successors);
        if (cfg.order == SearchOrder::depth_first) {
            // children are numbered in enumeration order; the first child is explored first
            const std::size_t before = frontier.size();
            for (Candidate& c : succ) {
                if (!admit(std::move(c), id, depth + 1)) break;
            }
            std::reverse(frontier.begin() + static_cast<std::ptrdiff_t>(before), frontier.end());
        } else {
            for (Candidate& c : succ) {
                if (!admit(std::move(c), id, depth + 1)) break;
            }
        }
        ReachNode& n = result.nodes[id];
        n.status = n.children.empty() ? NodeStatus::dead_end : NodeStatus::expanded;
        if (truncated) n.status = NodeStatus::node_limit;
    }
    if (truncated) {
        bound_hit = true;
        for (std::size_t id : frontier) result.nodes[id].status = NodeStatus::node_limit;
    }

    result.stats = problem.stats;
    if (bad_hit) {
        result.verdict = Verdict::unsafe_possible;
    } else if (sync_mode) {
        bool all_synced = true, any_synced = false;
        for (const ReachNode& n : result.nodes) {
            if (!n.children.empty()) continue;
            if (n.status == NodeStatus::synchronized) {
                any_synced = true;
            } else if (n.status != NodeStatus::fixed_point) {
                all_synced = false;
            }
        }
        result.verdict = (all_synced && any_synced) ? Verdict::synchronized : Verdict::depth_bound_hit;
    } else {
        result.verdict = bound_hit ? Verdict::depth_bound_hit : Verdict::safe;
    }
    return result;
}

}  // namespace detail

namespace {

class MonolithicProblem : public detail::SearchProblem {
public:
    MonolithicProblem(const HybridAutomaton& a, const std::vector<std::pair<LocIndex, Box>>& init,
                      const AnalysisConfig& cfg, const std::vector<BadSet>& bad, const ReachResult& skeleton)
        : a_(a), init_(init), cfg_(cfg), bad_(bad), skeleton_(skeleton) {
        outgoing_.resize(a.locations.size());
        zero_dwell_.assign(a.locations.size(), false);
        for (std::size_t j = 0; j < a.jumps.size(); ++j) {
            const LocIndex s = a.location_index(a.jumps[j].source);
            const LocIndex t = a.location_index(a.jumps[j].target);
            if (s == kNoLocation || t == kNoLocation) throw ModelError("jump references an unknown location");
            outgoing_[s].push_back(j);
            targets_.push_back(t);
            if (a.jumps[j].urgent) zero_dwell_[s] = true;
        }
        labels_ = a.alphabet();
        cap_ = segment_cap(cfg.delta, cfg.horizon);
    }

    std::vector<detail::Candidate> roots() override {
        std::vector<detail::Candidate> out;
        for (const auto& [l, box] : init_) {
            if (box.is_empty()) continue;
            out.push_back({{l}, {StateSet(box)}, std::nullopt, Interval::empty(), {}});
        }
        return out;
    }

    bool zero_dwell(const ComposedLocation& loc) const override { return zero_dwell_[loc.front()]; }

    detail::Expansion expand(const ReachNode& node, bool want_segments) override {
        const LocIndex l = node.location.front();
        const Location& loc = a_.locations[l];
        LazyFlowpipe fp(node.entry.front(), loc.flow.rates, loc.invariant, cfg_.delta, cap_, zero_dwell_[l],
                        cfg_.slack);
        detail::Expansion exp;
        exp.segment_count = fp.length();

        std::vector<const BadSet*> bad_here;
        for (const BadSet& b : bad_)
            if (detail::location_matches(skeleton_, node.location, b)) bad_here.push_back(&b);

        std::vector<StateSet> segments;
        if (want_segments || !bad_here.empty()) {
            for (std::size_t k = 0; k < fp.length(); ++k) segments.push_back(fp.segment(k));
        }
        for (const StateSet& s : segments) {
            for (const BadSet* b : bad_here) exp.bad_hit = exp.bad_hit || may_intersect({s}, skeleton_.scopes, *b);
        }

        for (std::size_t j : outgoing_[l]) {
            const Jump& jump = a_.jumps[j];
            ++stats.jumps_considered;
            const SegmentRange r = fp.enabling(jump.guard, fp.all());
            if (r.empty()) continue;
            StateSet acc = empty_like(fp.entry());
            for (std::size_t k = r.first; k < r.last; ++k) {
                const StateSet seg = segments.empty() ? fp.segment(k) : segments[k];
                const StateSet enabled = intersect(seg, jump.guard);
                if (!enabled.is_empty()) acc = hull(acc, transform(enabled, jump.reset, cfg_.slack));
            }
            acc = intersect(acc, a_.locations[targets_[j]].invariant);
            if (acc.is_empty()) continue;
            ComposedJump via;
            via.source = {l};
            via.target = {targets_[j]};
            via.moves = {{0, j}};
            if (jump.label) {
                via.label = static_cast<std::size_t>(std::find(labels_.begin(), labels_.end(), *jump.label) -
                                                     labels_.begin());
            }
            via.urgent = jump.urgent;
            exp.successors.push_back({{targets_[j]}, {std::move(acc)}, std::move(via), Interval::empty(), r});
        }
        if (want_segments) {
            for (StateSet& s : segments) exp.segments.push_back({std::move(s)});
        }
        return exp;
    }

private:
    const HybridAutomaton& a_;
    const std::vector<std::pair<LocIndex, Box>>& init_;
    const AnalysisConfig& cfg_;
    const std::vector<BadSet>& bad_;
    const ReachResult& skeleton_;
    std::vector<std::vector<std::size_t>> outgoing_;
    std::vector<LocIndex> targets_;
    std::vector<bool> zero_dwell_;
    std::vector<std::string> labels_;
    std::size_t cap_ = 1;
};

}  // namespace

ReachResult analyze(const HybridAutomaton& automaton, const AnalysisConfig& cfg, const std::vector<BadSet>& bad) {
    std::vector<std::pair<LocIndex, Box>> init;
    for (const InitEntry& e : automaton.init) {
        const LocIndex l = automaton.location_index(e.location);
        if (l == kNoLocation) throw ModelError("init references unknown location " + e.location);
        init.emplace_back(l, intersect(Box::universe(automaton.dimension()), e.condition));
    }
    return analyze(automaton, init, cfg, bad);
}

ReachResult analyze(const HybridAutomaton& automaton, const std::vector<std::pair<LocIndex, Box>>& init,
                    const AnalysisConfig& cfg, const std::vector<BadSet>& bad) {
    cfg.validate();
    if (cfg.representation != Representation::box) {
        throw std::invalid_argument("the monolithic engine supports boxes only");
    }
    ReachResult skeleton;
    skeleton.engine = "monolithic";
    skeleton.delta = cfg.delta;
    skeleton.scopes.emplace_back();
    skeleton.clocks.emplace_back();
    for (VarIndex v = 0; v < automaton.dimension(); ++v) {
        skeleton.scopes[0].push_back(automaton.variables[v].name);
        if (automaton.variables[v].kind == VarKind::local) skeleton.clocks[0].push_back(v);
    }
    skeleton.location_names.emplace_back();
    for (const Location& l : automaton.locations) skeleton.location_names[0].push_back(l.name);
    skeleton.labels = automaton.alphabet();

    MonolithicProblem problem(automaton, init, cfg, bad, skeleton);
    return detail::explore(problem, cfg, skeleton);
}

Verdict check_safety(const ReachResult& result, const std::vector<BadSet>& bad) {
    for (const ReachNode& n : result.nodes) {
        for (const BadSet& b : bad) {
            if (!detail::location_matches(result, n.location, b)) continue;
            if (n.segments.empty()) {
                if (may_intersect(n.entry, result.scopes, b)) return Verdict::unsafe_possible;
                continue;
            }
            for (const auto& seg : n.segments)
                if (may_intersect(seg, result.scopes, b)) return Verdict::unsafe_possible;
        }
    }
    return Verdict::safe;
}

}  // namespace hyreach
