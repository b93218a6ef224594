#include "decomposed.hpp"

#include "search.hpp"

#include <algorithm>

namespace hyreach {

namespace {

constexpr double kMergeTol = 1e-9;

bool windows_overlap(const EnablingWindow& a, const EnablingWindow& b, bool timed) {
    if (timed) {
        return !a.time.is_empty() && !b.time.is_empty() && a.time.lo <= b.time.hi + kMergeTol &&
               b.time.lo <= a.time.hi + kMergeTol;
    }
    return !a.segments.meet(b.segments).empty();
}

const Jump* move_of(const NetworkIndex& idx, const EnablingWindow& w, std::size_t c) {
    for (const LocalMove& m : w.moves)
        if (m.component == c) return &idx.jump(c, m.jump);
    return nullptr;
}

Interval time_of(const StateSet& s, const std::optional<VarIndex>& t) {
    if (!t) return Interval::all();
    return s.bounds(*t);
}

bool all_noop(const NetworkIndex& idx, const std::vector<LocalMove>& moves) {
    return std::all_of(moves.begin(), moves.end(), [&](const LocalMove& m) { return idx.is_noop(m.component, m.jump); });
}

// Joint time interval of a complete combination over its final segment range.
Interval canonical_time(const NetworkIndex& idx, const SubspaceFlowpipes& fps, const EnablingWindow& w) {
    if (!fps.explicit_time()) return Interval::all();
    Interval t = Interval::all();
    for (std::size_t c = 0; c < fps.size() && !t.is_empty(); ++c) {
        StateSet s = fps[c].hull(w.segments);
        if (const Jump* j = move_of(idx, w, c)) s = intersect(s, j->guard);
        t = t.meet(time_of(s, fps.time_var(c)));
    }
    return t;
}

struct Choice {
    std::size_t component;
    std::optional<std::size_t> jump;  // nullopt: stay
};

// Depth-first search over per-component choices. `options[i]` lists the alternatives of the
// i-th component considered (in order).
std::vector<EnablingWindow> search_combinations(const NetworkIndex& idx, const SubspaceFlowpipes& fps,
                                                const std::vector<std::vector<Choice>>& options,
                                                std::optional<std::size_t> label, bool optimized,
                                                ReachStats* stats) {
    std::vector<EnablingWindow> out;
    const bool timed = fps.explicit_time();
    const std::size_t m = options.size();
    std::vector<std::size_t> pick(m, 0);

    auto finish = [&](std::vector<LocalMove> moves, SegmentRange r) {
        if (moves.empty()) return;
        if (idx.size() > 1 && all_noop(idx, moves)) return;
        EnablingWindow w;
        w.label = label;
        w.moves = std::move(moves);
        w.segments = r;
        w.time = canonical_time(idx, fps, w);
        if (w.time.is_empty()) return;
        out.push_back(std::move(w));
    };

    auto step = [&](const Choice& ch, SegmentRange within, Interval t, SegmentRange& r_out, Interval& t_out) {
        if (!ch.jump) {
            r_out = within;
            t_out = t;
            return true;
        }
        if (stats) ++stats->jumps_considered;
        const Jump& j = idx.jump(ch.component, *ch.jump);
        const LazyFlowpipe& fp = fps[ch.component];
        r_out = fp.enabling(j.guard, within);
        if (r_out.empty()) return false;
        t_out = t;
        if (timed) {
            t_out = t.meet(time_of(intersect(fp.hull(r_out), j.guard), fps.time_var(ch.component)));
            if (t_out.is_empty()) return false;
        }
        return true;
    };

    if (optimized) {
        std::vector<LocalMove> moves;
        std::function<void(std::size_t, SegmentRange, Interval)> dfs = [&](std::size_t i, SegmentRange r,
                                                                           Interval t) {
            if (i == m) {
                finish(moves, r);
                return;
            }
            for (const Choice& ch : options[i]) {
                SegmentRange r2;
                Interval t2;
                if (!step(ch, r, t, r2, t2)) {
                    if (stats) ++stats->combinations_pruned;
                    continue;
                }
                if (ch.jump) moves.push_back({ch.component, *ch.jump});
                dfs(i + 1, r2, t2);
                if (ch.jump) moves.pop_back();
            }
        };
        dfs(0, fps.all(), Interval::all());
        return out;
    }

    // brute force: every combination, filtered afterwards
    for (const auto& o : options)
        if (o.empty()) return out;
    while (true) {
        std::vector<LocalMove> moves;
        SegmentRange r = fps.all();
        Interval t = Interval::all();
        bool ok = true;
        for (std::size_t i = 0; i < m; ++i) {
            const Choice& ch = options[i][pick[i]];
            SegmentRange ri;
            Interval ti;
            if (!step(ch, fps.all(), Interval::all(), ri, ti)) {
                ok = false;
                continue;
            }
            r = r.meet(ri);
            t = t.meet(ti);
            if (ch.jump) moves.push_back({ch.component, *ch.jump});
        }
        if (ok && !r.empty() && !t.is_empty()) finish(std::move(moves), r);
        std::size_t i = m;
        bool done = true;
        while (i > 0) {
            --i;
            if (++pick[i] < options[i].size()) {
                done = false;
                break;
            }
            pick[i] = 0;
        }
        if (done) break;
    }
    return out;
}

}  // namespace

SubspaceFlowpipes::SubspaceFlowpipes(const NetworkIndex& idx, const ComposedLocation& loc,
                                     const std::vector<StateSet>& entry, double delta, std::size_t max_segments,
                                     double slack, std::vector<std::optional<VarIndex>> time_vars)
    : loc_(loc), time_vars_(std::move(time_vars)) {
    zero_dwell_ = idx.zero_dwell(loc);
    length_ = max_segments;
    for (std::size_t c = 0; c < idx.size(); ++c) {
        const Location& l = idx.component(c).locations[loc[c]];
        std::vector<double> rates = l.flow.rates;
        if (c < time_vars_.size() && time_vars_[c]) {
            rates.resize(*time_vars_[c] + 1, 0.0);
            rates[*time_vars_[c]] = 1.0;
        }
        pipes_.emplace_back(entry[c], std::move(rates), l.invariant, delta, max_segments, zero_dwell_, slack);
        length_ = std::min(length_, pipes_.back().length());
    }
    if (time_vars_.size() < idx.size()) time_vars_.resize(idx.size());
}

std::vector<EnablingWindow> enumerate_combos(const NetworkIndex& idx, const SubspaceFlowpipes& fps, std::size_t label,
                                             bool optimized, ReachStats* stats) {
    std::vector<std::vector<Choice>> options;
    for (std::size_t c : idx.participants(label)) {
        std::vector<Choice> o;
        for (std::size_t j : idx.labeled_jumps(c, fps.location()[c], label)) o.push_back({c, j});
        if (o.empty()) return {};  // blocked
        options.push_back(std::move(o));
    }
    if (options.empty()) return {};
    return search_combinations(idx, fps, options, label, optimized, stats);
}

std::vector<EnablingWindow> enumerate_unlabeled(const NetworkIndex& idx, const SubspaceFlowpipes& fps, bool optimized,
                                                ReachStats* stats) {
    std::vector<std::vector<Choice>> options;
    bool any = false;
    for (std::size_t c = 0; c < idx.size(); ++c) {
        std::vector<Choice> o{{c, std::nullopt}};
        for (std::size_t j : idx.unlabeled_jumps(c, fps.location()[c])) {
            o.push_back({c, j});
            any = true;
        }
        options.push_back(std::move(o));
    }
    if (!any) return {};
    // drop components that can only stay
    std::vector<std::vector<Choice>> movable;
    for (auto& o : options)
        if (o.size() > 1) movable.push_back(std::move(o));
    return search_combinations(idx, fps, movable, std::nullopt, optimized, stats);
}

std::vector<StateSet> enabling_sets(const NetworkIndex& idx, const SubspaceFlowpipes& fps, const EnablingWindow& w) {
    std::vector<StateSet> out;
    out.reserve(fps.size());
    for (std::size_t c = 0; c < fps.size(); ++c) {
        StateSet s = fps[c].hull(w.segments);
        if (const Jump* j = move_of(idx, w, c)) s = intersect(s, j->guard);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<StateSet> tighten_by_time(const std::vector<StateSet>& sets,
                                      const std::vector<std::optional<VarIndex>>& time_vars, Interval window) {
    std::vector<StateSet> out;
    out.reserve(sets.size());
    for (std::size_t c = 0; c < sets.size(); ++c) {
        if (c < time_vars.size() && time_vars[c]) {
            out.push_back(restrict_time(sets[c], *time_vars[c], window));
        } else {
            out.push_back(sets[c]);
        }
    }
    return out;
}

bool apply_jump(const NetworkIndex& idx, Successor& s, double slack) {
    s.sets.clear();
    for (std::size_t c = 0; c < s.enabling.size(); ++c) {
        const Location& target = idx.component(c).locations[s.target[c]];
        StateSet post = s.enabling[c];
        if (const Jump* j = move_of(idx, s.window, c)) post = transform(post, j->reset, slack);
        post = intersect(post, target.invariant);
        if (post.is_empty()) return false;
        s.sets.push_back(std::move(post));
    }
    return true;
}

std::optional<Successor> make_successor(const NetworkIndex& idx, const SubspaceFlowpipes& fps, const EnablingWindow& w,
                                        double slack) {
    Successor s;
    s.window = w;
    s.target = fps.location();
    for (const LocalMove& m : w.moves) s.target[m.component] = idx.target_of(m.component, m.jump);
    s.enabling = enabling_sets(idx, fps, w);
    if (fps.explicit_time()) {
        std::vector<std::optional<VarIndex>> tv;
        for (std::size_t c = 0; c < fps.size(); ++c) tv.push_back(fps.time_var(c));
        s.enabling = tighten_by_time(s.enabling, tv, w.time);
    }
    for (const StateSet& e : s.enabling)
        if (e.is_empty()) return std::nullopt;
    if (!apply_jump(idx, s, slack)) return std::nullopt;
    return s;
}

namespace {

Interval first_bounds(const StateSet& s) {
    if (s.is_box() && s.box().dimension() == 0) return Interval::empty();
    return s.bounds(s.is_box() ? 0 : s.octagon().x_var());
}

AffineReset reset_of(const NetworkIndex& idx, const EnablingWindow& w, std::size_t c) {
    const Jump* j = move_of(idx, w, c);
    return j ? j->reset.normalized() : AffineReset{};
}

bool same_resets(const NetworkIndex& idx, const Successor& a, const Successor& b) {
    for (std::size_t c = 0; c < idx.size(); ++c) {
        if (!(reset_of(idx, a.window, c) == reset_of(idx, b.window, c))) return false;
    }
    return true;
}

bool sets_equal(const std::vector<StateSet>& a, const std::vector<StateSet>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].contains(b[i], kMergeTol) || !b[i].contains(a[i], kMergeTol)) return false;
    }
    return true;
}

}  // namespace

std::vector<Successor> dedup_successors(const NetworkIndex& idx, std::vector<Successor> successors, double slack,
                                        const ClosureFn& closure, ReachStats* stats) {
    if (successors.size() < 2) return successors;
    const bool timed = std::any_of(successors.begin(), successors.end(),
                                   [](const Successor& s) { return s.window.time.lo > -kInf || s.window.time.hi < kInf; });

    // identical resets and target: hull the enabling sets
    std::vector<Successor> merged;
    for (Successor& s : successors) {
        bool absorbed = false;
        for (Successor& m : merged) {
            if (m.target != s.target || !windows_overlap(m.window, s.window, timed) || !same_resets(idx, m, s)) continue;
            Successor candidate = m;
            for (std::size_t c = 0; c < candidate.enabling.size(); ++c) {
                candidate.enabling[c] = hull(candidate.enabling[c], s.enabling[c]);
            }
            candidate.window.segments = {std::min(m.window.segments.first, s.window.segments.first),
                                         std::max(m.window.segments.last, s.window.segments.last)};
            candidate.window.time = m.window.time.join(s.window.time);
            if (!apply_jump(idx, candidate, slack)) continue;
            m = std::move(candidate);
            absorbed = true;
            if (stats) ++stats->successors_merged;
            break;
        }
        if (!absorbed) merged.push_back(std::move(s));
    }
    if (!closure || merged.size() < 2) return merged;

    // identical zero-time closures: keep the first
    using Closure = std::vector<std::pair<ComposedLocation, std::vector<StateSet>>>;
    std::vector<std::optional<Closure>> cache(merged.size());
    auto closure_of = [&](std::size_t i) -> const Closure& {
        if (!cache[i]) cache[i] = closure(merged[i]);
        return *cache[i];
    };
    std::vector<Successor> kept;
    std::vector<std::size_t> kept_index;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        bool dropped = false;
        for (std::size_t k : kept_index) {
            if (!windows_overlap(merged[k].window, merged[i].window, timed)) continue;
            const Closure& a = closure_of(k);
            const Closure& b = closure_of(i);
            if (a.empty() || a.size() != b.size()) continue;
            bool equal = true;
            for (std::size_t e = 0; e < a.size() && equal; ++e) {
                equal = a[e].first == b[e].first && sets_equal(a[e].second, b[e].second);
            }
            if (equal) {
                dropped = true;
                if (stats) ++stats->successors_merged;
                break;
            }
        }
        if (!dropped) {
            kept_index.push_back(i);
        }
    }
    for (std::size_t i : kept_index) kept.push_back(std::move(merged[i]));
    return kept;
}

bool detect_synchronization(const std::vector<StateSet>& sets, const std::vector<std::vector<VarIndex>>& clocks) {
    return detail::all_clocks_zero(sets, clocks);
}

namespace {

class DecomposedProblem : public detail::SearchProblem {
public:
    DecomposedProblem(const Network& net, const AnalysisConfig& cfg, const std::vector<BadSet>& bad,
                      const ReachResult& skeleton, std::vector<std::optional<VarIndex>> time_vars)
        : idx_(net), cfg_(cfg), bad_(bad), skeleton_(skeleton), time_vars_(std::move(time_vars)) {
        cap_ = segment_cap(cfg.delta, cfg.horizon);
    }

    std::vector<detail::Candidate> roots() override {
        std::vector<detail::Candidate> out;
        // product over components of their init entries
        std::vector<std::pair<ComposedLocation, std::vector<StateSet>>> partial{{{}, {}}};
        for (std::size_t c = 0; c < idx_.size(); ++c) {
            const HybridAutomaton& a = idx_.component(c);
            std::vector<std::pair<ComposedLocation, std::vector<StateSet>>> next;
            for (const InitEntry& e : a.init) {
                const LocIndex l = a.location_index(e.location);
                if (l == kNoLocation) throw ModelError(a.name + ": init references unknown location " + e.location);
                const StateSet s = initial_set(c, e.condition);
                if (s.is_empty()) continue;
                for (const auto& [loc, sets] : partial) {
                    auto nl = loc;
                    auto ns = sets;
                    nl.push_back(l);
                    ns.push_back(s);
                    next.emplace_back(std::move(nl), std::move(ns));
                }
            }
            partial = std::move(next);
        }
        for (auto& [loc, sets] : partial) out.push_back({std::move(loc), std::move(sets), std::nullopt, Interval::empty(), {}});
        return out;
    }

    bool zero_dwell(const ComposedLocation& loc) const override { return idx_.zero_dwell(loc); }

    detail::Expansion expand(const ReachNode& node, bool want_segments) override {
        detail::Expansion exp;
        SubspaceFlowpipes fps(idx_, node.location, node.entry, cfg_.delta, cap_, cfg_.slack, time_vars_);
        exp.segment_count = fps.all().size();
        if (fps.all().empty()) return exp;

        if (want_segments) {
            for (std::size_t k = 0; k < fps.all().last; ++k) {
                std::vector<StateSet> seg;
                for (std::size_t c = 0; c < fps.size(); ++c) seg.push_back(fps[c].segment(k));
                exp.segments.push_back(std::move(seg));
            }
        }
        exp.bad_hit = check_bad(node, fps);

        std::vector<Successor> succ = successors(fps);
        if (cfg_.dedup) {
            ClosureFn closure = [this](const Successor& s) { return this->closure(s); };
            succ = dedup_successors(idx_, std::move(succ), cfg_.slack, closure, &stats);
        }
        for (Successor& s : succ) {
            ComposedJump via;
            via.source = node.location;
            via.target = s.target;
            via.moves = s.window.moves;
            via.label = s.window.label;
            for (const LocalMove& m : via.moves) via.urgent = via.urgent || idx_.jump(m.component, m.jump).urgent;
            const Interval window = fps.explicit_time() ? s.window.time : Interval::empty();
            exp.successors.push_back({std::move(s.target), std::move(s.sets), std::move(via), window, s.window.segments});
        }
        return exp;
    }

private:
    StateSet initial_set(std::size_t c, const Condition& cond) const {
        const HybridAutomaton& a = idx_.component(c);
        Condition full = cond;
        const auto& tv = time_vars_[c];
        if (tv) full.add(LinearConstraint({{*tv, 1.0}}, Relation::eq, 0.0));
        if (cfg_.representation == Representation::octagon) {
            return intersect(Octagon2D(0, *tv), full);
        }
        return intersect(Box::universe(a.dimension() + (tv ? 1 : 0)), full);
    }

    std::vector<Successor> successors(const SubspaceFlowpipes& fps) {
        std::vector<EnablingWindow> windows;
        for (std::size_t l = 0; l < idx_.labels().size(); ++l) {
            auto w = enumerate_combos(idx_, fps, l, cfg_.optimized_enumeration, &stats);
            windows.insert(windows.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
        }
        auto u = enumerate_unlabeled(idx_, fps, cfg_.optimized_enumeration, &stats);
        windows.insert(windows.end(), std::make_move_iterator(u.begin()), std::make_move_iterator(u.end()));
        std::vector<Successor> out;
        for (const EnablingWindow& w : windows) {
            if (auto s = make_successor(idx_, fps, w, cfg_.slack)) out.push_back(std::move(*s));
        }
        return out;
    }

    std::vector<std::pair<ComposedLocation, std::vector<StateSet>>> closure(const Successor& s) {
        std::vector<std::pair<ComposedLocation, std::vector<StateSet>>> out;
        if (!idx_.zero_dwell(s.target)) {
            out.emplace_back(s.target, s.sets);
            return out;
        }
        SubspaceFlowpipes fps(idx_, s.target, s.sets, cfg_.delta, cap_, cfg_.slack, time_vars_);
        std::vector<Successor> next = dedup_successors(idx_, successors(fps), cfg_.slack);
        for (Successor& n : next) out.emplace_back(std::move(n.target), std::move(n.sets));
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            for (std::size_t c = 0; c < a.second.size(); ++c) {
                const Interval ia = first_bounds(a.second[c]), ib = first_bounds(b.second[c]);
                if (ia.lo != ib.lo) return ia.lo < ib.lo;
                if (ia.hi != ib.hi) return ia.hi < ib.hi;
            }
            return false;
        });
        return out;
    }

    bool check_bad(const ReachNode& node, const SubspaceFlowpipes& fps) const {
        bool hit = false;
        for (const BadSet& b : bad_) {
            if (!detail::location_matches(skeleton_, node.location, b)) continue;
            std::vector<StateSet> hulls;
            for (std::size_t c = 0; c < fps.size(); ++c) hulls.push_back(fps[c].hull(fps.all()));
            if (!may_intersect(hulls, skeleton_.scopes, b)) continue;
            if (fps.all().size() > 20000) return true;
            for (std::size_t k = 0; k < fps.all().last && !hit; ++k) {
                std::vector<StateSet> seg;
                for (std::size_t c = 0; c < fps.size(); ++c) seg.push_back(fps[c].segment(k));
                hit = may_intersect(seg, skeleton_.scopes, b);
            }
            if (hit) return true;
        }
        return hit;
    }

    NetworkIndex idx_;
    const AnalysisConfig& cfg_;
    const std::vector<BadSet>& bad_;
    const ReachResult& skeleton_;
    std::vector<std::optional<VarIndex>> time_vars_;
    std::size_t cap_ = 1;
};

}  // namespace

ReachResult analyze_decomposed(const Network& network, const AnalysisConfig& cfg, const std::vector<BadSet>& bad) {
    cfg.validate();
    if (network.components.empty()) throw ModelError("empty network");
    if (!network.shared_variables().empty()) {
        throw UnsupportedFeature("decomposed analysis does not support shared variables");
    }
    const bool octagon = cfg.representation == Representation::octagon;
    if (octagon && !cfg.explicit_time) {
        throw UnsupportedFeature("octagons require the explicit time dimension");
    }

    ReachResult skeleton;
    skeleton.engine = "decomposed";
    skeleton.delta = cfg.delta;
    skeleton.labels = network.alphabet();
    std::vector<std::optional<VarIndex>> time_vars;
    for (const HybridAutomaton& a : network.components) {
        std::vector<std::string> scope;
        std::vector<VarIndex> clocks;
        for (VarIndex v = 0; v < a.dimension(); ++v) {
            if (a.variables[v].kind == VarKind::time && cfg.explicit_time) {
                throw UnsupportedFeature(a.name + ": already declares a time variable");
            }
            scope.push_back(a.variables[v].name);
            if (a.variables[v].kind == VarKind::local) clocks.push_back(v);
        }
        if (cfg.explicit_time) {
            time_vars.push_back(a.dimension());
            scope.push_back("t_" + a.name);
        } else {
            time_vars.push_back(std::nullopt);
        }
        if (octagon && a.dimension() != 1) {
            throw UnsupportedFeature(a.name + ": octagons need exactly one variable besides time");
        }
        skeleton.scopes.push_back(std::move(scope));
        skeleton.clocks.push_back(std::move(clocks));
        std::vector<std::string> names;
        for (const Location& l : a.locations) names.push_back(l.name);
        skeleton.location_names.push_back(std::move(names));
    }
    DecomposedProblem problem(network, cfg, bad, skeleton, std::move(time_vars));
    return detail::explore(problem, cfg, skeleton);
}

}  // namespace hyreach
