#include "containment.hpp"
#include "decomposed.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace hyreach;
using namespace hyreach::test;

namespace {

AnalysisConfig timed(double delta, std::size_t depth) {
    AnalysisConfig c;
    c.delta = delta;
    c.depth = depth;
    c.representation = Representation::octagon;
    c.explicit_time = true;
    c.dedup = true;
    c.optimized_enumeration = true;
    return c;
}

AnalysisConfig boxes(double delta, std::size_t depth) {
    AnalysisConfig c;
    c.delta = delta;
    c.depth = depth;
    return c;
}

// Two clocks x1 (from 0) and x2 (from 1/2); only the second automaton can jump, when x2 >= 1.
Network worked_example() {
    HybridAutomaton a = clock_automaton("A", "x1", 0.0);
    HybridAutomaton b = clock_automaton("B", "x2", 0.5);
    b.jumps.push_back(Jump{"l", "m", cond({cmp(0, Relation::ge, 1.0)}), {}, std::nullopt, false});
    return Network{{a, b}};
}

using WindowKey = std::pair<std::vector<std::pair<std::size_t, std::size_t>>, std::pair<std::size_t, std::size_t>>;

WindowKey key(const EnablingWindow& w) {
    WindowKey k;
    for (const auto& m : w.moves) k.first.push_back({m.component, m.jump});
    k.second = {w.segments.first, w.segments.last};
    return k;
}

std::set<WindowKey> keys(const std::vector<EnablingWindow>& ws) {
    std::set<WindowKey> out;
    for (const auto& w : ws) out.insert(key(w));
    return out;
}

// Every combination of local jumps filtered by a nonempty joint enabling range.
std::set<WindowKey> brute_force(const NetworkIndex& idx, const SubspaceFlowpipes& fps,
                                const std::vector<std::vector<std::optional<std::size_t>>>& options,
                                std::optional<std::size_t> label) {
    std::set<WindowKey> out;
    std::vector<std::size_t> pick(options.size(), 0);
    while (true) {
        std::vector<LocalMove> moves;
        SegmentRange r = fps.all();
        for (std::size_t i = 0; i < options.size(); ++i) {
            const auto& choice = options[i][pick[i]];
            if (!choice) continue;
            const std::size_t c = label ? idx.participants(*label)[i] : i;
            moves.push_back({c, *choice});
            r = r.meet(fps[c].enabling(idx.jump(c, *choice).guard, fps[c].all()));
        }
        const bool noop = std::all_of(moves.begin(), moves.end(),
                                      [&](const LocalMove& m) { return idx.is_noop(m.component, m.jump); });
        if (!moves.empty() && !r.empty() && !(idx.size() > 1 && noop)) {
            EnablingWindow w;
            w.moves = moves;
            w.segments = r;
            out.insert(key(w));
        }
        std::size_t i = 0;
        while (i < options.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
        if (i == options.size()) break;
    }
    return out;
}

}  // namespace

// ---- worked example ---------------------------------------------------------------

TEST(WorkedExample, BoxesLoseTheRelation) {
    const Network net = worked_example();
    NetworkIndex idx(net);
    SubspaceFlowpipes fps(idx, {0, 0}, {Box::point({0.0}), Box::point({0.5})}, 0.5, 1, 0.0, {});
    const auto windows = enumerate_unlabeled(idx, fps, true);
    ASSERT_EQ(windows.size(), 1u);
    // before the guard: [0, 1/2] x [1/2, 1]
    EXPECT_EQ(fps[0].segment(0).bounds(0), (Interval{0, 0.5}));
    EXPECT_EQ(fps[1].segment(0).bounds(0), (Interval{0.5, 1}));
    const auto sets = enabling_sets(idx, fps, windows[0]);
    EXPECT_NEAR(sets[0].bounds(0).lo, 0.0, 1e-9);
    EXPECT_NEAR(sets[0].bounds(0).hi, 0.5, 1e-9);
    EXPECT_NEAR(sets[1].bounds(0).lo, 1.0, 1e-9);
    EXPECT_NEAR(sets[1].bounds(0).hi, 1.0, 1e-9);
}

TEST(WorkedExample, ExplicitTimeRecoversThePoint) {
    const Network net = worked_example();
    NetworkIndex idx(net);
    const StateSet e1 = Octagon2D::from_box(0, 1, Interval::point(0.0), Interval::point(0.0));
    const StateSet e2 = Octagon2D::from_box(0, 1, Interval::point(0.5), Interval::point(0.0));
    SubspaceFlowpipes fps(idx, {0, 0}, {e1, e2}, 0.5, 1, 0.0, {VarIndex{1}, VarIndex{1}});
    const auto windows = enumerate_unlabeled(idx, fps, true);
    ASSERT_EQ(windows.size(), 1u);
    EXPECT_NEAR(windows[0].time.lo, 0.5, 1e-9);
    EXPECT_NEAR(windows[0].time.hi, 0.5, 1e-9);
    const auto s = make_successor(idx, fps, windows[0], 0.0);
    ASSERT_TRUE(s.has_value());
    EXPECT_NEAR(s->enabling[0].bounds(0).lo, 0.5, 1e-9);
    EXPECT_NEAR(s->enabling[0].bounds(0).hi, 0.5, 1e-9);
    EXPECT_NEAR(s->enabling[1].bounds(0).lo, 1.0, 1e-9);
    EXPECT_NEAR(s->enabling[1].bounds(0).hi, 1.0, 1e-9);
}

TEST(WorkedExample, WholeWindowLeavesSetsUnchanged) {
    const StateSet o = Octagon2D::from_box(0, 1, {0, 1}, {0, 0.5});
    const auto out = tighten_by_time({o, Box({{0, 1}})}, {VarIndex{1}, std::nullopt}, {0, 0.5});
    EXPECT_EQ(out[0], o);
    EXPECT_EQ(out[1], StateSet(Box({{0, 1}})));
}

TEST(WorkedExample, EngineSuccessors) {
    AnalysisConfig c = boxes(0.5, 1);
    c.horizon = 0.5;
    const ReachResult rb = analyze_decomposed(worked_example(), c);
    ASSERT_EQ(rb.node_count(), 2u);
    EXPECT_EQ(rb.nodes[1].entry[0].bounds(0), (Interval{0, 0.5}));

    AnalysisConfig t = timed(0.5, 1);
    t.horizon = 0.5;
    const ReachResult ro = analyze_decomposed(worked_example(), t);
    ASSERT_EQ(ro.node_count(), 2u);
    EXPECT_NEAR(ro.nodes[1].entry[0].bounds(0).lo, 0.5, 1e-9);
    EXPECT_NEAR(ro.nodes[1].entry[0].bounds(0).hi, 0.5, 1e-9);
    EXPECT_EQ(ro.scopes[0], (std::vector<std::string>{"x1", "t_A"}));
}

// ---- engine examples ---------------------------------------------------------------

TEST(Decomposed, ChainOfFiveRobots) {
    const ReachResult r = analyze_decomposed(swarm(Variant::lsync2, 5, 1.3), timed(1e-5, 20));
    EXPECT_EQ(r.node_count(), 21u);
    for (const ReachNode& n : r.nodes) EXPECT_LE(n.children.size(), 1u);
}

TEST(Decomposed, SingleRobotChain) {
    const ReachResult r = analyze_decomposed(swarm(Variant::lsync2, 1, 1.3), timed(0.01, 20));
    EXPECT_EQ(r.node_count(), 21u);
    EXPECT_EQ(r.max_depth, 20u);
    const ReachResult b = analyze_decomposed(swarm(Variant::lsync2, 1, 1.3), boxes(0.01, 20));
    EXPECT_EQ(b.node_count(), 21u);
}

TEST(Decomposed, SharedVariablesUnsupported) {
    EXPECT_THROW(analyze_decomposed(swarm(Variant::shd1, 2), boxes(0.01, 5)), UnsupportedFeature);
    EXPECT_THROW(analyze_decomposed(swarm(Variant::shd2, 2), boxes(0.01, 5)), UnsupportedFeature);
}

TEST(Decomposed, OctagonsNeedExplicitTime) {
    AnalysisConfig c = timed(0.01, 5);
    c.explicit_time = false;
    EXPECT_THROW(analyze_decomposed(swarm(Variant::lsync2, 2), c), UnsupportedFeature);
}

TEST(Decomposed, OneReturnWindowPerAdaptVisit) {
    AnalysisConfig c = timed(1e-5, 20);
    c.dedup = false;
    const ReachResult r = analyze_decomposed(swarm(Variant::lsync2, 10, 1.3), c);
    std::size_t visits = 0;
    for (const ReachNode& n : r.nodes) {
        if (n.status != NodeStatus::expanded || !n.zero_dwell) continue;
        ++visits;
        EXPECT_EQ(n.children.size(), 1u) << n.id;
    }
    EXPECT_GT(visits, 0u);
}

TEST(Enumerate, DisjointRangesGiveNothing) {
    HybridAutomaton a = clock_automaton("A", "x", 0.0);
    HybridAutomaton b = clock_automaton("B", "y", 0.0);
    a.jumps.push_back(Jump{"l", "m", cond({cmp(0, Relation::ge, 1.0), cmp(0, Relation::le, 1.5)}), {}, "go", false});
    b.jumps.push_back(Jump{"l", "m", cond({cmp(0, Relation::ge, 2.0)}), {}, "go", false});
    const Network net{{a, b}};
    NetworkIndex idx(net);
    SubspaceFlowpipes fps(idx, {0, 0}, {Box::point({0.0}), Box::point({0.0})}, 0.1, 30, 0.0, {});
    const std::size_t go = *idx.label_id("go");
    EXPECT_TRUE(enumerate_combos(idx, fps, go, true).empty());
    EXPECT_TRUE(enumerate_combos(idx, fps, go, false).empty());
}

TEST(Enumerate, WindowsAtOracleFlashTimes) {
    const Network net = swarm(Variant::lsync2, 2, 1.1);
    NetworkIndex idx(net);
    const ComposedLocation root = idx.initial_locations().front();
    const StateSet e1 = Octagon2D::from_box(0, 1, Interval::point(0.0), Interval::point(0.0));
    const StateSet e2 = Octagon2D::from_box(0, 1, Interval::point(0.5), Interval::point(0.0));
    SubspaceFlowpipes fps(idx, root, {e1, e2}, 0.01, 1000, 0.0, {VarIndex{1}, VarIndex{1}});
    const auto w2 = enumerate_combos(idx, fps, *idx.label_id("flash_2"), true);
    ASSERT_EQ(w2.size(), 1u);
    EXPECT_NEAR(w2[0].time.lo, 0.5, 1e-9);
    EXPECT_NEAR(w2[0].time.hi, 0.5, 1e-9);
    const auto oracle = simulate_oracle(spec(Variant::lsync2, 2, 1.1), 0.6, 0.0);
    ASSERT_FALSE(oracle.events.empty());
    EXPECT_DOUBLE_EQ(oracle.events[0].time, 0.5);
    EXPECT_TRUE(enumerate_combos(idx, fps, *idx.label_id("flash_1"), true).empty());
}

TEST(Enumerate, OptimizedEqualsBruteForce) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t nonempty = 0;
    for (Variant v : {Variant::lsync1, Variant::lsync2}) {
        for (std::size_t n = 2; n <= 4; ++n) {
            const Network net = swarm(v, n, 1.1);
            NetworkIndex idx(net);
            const Composition comp = compose(net);
            for (const ComposedLocation& loc : comp.locations) {
                for (int trial = 0; trial < 3; ++trial) {
                    std::vector<StateSet> entry;
                    for (std::size_t c = 0; c < n; ++c) {
                        const double lo = u(rng);
                        entry.push_back(Box({{lo, std::min(1.0, lo + 0.2 * u(rng))}}));
                    }
                    SubspaceFlowpipes fps(idx, loc, entry, 0.05, 40, 0.0, {});
                    for (std::size_t l = 0; l < idx.labels().size(); ++l) {
                        std::vector<std::vector<std::optional<std::size_t>>> opts;
                        for (std::size_t c : idx.participants(l)) {
                            std::vector<std::optional<std::size_t>> o;
                            for (std::size_t j : idx.labeled_jumps(c, loc[c], l)) o.push_back(j);
                            opts.push_back(o);
                        }
                        const bool blocked = std::any_of(opts.begin(), opts.end(), [](const auto& o) { return o.empty(); });
                        const auto expect = blocked ? std::set<WindowKey>{} : brute_force(idx, fps, opts, l);
                        nonempty += !expect.empty();
                        EXPECT_EQ(keys(enumerate_combos(idx, fps, l, true)), expect);
                        EXPECT_EQ(keys(enumerate_combos(idx, fps, l, false)), expect);
                    }
                    std::vector<std::vector<std::optional<std::size_t>>> opts;
                    for (std::size_t c = 0; c < n; ++c) {
                        std::vector<std::optional<std::size_t>> o{std::nullopt};
                        for (std::size_t j : idx.unlabeled_jumps(c, loc[c])) o.push_back(j);
                        opts.push_back(o);
                    }
                    const auto expect = brute_force(idx, fps, opts, std::nullopt);
                    nonempty += !expect.empty();
                    EXPECT_EQ(keys(enumerate_unlabeled(idx, fps, true)), expect);
                    EXPECT_EQ(keys(enumerate_unlabeled(idx, fps, false)), expect);
                }
            }
        }
    }
    EXPECT_GT(nonempty, 20u);
}

TEST(Enumerate, OptimizationPrunes) {
    AnalysisConfig plain = boxes(0.01, 10), opt = plain;
    opt.optimized_enumeration = true;
    const ReachResult a = analyze_decomposed(swarm(Variant::lsync1, 4, 1.1), plain);
    const ReachResult b = analyze_decomposed(swarm(Variant::lsync1, 4, 1.1), opt);
    EXPECT_EQ(a.node_count(), b.node_count());
    EXPECT_LE(b.stats.jumps_considered, a.stats.jumps_considered);
}

// ---- deduplication ------------------------------------------------------------------

TEST(Dedup, SimultaneousFlashersMerge) {
    for (std::size_t n : {2u, 3u}) {
        SwarmSpec s = spec(Variant::lsync2, n, 1.3);
        s.anchors.assign(n, 0.0);
        AnalysisConfig with = timed(0.01, 1), without = with;
        without.dedup = false;
        const ReachResult a = analyze_decomposed(generate_model(s), with);
        const ReachResult b = analyze_decomposed(generate_model(s), without);
        EXPECT_EQ(a.nodes[0].children.size(), 1u) << n;
        EXPECT_EQ(b.nodes[0].children.size(), n) << n;
        const auto trace = simulate_oracle(s, 1.5, 0.0);
        ASSERT_FALSE(trace.events.empty());
        EXPECT_EQ(trace.events[0].flashers.size(), n);
    }
}

TEST(Dedup, DistinctResetsStay) {
    HybridAutomaton a = clock_automaton("A", "x", 0.0);
    AffineReset zero, one;
    zero.assign(0, 0.0, 0.0);
    one.assign(0, 0.0, 1.0);
    a.jumps.push_back(Jump{"l", "m", {}, zero, std::nullopt, false});
    a.jumps.push_back(Jump{"l", "m", {}, one, std::nullopt, false});
    a.jumps.push_back(Jump{"l", "m", cond({cmp(0, Relation::ge, 0.0)}), zero, std::nullopt, false});
    const Network net{{a}};
    NetworkIndex idx(net);
    const StateSet e = Octagon2D::from_box(0, 1, Interval::point(0.0), Interval::point(0.0));
    SubspaceFlowpipes fps(idx, {0}, {e}, 0.1, 5, 0.0, {VarIndex{1}});
    std::vector<Successor> succ;
    for (const auto& w : enumerate_unlabeled(idx, fps, true)) {
        auto s = make_successor(idx, fps, w, 0.0);
        ASSERT_TRUE(s.has_value());
        succ.push_back(*s);
    }
    ASSERT_EQ(succ.size(), 3u);
    const auto merged = dedup_successors(idx, succ, 0.0);
    ASSERT_EQ(merged.size(), 2u);
    for (const auto& s : merged) {
        // the merged successor covers each original successor with the same reset
        for (const auto& o : succ) {
            if (o.sets[0].bounds(0) == s.sets[0].bounds(0)) {
                EXPECT_TRUE(s.sets[0].contains(o.sets[0], 1e-12));
            }
        }
    }
}

// ---- synchronization detection --------------------------------------------------------

TEST(Synchronization, DetectsAllZero) {
    const std::vector<std::vector<VarIndex>> clocks{{0}, {0}};
    EXPECT_TRUE(detect_synchronization({Box::point({0.0}), Box::point({0.0})}, clocks));
    EXPECT_FALSE(detect_synchronization({Box::point({0.0}), Box({{0.0, 0.1}})}, clocks));
    const StateSet o = Octagon2D::from_box(0, 1, Interval::point(0), {0.5, 0.5});
    EXPECT_TRUE(detect_synchronization({o, o}, clocks));
}

TEST(Synchronization, TwoRobotsAlphaTwo) {
    AnalysisConfig c = timed(0.01, 20);
    c.termination = Termination::synchronization;
    const ReachResult r = analyze_decomposed(swarm(Variant::lsync2, 2, 2.0), c);
    EXPECT_EQ(r.verdict, Verdict::synchronized);
    // the branch of the concrete run is synchronized right after the first flash; closing the
    // strict guard 2*x < 1 at x = 1/2 adds a second branch that synchronizes one flash later
    bool after_first = false;
    for (const ReachNode& n : r.nodes) after_first |= n.depth == 2 && n.status == NodeStatus::synchronized;
    EXPECT_TRUE(after_first);
    EXPECT_LE(r.max_depth, 4u);
    const auto trace = simulate_oracle(spec(Variant::lsync2, 2, 2.0), 2.0, 0.0);
    EXPECT_EQ(trace.flash_count, 1u);
}

TEST(Synchronization, SingleRobot) {
    AnalysisConfig c = timed(0.01, 20);
    c.termination = Termination::synchronization;
    const ReachResult r = analyze_decomposed(swarm(Variant::lsync2, 1, 1.3), c);
    EXPECT_EQ(r.verdict, Verdict::synchronized);
    EXPECT_EQ(r.node_count(), 2u);
}

// ---- soundness ------------------------------------------------------------------------

TEST(Decomposed, ProductContainsMonolithicSets) {
    for (std::size_t n = 2; n <= 4; ++n) {
        const Network net = swarm(Variant::lsync2, n, 1.3);
        const ReachResult m = analyze(compose(net).automaton, boxes(0.01, 8));
        const ReachResult d = analyze_decomposed(net, boxes(0.01, 8));
        auto paths = [](const ReachResult& r) {
            std::vector<std::string> p(r.nodes.size());
            for (const ReachNode& x : r.nodes) p[x.id] = (x.parent ? p[*x.parent] + "/" : "") + r.location_name(x.location);
            return p;
        };
        const auto pm = paths(m), pd = paths(d);
        for (const ReachNode& mn : m.nodes) {
            bool covered = false;
            for (const ReachNode& dn : d.nodes) {
                if (pd[dn.id] != pm[mn.id]) continue;
                bool all = true;
                for (std::size_t c = 0; c < n; ++c) {
                    const std::string name = clock_name(c);
                    const auto& ms = m.scopes[0];
                    const VarIndex mv = static_cast<VarIndex>(std::find(ms.begin(), ms.end(), name) - ms.begin());
                    all &= dn.entry[c].bounds(0).contains(mn.entry[0].bounds(mv), 1e-9);
                }
                covered |= all;
            }
            EXPECT_TRUE(covered) << "n=" << n << " node " << mn.id << " " << pm[mn.id];
        }
    }
}

TEST(Decomposed, OracleContainment) {
    for (std::size_t n : {2u, 3u}) {
        AnalysisConfig c = timed(0.01, 40);
        c.termination = Termination::synchronization;
        c.store_segments = true;
        const ReachResult r = analyze_decomposed(swarm(Variant::lsync2, n, 1.3), c);
        const auto trace = simulate_oracle(spec(Variant::lsync2, n, 1.3), 20.0, 0.01);
        const ContainmentReport rep = check_containment(trace, r);
        EXPECT_TRUE(rep.ok()) << n << ": " << (rep.ok() ? "" : rep.violations[0].message);
        EXPECT_GT(rep.samples_checked, 0u);
    }
}

TEST(Decomposed, Deterministic) {
    const ReachResult a = analyze_decomposed(swarm(Variant::lsync1, 3, 1.1), timed(0.01, 10));
    const ReachResult b = analyze_decomposed(swarm(Variant::lsync1, 3, 1.1), timed(0.01, 10));
    ASSERT_EQ(a.node_count(), b.node_count());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) EXPECT_EQ(a.nodes[i].entry, b.nodes[i].entry);
}
