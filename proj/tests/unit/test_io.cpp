#include "helpers.hpp"
#include "model_io.hpp"
#include "report_io.hpp"

#include <gtest/gtest.h>

using namespace hyreach;
using namespace hyreach::test;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t k = 0;
    for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++k;
    return k;
}

ReachResult stored(Variant v, std::size_t n, std::size_t depth) {
    AnalysisConfig c;
    c.depth = depth;
    c.store_segments = true;
    return analyze(compose(swarm(v, n)).automaton, c);
}

ReachResult single_segment() {
    ReachResult r;
    r.engine = "monolithic";
    r.scopes = {{"x"}};
    r.location_names = {{"l"}};
    r.clocks = {{0}};
    r.delta = 0.5;
    ReachNode n;
    n.location = {0};
    n.entry = {Box({{0.2, 0.2}})};
    n.segments = {{Box({{0.2, 0.7}})}};
    n.segment_count = 1;
    n.status = NodeStatus::dead_end;
    r.nodes.push_back(n);
    return r;
}

}  // namespace

TEST(ModelText, RoundTrip) {
    for (Variant v : kVariants) {
        const Network net = swarm(v, 2);
        const std::string text = write_model(net);
        const Network back = parse_model(text);
        EXPECT_EQ(back, net) << to_string(v);
        EXPECT_EQ(write_model(back), text);
    }
}

TEST(ModelText, NumbersReadBack) {
    for (double v : {0.1, 1.1, 1.0 / 3.0, 2.5e-7, -0.0, 123456789.125}) {
        EXPECT_EQ(std::stod(format_number(v)), v);
    }
    EXPECT_EQ(format_number(1.1), "1.1");
}

TEST(ModelText, UndeclaredTargetParsesButFailsValidation) {
    const Network net = parse_model(
        "automaton a\nvar x\nloc l { flow x'=1; inv x <= 1; }\njump l -> b { guard x >= 1; }\ninit l { x = 0; }\n");
    const auto report = validate(net);
    ASSERT_FALSE(report.ok());
    EXPECT_NE(report.violations[0].where.find("l -> b"), std::string::npos);
}

TEST(ModelText, GeneratedShdOneComposes) {
    const Network net = parse_model(write_model(swarm(Variant::shd1, 3)));
    EXPECT_EQ(count_stats(compose(net).automaton), (CompositionStats{15, 54}));
}

TEST(ModelText, ErrorPosition) {
    try {
        parse_model("automaton a\nvar x\nloc l { flow x' 1; }\n");
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.column(), 17u);
        EXPECT_EQ(std::string(e.what()).rfind("line 3, column 17: ", 0), 0u) << e.what();
    }
    EXPECT_THROW(parse_model("automaton a\nloc l { inv y <= 1; }\n"), ModelError);
    EXPECT_THROW(parse_model("jump"), ParseError);
}

TEST(BadSetText, RoundTrip) {
    const auto bad = parse_bad_sets("bad wait.wait { x1 >= 0.9; x1 - x2 <= 0.5; }\nbad * { x3 > 2; }\n");
    ASSERT_EQ(bad.size(), 2u);
    EXPECT_EQ(bad[0].location, "wait.wait");
    ASSERT_EQ(bad[0].constraints.size(), 2u);
    EXPECT_EQ(bad[1].location, "*");
    const auto again = parse_bad_sets(write_bad_sets(bad));
    ASSERT_EQ(again.size(), 2u);
    EXPECT_EQ(write_bad_sets(again), write_bad_sets(bad));
}

TEST(ReportJson, RoundTrip) {
    AnalysisConfig c;
    c.depth = 4;
    c.store_segments = true;
    const ReachResult r = analyze(compose(swarm(Variant::lsync1, 2)).automaton, c);
    const Json j = report_to_json(r, c, true);
    const ReachResult back = report_from_json(parse_json(dump(j)));
    ASSERT_EQ(back.node_count(), r.node_count());
    EXPECT_EQ(back.verdict, r.verdict);
    EXPECT_EQ(back.max_depth, r.max_depth);
    EXPECT_EQ(back.scopes, r.scopes);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        EXPECT_EQ(back.nodes[i].location, r.nodes[i].location);
        EXPECT_EQ(back.nodes[i].entry, r.nodes[i].entry);
        EXPECT_EQ(back.nodes[i].segments, r.nodes[i].segments);
    }
    EXPECT_EQ(dump(report_to_json(back, c, true)), dump(j));
}

TEST(ReportJson, SegmentsOnlyWhenAsked) {
    const ReachResult r = stored(Variant::lsync1, 2, 2);
    AnalysisConfig c;
    const ReachResult back = report_from_json(report_to_json(r, c, false));
    for (const ReachNode& n : back.nodes) EXPECT_TRUE(n.segments.empty());
}

TEST(ReportJson, MalformedDocument) {
    EXPECT_THROW(parse_json("{\"nodes\": "), std::invalid_argument);
    EXPECT_THROW(report_from_json(Json::array()), std::invalid_argument);
}

TEST(ConfigJson, RoundTrip) {
    AnalysisConfig c;
    c.delta = 1e-5;
    c.depth = 20;
    c.order = SearchOrder::depth_first;
    c.representation = Representation::octagon;
    c.explicit_time = true;
    c.dedup = true;
    c.optimized_enumeration = true;
    c.termination = Termination::synchronization;
    c.slack = 0.25;
    c.max_nodes = 99;
    const AnalysisConfig b = config_from_json(to_json(c));
    EXPECT_EQ(dump(to_json(b)), dump(to_json(c)));
    EXPECT_EQ(b.delta, 1e-5);
    EXPECT_EQ(b.representation, Representation::octagon);
}

TEST(TraceJson, RoundTrip) {
    const OracleTrace t = simulate_oracle(spec(Variant::lsync2, 4, 1.3), 20.0, 0.1);
    const OracleTrace b = trace_from_json(parse_json(dump(to_json(t))));
    EXPECT_EQ(b.flash_count, t.flash_count);
    ASSERT_EQ(b.events.size(), t.events.size());
    for (std::size_t i = 0; i < t.events.size(); ++i) {
        EXPECT_EQ(b.events[i].time, t.events[i].time);
        EXPECT_EQ(b.events[i].exact_time, t.events[i].exact_time);
        EXPECT_EQ(b.events[i].post, t.events[i].post);
    }
    EXPECT_EQ(b.samples.size(), t.samples.size());
    EXPECT_EQ(b.sync_time, t.sync_time);
}

TEST(ManifestJson, RoundTrip) {
    RunManifest m;
    m.models = {{"robot1.ha", fnv1a_hex("abc")}};
    m.bad = InputFile{"bad.txt", fnv1a_hex("")};
    m.spec = spec(Variant::shd2, 3, 1.2);
    m.engine = "decomposed";
    m.config.depth = 7;
    m.report = "out.json";
    m.verdict = Verdict::synchronized;
    m.nodes = 12;
    m.max_depth = 7;
    const RunManifest b = manifest_from_json(parse_json(dump(to_json(m))));
    EXPECT_EQ(dump(to_json(b)), dump(to_json(m)));
    EXPECT_EQ(b.verdict, Verdict::synchronized);
    ASSERT_TRUE(b.spec.has_value());
    EXPECT_EQ(b.spec->variant, Variant::shd2);
}

TEST(Hash, KnownValues) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Export, EmptyResultIsHeaderOnly) {
    ReachResult r;
    r.engine = "monolithic";
    r.scopes = {{"x"}};
    const std::string csv = export_csv(r);
    EXPECT_EQ(count(csv, "\n"), 1u);
    EXPECT_EQ(csv.rfind("node,depth,path,segment,t_lo,t_hi", 0), 0u) << csv;
}

TEST(Export, SingleSegment) {
    const ReachResult r = single_segment();
    const std::string svg = export_svg(r, {"x"});
    EXPECT_EQ(count(svg, "class=\"segment\""), 1u);
    EXPECT_NE(svg.find("data-h=\"0,0.5\" data-v=\"0.2,0.7\""), std::string::npos) << svg;
    const std::string csv = export_csv(r, {"x"});
    EXPECT_EQ(count(csv, "\n"), 2u);
}

TEST(Export, Deterministic) {
    const ReachResult r = stored(Variant::lsync1, 3, 5);
    EXPECT_EQ(export_csv(r), export_csv(r));
    EXPECT_EQ(export_svg(r, {"x1", "x2"}), export_svg(r, {"x1", "x2"}));
    EXPECT_THROW(export_csv(r, {"nope"}), std::invalid_argument);
}

TEST(Export, EntryTimesStartAtZero) {
    const ReachResult r = stored(Variant::lsync1, 2, 3);
    const auto t = entry_times(r);
    ASSERT_EQ(t.size(), r.node_count());
    EXPECT_EQ(t[0], Interval::point(0.0));
    for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GE(t[i].lo, 0.0);
}
