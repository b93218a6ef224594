#include <hyreach/hyreach.h>

#include <gtest/gtest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>

namespace {

struct NetDel { void operator()(hr_network* p) const { hr_network_free(p); } };
struct CfgDel { void operator()(hr_config* p) const { hr_config_free(p); } };
struct ResDel { void operator()(hr_result* p) const { hr_result_free(p); } };
struct TrDel { void operator()(hr_trace* p) const { hr_trace_free(p); } };
using Net = std::unique_ptr<hr_network, NetDel>;
using Cfg = std::unique_ptr<hr_config, CfgDel>;
using Res = std::unique_ptr<hr_result, ResDel>;
using Trace = std::unique_ptr<hr_trace, TrDel>;

std::string take(char* s) {
    std::string out = s ? s : "";
    hr_string_free(s);
    return out;
}

Net generate(const char* variant, size_t n, double alpha = 1.1) {
    hr_network* p = nullptr;
    EXPECT_EQ(hr_network_generate(variant, n, 1.0, alpha, 0.0, &p), HR_OK) << hr_last_error();
    return Net(p);
}

Cfg config(std::initializer_list<std::pair<const char*, const char*>> kv) {
    hr_config* p = nullptr;
    EXPECT_EQ(hr_config_new(&p), HR_OK);
    for (const auto& [k, v] : kv) EXPECT_EQ(hr_config_set(p, k, v), HR_OK) << k << ": " << hr_last_error();
    return Cfg(p);
}

}  // namespace

TEST(CApi, VersionAndNames) {
    EXPECT_STREQ(hr_version(), "0.3.0");
    EXPECT_STREQ(hr_status_name(HR_ERR_PARSE), "parse error");
    EXPECT_STREQ(hr_verdict_name(HR_VERDICT_SYNCHRONIZED), "synchronized");
}

TEST(CApi, GenerateAndCompose) {
    Net net = generate("lsync1", 3);
    EXPECT_EQ(hr_network_components(net.get()), 3u);
    size_t l = 0, t = 0;
    ASSERT_EQ(hr_network_compose_stats(net.get(), 0, &l, &t), HR_OK);
    EXPECT_EQ(l, 7u);
    EXPECT_EQ(t, 33u);
    size_t ll = 0, lt = 0;
    ASSERT_EQ(hr_network_compose_stats(net.get(), 1, &ll, &lt), HR_OK);
    EXPECT_EQ(ll, l);
    EXPECT_EQ(lt, t);
    char* text = nullptr;
    ASSERT_EQ(hr_network_compose(net.get(), &text, &l, &t), HR_OK);
    EXPECT_NE(take(text).find("automaton"), std::string::npos);
}

TEST(CApi, WriteParseValidate) {
    Net net = generate("shd2", 2);
    char* text = nullptr;
    ASSERT_EQ(hr_network_write(net.get(), &text), HR_OK);
    const std::string s = take(text);
    hr_network* back = nullptr;
    ASSERT_EQ(hr_network_parse(s.c_str(), &back), HR_OK);
    Net b(back);
    int ok = 0;
    char* report = nullptr;
    ASSERT_EQ(hr_network_validate(b.get(), &ok, &report), HR_OK);
    EXPECT_EQ(ok, 1);
    EXPECT_EQ(take(report), "");
}

TEST(CApi, ErrorsCarryMessages) {
    hr_network* p = nullptr;
    EXPECT_EQ(hr_network_parse("automaton a\nloc {", &p), HR_ERR_PARSE);
    EXPECT_EQ(p, nullptr);
    EXPECT_NE(std::string(hr_last_error()).find("line 2"), std::string::npos) << hr_last_error();
    EXPECT_EQ(hr_network_generate("ring", 3, 1.0, 1.1, 0.0, &p), HR_ERR_ARGUMENT);
    EXPECT_EQ(hr_network_generate("lsync1", 0, 1.0, 1.1, 0.0, &p), HR_ERR_ARGUMENT);
    EXPECT_EQ(hr_network_generate("lsync1", 3, 1.0, 1.1, 0.0, nullptr), HR_ERR_ARGUMENT);
    hr_config* c = nullptr;
    ASSERT_EQ(hr_config_new(&c), HR_OK);
    Cfg cfg(c);
    EXPECT_EQ(hr_config_set(c, "delta", "abc"), HR_ERR_ARGUMENT);
    EXPECT_EQ(hr_config_set(c, "colour", "red"), HR_ERR_ARGUMENT);
    ASSERT_EQ(hr_config_set(c, "delta", "0"), HR_OK);
    Net net = generate("lsync1", 2);
    hr_result* r = nullptr;
    EXPECT_EQ(hr_analyze(net.get(), HR_ENGINE_MONOLITHIC, c, nullptr, &r), HR_ERR_ARGUMENT);
    EXPECT_EQ(r, nullptr);
    const char* missing = "/nonexistent/robot1.ha";
    EXPECT_EQ(hr_network_read_files(&missing, 1, &p), HR_ERR_IO);
}

TEST(CApi, UnsupportedFeature) {
    const char* text =
        "automaton a\nvar x\nvar z shared\nloc l { flow x'=1; inv x <= 1; }\ninit l { x = 0; z = 0; }\n"
        "automaton b\nvar y\nvar z shared\nloc m { flow y'=1; inv y <= 1; }\ninit m { y = 0; z = 0; }\n";
    hr_network* p = nullptr;
    ASSERT_EQ(hr_network_parse(text, &p), HR_OK) << hr_last_error();
    Net net(p);
    Cfg cfg = config({{"depth", "2"}});
    hr_result* r = nullptr;
    EXPECT_EQ(hr_analyze(net.get(), HR_ENGINE_DECOMPOSED, cfg.get(), nullptr, &r), HR_ERR_UNSUPPORTED);
    EXPECT_EQ(r, nullptr);
}

TEST(CApi, AnalyzeAndReport) {
    Net net = generate("lsync1", 2);
    Cfg cfg = config({{"depth", "4"}, {"store_segments", "true"}});
    hr_result* p = nullptr;
    ASSERT_EQ(hr_analyze(net.get(), HR_ENGINE_MONOLITHIC, cfg.get(), nullptr, &p), HR_OK) << hr_last_error();
    Res r(p);
    EXPECT_GT(hr_result_nodes(r.get()), 1u);
    EXPECT_LE(hr_result_max_depth(r.get()), 4u);
    char* json = nullptr;
    ASSERT_EQ(hr_result_to_json(r.get(), 1, &json), HR_OK);
    const std::string j = take(json);
    hr_result* q = nullptr;
    ASSERT_EQ(hr_result_from_json(j.c_str(), &q), HR_OK);
    Res back(q);
    EXPECT_EQ(hr_result_nodes(back.get()), hr_result_nodes(r.get()));
    EXPECT_EQ(hr_result_verdict(back.get()), hr_result_verdict(r.get()));
    char* csv = nullptr;
    ASSERT_EQ(hr_result_export(back.get(), "csv", "x1,x2", &csv), HR_OK);
    EXPECT_EQ(take(csv).rfind("node,depth,path,segment,t_lo,t_hi,x1_lo,x1_hi,x2_lo,x2_hi", 0), 0u);
    char* svg = nullptr;
    ASSERT_EQ(hr_result_export(back.get(), "svg", nullptr, &svg), HR_OK);
    EXPECT_NE(take(svg).find("<svg"), std::string::npos);
    EXPECT_EQ(hr_result_export(back.get(), "png", nullptr, &svg), HR_ERR_ARGUMENT);
}

TEST(CApi, BadSetVerdict) {
    Net net = generate("lsync1", 2);
    Cfg cfg = config({{"depth", "4"}});
    hr_result* p = nullptr;
    ASSERT_EQ(hr_analyze(net.get(), HR_ENGINE_MONOLITHIC, cfg.get(), "bad * { x1 >= 0.9; }", &p), HR_OK);
    Res r(p);
    EXPECT_EQ(hr_result_verdict(r.get()), HR_VERDICT_UNSAFE_POSSIBLE);
    EXPECT_EQ(hr_analyze(net.get(), HR_ENGINE_MONOLITHIC, cfg.get(), "bad {", &p), HR_ERR_PARSE);
}

TEST(CApi, FortyRobotsDecomposed) {
    Net net = generate("lsync2", 40, 1.3);
    Cfg cfg = config({{"delta", "1e-5"},
                      {"depth", "10000"},
                      {"representation", "octagon"},
                      {"explicit_time", "true"},
                      {"dedup", "true"},
                      {"optimized_enumeration", "true"},
                      {"termination", "sync"}});
    hr_result* p = nullptr;
    ASSERT_EQ(hr_analyze(net.get(), HR_ENGINE_DECOMPOSED, cfg.get(), nullptr, &p), HR_OK) << hr_last_error();
    Res r(p);
    EXPECT_EQ(hr_result_verdict(r.get()), HR_VERDICT_SYNCHRONIZED);
    EXPECT_EQ(hr_result_nodes(r.get()), 52u);
}

TEST(CApi, OracleAndContainment) {
    hr_trace* t = nullptr;
    ASSERT_EQ(hr_simulate("lsync1", 3, 1.0, 1.1, 30.0, 0.01, &t), HR_OK) << hr_last_error();
    Trace trace(t);
    EXPECT_GT(hr_trace_flash_count(trace.get()), 0u);
    EXPECT_GE(hr_trace_events(trace.get()), hr_trace_flash_count(trace.get()));
    char* json = nullptr;
    ASSERT_EQ(hr_trace_to_json(trace.get(), &json), HR_OK);
    const std::string j = take(json);
    hr_trace* t2 = nullptr;
    ASSERT_EQ(hr_trace_from_json(j.c_str(), &t2), HR_OK);
    Trace back(t2);
    EXPECT_EQ(hr_trace_events(back.get()), hr_trace_events(trace.get()));

    Net net = generate("lsync1", 3);
    Cfg cfg = config({{"depth", "20"}, {"fixed_point", "1"}, {"store_segments", "1"}});
    hr_result* p = nullptr;
    ASSERT_EQ(hr_analyze(net.get(), HR_ENGINE_MONOLITHIC, cfg.get(), nullptr, &p), HR_OK);
    Res r(p);
    size_t violations = 99;
    char* report = nullptr;
    ASSERT_EQ(hr_check_containment(back.get(), r.get(), 1e-9, &violations, &report), HR_OK) << hr_last_error();
    EXPECT_EQ(violations, 0u);
    EXPECT_NE(take(report).find("violations"), std::string::npos);

    Cfg bare = config({{"depth", "2"}});
    ASSERT_EQ(hr_analyze(net.get(), HR_ENGINE_MONOLITHIC, bare.get(), nullptr, &p), HR_OK);
    Res unstored(p);
    EXPECT_EQ(hr_check_containment(back.get(), unstored.get(), 1e-9, &violations, nullptr), HR_ERR_ARGUMENT);
}

TEST(CApi, ConfigJson) {
    Cfg cfg = config({{"delta", "0.5"}, {"order", "dfs"}, {"representation", "octagon"}});
    char* json = nullptr;
    ASSERT_EQ(hr_config_to_json(cfg.get(), &json), HR_OK);
    const std::string j = take(json);
    hr_config* c = nullptr;
    ASSERT_EQ(hr_config_from_json(j.c_str(), &c), HR_OK);
    Cfg back(c);
    ASSERT_EQ(hr_config_to_json(back.get(), &json), HR_OK);
    EXPECT_EQ(take(json), j);
    EXPECT_EQ(hr_config_from_json("[1,", &c), HR_ERR_PARSE);
}

TEST(CApi, ManifestRerun) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hyreach_capi_manifest";
    fs::remove_all(dir);
    Net net = generate("lsync1", 2);
    ASSERT_EQ(hr_network_write_dir(net.get(), dir.c_str()), HR_OK) << hr_last_error();
    const std::string p1 = (dir / "robot1.ha").string(), p2 = (dir / "robot2.ha").string();
    const char* paths[] = {p1.c_str(), p2.c_str()};
    hr_network* read = nullptr;
    ASSERT_EQ(hr_network_read_files(paths, 2, &read), HR_OK) << hr_last_error();
    Net n2(read);
    Cfg cfg = config({{"depth", "5"}});
    hr_result* p = nullptr;
    ASSERT_EQ(hr_analyze(n2.get(), HR_ENGINE_MONOLITHIC, cfg.get(), nullptr, &p), HR_OK);
    Res r(p);
    char* manifest = nullptr;
    ASSERT_EQ(hr_result_manifest(r.get(), paths, 2, nullptr, nullptr, 0, 0.1, &manifest), HR_OK) << hr_last_error();
    const std::string m = take(manifest);
    int reproduced = 0;
    char* summary = nullptr;
    ASSERT_EQ(hr_manifest_rerun(m.c_str(), &reproduced, &summary), HR_OK) << hr_last_error();
    EXPECT_EQ(reproduced, 1) << take(summary);

    {
        FILE* f = std::fopen(p1.c_str(), "a");
        ASSERT_NE(f, nullptr);
        std::fputs("# edited\n", f);
        std::fclose(f);
    }
    EXPECT_EQ(hr_manifest_rerun(m.c_str(), &reproduced, &summary), HR_ERR_MISMATCH);
    fs::remove_all(dir);
}
