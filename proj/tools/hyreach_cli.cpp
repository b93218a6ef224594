// hyreach command-line front end. Uses the C API only.

#include <hyreach/hyreach.h>

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kVerified = 0;
constexpr int kNotEstablished = 1;
constexpr int kUsage = 2;

struct Failure {
    std::string message;
};

void check(hr_status s, const std::string& what) {
    if (s != HR_OK) throw Failure{what + ": " + hr_status_name(s) + ": " + hr_last_error()};
}

std::string take(char* s) {
    std::string out = s ? s : "";
    hr_string_free(s);
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{"cannot read '" + path + "'"};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Failure{"cannot write '" + path + "'"};
    out << text;
    if (!out) throw Failure{"write failed for '" + path + "'"};
}

template <typename T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};

using Network = Handle<hr_network, hr_network_free>;
using Config = Handle<hr_config, hr_config_free>;
using Result = Handle<hr_result, hr_result_free>;
using Trace = Handle<hr_trace, hr_trace_free>;

void load_models(const std::vector<std::string>& paths, Network& net) {
    std::vector<const char*> ps;
    for (const auto& p : paths) ps.push_back(p.c_str());
    check(hr_network_read_files(ps.data(), ps.size(), net.out()), "reading models");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// `key = value` lines (TOML-like; sections and comments ignored) become flags.
std::vector<std::string> config_flags(const std::string& path) {
    std::vector<std::string> out;
    std::istringstream in(slurp(path));
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Failure{"config line without '=': " + line};
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        for (char& c : key) {
            if (c == '_') c = '-';
        }
        if (value == "true") {
            out.push_back("--" + key);
        } else if (value != "false") {
            out.push_back("--" + key);
            out.push_back(value);
        }
    }
    return out;
}

// Splices the flags of `--config FILE` in front of the explicit arguments of the subcommand,
// so that explicit flags take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    for (std::size_t i = 1; i < args.size(); ++i) {
        std::string file;
        std::size_t erase = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            file = args[i + 1];
            erase = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            file = args[i].substr(9);
            erase = 1;
        } else {
            continue;
        }
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + erase));
        const auto flags = config_flags(file);
        args.insert(args.begin() + 2, flags.begin(), flags.end());
        break;
    }
    return args;
}

int exit_for(hr_verdict v) {
    return v == HR_VERDICT_SAFE || v == HR_VERDICT_SYNCHRONIZED ? kVerified : kNotEstablished;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reachability analysis for networks of constant-rate hybrid automata"};
    app.set_version_flag("--version", hr_version());
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a swarm benchmark model, one file per robot");
    std::string variant;
    std::size_t n = 0;
    double f = 1.0, alpha = 1.1, width = 0.0;
    std::string out_dir;
    gen->add_option("--variant", variant, "lsync1, lsync2, shd1 or shd2")->required();
    gen->add_option("--n", n, "Number of robots")->required();
    gen->add_option("--f", f, "Firing threshold");
    gen->add_option("--alpha", alpha, "Coupling factor");
    gen->add_option("--width", width, "Width of the initial clock intervals");
    gen->add_option("-o,--out", out_dir, "Output directory")->required();

    // compose
    auto* comp = app.add_subcommand("compose", "Compose a network and print '#locs #trans'");
    std::vector<std::string> models;
    bool lazy_stats = false;
    std::string comp_out;
    comp->add_option("models", models, "Model files")->required();
    comp->add_flag("--lazy-stats", lazy_stats, "Count by on-demand exploration");
    comp->add_option("--out", comp_out, "Write the composed automaton here");

    // analyze
    auto* an = app.add_subcommand("analyze", "Run a reachability analysis");
    std::string engine = "monolithic", order = "bfs", bad_file, report_file, manifest_file;
    double delta = 0.01, horizon = 10.0, slack = 0.0;
    std::size_t depth = 20, max_nodes = 0;
    bool octagon_time = false, dedup = false, opt_enum = false, on_sync = false, fixed_point = false;
    bool emit_segments = false;
    std::string config_file;
    an->add_option("models", models, "Model files")->required();
    an->add_option("--engine", engine, "monolithic or decomposed")
        ->check(CLI::IsMember({"monolithic", "decomposed"}));
    an->add_option("--delta", delta, "Time step");
    an->add_option("--depth", depth, "Jump depth limit");
    an->add_option("--horizon", horizon, "Local time horizon");
    an->add_option("--order", order, "bfs or dfs")->check(CLI::IsMember({"bfs", "dfs"}));
    an->add_flag("--octagon-time", octagon_time, "Octagons over (clock, explicit time); decomposed engine");
    an->add_flag("--dedup", dedup, "Merge successors with identical resets and overlapping windows");
    an->add_flag("--opt-enum", opt_enum, "Prune jump combinations by enabling segments");
    an->add_flag("--terminate-on-sync", on_sync, "Stop branches once all clocks are reset together");
    an->add_flag("--fixed-point", fixed_point, "Skip successors contained in a recorded set");
    an->add_option("--slack", slack, "Outward rounding slack");
    an->add_option("--max-nodes", max_nodes, "Node limit (0: none)");
    an->add_option("--bad", bad_file, "Bad-set file");
    an->add_option("--report", report_file, "Report file (JSON)")->required();
    an->add_flag("--emit-segments", emit_segments, "Store flowpipe segments in the report");
    an->add_option("--manifest", manifest_file, "Manifest file (default: <report>.manifest.json)");
    an->add_option("--config", config_file, "File of 'key = value' lines using the flag names");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Exact event-driven simulation of the flash rule");
    double sim_horizon = 10.0, sim_delta = 0.01;
    std::string trace_out;
    sim->add_option("--variant", variant, "lsync1, lsync2, shd1 or shd2")->required();
    sim->add_option("--n", n, "Number of robots")->required();
    sim->add_option("--f", f, "Firing threshold");
    sim->add_option("--alpha", alpha, "Coupling factor");
    sim->add_option("--horizon", sim_horizon, "Simulated time");
    sim->add_option("--delta", sim_delta, "Sampling step (0: events only)");
    sim->add_option("-o,--out", trace_out, "Trace file (JSON)")->required();

    // check-containment
    auto* cc = app.add_subcommand("check-containment", "Check that a report covers an oracle trace");
    std::string trace_file, cc_report, cc_out;
    double tol = 1e-9;
    cc->add_option("trace", trace_file, "Trace file")->required();
    cc->add_option("report", cc_report, "Report file with segments")->required();
    cc->add_option("--tol", tol, "Absolute tolerance");
    cc->add_option("-o,--out", cc_out, "Write the containment report here");

    // export
    auto* ex = app.add_subcommand("export", "Export stored segments as CSV or SVG");
    std::string seg_report, ex_out, projection, format;
    ex->add_option("--segments", seg_report, "Report file with segments")->required();
    ex->add_option("-o,--out", ex_out, "Output file (.csv or .svg)")->required();
    ex->add_option("--project", projection, "Comma separated variables; t is global time");
    ex->add_option("--format", format, "csv or svg (default: from the file extension)")
        ->check(CLI::IsMember({"csv", "svg"}));

    // rerun
    auto* rr = app.add_subcommand("rerun", "Re-run analyses recorded in manifests");
    std::vector<std::string> manifests;
    std::size_t jobs = 1;
    rr->add_option("manifests", manifests, "Manifest files")->required();
    rr->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

    // validate
    auto* val = app.add_subcommand("validate", "Report well-formedness violations");
    val->add_option("models", models, "Model files")->required();

    std::vector<std::string> args;
    try {
        args = expand_config(std::vector<std::string>(argv, argv + argc));
    } catch (const Failure& e) {
        std::cerr << "error: " << e.message << "\n";
        return kUsage;
    }
    std::vector<char*> cargs;
    for (auto& a : args) cargs.push_back(a.data());

    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*gen) {
            Network net;
            check(hr_network_generate(variant.c_str(), n, f, alpha, width, net.out()), "generate");
            check(hr_network_write_dir(net.get(), out_dir.c_str()), "generate");
            std::cout << "wrote " << hr_network_components(net.get()) << " automata to " << out_dir << "\n";
            return kVerified;
        }
        if (*comp) {
            Network net;
            load_models(models, net);
            std::size_t locs = 0, trans = 0;
            if (lazy_stats) {
                check(hr_network_compose_stats(net.get(), 1, &locs, &trans), "compose");
            }
            if (!comp_out.empty() || !lazy_stats) {
                char* text = nullptr;
                check(hr_network_compose(net.get(), comp_out.empty() ? nullptr : &text, &locs, &trans), "compose");
                if (!comp_out.empty()) spit(comp_out, take(text));
            }
            std::cout << locs << " " << trans << "\n";
            return kVerified;
        }
        if (*an) {
            Network net;
            load_models(models, net);
            Config cfg;
            check(hr_config_new(cfg.out()), "config");
            auto set = [&](const char* key, const std::string& value) {
                check(hr_config_set(cfg.get(), key, value.c_str()), std::string("option ") + key);
            };
            auto num = [](double v) {
                std::ostringstream os;
                os.precision(17);
                os << v;
                return os.str();
            };
            set("delta", num(delta));
            set("horizon", num(horizon));
            set("depth", std::to_string(depth));
            set("order", order);
            set("representation", octagon_time ? "octagon" : "box");
            set("explicit_time", octagon_time ? "true" : "false");
            set("dedup", dedup ? "true" : "false");
            set("optimized_enumeration", opt_enum ? "true" : "false");
            set("termination", on_sync ? "sync" : "depth");
            set("fixed_point", fixed_point ? "true" : "false");
            set("slack", num(slack));
            set("max_nodes", std::to_string(max_nodes));
            set("store_segments", emit_segments ? "true" : "false");
            std::string bad_text;
            if (!bad_file.empty()) bad_text = slurp(bad_file);

            const auto t0 = std::chrono::steady_clock::now();
            Result res;
            check(hr_analyze(net.get(), engine == "decomposed" ? HR_ENGINE_DECOMPOSED : HR_ENGINE_MONOLITHIC, cfg.get(),
                             bad_file.empty() ? nullptr : bad_text.c_str(), res.out()),
                  "analyze");
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

            char* json = nullptr;
            check(hr_result_to_json(res.get(), emit_segments ? 1 : 0, &json), "report");
            spit(report_file, take(json));

            std::vector<const char*> ps;
            for (const auto& p : models) ps.push_back(p.c_str());
            char* manifest = nullptr;
            check(hr_result_manifest(res.get(), ps.data(), ps.size(), bad_file.empty() ? nullptr : bad_file.c_str(),
                                     report_file.c_str(), emit_segments ? 1 : 0, secs, &manifest),
                  "manifest");
            spit(manifest_file.empty() ? report_file + ".manifest.json" : manifest_file, take(manifest));

            const hr_verdict v = hr_result_verdict(res.get());
            std::cout << "verdict=" << hr_verdict_name(v) << " nodes=" << hr_result_nodes(res.get())
                      << " depth=" << hr_result_max_depth(res.get()) << "\n";
            return exit_for(v);
        }
        if (*sim) {
            Trace tr;
            check(hr_simulate(variant.c_str(), n, f, alpha, sim_horizon, sim_delta, tr.out()), "simulate");
            char* json = nullptr;
            check(hr_trace_to_json(tr.get(), &json), "trace");
            spit(trace_out, take(json));
            std::cout << "events=" << hr_trace_events(tr.get()) << " flashes=" << hr_trace_flash_count(tr.get())
                      << "\n";
            return kVerified;
        }
        if (*cc) {
            Trace tr;
            check(hr_trace_from_json(slurp(trace_file).c_str(), tr.out()), "trace");
            Result res;
            check(hr_result_from_json(slurp(cc_report).c_str(), res.out()), "report");
            std::size_t violations = 0;
            char* json = nullptr;
            check(hr_check_containment(tr.get(), res.get(), tol, &violations, &json), "check-containment");
            const std::string text = take(json);
            if (!cc_out.empty()) spit(cc_out, text);
            std::cout << "violations=" << violations << "\n";
            if (violations > 0 && cc_out.empty()) std::cout << text;
            return violations == 0 ? kVerified : kNotEstablished;
        }
        if (*ex) {
            Result res;
            check(hr_result_from_json(slurp(seg_report).c_str(), res.out()), "report");
            std::string fmt = format;
            if (fmt.empty()) fmt = std::filesystem::path(ex_out).extension() == ".svg" ? "svg" : "csv";
            char* text = nullptr;
            check(hr_result_export(res.get(), fmt.c_str(), projection.empty() ? nullptr : projection.c_str(), &text),
                  "export");
            spit(ex_out, take(text));
            return kVerified;
        }
        if (*rr) {
            std::vector<std::string> lines(manifests.size());
            std::vector<int> codes(manifests.size(), kVerified);
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t i = next++; i < manifests.size(); i = next++) {
                    try {
                        const std::string text = slurp(manifests[i]);
                        int same = 0;
                        char* summary = nullptr;
                        const hr_status s = hr_manifest_rerun(text.c_str(), &same, &summary);
                        if (s != HR_OK) {
                            lines[i] = std::string("error: ") + hr_status_name(s) + ": " + hr_last_error();
                            codes[i] = kUsage;
                        } else {
                            lines[i] = take(summary);
                            codes[i] = same ? kVerified : kNotEstablished;
                        }
                    } catch (const Failure& e) {
                        lines[i] = "error: " + e.message;
                        codes[i] = kUsage;
                    }
                }
            };
            std::vector<std::thread> pool;
            const std::size_t k = std::min(jobs, manifests.size());
            for (std::size_t t = 0; t < k; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
            int code = kVerified;
            for (std::size_t i = 0; i < manifests.size(); ++i) {
                std::cout << manifests[i] << ": " << lines[i] << "\n";
                code = std::max(code, codes[i]);
            }
            return code;
        }
        if (*val) {
            Network net;
            load_models(models, net);
            int ok = 0;
            char* report = nullptr;
            check(hr_network_validate(net.get(), &ok, &report), "validate");
            const std::string text = take(report);
            std::cout << (ok ? "ok\n" : text);
            return ok ? kVerified : kUsage;
        }
    } catch (const Failure& e) {
        std::cerr << "error: " << e.message << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
