#include "hyreach/hyreach.h"

#include "composer.hpp"
#include "containment.hpp"
#include "decomposed.hpp"
#include "model_io.hpp"
#include "reach.hpp"
#include "report_io.hpp"
#include "swarm.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

using namespace hyreach;

struct hr_network {
    Network net;
    std::optional<SwarmSpec> spec;
};

struct hr_config {
    AnalysisConfig cfg;
};

struct hr_result {
    ReachResult result;
    AnalysisConfig cfg;
    std::optional<SwarmSpec> spec;
};

struct hr_trace {
    OracleTrace trace;
};

namespace {

thread_local std::string g_last_error;

class Mismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

hr_status fail(hr_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <typename F>
hr_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return HR_OK;
    } catch (const ParseError& e) {
        return fail(HR_ERR_PARSE, e.what());
    } catch (const nlohmann::json::parse_error& e) {
        return fail(HR_ERR_PARSE, e.what());
    } catch (const UnsupportedFeature& e) {
        return fail(HR_ERR_UNSUPPORTED, e.what());
    } catch (const IoError& e) {
        return fail(HR_ERR_IO, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(HR_ERR_IO, e.what());
    } catch (const Mismatch& e) {
        return fail(HR_ERR_MISMATCH, e.what());
    } catch (const ModelError& e) {
        return fail(HR_ERR_MODEL, e.what());
    } catch (const ScopeError& e) {
        return fail(HR_ERR_MODEL, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(HR_ERR_ARGUMENT, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(HR_ERR_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(HR_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(HR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(HR_ERR_INTERNAL, "unknown error");
    }
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(const void* p, const char* what) {
    if (!p) throw std::invalid_argument(std::string(what) + " must not be null");
}

SwarmSpec make_spec(const char* variant, size_t n, double f, double alpha, double width) {
    require(variant, "variant");
    auto v = parse_variant(variant);
    if (!v) throw std::invalid_argument(std::string("unknown variant '") + variant + "'");
    SwarmSpec s;
    s.variant = *v;
    s.n = n;
    s.f = f;
    s.alpha = alpha;
    s.width = width;
    s.validate();
    return s;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& v) {
    double out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw std::invalid_argument("expected a number, got '" + v + "'");
    return out;
}

std::size_t parse_size(const std::string& v) {
    std::size_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) {
        throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

ReachResult run(const Network& net, const std::string& engine, const AnalysisConfig& cfg,
                const std::vector<BadSet>& bad) {
    if (engine == "monolithic") {
        if (cfg.representation != Representation::box) {
            throw UnsupportedFeature("the monolithic engine supports boxes only");
        }
        const ValidationReport v = validate(net);
        if (!v.ok()) throw ModelError(v.violations.front().where + ": " + v.violations.front().message);
        return analyze(compose(net).automaton, cfg, bad);
    }
    if (engine == "decomposed") {
        const ValidationReport v = validate(net);
        if (!v.ok()) throw ModelError(v.violations.front().where + ": " + v.violations.front().message);
        return analyze_decomposed(net, cfg, bad);
    }
    throw std::invalid_argument("unknown engine '" + engine + "'");
}

std::optional<SwarmSpec> spec_near(const std::filesystem::path& model) {
    const auto p = model.parent_path() / "spec.json";
    if (!std::filesystem::exists(p)) return std::nullopt;
    try {
        return spec_from_json(Json::parse(read_file(p)));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

InputFile hashed(const std::string& path) {
    return {std::filesystem::absolute(path).lexically_normal().string(), fnv1a_hex(read_file(path))};
}

std::vector<std::string> split_csv(const char* text) {
    std::vector<std::string> out;
    if (!text) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

extern "C" {

const char* hr_version(void) { return kToolVersion; }

const char* hr_last_error(void) { return g_last_error.c_str(); }

void hr_string_free(char* s) { std::free(s); }

const char* hr_status_name(hr_status s) {
    switch (s) {
        case HR_OK: return "ok";
        case HR_ERR_ARGUMENT: return "invalid argument";
        case HR_ERR_PARSE: return "parse error";
        case HR_ERR_MODEL: return "model error";
        case HR_ERR_UNSUPPORTED: return "unsupported feature";
        case HR_ERR_IO: return "i/o error";
        case HR_ERR_MISMATCH: return "mismatch";
        case HR_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* hr_verdict_name(hr_verdict v) {
    switch (v) {
        case HR_VERDICT_SAFE: return to_string(Verdict::safe);
        case HR_VERDICT_UNSAFE_POSSIBLE: return to_string(Verdict::unsafe_possible);
        case HR_VERDICT_DEPTH_BOUND_HIT: return to_string(Verdict::depth_bound_hit);
        case HR_VERDICT_SYNCHRONIZED: return to_string(Verdict::synchronized);
    }
    return "unknown";
}

hr_status hr_network_generate(const char* variant, size_t n, double f, double alpha, double width, hr_network** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        SwarmSpec s = make_spec(variant, n, f, alpha, width);
        auto h = std::make_unique<hr_network>();
        h->net = generate_model(s);
        h->spec = s;
        *out = h.release();
    });
}

hr_status hr_network_parse(const char* text, hr_network** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = nullptr;
        auto h = std::make_unique<hr_network>();
        h->net = parse_model(text);
        *out = h.release();
    });
}

hr_status hr_network_read_files(const char* const* paths, size_t count, hr_network** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        if (count == 0) throw std::invalid_argument("no model files given");
        require(paths, "paths");
        std::vector<std::filesystem::path> ps;
        for (size_t i = 0; i < count; ++i) {
            require(paths[i], "path");
            ps.emplace_back(paths[i]);
        }
        auto h = std::make_unique<hr_network>();
        h->net = read_model_files(ps);
        h->spec = spec_near(ps.front());
        if (h->spec && h->spec->n != h->net.components.size()) h->spec.reset();
        *out = h.release();
    });
}

hr_status hr_network_write(const hr_network* net, char** text) {
    return guarded([&] {
        require(net, "network");
        require(text, "text");
        *text = dup(write_model(net->net));
    });
}

hr_status hr_network_write_dir(const hr_network* net, const char* dir) {
    return guarded([&] {
        require(net, "network");
        require(dir, "dir");
        write_model_dir(net->net, dir);
        if (net->spec) write_file(std::filesystem::path(dir) / "spec.json", dump(to_json(*net->spec)));
    });
}

size_t hr_network_components(const hr_network* net) { return net ? net->net.components.size() : 0; }

hr_status hr_network_validate(const hr_network* net, int* ok, char** report) {
    return guarded([&] {
        require(net, "network");
        const ValidationReport v = validate(net->net);
        if (ok) *ok = v.ok() ? 1 : 0;
        if (report) {
            std::string text;
            for (const Violation& x : v.violations) text += x.where + ": " + x.message + "\n";
            *report = dup(text);
        }
    });
}

hr_status hr_network_compose_stats(const hr_network* net, int lazy, size_t* locations, size_t* transitions) {
    return guarded([&] {
        require(net, "network");
        const ValidationReport v = validate(net->net);
        if (!v.ok()) throw ModelError(v.violations.front().where + ": " + v.violations.front().message);
        const CompositionStats st = lazy ? lazy_stats(net->net) : count_stats(compose(net->net).automaton);
        if (locations) *locations = st.locations;
        if (transitions) *transitions = st.transitions;
    });
}

hr_status hr_network_compose(const hr_network* net, char** text, size_t* locations, size_t* transitions) {
    return guarded([&] {
        require(net, "network");
        const ValidationReport v = validate(net->net);
        if (!v.ok()) throw ModelError(v.violations.front().where + ": " + v.violations.front().message);
        const Composition c = compose(net->net);
        const CompositionStats st = count_stats(c.automaton);
        if (locations) *locations = st.locations;
        if (transitions) *transitions = st.transitions;
        if (text) *text = dup(write_model(c.automaton));
    });
}

void hr_network_free(hr_network* net) { delete net; }

hr_status hr_config_new(hr_config** out) {
    return guarded([&] {
        require(out, "out");
        *out = new hr_config();
    });
}

hr_status hr_config_set(hr_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        require(cfg, "config");
        require(key, "key");
        require(value, "value");
        const std::string k = key, v = value;
        AnalysisConfig& c = cfg->cfg;
        if (k == "delta") {
            c.delta = parse_double(v);
        } else if (k == "horizon") {
            c.horizon = parse_double(v);
        } else if (k == "depth") {
            c.depth = parse_size(v);
        } else if (k == "order") {
            if (v == "bfs" || v == "breadth-first") {
                c.order = SearchOrder::breadth_first;
            } else if (v == "dfs" || v == "depth-first") {
                c.order = SearchOrder::depth_first;
            } else {
                throw std::invalid_argument("order must be bfs or dfs");
            }
        } else if (k == "representation") {
            if (v == "box") {
                c.representation = Representation::box;
            } else if (v == "octagon") {
                c.representation = Representation::octagon;
            } else {
                throw std::invalid_argument("representation must be box or octagon");
            }
        } else if (k == "termination") {
            if (v == "depth" || v == to_string(Termination::depth_bounded)) {
                c.termination = Termination::depth_bounded;
            } else if (v == "sync" || v == to_string(Termination::synchronization)) {
                c.termination = Termination::synchronization;
            } else {
                throw std::invalid_argument("termination must be depth or sync");
            }
        } else if (k == "fixed_point") {
            c.fixed_point = parse_bool(v);
        } else if (k == "explicit_time") {
            c.explicit_time = parse_bool(v);
        } else if (k == "dedup") {
            c.dedup = parse_bool(v);
        } else if (k == "optimized_enumeration") {
            c.optimized_enumeration = parse_bool(v);
        } else if (k == "slack") {
            c.slack = parse_double(v);
        } else if (k == "max_nodes") {
            c.max_nodes = parse_size(v);
        } else if (k == "store_segments") {
            c.store_segments = parse_bool(v);
        } else {
            throw std::invalid_argument("unknown configuration key '" + k + "'");
        }
    });
}

hr_status hr_config_to_json(const hr_config* cfg, char** json) {
    return guarded([&] {
        require(cfg, "config");
        require(json, "json");
        *json = dup(dump(to_json(cfg->cfg)));
    });
}

hr_status hr_config_from_json(const char* json, hr_config** out) {
    return guarded([&] {
        require(json, "json");
        require(out, "out");
        *out = nullptr;
        auto h = std::make_unique<hr_config>();
        h->cfg = config_from_json(Json::parse(json));
        *out = h.release();
    });
}

void hr_config_free(hr_config* cfg) { delete cfg; }

hr_status hr_analyze(const hr_network* net, hr_engine engine, const hr_config* cfg, const char* bad_sets,
                     hr_result** out) {
    return guarded([&] {
        require(net, "network");
        require(cfg, "config");
        require(out, "out");
        *out = nullptr;
        cfg->cfg.validate();
        std::vector<BadSet> bad;
        if (bad_sets) bad = parse_bad_sets(bad_sets);
        auto h = std::make_unique<hr_result>();
        const std::string name = engine == HR_ENGINE_DECOMPOSED ? "decomposed" : "monolithic";
        if (engine != HR_ENGINE_DECOMPOSED && engine != HR_ENGINE_MONOLITHIC) {
            throw std::invalid_argument("unknown engine");
        }
        h->result = run(net->net, name, cfg->cfg, bad);
        h->cfg = cfg->cfg;
        h->spec = net->spec;
        *out = h.release();
    });
}

hr_verdict hr_result_verdict(const hr_result* r) {
    if (!r) return HR_VERDICT_DEPTH_BOUND_HIT;
    switch (r->result.verdict) {
        case Verdict::safe: return HR_VERDICT_SAFE;
        case Verdict::unsafe_possible: return HR_VERDICT_UNSAFE_POSSIBLE;
        case Verdict::depth_bound_hit: return HR_VERDICT_DEPTH_BOUND_HIT;
        case Verdict::synchronized: return HR_VERDICT_SYNCHRONIZED;
    }
    return HR_VERDICT_DEPTH_BOUND_HIT;
}

size_t hr_result_nodes(const hr_result* r) { return r ? r->result.node_count() : 0; }

size_t hr_result_max_depth(const hr_result* r) { return r ? r->result.max_depth : 0; }

hr_status hr_result_to_json(const hr_result* r, int emit_segments, char** json) {
    return guarded([&] {
        require(r, "result");
        require(json, "json");
        *json = dup(dump(report_to_json(r->result, r->cfg, emit_segments != 0)));
    });
}

hr_status hr_result_from_json(const char* json, hr_result** out) {
    return guarded([&] {
        require(json, "json");
        require(out, "out");
        *out = nullptr;
        const Json j = Json::parse(json);
        auto h = std::make_unique<hr_result>();
        h->result = report_from_json(j);
        h->cfg = config_from_json(j.at("config"));
        h->cfg.store_segments = j.value("segments_included", false);
        *out = h.release();
    });
}

hr_status hr_result_export(const hr_result* r, const char* format, const char* projection, char** out) {
    return guarded([&] {
        require(r, "result");
        require(format, "format");
        require(out, "out");
        const std::string f = format;
        const auto proj = split_csv(projection);
        if (f == "csv") {
            *out = dup(export_csv(r->result, proj));
        } else if (f == "svg") {
            *out = dup(export_svg(r->result, proj));
        } else {
            throw std::invalid_argument("export format must be csv or svg");
        }
    });
}

hr_status hr_result_manifest(const hr_result* r, const char* const* model_paths, size_t count, const char* bad_path,
                             const char* report_path, int emit_segments, double wall_seconds, char** json) {
    return guarded([&] {
        require(r, "result");
        require(json, "json");
        RunManifest m;
        for (size_t i = 0; i < count; ++i) {
            require(model_paths[i], "model path");
            m.models.push_back(hashed(model_paths[i]));
        }
        if (bad_path) m.bad = hashed(bad_path);
        m.spec = r->spec;
        m.engine = r->result.engine;
        m.config = r->cfg;
        m.emit_segments = emit_segments != 0;
        if (report_path) m.report = std::filesystem::absolute(report_path).lexically_normal().string();
        m.verdict = r->result.verdict;
        m.nodes = r->result.node_count();
        m.max_depth = r->result.max_depth;
        m.wall_seconds = wall_seconds;
        *json = dup(dump(to_json(m)));
    });
}

void hr_result_free(hr_result* r) { delete r; }

hr_status hr_manifest_rerun(const char* manifest_json, int* reproduced, char** summary) {
    return guarded([&] {
        require(manifest_json, "manifest");
        const RunManifest m = manifest_from_json(Json::parse(manifest_json));
        std::vector<std::filesystem::path> paths;
        for (const InputFile& f : m.models) {
            const std::string text = read_file(f.path);
            if (fnv1a_hex(text) != f.hash) throw Mismatch("input changed since the manifest was written: " + f.path);
            paths.emplace_back(f.path);
        }
        std::vector<BadSet> bad;
        if (m.bad) {
            const std::string text = read_file(m.bad->path);
            if (fnv1a_hex(text) != m.bad->hash) throw Mismatch("input changed since the manifest was written: " + m.bad->path);
            bad = parse_bad_sets(text);
        }
        AnalysisConfig cfg = m.config;
        cfg.store_segments = false;
        const ReachResult r = run(read_model_files(paths), m.engine, cfg, bad);
        const bool same = r.verdict == m.verdict && r.node_count() == m.nodes && r.max_depth == m.max_depth;
        if (reproduced) *reproduced = same ? 1 : 0;
        if (summary) {
            std::ostringstream os;
            os << (same ? "reproduced" : "MISMATCH") << " verdict=" << to_string(r.verdict) << " nodes=" << r.node_count()
               << " depth=" << r.max_depth;
            if (!same) {
                os << " (recorded verdict=" << to_string(m.verdict) << " nodes=" << m.nodes << " depth=" << m.max_depth
                   << ")";
            }
            *summary = dup(os.str());
        }
    });
}

hr_status hr_simulate(const char* variant, size_t n, double f, double alpha, double horizon, double delta,
                      hr_trace** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        SwarmSpec s = make_spec(variant, n, f, alpha, 0.0);
        if (!(horizon >= 0)) throw std::invalid_argument("horizon must be non-negative");
        if (!(delta >= 0)) throw std::invalid_argument("delta must be non-negative");
        auto h = std::make_unique<hr_trace>();
        h->trace = simulate_oracle(s, horizon, delta);
        *out = h.release();
    });
}

size_t hr_trace_flash_count(const hr_trace* t) { return t ? t->trace.flash_count : 0; }

size_t hr_trace_events(const hr_trace* t) { return t ? t->trace.events.size() : 0; }

hr_status hr_trace_to_json(const hr_trace* t, char** json) {
    return guarded([&] {
        require(t, "trace");
        require(json, "json");
        *json = dup(dump(to_json(t->trace)));
    });
}

hr_status hr_trace_from_json(const char* json, hr_trace** out) {
    return guarded([&] {
        require(json, "json");
        require(out, "out");
        *out = nullptr;
        auto h = std::make_unique<hr_trace>();
        h->trace = trace_from_json(Json::parse(json));
        *out = h.release();
    });
}

void hr_trace_free(hr_trace* t) { delete t; }

hr_status hr_check_containment(const hr_trace* t, const hr_result* r, double tol, size_t* violations, char** report) {
    return guarded([&] {
        require(t, "trace");
        require(r, "result");
        if (!(tol >= 0)) throw std::invalid_argument("tolerance must be non-negative");
        const ContainmentReport rep = check_containment(t->trace, r->result, tol);
        if (violations) *violations = rep.violations.size();
        if (report) *report = dup(dump(to_json(rep)));
    });
}

}  // extern "C"
