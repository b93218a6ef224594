#include "swarm.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace hyreach {

namespace mp = boost::multiprecision;
using Rational = mp::cpp_rational;

const char* to_string(Variant v) {
    switch (v) {
        case Variant::lsync1: return "lsync1";
        case Variant::lsync2: return "lsync2";
        case Variant::shd1: return "shd1";
        case Variant::shd2: return "shd2";
    }
    return "?";
}

std::optional<Variant> parse_variant(std::string_view text) {
    if (text == "lsync1" || text == "lsync-I") return Variant::lsync1;
    if (text == "lsync2" || text == "lsync-II") return Variant::lsync2;
    if (text == "shd1" || text == "shd-I") return Variant::shd1;
    if (text == "shd2" || text == "shd-II") return Variant::shd2;
    return std::nullopt;
}

double SwarmSpec::anchor(std::size_t i) const {
    if (!anchors.empty()) return anchors.at(i);
    return static_cast<double>(i) / static_cast<double>(n);
}

void SwarmSpec::validate() const {
    if (n == 0) throw std::invalid_argument("robot count must be positive");
    if (!(f > 0.0) || !std::isfinite(f)) throw std::invalid_argument("firing threshold must be positive");
    if (!(alpha > 1.0) || !std::isfinite(alpha)) throw std::invalid_argument("coupling factor must exceed 1");
    if (!(width >= 0.0)) throw std::invalid_argument("initial width must be non-negative");
    if (!anchors.empty() && anchors.size() != n) throw std::invalid_argument("one anchor per robot required");
    for (std::size_t i = 0; i < n; ++i) {
        const double a = anchor(i);
        if (!(a >= 0.0) || !(a + width <= f)) {
            throw std::invalid_argument("initial clock interval of " + robot_name(i) + " outside [0, f]");
        }
    }
}

std::string robot_name(std::size_t i) { return "robot" + std::to_string(i + 1); }
std::string clock_name(std::size_t i) { return "x" + std::to_string(i + 1); }

namespace {

LinearConstraint on(VarIndex v, double coeff, Relation rel, double bound) {
    return LinearConstraint({{v, coeff}}, rel, bound);
}

Condition when(std::initializer_list<LinearConstraint> cs) {
    Condition c;
    for (const LinearConstraint& l : cs) c.add(l);
    return c;
}

Jump make_jump(std::string src, std::string dst, Condition guard, AffineReset reset, std::optional<std::string> label,
               bool urgent) {
    Jump j;
    j.source = std::move(src);
    j.target = std::move(dst);
    j.guard = std::move(guard);
    j.reset = std::move(reset);
    j.label = std::move(label);
    j.urgent = urgent;
    return j;
}

AffineReset assign_one(VarIndex v, double scale, double offset) {
    AffineReset r;
    r.assign(v, scale, offset);
    return r;
}

HybridAutomaton robot(const SwarmSpec& s, std::size_t i) {
    HybridAutomaton a;
    a.name = robot_name(i);
    const VarIndex x = a.add_variable(clock_name(i));
    const bool shd = s.variant == Variant::shd1 || s.variant == Variant::shd2;
    const VarIndex z = shd ? a.add_variable("z", VarKind::shared) : 0;
    const double f = s.f, alpha = s.alpha;

    auto add_loc = [&](const std::string& name, Condition inv) {
        const LocIndex l = a.add_location(name, std::move(inv));
        a.locations[l].flow.rates[x] = 1.0;
    };
    add_loc("wait", when({on(x, 1.0, Relation::le, f)}));

    const Condition below = when({on(x, alpha, Relation::lt, f)});
    const Condition above = when({on(x, alpha, Relation::ge, f)});
    const AffineReset scale = assign_one(x, alpha, 0.0);
    const AffineReset zero = assign_one(x, 0.0, 0.0);
    const std::string own = "flash_" + std::to_string(i + 1);

    switch (s.variant) {
        case Variant::lsync1:
        case Variant::lsync2: {
            const bool second = s.variant == Variant::lsync2;
            add_loc("adapt", {});
            a.jumps.push_back(make_jump("wait", "wait", when({on(x, 1.0, Relation::ge, f)}), zero, own, false));
            for (std::size_t j = 0; j < s.n; ++j) {
                if (j == i) continue;
                a.jumps.push_back(make_jump("wait", "adapt", {}, {}, "flash_" + std::to_string(j + 1), false));
            }
            std::optional<std::string> ret;
            if (second) {
                ret = "return";
                if (s.n > 1) a.jumps.push_back(make_jump("wait", "wait", {}, {}, ret, false));
            }
            a.jumps.push_back(make_jump("adapt", "wait", below, scale, ret, true));
            a.jumps.push_back(make_jump("adapt", "wait", above, zero, ret, true));
            break;
        }
        case Variant::shd1: {
            add_loc("flash", {});
            add_loc("adapt", {});
            const auto z_is = [&](double v) { return on(z, 1.0, Relation::eq, v); };
            AffineReset fire = zero;
            fire.assign(z, 0.0, 1.0);
            a.jumps.push_back(make_jump("wait", "flash", when({on(x, 1.0, Relation::ge, f)}), fire, std::nullopt, false));
            a.jumps.push_back(make_jump("flash", "flash", when({z_is(1)}), assign_one(z, 0.0, 0.0), "sync1", true));
            a.jumps.push_back(make_jump("wait", "adapt", when({z_is(1), on(x, alpha, Relation::lt, f)}), scale, "sync1",
                                        false));
            a.jumps.push_back(make_jump("wait", "adapt", when({z_is(1), on(x, alpha, Relation::ge, f)}), zero, "sync1",
                                        false));
            a.jumps.push_back(make_jump("flash", "wait", when({z_is(0)}), {}, "sync2", true));
            a.jumps.push_back(make_jump("adapt", "wait", when({z_is(0)}), {}, "sync2", true));
            break;
        }
        case Variant::shd2: {
            add_loc("sync", {});
            const auto z_is = [&](double v) { return on(z, 1.0, Relation::eq, v); };
            AffineReset fire = zero;
            fire.assign(z, 0.0, 1.0);
            a.jumps.push_back(make_jump("wait", "sync", when({on(x, 1.0, Relation::ge, f)}), fire, std::nullopt, false));
            a.jumps.push_back(make_jump("wait", "sync", when({z_is(1)}), {}, "sync1", false));
            a.jumps.push_back(make_jump("sync", "sync", when({z_is(1)}), assign_one(z, 0.0, 0.0), "sync1", true));
            a.jumps.push_back(make_jump("sync", "wait", when({z_is(0), on(x, alpha, Relation::lt, f)}), scale, "sync2",
                                        true));
            a.jumps.push_back(make_jump("sync", "wait", when({z_is(0), on(x, alpha, Relation::ge, f)}), zero, "sync2",
                                        true));
            break;
        }
    }

    Condition init;
    const double lo = s.anchor(i);
    if (s.width == 0.0) {
        init.add(on(x, 1.0, Relation::eq, lo));
    } else {
        init.add(on(x, 1.0, Relation::ge, lo));
        init.add(on(x, 1.0, Relation::le, lo + s.width));
    }
    if (shd) init.add(on(z, 1.0, Relation::eq, 0.0));
    a.init.push_back({"wait", std::move(init)});
    return a;
}

// Exact value of the shortest decimal representation of d (so 1.3 becomes 13/10).
Rational exact_decimal(double d) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, d);
    std::string s(buf, res.ptr);
    bool neg = false;
    std::size_t pos = 0;
    if (!s.empty() && s[0] == '-') {
        neg = true;
        pos = 1;
    }
    mp::cpp_int digits = 0;
    long exponent = 0;
    bool fraction = false;
    for (; pos < s.size(); ++pos) {
        const char c = s[pos];
        if (c == '.') {
            fraction = true;
        } else if (c == 'e' || c == 'E') {
            exponent += std::stol(s.substr(pos + 1));
            break;
        } else {
            digits = digits * 10 + (c - '0');
            if (fraction) --exponent;
        }
    }
    Rational r(digits);
    const mp::cpp_int p = mp::pow(mp::cpp_int(10), static_cast<unsigned>(std::labs(exponent)));
    if (exponent >= 0) {
        r *= p;
    } else {
        r /= p;
    }
    return neg ? -r : r;
}

std::string to_text(const Rational& r) {
    const auto num = mp::numerator(r);
    const auto den = mp::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace

Network generate_model(const SwarmSpec& spec) {
    spec.validate();
    Network net;
    for (std::size_t i = 0; i < spec.n; ++i) net.components.push_back(robot(spec, i));
    return net;
}

std::vector<double> apply_flash_rule(const std::vector<double>& pre, double f, double alpha,
                                     const std::vector<std::size_t>& flashers) {
    std::vector<double> post(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) {
        const bool flashing = std::find(flashers.begin(), flashers.end(), i) != flashers.end();
        post[i] = flashing ? 0.0 : (alpha * pre[i] < f ? alpha * pre[i] : 0.0);
    }
    return post;
}

OracleTrace simulate_oracle(const SwarmSpec& spec, double horizon, double delta, std::size_t max_events) {
    spec.validate();
    if (spec.width != 0.0) throw std::invalid_argument("the oracle requires point initial clocks (width 0)");
    if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be non-negative");
    if (!(delta >= 0.0)) throw std::invalid_argument("sample step must be non-negative");

    OracleTrace trace;
    trace.spec = spec;
    trace.horizon = horizon;
    trace.delta = delta;

    const Rational f = exact_decimal(spec.f);
    const Rational alpha = exact_decimal(spec.alpha);
    const Rational H = exact_decimal(horizon);
    const Rational step = exact_decimal(delta);
    std::vector<Rational> x(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        x[i] = spec.anchors.empty() ? Rational(static_cast<long>(i), static_cast<long>(spec.n))
                                    : exact_decimal(spec.anchors[i]);
    }
    auto to_doubles = [](const std::vector<Rational>& v) {
        std::vector<double> out;
        out.reserve(v.size());
        for (const Rational& r : v) out.push_back(static_cast<double>(r));
        return out;
    };

    Rational t = 0;
    std::size_t k = 0;  // next sample index
    auto sample_until = [&](const Rational& end, bool inclusive) {
        if (step == 0) return;
        while (true) {
            const Rational ts = step * k;
            if (ts > H || (inclusive ? ts > end : ts >= end)) break;
            std::vector<Rational> v = x;
            for (Rational& c : v) c += ts - t;
            trace.samples.push_back({static_cast<double>(ts), to_doubles(v)});
            ++k;
        }
    };

    while (trace.events.size() < max_events) {
        Rational m = x.front();
        for (const Rational& c : x) m = std::max(m, c);
        const Rational te = t + (f - m);
        if (te > H) break;
        sample_until(te, false);
        FlashEvent ev;
        ev.time = static_cast<double>(te);
        ev.exact_time = to_text(te);
        std::vector<Rational> pre = x;
        for (Rational& c : pre) c += te - t;
        std::vector<Rational> post(pre.size());
        for (std::size_t i = 0; i < pre.size(); ++i) {
            if (pre[i] == f) {
                ev.flashers.push_back(i);
                post[i] = 0;
            } else {
                const Rational scaled = alpha * pre[i];
                post[i] = scaled < f ? scaled : Rational(0);
            }
        }
        ev.pre = to_doubles(pre);
        ev.post = to_doubles(post);
        trace.events.push_back(std::move(ev));
        if (!trace.sync_event && std::all_of(post.begin(), post.end(), [&](const Rational& c) { return c == post[0]; })) {
            trace.sync_event = trace.events.size() - 1;
            trace.sync_time = static_cast<double>(te);
        }
        x = std::move(post);
        t = te;
    }
    sample_until(H, true);
    trace.flash_count = trace.sync_event ? *trace.sync_event + 1 : trace.events.size();
    return trace;
}

}  // namespace hyreach
