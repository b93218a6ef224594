#pragma once

#include "composer.hpp"
#include "model.hpp"
#include "swarm.hpp"

#include <string>
#include <vector>

namespace hyreach::test {

inline LinearConstraint cmp(VarIndex v, Relation rel, double bound, double coeff = 1.0) {
    return LinearConstraint({{v, coeff}}, rel, bound);
}

inline Condition cond(std::initializer_list<LinearConstraint> cs) {
    Condition c;
    for (const auto& x : cs) c.add(x);
    return c;
}

inline Flow rates(std::vector<double> r) { return Flow{std::move(r)}; }

inline Network swarm(Variant v, std::size_t n, double alpha = 1.1, double width = 0.0) {
    SwarmSpec s;
    s.variant = v;
    s.n = n;
    s.alpha = alpha;
    s.width = width;
    return generate_model(s);
}

inline SwarmSpec spec(Variant v, std::size_t n, double alpha = 1.1, double width = 0.0) {
    SwarmSpec s;
    s.variant = v;
    s.n = n;
    s.alpha = alpha;
    s.width = width;
    return s;
}

inline constexpr Variant kVariants[] = {Variant::lsync1, Variant::lsync2, Variant::shd1, Variant::shd2};

/// One clock `var` with rate 1 in location `l` (no invariant), starting at `init`.
inline HybridAutomaton clock_automaton(const std::string& name, const std::string& var, double init) {
    HybridAutomaton a;
    a.name = name;
    a.add_variable(var);
    a.add_location("l");
    a.locations[0].flow = rates({1.0});
    a.add_location("m");
    a.locations[1].flow = rates({1.0});
    a.init.push_back({"l", cond({cmp(0, Relation::eq, init)})});
    return a;
}

}  // namespace hyreach::test
