#include "composer.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace hyreach {

namespace {

const std::vector<std::size_t> kNone;

bool any_of_moves_non_noop(const NetworkIndex& idx, const std::vector<LocalMove>& moves) {
    return std::any_of(moves.begin(), moves.end(),
                       [&](const LocalMove& m) { return !idx.is_noop(m.component, m.jump); });
}

}  // namespace

NetworkIndex::NetworkIndex(const Network& network) : network_(&network), labels_(network.alphabet()) {
    const std::size_t k = network.components.size();
    components_.resize(k);
    shared_var_.resize(k);
    participants_.resize(labels_.size());

    for (std::size_t c = 0; c < k; ++c) {
        const HybridAutomaton& a = network.components[c];
        ComponentData& data = components_[c];
        data.by_label.assign(a.locations.size(), std::vector<std::vector<std::size_t>>(labels_.size()));
        data.unlabeled.assign(a.locations.size(), {});
        for (std::size_t j = 0; j < a.jumps.size(); ++j) {
            const Jump& jump = a.jumps[j];
            const LocIndex s = a.location_index(jump.source);
            const LocIndex t = a.location_index(jump.target);
            if (s == kNoLocation || t == kNoLocation) {
                throw ModelError(a.name + ": jump " + jump.source + " -> " + jump.target +
                                 " references an unknown location");
            }
            data.source.push_back(s);
            data.target.push_back(t);
            data.noop.push_back(s == t && jump.reset.is_identity());
            if (jump.label) {
                data.by_label[s][*label_id(*jump.label)].push_back(j);
            } else {
                data.unlabeled[s].push_back(j);
            }
        }
        for (const std::string& l : a.alphabet()) participants_[*label_id(l)].push_back(c);
        for (const Variable& v : a.variables) shared_var_[c].push_back(v.kind == VarKind::shared);
    }
}

std::optional<std::size_t> NetworkIndex::label_id(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
}

const std::vector<std::size_t>& NetworkIndex::labeled_jumps(std::size_t c, LocIndex loc, std::size_t label) const {
    const auto& by_loc = components_[c].by_label;
    return loc < by_loc.size() ? by_loc[loc][label] : kNone;
}

const std::vector<std::size_t>& NetworkIndex::unlabeled_jumps(std::size_t c, LocIndex loc) const {
    const auto& by_loc = components_[c].unlabeled;
    return loc < by_loc.size() ? by_loc[loc] : kNone;
}

std::vector<ComposedLocation> NetworkIndex::initial_locations() const {
    std::vector<ComposedLocation> out{ComposedLocation{}};
    for (std::size_t c = 0; c < size(); ++c) {
        const HybridAutomaton& a = component(c);
        std::vector<LocIndex> inits;
        for (const InitEntry& e : a.init) {
            const LocIndex l = a.location_index(e.location);
            if (l == kNoLocation) throw ModelError(a.name + ": init references unknown location " + e.location);
            if (std::find(inits.begin(), inits.end(), l) == inits.end()) inits.push_back(l);
        }
        if (inits.empty()) throw ModelError(a.name + ": no initial location");
        std::vector<ComposedLocation> next;
        for (const ComposedLocation& prefix : out) {
            for (LocIndex l : inits) {
                ComposedLocation t = prefix;
                t.push_back(l);
                next.push_back(std::move(t));
            }
        }
        out = std::move(next);
    }
    return out;
}

void NetworkIndex::check_shared_resets(const std::vector<LocalMove>& moves) const {
    std::map<std::string, std::pair<double, double>> seen;
    for (const LocalMove& m : moves) {
        const HybridAutomaton& a = component(m.component);
        for (const Assignment& as : a.jumps[m.jump].reset.assignments()) {
            if (as.var >= shared_var_[m.component].size() || !shared_var_[m.component][as.var]) continue;
            const std::string& name = a.variables[as.var].name;
            auto [it, fresh] = seen.emplace(name, std::pair{as.scale, as.offset});
            if (!fresh && it->second != std::pair{as.scale, as.offset}) {
                throw CompositionError("conflicting resets of shared variable '" + name + "'");
            }
        }
    }
}

std::vector<ComposedJump> NetworkIndex::outgoing(const ComposedLocation& loc) const {
    std::vector<ComposedJump> out;
    const std::size_t k = size();

    auto emit = [&](std::vector<LocalMove> moves, std::optional<std::size_t> label) {
        if (k > 1 && !any_of_moves_non_noop(*this, moves)) return;  // R2
        check_shared_resets(moves);
        ComposedJump cj;
        cj.source = loc;
        cj.target = loc;
        for (const LocalMove& m : moves) {
            cj.target[m.component] = target_of(m.component, m.jump);
            cj.urgent = cj.urgent || jump(m.component, m.jump).urgent;
        }
        cj.moves = std::move(moves);
        cj.label = label;
        out.push_back(std::move(cj));
    };

    // labeled: cartesian product over the participants' local choices
    for (std::size_t l = 0; l < labels_.size(); ++l) {
        const auto& parts = participants_[l];
        std::vector<const std::vector<std::size_t>*> choices;
        bool blocked = false;
        for (std::size_t c : parts) {
            const auto& js = labeled_jumps(c, loc[c], l);
            if (js.empty()) {
                blocked = true;
                break;
            }
            choices.push_back(&js);
        }
        if (blocked || parts.empty()) continue;
        std::vector<std::size_t> pick(parts.size(), 0);
        while (true) {
            std::vector<LocalMove> moves;
            moves.reserve(parts.size());
            for (std::size_t i = 0; i < parts.size(); ++i) moves.push_back({parts[i], (*choices[i])[pick[i]]});
            emit(std::move(moves), l);
            std::size_t i = parts.size();
            while (i > 0) {
                --i;
                if (++pick[i] < choices[i]->size()) break;
                pick[i] = 0;
                if (i == 0) {
                    i = parts.size() + 1;
                    break;
                }
            }
            if (i == parts.size() + 1) break;
        }
    }

    // unlabeled: every component stays (choice 0) or takes one of its unlabeled jumps
    std::vector<const std::vector<std::size_t>*> options(k);
    bool any = false;
    for (std::size_t c = 0; c < k; ++c) {
        options[c] = &unlabeled_jumps(c, loc[c]);
        any = any || !options[c]->empty();
    }
    if (any) {
        std::vector<std::size_t> pick(k, 0);
        while (true) {
            std::size_t i = k;
            bool done = false;
            while (i > 0) {
                --i;
                if (++pick[i] <= options[i]->size()) break;
                pick[i] = 0;
                if (i == 0) done = true;
            }
            if (done) break;
            std::vector<LocalMove> moves;
            for (std::size_t c = 0; c < k; ++c) {
                if (pick[c] > 0) moves.push_back({c, (*options[c])[pick[c] - 1]});
            }
            emit(std::move(moves), std::nullopt);
        }
    }
    return out;
}

bool NetworkIndex::zero_dwell(const ComposedLocation& loc) const {
    const std::size_t k = size();
    auto urgent_in = [&](std::size_t c, const std::vector<std::size_t>& js, bool& urgent_noop, bool& urgent_real,
                         bool& real) {
        for (std::size_t j : js) {
            const bool u = jump(c, j).urgent;
            const bool noop = k > 1 && is_noop(c, j);
            urgent_real = urgent_real || (u && !noop);
            urgent_noop = urgent_noop || (u && noop);
            real = real || !noop;
        }
    };
    // An urgent no-op only survives R2 when combined with a real move of another component.
    auto decide = [&](const std::vector<std::pair<std::size_t, const std::vector<std::size_t>*>>& sets) {
        std::size_t urgent_noop_owner = static_cast<std::size_t>(-1);
        std::size_t real_owners = 0;
        std::size_t last_real_owner = static_cast<std::size_t>(-1);
        for (const auto& [c, js] : sets) {
            bool un = false, ur = false, real = false;
            urgent_in(c, *js, un, ur, real);
            if (ur) return true;
            if (un && urgent_noop_owner == static_cast<std::size_t>(-1)) urgent_noop_owner = c;
            if (real) {
                ++real_owners;
                last_real_owner = c;
            }
        }
        if (urgent_noop_owner == static_cast<std::size_t>(-1)) return false;
        return real_owners > 1 || (real_owners == 1 && last_real_owner != urgent_noop_owner);
    };

    for (std::size_t l = 0; l < labels_.size(); ++l) {
        std::vector<std::pair<std::size_t, const std::vector<std::size_t>*>> sets;
        bool blocked = false;
        for (std::size_t c : participants_[l]) {
            const auto& js = labeled_jumps(c, loc[c], l);
            if (js.empty()) {
                blocked = true;
                break;
            }
            sets.emplace_back(c, &js);
        }
        if (!blocked && !sets.empty() && decide(sets)) return true;
    }
    std::vector<std::pair<std::size_t, const std::vector<std::size_t>*>> sets;
    for (std::size_t c = 0; c < k; ++c) {
        const auto& js = unlabeled_jumps(c, loc[c]);
        if (!js.empty()) sets.emplace_back(c, &js);
    }
    return decide(sets);
}

std::string NetworkIndex::location_name(const ComposedLocation& loc) const {
    std::string out;
    for (std::size_t c = 0; c < loc.size(); ++c) {
        if (c) out += '.';
        out += component(c).locations[loc[c]].name;
    }
    return out;
}

namespace {

std::vector<ComposedLocation> reachable_locations(const NetworkIndex& idx,
                                                  std::map<ComposedLocation, std::vector<ComposedJump>>* jumps) {
    std::set<ComposedLocation> seen;
    std::deque<ComposedLocation> queue;
    for (ComposedLocation& l : idx.initial_locations()) {
        if (seen.insert(l).second) queue.push_back(std::move(l));
    }
    while (!queue.empty()) {
        ComposedLocation cur = std::move(queue.front());
        queue.pop_front();
        std::vector<ComposedJump> out = idx.outgoing(cur);
        for (const ComposedJump& cj : out) {
            if (seen.insert(cj.target).second) queue.push_back(cj.target);
        }
        if (jumps) (*jumps)[cur] = std::move(out);
    }
    return {seen.begin(), seen.end()};  // lexicographic
}

}  // namespace

Composition compose(const Network& network) {
    if (network.components.empty()) throw ModelError("cannot compose an empty network");
    NetworkIndex idx(network);
    Composition result;
    HybridAutomaton& out = result.automaton;

    if (network.components.size() == 1) {
        const HybridAutomaton& a = network.components.front();
        out = a;
        result.var_map.emplace_back();
        for (VarIndex v = 0; v < a.dimension(); ++v) result.var_map.back().push_back(v);
        for (LocIndex l = 0; l < a.locations.size(); ++l) result.locations.push_back({l});
        for (std::size_t j = 0; j < a.jumps.size(); ++j) {
            ComposedJump cj;
            cj.source = {idx.source_of(0, j)};
            cj.target = {idx.target_of(0, j)};
            cj.moves = {{0, j}};
            if (a.jumps[j].label) cj.label = idx.label_id(*a.jumps[j].label);
            cj.urgent = a.jumps[j].urgent;
            result.jumps.push_back(std::move(cj));
        }
        return result;
    }

    out.name = "composition";
    std::map<std::string, VarIndex> shared_index;
    for (const HybridAutomaton& a : network.components) {
        std::vector<VarIndex> map;
        for (const Variable& v : a.variables) {
            if (v.kind == VarKind::shared) {
                auto it = shared_index.find(v.name);
                if (it == shared_index.end()) {
                    it = shared_index.emplace(v.name, out.add_variable(v.name, v.kind)).first;
                }
                map.push_back(it->second);
            } else {
                map.push_back(out.add_variable(v.name, v.kind));
            }
        }
        result.var_map.push_back(std::move(map));
    }

    auto remap_condition = [&](std::size_t c, const Condition& cond) {
        Condition r;
        for (const LinearConstraint& lc : cond.constraints) {
            std::vector<Term> terms;
            for (const Term& t : lc.terms) terms.push_back({result.var_map[c][t.var], t.coeff});
            r.add(LinearConstraint(std::move(terms), lc.rel, lc.bound));
        }
        return r;
    };

    std::map<ComposedLocation, std::vector<ComposedJump>> jumps;
    result.locations = reachable_locations(idx, &jumps);
    const std::size_t dim = out.dimension();

    for (const ComposedLocation& loc : result.locations) {
        Location l;
        l.name = idx.location_name(loc);
        l.flow.rates.assign(dim, 0.0);
        std::vector<bool> rate_set(dim, false);
        for (std::size_t c = 0; c < loc.size(); ++c) {
            const HybridAutomaton& a = network.components[c];
            const Location& local = a.locations[loc[c]];
            for (VarIndex v = 0; v < a.dimension(); ++v) {
                const VarIndex g = result.var_map[c][v];
                const double r = local.flow.rate(v);
                if (rate_set[g] && l.flow.rates[g] != r) {
                    throw CompositionError("rate conflict on shared variable '" + a.variables[v].name + "' in " +
                                           l.name);
                }
                l.flow.rates[g] = r;
                rate_set[g] = true;
            }
            l.invariant = l.invariant && remap_condition(c, local.invariant);
        }
        out.locations.push_back(std::move(l));
    }

    for (const ComposedLocation& loc : result.locations) {
        for (ComposedJump& cj : jumps[loc]) {
            Jump j;
            j.source = idx.location_name(cj.source);
            j.target = idx.location_name(cj.target);
            for (const LocalMove& m : cj.moves) {
                const Jump& local = network.components[m.component].jumps[m.jump];
                j.guard = j.guard && remap_condition(m.component, local.guard);
                for (const Assignment& as : local.reset.assignments()) {
                    j.reset.assign(result.var_map[m.component][as.var], as.scale, as.offset);
                }
            }
            if (cj.label) j.label = idx.labels()[*cj.label];
            j.urgent = cj.urgent;
            out.jumps.push_back(std::move(j));
            result.jumps.push_back(std::move(cj));
        }
    }

    for (const ComposedLocation& loc : idx.initial_locations()) {
        // product of init entries of each component that target this tuple
        std::vector<Condition> conds{Condition{}};
        for (std::size_t c = 0; c < loc.size(); ++c) {
            const HybridAutomaton& a = network.components[c];
            std::vector<Condition> next;
            for (const InitEntry& e : a.init) {
                if (a.location_index(e.location) != loc[c]) continue;
                for (const Condition& prefix : conds) next.push_back(prefix && remap_condition(c, e.condition));
            }
            conds = std::move(next);
        }
        for (Condition& cond : conds) out.init.push_back({idx.location_name(loc), std::move(cond)});
    }
    return result;
}

std::vector<ComposedJump> lazy_outgoing(const Network& network, const ComposedLocation& loc) {
    return NetworkIndex(network).outgoing(loc);
}

CompositionStats count_stats(const HybridAutomaton& automaton) {
    return {automaton.locations.size(), automaton.jumps.size()};
}

CompositionStats lazy_stats(const Network& network) {
    NetworkIndex idx(network);
    if (idx.size() == 1) return count_stats(network.components.front());
    std::set<ComposedLocation> seen;
    std::deque<ComposedLocation> queue;
    for (ComposedLocation& l : idx.initial_locations()) {
        if (seen.insert(l).second) queue.push_back(std::move(l));
    }
    CompositionStats stats;
    while (!queue.empty()) {
        ComposedLocation cur = std::move(queue.front());
        queue.pop_front();
        for (const ComposedJump& cj : idx.outgoing(cur)) {
            ++stats.transitions;
            if (seen.insert(cj.target).second) queue.push_back(cj.target);
        }
    }
    stats.locations = seen.size();
    return stats;
}

}  // namespace hyreach
