#include "model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace hyreach {

const char* to_string(Relation rel) {
    switch (rel) {
    case Relation::le: return "<=";
    case Relation::lt: return "<";
    case Relation::eq: return "=";
    case Relation::ge: return ">=";
    case Relation::gt: return ">";
    }
    return "?";
}

LinearConstraint::LinearConstraint(std::vector<Term> t, Relation r, double b)
    : rel(r), bound(b) {
    std::sort(t.begin(), t.end(), [](const Term& a, const Term& c) { return a.var < c.var; });
    for (const Term& term : t) {
        if (!terms.empty() && terms.back().var == term.var) {
            terms.back().coeff += term.coeff;
        } else {
            terms.push_back(term);
        }
    }
    std::erase_if(terms, [](const Term& term) { return term.coeff == 0.0; });
}

double LinearConstraint::coeff_of(VarIndex v) const {
    for (const Term& t : terms) {
        if (t.var == v) return t.coeff;
    }
    return 0.0;
}

VarIndex LinearConstraint::max_var() const {
    return terms.empty() ? 0 : terms.back().var;
}

Condition& Condition::add(LinearConstraint c) {
    constraints.push_back(std::move(c));
    return *this;
}

Condition Condition::operator&&(const Condition& other) const {
    Condition out = *this;
    out.constraints.insert(out.constraints.end(), other.constraints.begin(), other.constraints.end());
    return out;
}

AffineReset& AffineReset::assign(VarIndex var, double scale, double offset) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                               [](const Assignment& a, VarIndex v) { return a.var < v; });
    if (it != entries_.end() && it->var == var) {
        it->scale = scale;
        it->offset = offset;
    } else {
        entries_.insert(it, Assignment{var, scale, offset});
    }
    return *this;
}

const Assignment* AffineReset::find(VarIndex var) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                               [](const Assignment& a, VarIndex v) { return a.var < v; });
    return (it != entries_.end() && it->var == var) ? &*it : nullptr;
}

bool AffineReset::is_identity() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Assignment& a) { return a.is_identity(); });
}

AffineReset AffineReset::normalized() const {
    AffineReset out;
    for (const Assignment& a : entries_) {
        if (!a.is_identity()) out.entries_.push_back(a);
    }
    return out;
}

std::optional<VarIndex> HybridAutomaton::variable_index(std::string_view n) const {
    for (VarIndex i = 0; i < variables.size(); ++i) {
        if (variables[i].name == n) return i;
    }
    return std::nullopt;
}

LocIndex HybridAutomaton::location_index(std::string_view n) const {
    for (LocIndex i = 0; i < locations.size(); ++i) {
        if (locations[i].name == n) return i;
    }
    return kNoLocation;
}

VarIndex HybridAutomaton::add_variable(std::string n, VarKind kind) {
    variables.push_back(Variable{std::move(n), kind});
    for (Location& loc : locations) loc.flow.rates.resize(variables.size(), 0.0);
    return variables.size() - 1;
}

LocIndex HybridAutomaton::add_location(std::string n, Condition invariant) {
    Location loc;
    loc.name = std::move(n);
    loc.flow.rates.assign(variables.size(), 0.0);
    loc.invariant = std::move(invariant);
    locations.push_back(std::move(loc));
    return locations.size() - 1;
}

std::vector<std::string> HybridAutomaton::alphabet() const {
    std::vector<std::string> out;
    for (const Jump& j : jumps) {
        if (j.label && std::find(out.begin(), out.end(), *j.label) == out.end()) out.push_back(*j.label);
    }
    return out;
}

std::vector<std::string> Network::shared_variables() const {
    std::vector<std::string> out;
    for (const HybridAutomaton& a : components) {
        for (const Variable& v : a.variables) {
            if (v.kind == VarKind::shared && std::find(out.begin(), out.end(), v.name) == out.end()) {
                out.push_back(v.name);
            }
        }
    }
    return out;
}

std::vector<std::string> Network::alphabet() const {
    std::vector<std::string> out;
    for (const HybridAutomaton& a : components) {
        for (std::string& l : a.alphabet()) {
            if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(std::move(l));
        }
    }
    return out;
}

bool evaluate(const LinearConstraint& c, const Valuation& v) {
    double lhs = 0.0;
    for (const Term& t : c.terms) {
        if (t.var >= v.values.size()) {
            throw ScopeError("constraint references variable #" + std::to_string(t.var) +
                             " outside a valuation of size " + std::to_string(v.values.size()));
        }
        lhs += t.coeff * v.values[t.var];
    }
    switch (c.rel) {
    case Relation::le: return lhs <= c.bound;
    case Relation::lt: return lhs < c.bound;
    case Relation::eq: return lhs == c.bound;
    case Relation::ge: return lhs >= c.bound;
    case Relation::gt: return lhs > c.bound;
    }
    return false;
}

bool evaluate(const Condition& c, const Valuation& v) {
    // every member is evaluated so that scope errors surface regardless of order
    bool result = true;
    for (const LinearConstraint& lc : c.constraints) result = evaluate(lc, v) && result;
    return result;
}

Valuation apply_reset(const AffineReset& r, const Valuation& v) {
    Valuation out = v;
    for (const Assignment& a : r.assignments()) {
        if (a.var >= v.values.size()) {
            throw ScopeError("reset assigns variable #" + std::to_string(a.var) +
                             " outside a valuation of size " + std::to_string(v.values.size()));
        }
        out.values[a.var] = a.scale * v.values[a.var] + a.offset;
    }
    return out;
}

namespace {

void check_condition(const HybridAutomaton& a, const Condition& c, const std::string& where,
                     std::vector<Violation>& out) {
    for (const LinearConstraint& lc : c.constraints) {
        for (const Term& t : lc.terms) {
            if (t.var >= a.dimension()) {
                out.push_back({where, "unresolved variable #" + std::to_string(t.var)});
            }
        }
    }
}

std::string jump_where(const HybridAutomaton& a, std::size_t i) {
    const Jump& j = a.jumps[i];
    std::ostringstream os;
    os << a.name << ": jump #" << i << " " << j.source << " -> " << j.target;
    if (j.label) os << " [" << *j.label << "]";
    return os.str();
}

}  // namespace

ValidationReport validate(const HybridAutomaton& a) {
    ValidationReport report;
    auto& out = report.violations;

    std::set<std::string> names;
    for (const Variable& v : a.variables) {
        if (!names.insert(v.name).second) out.push_back({a.name, "duplicate variable '" + v.name + "'"});
    }
    std::set<std::string> locs;
    for (const Location& l : a.locations) {
        if (!locs.insert(l.name).second) out.push_back({a.name, "duplicate location '" + l.name + "'"});
        const std::string where = a.name + ": location " + l.name;
        if (l.flow.rates.size() > a.dimension()) out.push_back({where, "flow has more rates than variables"});
        check_condition(a, l.invariant, where + " invariant", out);
        for (VarIndex v = 0; v < a.dimension(); ++v) {
            if (a.variables[v].kind == VarKind::time && l.flow.rate(v) != 1.0) {
                out.push_back({where, "time variable '" + a.variables[v].name + "' must have rate 1"});
            }
        }
    }
    for (std::size_t i = 0; i < a.jumps.size(); ++i) {
        const Jump& j = a.jumps[i];
        const std::string where = jump_where(a, i);
        if (a.location_index(j.source) == kNoLocation) out.push_back({where, "unknown source location '" + j.source + "'"});
        if (a.location_index(j.target) == kNoLocation) out.push_back({where, "unknown target location '" + j.target + "'"});
        check_condition(a, j.guard, where + " guard", out);
        for (const Assignment& as : j.reset.assignments()) {
            if (as.var >= a.dimension()) {
                out.push_back({where, "reset of unresolved variable #" + std::to_string(as.var)});
            } else if (a.variables[as.var].kind == VarKind::time && !as.is_identity()) {
                out.push_back({where, "time variable '" + a.variables[as.var].name + "' must not be reset"});
            }
        }
    }
    for (const InitEntry& e : a.init) {
        const std::string where = a.name + ": init " + e.location;
        if (a.location_index(e.location) == kNoLocation) out.push_back({where, "unknown location"});
        check_condition(a, e.condition, where, out);
    }
    return report;
}

ValidationReport validate(const Network& network) {
    ValidationReport report;
    auto& out = report.violations;
    std::set<std::string> automata;
    std::map<std::string, std::size_t> owner;  // non-shared variable -> component
    std::map<std::string, VarKind> kinds;
    std::map<std::string, std::vector<double>> shared_rates;

    for (std::size_t c = 0; c < network.components.size(); ++c) {
        const HybridAutomaton& a = network.components[c];
        if (!automata.insert(a.name).second) out.push_back({a.name, "duplicate automaton name"});
        ValidationReport local = validate(a);
        out.insert(out.end(), local.violations.begin(), local.violations.end());

        for (VarIndex v = 0; v < a.dimension(); ++v) {
            const Variable& var = a.variables[v];
            auto [it, fresh] = kinds.emplace(var.name, var.kind);
            if (!fresh && (it->second != VarKind::shared || var.kind != VarKind::shared)) {
                out.push_back({a.name, "variable '" + var.name + "' declared by several components but not shared"});
            }
            if (var.kind == VarKind::shared) {
                for (const Location& l : a.locations) shared_rates[var.name].push_back(l.flow.rate(v));
            } else {
                owner.emplace(var.name, c);
            }
        }
    }
    for (const auto& [name, rates] : shared_rates) {
        if (std::adjacent_find(rates.begin(), rates.end(), std::not_equal_to<>()) != rates.end()) {
            out.push_back({name, "rate conflict: shared variable '" + name + "' has differing rates across components"});
        }
    }
    return report;
}

bool is_zero_dwell(const HybridAutomaton& a, std::string_view location) {
    return std::any_of(a.jumps.begin(), a.jumps.end(),
                       [&](const Jump& j) { return j.urgent && j.source == location; });
}

}  // namespace hyreach
