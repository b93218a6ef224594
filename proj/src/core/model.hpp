#pragma once

// Data model for networks of hybrid automata with constant-rate flows.
//
// Predicates are conjunctions of linear constraints, resets are per-variable
// affine maps and flows assign a constant rate to every variable. Jumps refer
// to locations by name so that a model with dangling references can still be
// represented (and reported by validate()).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hyreach {

using VarIndex = std::size_t;
using LocIndex = std::size_t;

inline constexpr LocIndex kNoLocation = static_cast<LocIndex>(-1);

enum class VarKind { local, shared, time };

struct Variable {
    std::string name;
    VarKind kind = VarKind::local;

    friend bool operator==(const Variable&, const Variable&) = default;
};

enum class Relation { le, lt, eq, ge, gt };

const char* to_string(Relation rel);

struct Term {
    VarIndex var = 0;
    double coeff = 0.0;

    friend bool operator==(const Term&, const Term&) = default;
};

/// sum(coeff * var) ~ bound. Terms are kept sorted by variable with no zero
/// coefficients; a constraint without terms is the constant true or false.
struct LinearConstraint {
    std::vector<Term> terms;
    Relation rel = Relation::le;
    double bound = 0.0;

    LinearConstraint() = default;
    LinearConstraint(std::vector<Term> t, Relation r, double b);

    static LinearConstraint always_true() { return {{}, Relation::le, 0.0}; }
    static LinearConstraint always_false() { return {{}, Relation::le, -1.0}; }

    bool is_trivial() const { return terms.empty(); }
    double coeff_of(VarIndex v) const;
    VarIndex max_var() const;

    friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

struct Condition {
    std::vector<LinearConstraint> constraints;

    bool is_true() const { return constraints.empty(); }
    Condition& add(LinearConstraint c);
    /// Conjunction.
    Condition operator&&(const Condition& other) const;

    friend bool operator==(const Condition&, const Condition&) = default;
};

struct Assignment {
    VarIndex var = 0;
    double scale = 1.0;
    double offset = 0.0;

    bool is_identity() const { return scale == 1.0 && offset == 0.0; }
    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// x' := scale * x + offset for assigned variables, identity elsewhere.
class AffineReset {
public:
    AffineReset() = default;

    AffineReset& assign(VarIndex var, double scale, double offset);
    const std::vector<Assignment>& assignments() const { return entries_; }
    const Assignment* find(VarIndex var) const;
    bool is_identity() const;
    /// Drops identity entries so that syntactic comparison is canonical.
    AffineReset normalized() const;

    friend bool operator==(const AffineReset&, const AffineReset&) = default;

private:
    std::vector<Assignment> entries_;  // sorted by var
};

struct Flow {
    std::vector<double> rates;  // one per automaton variable

    double rate(VarIndex v) const { return v < rates.size() ? rates[v] : 0.0; }
    friend bool operator==(const Flow&, const Flow&) = default;
};

struct Location {
    std::string name;
    Flow flow;
    Condition invariant;

    friend bool operator==(const Location&, const Location&) = default;
};

struct Jump {
    std::string source;
    std::string target;
    Condition guard;
    AffineReset reset;
    std::optional<std::string> label;
    bool urgent = false;

    friend bool operator==(const Jump&, const Jump&) = default;
};

struct InitEntry {
    std::string location;
    Condition condition;

    friend bool operator==(const InitEntry&, const InitEntry&) = default;
};

struct HybridAutomaton {
    std::string name;
    std::vector<Variable> variables;
    std::vector<Location> locations;
    std::vector<Jump> jumps;
    std::vector<InitEntry> init;

    std::size_t dimension() const { return variables.size(); }
    std::optional<VarIndex> variable_index(std::string_view name) const;
    LocIndex location_index(std::string_view name) const;
    VarIndex add_variable(std::string name, VarKind kind = VarKind::local);
    LocIndex add_location(std::string name, Condition invariant = {});
    /// Label alphabet in order of first appearance.
    std::vector<std::string> alphabet() const;

    friend bool operator==(const HybridAutomaton&, const HybridAutomaton&) = default;
};

struct Network {
    std::vector<HybridAutomaton> components;

    /// Names of variables declared shared by any component, in order of first appearance.
    std::vector<std::string> shared_variables() const;
    /// Union of the components' alphabets, in order of first appearance.
    std::vector<std::string> alphabet() const;

    friend bool operator==(const Network&, const Network&) = default;
};

struct Valuation {
    std::vector<double> values;

    friend bool operator==(const Valuation&, const Valuation&) = default;
};

class ScopeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Strict relations are evaluated strictly.
bool evaluate(const LinearConstraint& c, const Valuation& v);
bool evaluate(const Condition& c, const Valuation& v);
Valuation apply_reset(const AffineReset& r, const Valuation& v);

struct Violation {
    std::string where;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const Network& network);
ValidationReport validate(const HybridAutomaton& automaton);

/// A location is zero-dwell iff it is the source of at least one urgent jump.
bool is_zero_dwell(const HybridAutomaton& automaton, std::string_view location);

}  // namespace hyreach
