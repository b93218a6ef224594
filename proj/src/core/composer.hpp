#pragma once

// Parallel composition of a network under label synchronization.
//
// Normalization rules applied for networks of two or more components:
//  R1  a labeled composed jump takes exactly one local jump with that label in
//      every component whose alphabet contains the label (no stuttering);
//      unlabeled local jumps compose over every nonempty subset of components.
//  R2  composed jumps that neither move nor reset anything are dropped.
//  R3  only locations reachable in the discrete jump graph are kept.
// A single-component network composes to the component itself.

#include "model.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace hyreach {

class CompositionError : public ModelError {
public:
    using ModelError::ModelError;
};

using ComposedLocation = std::vector<LocIndex>;

struct LocalMove {
    std::size_t component = 0;
    std::size_t jump = 0;  // index into the component's jump list

    friend bool operator==(const LocalMove&, const LocalMove&) = default;
};

struct ComposedJump {
    ComposedLocation source;
    ComposedLocation target;
    std::vector<LocalMove> moves;  // ordered by component
    std::optional<std::size_t> label;  // index into NetworkIndex::labels()
    bool urgent = false;

    friend bool operator==(const ComposedJump&, const ComposedJump&) = default;
};

/// Resolved, index-based view of a network used by the composer and the engines.
class NetworkIndex {
public:
    explicit NetworkIndex(const Network& network);

    const Network& network() const { return *network_; }
    std::size_t size() const { return components_.size(); }
    const HybridAutomaton& component(std::size_t c) const { return network_->components[c]; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::optional<std::size_t> label_id(std::string_view label) const;

    LocIndex source_of(std::size_t c, std::size_t jump) const { return components_[c].source[jump]; }
    LocIndex target_of(std::size_t c, std::size_t jump) const { return components_[c].target[jump]; }
    const Jump& jump(std::size_t c, std::size_t j) const { return component(c).jumps[j]; }
    bool is_noop(std::size_t c, std::size_t jump) const { return components_[c].noop[jump]; }

    /// Components whose alphabet contains the label, in declaration order.
    const std::vector<std::size_t>& participants(std::size_t label) const { return participants_[label]; }
    /// Local jumps of component c leaving loc with the given label (declaration order).
    const std::vector<std::size_t>& labeled_jumps(std::size_t c, LocIndex loc, std::size_t label) const;
    const std::vector<std::size_t>& unlabeled_jumps(std::size_t c, LocIndex loc) const;

    /// Tuples of initial locations (product over components of their init entries).
    std::vector<ComposedLocation> initial_locations() const;

    /// Composed jumps leaving loc, in the canonical order of compose().
    std::vector<ComposedJump> outgoing(const ComposedLocation& loc) const;
    /// True iff some composed jump leaving loc is urgent (computed without enumerating combinations).
    bool zero_dwell(const ComposedLocation& loc) const;

    std::string location_name(const ComposedLocation& loc) const;

    /// Throws CompositionError when participants assign a shared variable differently.
    void check_shared_resets(const std::vector<LocalMove>& moves) const;

private:
    struct ComponentData {
        std::vector<LocIndex> source, target;
        std::vector<bool> noop;
        // by_label[loc][label] -> jumps; unlabeled[loc] -> jumps
        std::vector<std::vector<std::vector<std::size_t>>> by_label;
        std::vector<std::vector<std::size_t>> unlabeled;
    };

    const Network* network_;
    std::vector<std::string> labels_;
    std::vector<std::vector<std::size_t>> participants_;
    std::vector<ComponentData> components_;
    std::vector<std::vector<bool>> shared_var_;  // per component, per local variable
};

/// Eagerly composed automaton together with the provenance of each location and jump.
struct Composition {
    HybridAutomaton automaton;
    std::vector<ComposedLocation> locations;  // parallel to automaton.locations
    std::vector<ComposedJump> jumps;          // parallel to automaton.jumps
    /// Composed variable index of each component variable.
    std::vector<std::vector<VarIndex>> var_map;
};

Composition compose(const Network& network);

std::vector<ComposedJump> lazy_outgoing(const Network& network, const ComposedLocation& loc);

struct CompositionStats {
    std::size_t locations = 0;
    std::size_t transitions = 0;

    friend bool operator==(const CompositionStats&, const CompositionStats&) = default;
};

CompositionStats count_stats(const HybridAutomaton& automaton);
/// Counts obtained by on-demand exploration with lazy_outgoing, without building the automaton.
CompositionStats lazy_stats(const Network& network);

}  // namespace hyreach
