#pragma once

#include "natpatl/errors.hpp"
#include "natpatl/rational.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace natpatl {

using StateId = int;
using AgentId = int;
using ActionId = int;
using AtomId = int;

/// A finite discrete distribution with exact rational probabilities.
/// Entries are sorted by key, strictly positive, and sum to exactly 1.
class Distribution {
public:
    using Entry = std::pair<int, Rational>;

    Distribution() = default;

    /// Validates positivity and exact normalization.
    static Distribution make(std::vector<Entry> entries);

    static Distribution dirac(int key) {
        Distribution d;
        d.entries_.emplace_back(key, Rational(1));
        return d;
    }

    const std::vector<Entry>& entries() const { return entries_; }

    bool is_dirac() const { return entries_.size() == 1; }

    /// The unique key of a Dirac distribution.
    int dirac_key() const { return entries_.front().first; }

    Rational prob(int key) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                                   [](const Entry& e, int k) { return e.first < k; });
        if (it == entries_.end() || it->first != key) return Rational(0);
        return it->second;
    }

    bool contains(int key) const { return prob(key) > 0; }

    std::size_t size() const { return entries_.size(); }

    friend bool operator==(const Distribution& a, const Distribution& b) {
        return a.entries_ == b.entries_;
    }

private:
    std::vector<Entry> entries_;
};

/// Joint action, one action per agent in the model's fixed agent order.
using JointAction = std::vector<ActionId>;

/// Structurally unchecked model description, as produced by the model DSL
/// parser. validate_cgs turns it into a Cgs or reports the offending entry.
struct RawModel {
    std::vector<std::string> agents;
    std::vector<std::string> atoms;
    std::vector<std::string> actions;
    std::vector<std::pair<std::string, std::vector<std::string>>> states;  // name, labels
    // (state, agent) -> action names
    std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> legality;
    // (state, action names in agent order) -> {state name: prob}
    std::vector<std::tuple<std::string, std::vector<std::string>,
                           std::vector<std::pair<std::string, Rational>>>> transitions;
    std::string initial;
};

/// Validated stochastic concurrent game structure. Immutable after
/// validation; identifiers are indices into the interned name tables.
class Cgs {
public:
    const std::vector<std::string>& state_names() const { return state_names_; }
    const std::vector<std::string>& agent_names() const { return agent_names_; }
    const std::vector<std::string>& action_names() const { return action_names_; }
    const std::vector<std::string>& atom_names() const { return atom_names_; }

    int num_states() const { return static_cast<int>(state_names_.size()); }
    int num_agents() const { return static_cast<int>(agent_names_.size()); }
    int num_actions() const { return static_cast<int>(action_names_.size()); }
    int num_atoms() const { return static_cast<int>(atom_names_.size()); }

    StateId initial_state() const { return initial_; }

    /// Sorted atom ids labeling state s.
    const std::vector<AtomId>& labels(StateId s) const { return labels_[s]; }

    bool has_label(StateId s, AtomId p) const {
        const auto& l = labels_[s];
        return std::binary_search(l.begin(), l.end(), p);
    }

    /// Sorted legal actions for agent a at state s; never empty.
    const std::vector<ActionId>& legal(StateId s, AgentId a) const {
        return legality_[s][a];
    }

    bool is_legal(StateId s, AgentId a, ActionId act) const {
        const auto& l = legality_[s][a];
        return std::binary_search(l.begin(), l.end(), act);
    }

    bool profile_legal(StateId s, const JointAction& profile) const;

    /// tau(s, profile). Throws IllegalProfileError naming the first
    /// offending agent if the profile is not legal componentwise.
    const Distribution& successors(StateId s, const JointAction& profile) const;

    /// All legal joint actions at s, in lexicographic action-id order.
    std::vector<JointAction> legal_profiles(StateId s) const;

    std::optional<StateId> state_id(const std::string& name) const;
    std::optional<AgentId> agent_id(const std::string& name) const;
    std::optional<ActionId> action_id(const std::string& name) const;
    std::optional<AtomId> atom_id(const std::string& name) const;

    /// Actions legal in every state for the given agent.
    std::vector<ActionId> globally_legal(AgentId a) const;

    /// States with no path from the initial state; reported by the CLI lint.
    std::vector<StateId> unreachable_states() const;

    friend Cgs validate_cgs(const RawModel& raw);

private:
    std::vector<std::string> state_names_, agent_names_, action_names_, atom_names_;
    std::vector<std::vector<AtomId>> labels_;
    std::vector<std::vector<std::vector<ActionId>>> legality_;  // [state][agent]
    std::map<std::pair<StateId, JointAction>, Distribution> transitions_;
    StateId initial_ = 0;
};

/// Checks every CGS well-formedness invariant; probabilities are kept
/// exactly as written (no renormalization).
Cgs validate_cgs(const RawModel& raw);

/// Non-empty state sequence whose consecutive states are connected by some
/// legal joint action with positive transition probability.
class History {
public:
    explicit History(std::vector<StateId> states) : states_(std::move(states)) {
        if (states_.empty()) throw std::invalid_argument("empty history");
    }

    static History validated(std::vector<StateId> states, const Cgs& cgs);

    const std::vector<StateId>& states() const { return states_; }
    StateId last() const { return states_.back(); }
    std::size_t len() const { return states_.size(); }
    StateId operator[](std::size_t i) const { return states_[i]; }

private:
    std::vector<StateId> states_;
};

}  // namespace natpatl
