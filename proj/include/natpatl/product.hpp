#pragma once

#include "natpatl/cgs.hpp"
#include "natpatl/natstrat.hpp"

#include <iosfwd>

namespace natpatl {

// Per fixed agent, per strategy pair: current reachable state set of that
// pair's GuardNfa. Memoryless agents contribute an empty per-agent vector.
using MemoryVector = std::vector<std::vector<std::vector<int>>>;

struct ProductState {
    StateId base;
    MemoryVector memory;

    friend bool operator<(const ProductState& a, const ProductState& b) {
        if (a.base != b.base) return a.base < b.base;
        return a.memory < b.memory;
    }
    friend bool operator==(const ProductState& a, const ProductState& b) {
        return a.base == b.base && a.memory == b.memory;
    }
};

/// One fixed agent with its strategy; kept sorted by agent id.
struct FixedAgent {
    AgentId agent;
    const NatStrategy* strategy;
};
using FixedProfile = std::vector<FixedAgent>;

/// Product MDP: coalition agents follow their strategies (memory tracked in
/// the product state), the remaining agents pick joint actions freely.
class Mdp {
public:
    struct Choice {
        JointAction free_action;  // actions of the free agents, in agent order
        Distribution dist;        // over product state indices
    };

    int num_states() const { return static_cast<int>(states_.size()); }
    int initial() const { return initial_; }
    const ProductState& pstate(int i) const { return states_[i]; }
    const std::vector<AtomId>& labels(int i) const { return labels_[i]; }
    const std::vector<Choice>& choices(int i) const { return choices_[i]; }
    const std::vector<AgentId>& free_agents() const { return free_agents_; }

    std::string state_name(int i, const Cgs& cgs) const;

    /// Plain-text explicit-state dump: one line per transition
    /// "source choice target probability".
    void export_explicit(std::ostream& out, const Cgs& cgs) const;

    friend Mdp fix_coalition(const Cgs&, const std::vector<AgentId>&,
                             const FixedProfile&, StateId);

private:
    std::vector<ProductState> states_;
    std::vector<std::vector<AtomId>> labels_;
    std::vector<std::vector<Choice>> choices_;
    std::vector<AgentId> free_agents_;
    int initial_ = 0;
};

/// Finite Markov chain: every agent's strategy fixed.
class MarkovChain {
public:
    int num_states() const { return static_cast<int>(states_.size()); }
    int initial() const { return initial_; }
    const ProductState& pstate(int i) const { return states_[i]; }
    const std::vector<AtomId>& labels(int i) const { return labels_[i]; }
    const Distribution& row(int i) const { return rows_[i]; }

    std::string state_name(int i, const Cgs& cgs) const;
    void export_explicit(std::ostream& out, const Cgs& cgs) const;

    friend MarkovChain fix_all(const Cgs&, const FixedProfile&, StateId);

private:
    std::vector<ProductState> states_;
    std::vector<std::vector<AtomId>> labels_;
    std::vector<Distribution> rows_;
    int initial_ = 0;
};

/// Reachable product construction from (initial, initial memory). Strategies
/// are validated against the model; coalition and profile must name the same
/// agents, without duplicates.
Mdp fix_coalition(const Cgs& cgs, const std::vector<AgentId>& coalition,
                  const FixedProfile& profile, StateId initial);

/// All agents fixed; the degenerate MDP collapses to a Markov chain.
MarkovChain fix_all(const Cgs& cgs, const FixedProfile& profile, StateId initial);

/// Componentwise NFA state-set step under the guards satisfied by `labels`.
MemoryVector memory_update(const MemoryVector& m, const std::vector<AtomId>& labels,
                           const FixedProfile& profile, const Cgs& cgs);

/// Memory at the start of a play whose first state carries `labels`.
MemoryVector initial_memory(const std::vector<AtomId>& labels,
                            const FixedProfile& profile, const Cgs& cgs);

/// The distribution a fixed agent's strategy assigns at a product state;
/// equals act() on any history represented by the memory.
const Distribution& act_from_memory(const NatStrategy& strategy,
                                    const std::vector<std::vector<int>>& agent_memory,
                                    StateId s, const Cgs& cgs);

}  // namespace natpatl
