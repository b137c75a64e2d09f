#include "natpatl/product.hpp"

#include <map>
#include <ostream>
#include <set>

namespace natpatl {

namespace {

void check_profile(const Cgs& cgs, const std::vector<AgentId>& coalition,
                   const FixedProfile& profile) {
    std::set<AgentId> seen;
    for (const auto& f : profile) {
        if (!f.strategy) throw MissingAgentStrategyError("null strategy in profile");
        if (f.strategy->agent() != f.agent)
            throw StrategyAgentMismatchError(
                "strategy built for agent " + cgs.agent_names()[f.strategy->agent()] +
                " assigned to agent " + cgs.agent_names()[f.agent]);
        if (!seen.insert(f.agent).second)
            throw StrategyAgentMismatchError("duplicate strategy for agent " +
                                             cgs.agent_names()[f.agent]);
        f.strategy->validate(cgs);
    }
    std::set<AgentId> coal(coalition.begin(), coalition.end());
    if (coal != seen)
        throw StrategyAgentMismatchError("coalition and strategy profile disagree");
}

std::string memory_str(const MemoryVector& m) {
    std::string out;
    for (const auto& agent : m) {
        if (agent.empty()) continue;  // memoryless agent
        out += "[";
        for (std::size_t i = 0; i < agent.size(); ++i) {
            if (i) out += ";";
            out += "{";
            for (std::size_t j = 0; j < agent[i].size(); ++j) {
                if (j) out += ",";
                out += std::to_string(agent[i][j]);
            }
            out += "}";
        }
        out += "]";
    }
    return out;
}

}  // namespace

const Distribution& act_from_memory(const NatStrategy& strategy,
                                    const std::vector<std::vector<int>>& agent_memory,
                                    StateId s, const Cgs& cgs) {
    for (std::size_t i = 0; i < strategy.pairs().size(); ++i) {
        const auto& p = strategy.pairs()[i];
        bool guard_ok = strategy.setting() == Setting::Memoryless
                            ? eval_bool(p.guard->leaf, s, cgs)
                            : strategy.nfa(i).any_accepting(agent_memory[i]);
        if (!guard_ok) continue;
        bool legal = true;
        for (const auto& [a, prob] : p.dist.entries())
            if (!cgs.is_legal(s, strategy.agent(), a)) { legal = false; break; }
        if (legal) return p.dist;
    }
    throw NoMatchError("no matching pair at state " + cgs.state_names()[s]);
}

MemoryVector initial_memory(const std::vector<AtomId>& labels,
                            const FixedProfile& profile, const Cgs& cgs) {
    MemoryVector m;
    for (const auto& f : profile) {
        std::vector<std::vector<int>> agent_mem;
        if (f.strategy->setting() == Setting::Recall) {
            for (std::size_t i = 0; i < f.strategy->pairs().size(); ++i)
                agent_mem.push_back(f.strategy->nfa(i).step(
                    f.strategy->nfa(i).initial(), labels, cgs));
        }
        m.push_back(std::move(agent_mem));
    }
    return m;
}

MemoryVector memory_update(const MemoryVector& m, const std::vector<AtomId>& labels,
                           const FixedProfile& profile, const Cgs& cgs) {
    MemoryVector out;
    out.reserve(m.size());
    for (std::size_t a = 0; a < profile.size(); ++a) {
        std::vector<std::vector<int>> agent_mem;
        for (std::size_t i = 0; i < m[a].size(); ++i)
            agent_mem.push_back(profile[a].strategy->nfa(i).step(m[a][i], labels, cgs));
        out.push_back(std::move(agent_mem));
    }
    return out;
}

Mdp fix_coalition(const Cgs& cgs, const std::vector<AgentId>& coalition,
                  const FixedProfile& profile, StateId initial) {
    check_profile(cgs, coalition, profile);
    FixedProfile fixed = profile;
    std::sort(fixed.begin(), fixed.end(),
              [](const FixedAgent& a, const FixedAgent& b) { return a.agent < b.agent; });

    Mdp mdp;
    std::set<AgentId> coal;
    for (const auto& f : fixed) coal.insert(f.agent);
    for (AgentId a = 0; a < cgs.num_agents(); ++a)
        if (!coal.count(a)) mdp.free_agents_.push_back(a);

    // Product state space bound: |S| * prod over fixed pairs of 2^{|NFA|}.
    BigInt bound = cgs.num_states();
    for (const auto& f : fixed)
        if (f.strategy->setting() == Setting::Recall)
            for (std::size_t i = 0; i < f.strategy->pairs().size(); ++i)
                bound <<= f.strategy->nfa(i).num_states();

    std::map<ProductState, int> index;
    auto intern = [&](ProductState ps) {
        auto it = index.find(ps);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(mdp.states_.size());
        index.emplace(ps, id);
        mdp.labels_.push_back(cgs.labels(ps.base));
        mdp.states_.push_back(std::move(ps));
        mdp.choices_.emplace_back();
        return id;
    };

    mdp.initial_ = intern({initial, initial_memory(cgs.labels(initial), fixed, cgs)});

    for (int cur = 0; cur < static_cast<int>(mdp.states_.size()); ++cur) {
        // states_ grows during the loop; copy what we need.
        ProductState ps = mdp.states_[cur];
        StateId s = ps.base;

        std::vector<const Distribution*> coalition_dists;
        try {
            for (std::size_t a = 0; a < fixed.size(); ++a)
                coalition_dists.push_back(
                    &act_from_memory(*fixed[a].strategy, ps.memory[a], s, cgs));
        } catch (const NoMatchError& e) {
            throw InvalidStrategyError(e.what());
        }

        // Free joint actions: odometer over legal actions of free agents.
        std::vector<JointAction> free_choices;
        {
            JointAction cur_free(mdp.free_agents_.size());
            std::vector<std::size_t> idx(mdp.free_agents_.size(), 0);
            while (true) {
                for (std::size_t i = 0; i < mdp.free_agents_.size(); ++i)
                    cur_free[i] = cgs.legal(s, mdp.free_agents_[i])[idx[i]];
                free_choices.push_back(cur_free);
                int i = static_cast<int>(mdp.free_agents_.size()) - 1;
                while (i >= 0) {
                    if (++idx[i] < cgs.legal(s, mdp.free_agents_[i]).size()) break;
                    idx[i] = 0;
                    --i;
                }
                if (i < 0) break;
            }
        }

        for (const JointAction& free_action : free_choices) {
            std::map<int, Rational> acc;
            // Cross product over the coalition supports.
            std::vector<std::size_t> idx(fixed.size(), 0);
            while (true) {
                Rational w = 1;
                JointAction full(cgs.num_agents());
                for (std::size_t a = 0; a < fixed.size(); ++a) {
                    const auto& e = coalition_dists[a]->entries()[idx[a]];
                    full[fixed[a].agent] = e.first;
                    w *= e.second;
                }
                for (std::size_t i = 0; i < mdp.free_agents_.size(); ++i)
                    full[mdp.free_agents_[i]] = free_action[i];
                for (const auto& [t, p] : cgs.successors(s, full).entries()) {
                    ProductState nxt{t, memory_update(ps.memory, cgs.labels(t), fixed, cgs)};
                    acc[intern(std::move(nxt))] += w * p;
                }
                int a = static_cast<int>(fixed.size()) - 1;
                while (a >= 0) {
                    if (++idx[a] < coalition_dists[a]->size()) break;
                    idx[a] = 0;
                    --a;
                }
                if (a < 0) break;
            }
            std::vector<Distribution::Entry> entries(acc.begin(), acc.end());
            mdp.choices_[cur].push_back({free_action, Distribution::make(std::move(entries))});
        }

        if (BigInt(static_cast<int>(mdp.states_.size())) > bound)
            throw StateBudgetExceededError("product exceeded its state bound",
                                           bound.convert_to<std::size_t>());
    }
    return mdp;
}

MarkovChain fix_all(const Cgs& cgs, const FixedProfile& profile, StateId initial) {
    if (profile.size() != static_cast<std::size_t>(cgs.num_agents()))
        throw MissingAgentStrategyError("profile does not cover every agent");
    std::vector<AgentId> all;
    for (AgentId a = 0; a < cgs.num_agents(); ++a) all.push_back(a);
    Mdp mdp = fix_coalition(cgs, all, profile, initial);

    MarkovChain mc;
    mc.initial_ = mdp.initial();
    for (int i = 0; i < mdp.num_states(); ++i) {
        mc.states_.push_back(mdp.pstate(i));
        mc.labels_.push_back(mdp.labels(i));
        mc.rows_.push_back(mdp.choices(i).front().dist);
    }
    return mc;
}

std::string Mdp::state_name(int i, const Cgs& cgs) const {
    std::string n = cgs.state_names()[states_[i].base];
    std::string mem = memory_str(states_[i].memory);
    return mem.empty() ? n : n + "@" + mem;
}

std::string MarkovChain::state_name(int i, const Cgs& cgs) const {
    std::string n = cgs.state_names()[states_[i].base];
    std::string mem = memory_str(states_[i].memory);
    return mem.empty() ? n : n + "@" + mem;
}

void Mdp::export_explicit(std::ostream& out, const Cgs& cgs) const {
    for (int i = 0; i < num_states(); ++i) {
        for (std::size_t c = 0; c < choices_[i].size(); ++c) {
            std::string choice_name;
            for (std::size_t a = 0; a < free_agents_.size(); ++a) {
                if (a) choice_name += ",";
                choice_name += cgs.action_names()[choices_[i][c].free_action[a]];
            }
            if (choice_name.empty()) choice_name = "-";
            for (const auto& [t, p] : choices_[i][c].dist.entries())
                out << state_name(i, cgs) << " " << choice_name << " "
                    << state_name(t, cgs) << " " << p.str() << "\n";
        }
    }
}

void MarkovChain::export_explicit(std::ostream& out, const Cgs& cgs) const {
    for (int i = 0; i < num_states(); ++i)
        for (const auto& [t, p] : rows_[i].entries())
            out << state_name(i, cgs) << " - " << state_name(t, cgs) << " " << p.str()
                << "\n";
}

}  // namespace natpatl
