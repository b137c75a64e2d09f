#include "natpatl/cgs.hpp"

#include <set>
#include <sstream>

namespace natpatl {

namespace {

int index_of(const std::vector<std::string>& names, const std::string& n) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n) return static_cast<int>(i);
    return -1;
}

std::string profile_str(const std::vector<std::string>& names) {
    std::string out = "(";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ",";
        out += names[i];
    }
    return out + ")";
}

}  // namespace

Distribution Distribution::make(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end());
    Rational sum = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i > 0 && entries[i].first == entries[i - 1].first)
            throw std::invalid_argument("duplicate distribution entry");
        if (entries[i].second <= 0)
            throw std::invalid_argument("non-positive distribution entry");
        sum += entries[i].second;
    }
    if (sum != 1)
        throw UnnormalizedDistributionError("distribution sums to " + sum.str());
    Distribution d;
    d.entries_ = std::move(entries);
    return d;
}

bool Cgs::profile_legal(StateId s, const JointAction& profile) const {
    if (profile.size() != static_cast<std::size_t>(num_agents())) return false;
    for (AgentId a = 0; a < num_agents(); ++a)
        if (!is_legal(s, a, profile[a])) return false;
    return true;
}

const Distribution& Cgs::successors(StateId s, const JointAction& profile) const {
    if (profile.size() != static_cast<std::size_t>(num_agents()))
        throw IllegalProfileError("joint action arity mismatch at state " + state_names_[s]);
    for (AgentId a = 0; a < num_agents(); ++a) {
        if (!is_legal(s, a, profile[a]))
            throw IllegalProfileError("action " + action_names_[profile[a]] +
                                      " illegal for agent " + agent_names_[a] +
                                      " at state " + state_names_[s]);
    }
    auto it = transitions_.find({s, profile});
    if (it == transitions_.end())
        throw ModelError("missing transition at state " + state_names_[s]);
    return it->second;
}

std::vector<JointAction> Cgs::legal_profiles(StateId s) const {
    std::vector<JointAction> out;
    JointAction cur(num_agents());
    // Odometer over per-agent legal action lists.
    std::vector<std::size_t> idx(num_agents(), 0);
    while (true) {
        for (AgentId a = 0; a < num_agents(); ++a) cur[a] = legality_[s][a][idx[a]];
        out.push_back(cur);
        int a = num_agents() - 1;
        while (a >= 0) {
            if (++idx[a] < legality_[s][a].size()) break;
            idx[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return out;
}

std::optional<StateId> Cgs::state_id(const std::string& name) const {
    int i = index_of(state_names_, name);
    return i < 0 ? std::nullopt : std::optional<StateId>(i);
}
std::optional<AgentId> Cgs::agent_id(const std::string& name) const {
    int i = index_of(agent_names_, name);
    return i < 0 ? std::nullopt : std::optional<AgentId>(i);
}
std::optional<ActionId> Cgs::action_id(const std::string& name) const {
    int i = index_of(action_names_, name);
    return i < 0 ? std::nullopt : std::optional<ActionId>(i);
}
std::optional<AtomId> Cgs::atom_id(const std::string& name) const {
    int i = index_of(atom_names_, name);
    return i < 0 ? std::nullopt : std::optional<AtomId>(i);
}

std::vector<ActionId> Cgs::globally_legal(AgentId a) const {
    std::vector<ActionId> out;
    for (ActionId act = 0; act < num_actions(); ++act) {
        bool everywhere = true;
        for (StateId s = 0; s < num_states(); ++s)
            if (!is_legal(s, a, act)) { everywhere = false; break; }
        if (everywhere) out.push_back(act);
    }
    return out;
}

std::vector<StateId> Cgs::unreachable_states() const {
    std::vector<bool> seen(num_states(), false);
    std::vector<StateId> stack{initial_};
    seen[initial_] = true;
    while (!stack.empty()) {
        StateId s = stack.back();
        stack.pop_back();
        for (const auto& [key, dist] : transitions_) {
            if (key.first != s) continue;
            for (const auto& [t, p] : dist.entries()) {
                if (!seen[t]) { seen[t] = true; stack.push_back(t); }
            }
        }
    }
    std::vector<StateId> out;
    for (StateId s = 0; s < num_states(); ++s)
        if (!seen[s]) out.push_back(s);
    return out;
}

Cgs validate_cgs(const RawModel& raw) {
    Cgs cgs;
    if (raw.states.empty()) throw ModelError("model declares no states");
    if (raw.agents.empty()) throw ModelError("model declares no agents");
    if (raw.actions.empty()) throw ModelError("model declares no actions");

    cgs.agent_names_ = raw.agents;
    cgs.atom_names_ = raw.atoms;
    cgs.action_names_ = raw.actions;
    for (const auto& [name, labels] : raw.states) {
        if (index_of(cgs.state_names_, name) >= 0)
            throw ModelError("duplicate state " + name);
        cgs.state_names_.push_back(name);
        std::vector<AtomId> lab;
        for (const auto& p : labels) {
            int id = index_of(raw.atoms, p);
            if (id < 0) throw ModelError("unknown proposition " + p + " labeling state " + name);
            lab.push_back(id);
        }
        std::sort(lab.begin(), lab.end());
        lab.erase(std::unique(lab.begin(), lab.end()), lab.end());
        cgs.labels_.push_back(std::move(lab));
    }

    int ns = cgs.num_states(), na = cgs.num_agents();
    cgs.legality_.assign(ns, std::vector<std::vector<ActionId>>(na));
    for (const auto& [sname, aname, acts] : raw.legality) {
        int s = index_of(cgs.state_names_, sname);
        if (s < 0) throw DanglingStateReferenceError("legality for unknown state " + sname);
        int a = index_of(cgs.agent_names_, aname);
        if (a < 0) throw ModelError("legality for unknown agent " + aname);
        for (const auto& act : acts) {
            int id = index_of(cgs.action_names_, act);
            if (id < 0) throw ModelError("unknown action " + act + " in legality of " + sname);
            cgs.legality_[s][a].push_back(id);
        }
        std::sort(cgs.legality_[s][a].begin(), cgs.legality_[s][a].end());
        auto& v = cgs.legality_[s][a];
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    for (StateId s = 0; s < ns; ++s)
        for (AgentId a = 0; a < na; ++a)
            if (cgs.legality_[s][a].empty())
                throw EmptyLegalityError("no legal action for agent " + cgs.agent_names_[a] +
                                         " at state " + cgs.state_names_[s]);

    for (const auto& [sname, actnames, weights] : raw.transitions) {
        int s = index_of(cgs.state_names_, sname);
        if (s < 0) throw DanglingStateReferenceError("transition from unknown state " + sname);
        if (actnames.size() != static_cast<std::size_t>(na))
            throw ModelError("transition profile arity mismatch at " + sname);
        JointAction profile(na);
        for (AgentId a = 0; a < na; ++a) {
            int id = index_of(cgs.action_names_, actnames[a]);
            if (id < 0) throw ModelError("unknown action " + actnames[a] + " at " + sname);
            profile[a] = id;
        }
        if (!cgs.profile_legal(s, profile))
            throw TransitionForIllegalProfileError("transition for illegal profile " +
                                                   profile_str(actnames) + " at state " + sname);
        Rational sum = 0;
        std::vector<Distribution::Entry> entries;
        for (const auto& [tname, p] : weights) {
            int t = index_of(cgs.state_names_, tname);
            if (t < 0)
                throw DanglingStateReferenceError("transition target " + tname +
                                                  " from state " + sname);
            sum += p;
            entries.emplace_back(t, p);
        }
        if (sum != 1)
            throw UnnormalizedDistributionError(
                "transition from " + sname + " under " + profile_str(actnames) +
                " sums to " + sum.str());
        auto key = std::make_pair(s, profile);
        if (cgs.transitions_.count(key))
            throw ModelError("duplicate transition at " + sname);
        cgs.transitions_[key] = Distribution::make(std::move(entries));
    }

    // Transitions must exist for exactly the componentwise-legal profiles.
    for (StateId s = 0; s < ns; ++s)
        for (const auto& profile : cgs.legal_profiles(s))
            if (!cgs.transitions_.count({s, profile}))
                throw ModelError("missing transition at state " + cgs.state_names_[s]);

    if (!raw.initial.empty()) {
        int s = index_of(cgs.state_names_, raw.initial);
        if (s < 0) throw DanglingStateReferenceError("unknown initial state " + raw.initial);
        cgs.initial_ = s;
    }
    return cgs;
}

History History::validated(std::vector<StateId> states, const Cgs& cgs) {
    History h(std::move(states));
    for (std::size_t i = 0; i + 1 < h.states_.size(); ++i) {
        StateId s = h.states_[i], t = h.states_[i + 1];
        bool connected = false;
        for (const auto& profile : cgs.legal_profiles(s)) {
            if (cgs.successors(s, profile).contains(t)) { connected = true; break; }
        }
        if (!connected)
            throw std::invalid_argument("history step " + cgs.state_names()[s] + " -> " +
                                        cgs.state_names()[t] + " has no legal move");
    }
    return h;
}

}  // namespace natpatl
