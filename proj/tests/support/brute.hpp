#pragma once

// Direct semantics evaluator for small models, memoryless setting: coalition
// strategies are enumerated naively as raw guard/action pair lists, opponents
// as explicit state-to-action maps, and chain probabilities come from an
// elimination written here so nothing from the solver stack is reused.

#include "natpatl/checker.hpp"

#include <map>
#include <vector>

namespace natpatl::brute {

// A memoryless deterministic natural strategy, flattened to first-match
// semantics: ordered (guard, action) pairs ending in a (T, fallback) pair.
struct FlatStrategy {
    std::vector<std::pair<BoolPtr, ActionId>> pairs;

    ActionId act(StateId s, AgentId agent, const Cgs& cgs) const {
        for (const auto& [g, a] : pairs)
            if (eval_bool(g, s, cgs) && cgs.is_legal(s, agent, a)) return a;
        throw Error("flat strategy fell through its fallback");
    }
};

// Every pair list over the vocabulary with total guard cost <= k, including
// the mandatory fallback's single symbol. No canonicalization at all.
inline std::vector<FlatStrategy> naive_strategies(AgentId agent, int k,
                                                  const std::vector<BoolPtr>& vocab,
                                                  const Cgs& cgs) {
    std::vector<FlatStrategy> out;
    std::vector<std::pair<BoolPtr, ActionId>> prefix;
    std::vector<ActionId> fallback = cgs.globally_legal(agent);
    auto emit = [&]() {
        for (ActionId fa : fallback) {
            FlatStrategy f;
            f.pairs = prefix;
            f.pairs.emplace_back(BoolFormula::mk_true(), fa);
            out.push_back(std::move(f));
        }
    };
    std::function<void(int)> rec = [&](int used) {
        emit();
        for (const auto& g : vocab) {
            int cost = bool_symbol_count(g);
            if (used + cost + 1 > k) continue;
            for (ActionId a = 0; a < cgs.num_actions(); ++a) {
                prefix.emplace_back(g, a);
                rec(used + cost);
                prefix.pop_back();
            }
        }
    };
    rec(0);
    return out;
}

// Opponent behaviors: every map from states to legal actions, per agent.
inline std::vector<std::vector<ActionId>> action_maps(AgentId agent, const Cgs& cgs) {
    std::vector<std::vector<ActionId>> out{std::vector<ActionId>(cgs.num_states())};
    for (StateId s = 0; s < cgs.num_states(); ++s) {
        std::vector<std::vector<ActionId>> next;
        for (const auto& m : out)
            for (ActionId a : cgs.legal(s, agent)) {
                auto copy = m;
                copy[s] = a;
                next.push_back(std::move(copy));
            }
        out = std::move(next);
    }
    return out;
}

// Pr(safe U target) per state on an explicit chain, by unreachability
// analysis plus dense elimination over rationals.
inline std::vector<Rational> chain_values(
    const std::vector<std::vector<std::pair<StateId, Rational>>>& rows,
    const std::vector<bool>& safe, const std::vector<bool>& target) {
    int n = static_cast<int>(rows.size());
    std::vector<bool> can_reach(n, false);
    for (int s = 0; s < n; ++s) can_reach[s] = target[s];
    for (bool changed = true; changed;) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (can_reach[s] || !safe[s]) continue;
            for (const auto& [t, p] : rows[s])
                if (can_reach[t]) { can_reach[s] = true; changed = true; break; }
        }
    }
    // v = A v + b over the live non-target states, solved by substitution.
    std::vector<int> live, pos(n, -1);
    for (int s = 0; s < n; ++s)
        if (can_reach[s] && !target[s]) {
            pos[s] = static_cast<int>(live.size());
            live.push_back(s);
        }
    int m = static_cast<int>(live.size());
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1, 0));
    for (int i = 0; i < m; ++i) {
        a[i][i] = 1;
        for (const auto& [t, p] : rows[live[i]]) {
            if (target[t]) a[i][m] += p;
            else if (pos[t] >= 0) a[i][pos[t]] -= p;
        }
    }
    for (int c = 0; c < m; ++c) {
        int piv = -1;
        for (int r = c; r < m; ++r)
            if (a[r][c] != 0) { piv = r; break; }
        std::swap(a[c], a[piv]);
        for (int r = 0; r < m; ++r) {
            if (r == c || a[r][c] == 0) continue;
            Rational f = a[r][c] / a[c][c];
            for (int col = c; col <= m; ++col) a[r][col] -= f * a[c][col];
        }
    }
    std::vector<Rational> vals(n, 0);
    for (int s = 0; s < n; ++s)
        if (target[s]) vals[s] = 1;
    for (int i = 0; i < m; ++i) vals[live[i]] = a[i][m] / a[i][i];
    return vals;
}

// Bottom-up truth per state; coalition operators by exhaustive enumeration
// on both sides, realizing the existential/universal semantics directly.
class Evaluator {
public:
    Evaluator(const Cgs& cgs, const std::vector<BoolPtr>& vocab)
        : cgs_(cgs), vocab_(vocab) {}

    bool eval(const FormulaPtr& f, StateId s) { return row(f)[s]; }

private:
    const Cgs& cgs_;
    const std::vector<BoolPtr>& vocab_;
    std::map<std::string, std::vector<bool>> memo_;

    const std::vector<bool>& row(const FormulaPtr& f) {
        std::string key = print_formula(f);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        std::vector<bool> r(cgs_.num_states());
        switch (f->kind) {
            case Formula::Kind::True: r.assign(cgs_.num_states(), true); break;
            case Formula::Kind::Atom: {
                AtomId id = *cgs_.atom_id(f->atom);
                for (StateId s = 0; s < cgs_.num_states(); ++s)
                    r[s] = cgs_.has_label(s, id);
                break;
            }
            case Formula::Kind::Not: {
                auto sub = row(f->lhs);
                for (StateId s = 0; s < cgs_.num_states(); ++s) r[s] = !sub[s];
                break;
            }
            case Formula::Kind::And: {
                auto a = row(f->lhs), b = row(f->rhs);
                for (StateId s = 0; s < cgs_.num_states(); ++s) r[s] = a[s] && b[s];
                break;
            }
            case Formula::Kind::Or: {
                auto a = row(f->lhs), b = row(f->rhs);
                for (StateId s = 0; s < cgs_.num_states(); ++s) r[s] = a[s] || b[s];
                break;
            }
            case Formula::Kind::Coalition:
                for (StateId s = 0; s < cgs_.num_states(); ++s)
                    r[s] = coalition(f, s);
                break;
            default:
                throw Error("brute evaluator: temporal operator outside coalition");
        }
        return memo_.emplace(std::move(key), std::move(r)).first->second;
    }

    bool coalition(const FormulaPtr& node, StateId s0) {
        std::vector<AgentId> coal;
        for (const auto& name : node->coalition) coal.push_back(*cgs_.agent_id(name));
        std::sort(coal.begin(), coal.end());
        std::vector<AgentId> free;
        for (AgentId a = 0; a < cgs_.num_agents(); ++a)
            if (!std::binary_search(coal.begin(), coal.end(), a)) free.push_back(a);

        std::vector<std::vector<FlatStrategy>> coal_strats;
        for (AgentId a : coal)
            coal_strats.push_back(naive_strategies(
                a, static_cast<int>(node->complexity_bound), vocab_, cgs_));
        std::vector<std::vector<std::vector<ActionId>>> opp_maps;
        for (AgentId a : free) opp_maps.push_back(action_maps(a, cgs_));

        bool minimize = node->cmp == CmpOp::Ge || node->cmp == CmpOp::Gt;

        std::vector<std::size_t> ci(coal_strats.size(), 0);
        while (true) {
            bool first = true;
            Rational worst = 0;
            std::vector<std::size_t> oi(opp_maps.size(), 0);
            while (true) {
                Rational p = body_value(node, s0, coal, ci, coal_strats, free, oi,
                                        opp_maps);
                if (first || (minimize ? p < worst : p > worst)) worst = p;
                first = false;
                std::size_t j = 0;
                for (; j < oi.size(); ++j) {
                    if (++oi[j] < opp_maps[j].size()) break;
                    oi[j] = 0;
                }
                if (j == oi.size()) break;
            }
            if (cmp_holds(worst, node->cmp, node->threshold)) return true;
            std::size_t j = 0;
            for (; j < ci.size(); ++j) {
                if (++ci[j] < coal_strats[j].size()) break;
                ci[j] = 0;
            }
            if (j == ci.size()) break;
        }
        return false;
    }

    Rational body_value(const FormulaPtr& node, StateId s0,
                        const std::vector<AgentId>& coal,
                        const std::vector<std::size_t>& ci,
                        const std::vector<std::vector<FlatStrategy>>& coal_strats,
                        const std::vector<AgentId>& free,
                        const std::vector<std::size_t>& oi,
                        const std::vector<std::vector<std::vector<ActionId>>>& opp_maps) {
        // The fully fixed profile induces one chain over model states.
        std::vector<std::vector<std::pair<StateId, Rational>>> rows(cgs_.num_states());
        for (StateId s = 0; s < cgs_.num_states(); ++s) {
            JointAction joint(cgs_.num_agents());
            for (std::size_t i = 0; i < coal.size(); ++i)
                joint[coal[i]] = coal_strats[i][ci[i]].act(s, coal[i], cgs_);
            for (std::size_t i = 0; i < free.size(); ++i)
                joint[free[i]] = opp_maps[i][oi[i]][s];
            for (const auto& [t, p] : cgs_.successors(s, joint).entries())
                rows[s].emplace_back(t, p);
        }
        const FormulaPtr& body = node->body;
        if (body->kind == Formula::Kind::Next) {
            Rational p = 0;
            for (const auto& [t, q] : rows[s0])
                if (eval(body->lhs, t)) p += q;
            return p;
        }
        if (body->kind == Formula::Kind::Until) {
            std::vector<bool> safe(cgs_.num_states()), target(cgs_.num_states());
            for (StateId s = 0; s < cgs_.num_states(); ++s) {
                safe[s] = eval(body->lhs, s);
                target[s] = eval(body->rhs, s);
            }
            return chain_values(rows, safe, target)[s0];
        }
        throw Error("brute evaluator: unsupported body shape");
    }
};

inline bool eval(const Cgs& cgs, StateId s, const FormulaPtr& f,
                 const std::vector<BoolPtr>& vocab) {
    Evaluator ev(cgs, vocab);
    return ev.eval(f, s);
}

}  // namespace natpatl::brute
