#include "natpatl/probsolve.hpp"

namespace natpatl {

SimpleMdp simple_view(const Mdp& mdp) {
    SimpleMdp out(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s)
        for (const auto& c : mdp.choices(s)) {
            SimpleRow row;
            for (const auto& [t, p] : c.dist.entries()) row.emplace_back(t, p);
            out[s].push_back(std::move(row));
        }
    return out;
}

SimpleMdp simple_view(const MarkovChain& mc) {
    SimpleMdp out(mc.num_states());
    for (int s = 0; s < mc.num_states(); ++s) {
        SimpleRow row;
        for (const auto& [t, p] : mc.row(s).entries()) row.emplace_back(t, p);
        out[s].push_back(std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Qualitative analysis
// ---------------------------------------------------------------------------

std::vector<bool> prob0_max(const SimpleMdp& mdp, const UntilObjective& obj) {
    int n = static_cast<int>(mdp.size());
    // R: states from which some adversary reaches target through safe
    // states with positive probability.
    std::vector<bool> reach(n, false);
    for (int s = 0; s < n; ++s) reach[s] = obj.target[s];
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (reach[s] || !obj.safe[s]) continue;
            for (const auto& row : mdp[s]) {
                for (const auto& [t, p] : row)
                    if (reach[t]) { reach[s] = true; changed = true; break; }
                if (reach[s]) break;
            }
        }
    }
    std::vector<bool> out(n);
    for (int s = 0; s < n; ++s) out[s] = !reach[s];
    return out;
}

std::vector<bool> prob0_min(const SimpleMdp& mdp, const UntilObjective& obj) {
    int n = static_cast<int>(mdp.size());
    // R: states forced to hit target with positive probability under every
    // adversary; the complement can be steered to probability exactly 0.
    std::vector<bool> forced(n, false);
    for (int s = 0; s < n; ++s) forced[s] = obj.target[s];
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (forced[s] || !obj.safe[s]) continue;
            bool all = true;
            for (const auto& row : mdp[s]) {
                bool some = false;
                for (const auto& [t, p] : row)
                    if (forced[t]) { some = true; break; }
                if (!some) { all = false; break; }
            }
            if (all) { forced[s] = true; changed = true; }
        }
    }
    std::vector<bool> out(n);
    for (int s = 0; s < n; ++s) out[s] = !forced[s];
    return out;
}

namespace {

// Chain prob-1 states for (safe U target), given the chain's prob-0 set.
std::vector<bool> chain_prob1(const SimpleMdp& chain, const UntilObjective& obj,
                              const std::vector<bool>& prob0) {
    int n = static_cast<int>(chain.size());
    std::vector<bool> bad(n), can_reach_bad(n);
    for (int s = 0; s < n; ++s) bad[s] = prob0[s] || (!obj.safe[s] && !obj.target[s]);
    can_reach_bad = bad;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (can_reach_bad[s] || obj.target[s]) continue;
            for (const auto& [t, p] : chain[s][0])
                if (can_reach_bad[t]) { can_reach_bad[s] = true; changed = true; break; }
        }
    }
    std::vector<bool> out(n);
    for (int s = 0; s < n; ++s) out[s] = !can_reach_bad[s];
    return out;
}

// Exact Gaussian elimination for Ax = b.
std::vector<Rational> gauss(std::vector<std::vector<Rational>> a,
                            std::vector<Rational> b) {
    int n = static_cast<int>(a.size());
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (a[r][col] != 0) { pivot = r; break; }
        if (pivot < 0) throw Error("singular linear system in exact solver");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rational f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

SimpleMdp induced_chain(const SimpleMdp& mdp, const std::vector<int>& policy) {
    SimpleMdp chain(mdp.size());
    for (std::size_t s = 0; s < mdp.size(); ++s) chain[s].push_back(mdp[s][policy[s]]);
    return chain;
}

Rational lookahead(const SimpleRow& row, const std::vector<Rational>& vals) {
    Rational v = 0;
    for (const auto& [t, p] : row) v += p * vals[t];
    return v;
}

}  // namespace

std::vector<Rational> solve_chain(const SimpleMdp& chain, const UntilObjective& obj) {
    int n = static_cast<int>(chain.size());
    std::vector<bool> prob0 = prob0_max(chain, obj);
    std::vector<bool> prob1 = chain_prob1(chain, obj, prob0);

    std::vector<Rational> vals(n, 0);
    std::vector<int> unknown;
    std::vector<int> pos(n, -1);
    for (int s = 0; s < n; ++s) {
        if (prob1[s]) {
            vals[s] = 1;
        } else if (!prob0[s]) {
            pos[s] = static_cast<int>(unknown.size());
            unknown.push_back(s);
        }
    }
    if (unknown.empty()) return vals;

    int m = static_cast<int>(unknown.size());
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m, 0));
    std::vector<Rational> b(m, 0);
    for (int i = 0; i < m; ++i) {
        int s = unknown[i];
        a[i][i] = 1;
        for (const auto& [t, p] : chain[s][0]) {
            if (prob1[t]) b[i] += p;
            else if (pos[t] >= 0) a[i][pos[t]] -= p;
        }
    }
    std::vector<Rational> x = gauss(std::move(a), std::move(b));
    for (int i = 0; i < m; ++i) vals[unknown[i]] = x[i];
    return vals;
}

std::vector<Rational> solve_mdp(const SimpleMdp& mdp, const UntilObjective& obj,
                                Optimize mode, std::vector<int>* policy_out) {
    int n = static_cast<int>(mdp.size());
    // For the minimizing adversary, states where probability 0 is forceable
    // must be clamped up front; policy iteration alone can stall on them.
    std::vector<bool> clamp0 =
        mode == Optimize::Min ? prob0_min(mdp, obj) : prob0_max(mdp, obj);
    UntilObjective eff = obj;
    for (int s = 0; s < n; ++s)
        if (clamp0[s]) eff.safe[s] = false;

    std::vector<int> policy(n, 0);
    if (mode == Optimize::Min) {
        // Make the witness achieve probability 0 where it is forceable: pick
        // the first choice whose successors all stay inside the clamp.
        for (int s = 0; s < n; ++s) {
            if (!clamp0[s] || !obj.safe[s] || obj.target[s]) continue;
            for (int c = 0; c < static_cast<int>(mdp[s].size()); ++c) {
                bool stays = true;
                for (const auto& [t, p] : mdp[s][c])
                    if (!clamp0[t]) { stays = false; break; }
                if (stays) { policy[s] = c; break; }
            }
        }
    }
    std::vector<Rational> vals;
    for (int iter = 0;; ++iter) {
        if (iter > 10000) throw Error("policy iteration failed to terminate");
        vals = solve_chain(induced_chain(mdp, policy), eff);
        bool improved = false;
        for (int s = 0; s < n; ++s) {
            if (clamp0[s] || eff.target[s] || !eff.safe[s]) continue;
            Rational cur = lookahead(mdp[s][policy[s]], vals);
            int best = policy[s];
            Rational best_val = cur;
            for (int c = 0; c < static_cast<int>(mdp[s].size()); ++c) {
                Rational v = lookahead(mdp[s][c], vals);
                bool better = mode == Optimize::Max ? v > best_val : v < best_val;
                if (better) { best = c; best_val = v; }
            }
            if (best != policy[s]) { policy[s] = best; improved = true; }
        }
        if (!improved) break;
    }
    if (policy_out) *policy_out = policy;
    return vals;
}

Prob mc_until(const MarkovChain& mc, const UntilObjective& obj, int from) {
    return Prob(solve_chain(simple_view(mc), obj)[from]);
}

Prob mdp_until(const Mdp& mdp, const UntilObjective& obj, int from, Optimize mode,
               std::vector<int>* policy_out) {
    return Prob(solve_mdp(simple_view(mdp), obj, mode, policy_out)[from]);
}

Prob mdp_next(const Mdp& mdp, const std::vector<bool>& target, int from,
              Optimize mode) {
    bool first = true;
    Rational best = 0;
    for (const auto& c : mdp.choices(from)) {
        Rational v = 0;
        for (const auto& [t, p] : c.dist.entries())
            if (target[t]) v += p;
        if (first || (mode == Optimize::Max ? v > best : v < best)) best = v;
        first = false;
    }
    return Prob(best);
}

namespace {

UntilObjective invariance_dual(const std::vector<bool>& safe) {
    UntilObjective obj;
    obj.safe.assign(safe.size(), true);
    obj.target.resize(safe.size());
    for (std::size_t s = 0; s < safe.size(); ++s) obj.target[s] = !safe[s];
    return obj;
}

}  // namespace

Prob mc_invariance(const MarkovChain& mc, const std::vector<bool>& safe, int from) {
    return Prob(1 - mc_until(mc, invariance_dual(safe), from).value());
}

Prob mdp_invariance(const Mdp& mdp, const std::vector<bool>& safe, int from,
                    Optimize mode) {
    Optimize dual = mode == Optimize::Min ? Optimize::Max : Optimize::Min;
    return Prob(1 - mdp_until(mdp, invariance_dual(safe), from, dual).value());
}

Interval solve_iterative(const SimpleMdp& mdp, const UntilObjective& obj,
                         Optimize mode, int from, const Rational& tolerance,
                         int max_iterations) {
    int n = static_cast<int>(mdp.size());
    std::vector<bool> clamp0 =
        mode == Optimize::Min ? prob0_min(mdp, obj) : prob0_max(mdp, obj);
    std::vector<Rational> lo(n, 0), hi(n, 1);
    for (int s = 0; s < n; ++s) {
        if (obj.target[s]) { lo[s] = 1; continue; }
        if (clamp0[s] || !obj.safe[s]) hi[s] = 0;
    }
    auto step = [&](const std::vector<Rational>& v) {
        std::vector<Rational> out = v;
        for (int s = 0; s < n; ++s) {
            if (obj.target[s] || clamp0[s] || !obj.safe[s]) continue;
            bool first = true;
            Rational best = 0;
            for (const auto& row : mdp[s]) {
                Rational x = lookahead(row, v);
                if (first || (mode == Optimize::Max ? x > best : x < best)) best = x;
                first = false;
            }
            out[s] = best;
        }
        return out;
    };
    for (int it = 0; it < max_iterations; ++it) {
        if (hi[from] - lo[from] <= tolerance) return {lo[from], hi[from]};
        lo = step(lo);
        hi = step(hi);
    }
    throw NonConvergenceError("iterative solver did not reach the tolerance");
}

}  // namespace natpatl
