#pragma once

#include "natpatl/product.hpp"

namespace natpatl {

// Predicates are evaluated sets over product states, fixed before solving.
struct UntilObjective {
    std::vector<bool> safe;
    std::vector<bool> target;
};

enum class Optimize { Min, Max };

struct Interval {
    Rational lo, hi;
    bool contains(const Rational& v) const { return lo <= v && v <= hi; }
    Rational width() const { return hi - lo; }
};

// A minimal MDP view shared by product::Mdp and the omega-product: per
// state, per choice, a distribution as (target, probability) pairs. One
// choice per state makes it a chain.
using SimpleRow = std::vector<std::pair<int, Rational>>;
using SimpleMdp = std::vector<std::vector<SimpleRow>>;

SimpleMdp simple_view(const Mdp& mdp);
SimpleMdp simple_view(const MarkovChain& mc);

// ---------------------------------------------------------------------------
// Exact solvers
// ---------------------------------------------------------------------------

/// Pr(safe U target) for every state of a Markov chain: prob-0/prob-1 by
/// graph analysis, rational Gaussian elimination for the rest.
std::vector<Rational> solve_chain(const SimpleMdp& chain, const UntilObjective& obj);

/// Optimal Pr(safe U target) over all memoryless deterministic adversaries,
/// by qualitative precomputation plus exact policy iteration. The witness
/// policy (choice index per state) is written to `policy_out` if non-null.
std::vector<Rational> solve_mdp(const SimpleMdp& mdp, const UntilObjective& obj,
                                Optimize mode, std::vector<int>* policy_out = nullptr);

Prob mc_until(const MarkovChain& mc, const UntilObjective& obj, int from);
Prob mdp_until(const Mdp& mdp, const UntilObjective& obj, int from, Optimize mode,
               std::vector<int>* policy_out = nullptr);

/// One-step optimum of reaching `target` in exactly one transition.
Prob mdp_next(const Mdp& mdp, const std::vector<bool>& target, int from, Optimize mode);

/// Pr(G safe) via duality: 1 - Pr(F !safe), with min G = 1 - max F.
Prob mc_invariance(const MarkovChain& mc, const std::vector<bool>& safe, int from);
Prob mdp_invariance(const Mdp& mdp, const std::vector<bool>& safe, int from,
                    Optimize mode);

// ---------------------------------------------------------------------------
// Iterative mode: certified intervals by value iteration from below and
// above with qualitative clamps.
// ---------------------------------------------------------------------------

/// Interval of width <= tolerance containing the exact value. Throws
/// NonConvergenceError past the iteration cap.
Interval solve_iterative(const SimpleMdp& mdp, const UntilObjective& obj,
                         Optimize mode, int from, const Rational& tolerance,
                         int max_iterations = 1000000);

// Qualitative sets, exposed for reuse and tests.
std::vector<bool> prob0_max(const SimpleMdp& mdp, const UntilObjective& obj);
std::vector<bool> prob0_min(const SimpleMdp& mdp, const UntilObjective& obj);

}  // namespace natpatl
