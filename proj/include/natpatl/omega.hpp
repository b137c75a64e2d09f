#pragma once

#include "natpatl/probsolve.hpp"

#include <cstdint>
#include <memory>

namespace natpatl {

// ---------------------------------------------------------------------------
// LTL over pseudo-atoms (already-decided state subformulas), kept in
// negation normal form by construction.
// ---------------------------------------------------------------------------

struct Ltl;
using LtlPtr = std::shared_ptr<const Ltl>;

struct Ltl {
    enum class Kind { True, False, Atom, NotAtom, And, Or, Next, Until, Release };

    Kind kind;
    int atom = -1;  // Atom / NotAtom
    LtlPtr lhs, rhs;

    static LtlPtr tt();
    static LtlPtr ff();
    static LtlPtr atom_(int id);
    static LtlPtr natom(int id);
    static LtlPtr and_(LtlPtr a, LtlPtr b);
    static LtlPtr or_(LtlPtr a, LtlPtr b);
    static LtlPtr next(LtlPtr a);
    static LtlPtr until(LtlPtr a, LtlPtr b);
    static LtlPtr release(LtlPtr a, LtlPtr b);

    /// Negation, pushed inward (the result stays in NNF).
    static LtlPtr negate(const LtlPtr& f);

    static LtlPtr eventually(LtlPtr a) { return until(tt(), std::move(a)); }
    static LtlPtr always(LtlPtr a) { return release(ff(), std::move(a)); }
};

std::string print_ltl(const LtlPtr& f);
int ltl_size(const LtlPtr& f);

// A letter is a bitmask over pseudo-atom ids.
using Letter = std::uint32_t;

/// Direct LTL semantics on the ultimately periodic word prefix.period^w,
/// evaluated at position 0. The primary correctness oracle of this module.
bool ltl_holds_lasso(const LtlPtr& f, const std::vector<Letter>& prefix,
                     const std::vector<Letter>& period);

// ---------------------------------------------------------------------------
// Automata
// ---------------------------------------------------------------------------

struct Nba {
    int num_atoms = 0;
    int num_states = 0;
    std::vector<int> initial;
    std::vector<bool> accepting;
    // [state][letter] -> successor states
    std::vector<std::vector<std::vector<int>>> trans;
};

struct Dra {
    struct RabinPair {
        std::vector<bool> avoid;   // E_i: visited finitely (here: not at all in inf)
        std::vector<bool> repeat;  // F_i: visited infinitely
    };
    int num_atoms = 0;
    int num_states = 0;
    int initial = 0;
    std::vector<std::vector<int>> trans;  // [state][letter], complete
    std::vector<RabinPair> pairs;
};

/// Closure-valuation construction plus degeneralization.
Nba ltl_to_nba(const LtlPtr& f, int num_atoms);

/// Safra determinization. Throws StateBudgetExceededError past the budget.
Dra nba_to_dra(const Nba& n, std::size_t budget = 100000);

bool nba_accepts_lasso(const Nba& n, const std::vector<Letter>& prefix,
                       const std::vector<Letter>& period);
bool dra_accepts_lasso(const Dra& d, const std::vector<Letter>& prefix,
                       const std::vector<Letter>& period);

/// Optional dump in a simple ω-automaton exchange format.
void dra_export(const Dra& d, std::ostream& out);

// ---------------------------------------------------------------------------
// MDP x DRA analysis
// ---------------------------------------------------------------------------

/// Maximal end components of the sub-MDP induced by `alive` states; each
/// component is a sorted state list.
std::vector<std::vector<int>> max_end_components(const SimpleMdp& m,
                                                 std::vector<bool> alive);

/// Optimal probability that the label word of the play is accepted by the
/// Dra. `state_letter` gives each product state's pseudo-atom letter.
Prob mdp_omega(const Mdp& mdp, const Dra& d, const std::vector<Letter>& state_letter,
               int from, Optimize mode, std::size_t budget = 100000);

/// Same, on a raw SimpleMdp (used by tests and the checker).
Prob mdp_omega_simple(const SimpleMdp& m, const Dra& d,
                      const std::vector<Letter>& state_letter, int from,
                      Optimize mode, std::size_t budget = 100000);

}  // namespace natpatl
