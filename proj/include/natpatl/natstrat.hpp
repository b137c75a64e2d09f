#pragma once

#include "natpatl/cgs.hpp"
#include "natpatl/formula.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace natpatl {

// ---------------------------------------------------------------------------
// Guard regexes: regular expressions over Bool(AP)
// ---------------------------------------------------------------------------

struct GuardRegex;
using RegexPtr = std::shared_ptr<const GuardRegex>;

struct GuardRegex {
    enum class Kind { Leaf, Concat, Choice, Star };

    Kind kind;
    BoolPtr leaf;        // Kind::Leaf
    RegexPtr lhs, rhs;   // Star uses lhs only

    static RegexPtr mk_leaf(BoolPtr f);
    static RegexPtr mk_concat(RegexPtr a, RegexPtr b);
    static RegexPtr mk_choice(RegexPtr a, RegexPtr b);
    static RegexPtr mk_star(RegexPtr a);

    /// T* -- the mandatory fallback guard in the recall setting.
    static RegexPtr mk_top_star();
};

/// |r|: leaves contribute their Boolean symbol count; each of ., +, *
/// contributes one symbol; parentheses are not counted.
int regex_symbol_count(const RegexPtr& r);

std::string print_regex(const RegexPtr& r);

/// Parses the strategy guard grammar: "." concat, "+" choice, "*" star,
/// "T" for the true guard, Boolean leaves per the logic grammar.
RegexPtr parse_regex(const std::string& text);

bool regex_equal(const RegexPtr& a, const RegexPtr& b);

// ---------------------------------------------------------------------------
// Guarded NFAs (Thompson construction, epsilon transitions eliminated)
// ---------------------------------------------------------------------------

class GuardNfa {
public:
    struct Transition {
        BoolPtr guard;
        int target;
    };

    int num_states() const { return static_cast<int>(transitions_.size()); }
    const std::vector<int>& initial() const { return initial_; }
    const std::vector<int>& accepting() const { return accepting_; }
    const std::vector<Transition>& transitions_from(int s) const { return transitions_[s]; }

    bool accepts_empty() const { return accepts_empty_; }

    /// One consumption step: all states reachable from `current` by a
    /// transition whose guard holds under `labels`.
    std::vector<int> step(const std::vector<int>& current,
                          const std::vector<AtomId>& labels, const Cgs& cgs) const;

    bool any_accepting(const std::vector<int>& set) const;

    /// Runs the automaton over the full history (one letter per state).
    bool accepts(const History& h, const Cgs& cgs) const;

    /// Guards labeling transitions into accepting states; over-approximates
    /// the possible last letters of accepted words.
    std::vector<BoolPtr> last_position_guards() const;

    friend GuardNfa compile_guard(const RegexPtr& r);

private:
    std::vector<int> initial_;
    std::vector<int> accepting_;
    std::vector<std::vector<Transition>> transitions_;
    bool accepts_empty_ = false;
};

/// Thompson-style construction; at most 2|r| states after epsilon removal.
GuardNfa compile_guard(const RegexPtr& r);

/// Direct consistency semantics: some word b in L(r) with |b| = |h| and
/// h[i] |= b[i] pointwise; computed via the compiled automaton.
bool consistent(const History& h, const RegexPtr& r, const Cgs& cgs);

// ---------------------------------------------------------------------------
// Natural strategies
// ---------------------------------------------------------------------------

enum class Setting { Memoryless, Recall };  // r / R

struct StrategyPair {
    RegexPtr guard;
    Distribution dist;  // over ActionId, support legal where the pair fires
};

class NatStrategy {
public:
    NatStrategy(AgentId agent, Setting setting, std::vector<StrategyPair> pairs);

    AgentId agent() const { return agent_; }
    Setting setting() const { return setting_; }
    const std::vector<StrategyPair>& pairs() const { return pairs_; }
    const GuardNfa& nfa(std::size_t pair_index) const { return compiled_[pair_index]; }

    bool deterministic() const;

    /// Checks the structural invariants against a model: memoryless guards
    /// have regex length 1, the final pair is (T*, Dirac) on a globally
    /// legal action, supports name existing actions.
    void validate(const Cgs& cgs, bool strict_availability = false) const;

    /// Best-effort support/legality lint; returns human-readable warnings.
    std::vector<std::string> lint(const Cgs& cgs) const;

private:
    AgentId agent_;
    Setting setting_;
    std::vector<StrategyPair> pairs_;
    std::vector<GuardNfa> compiled_;
};

/// c(sigma) = sum of guard symbol counts; distributions contribute 0.
int complexity(const NatStrategy& s);

/// Smallest index i with guard_i consistent with h (memoryless: guard holds
/// at last(h)) and support(dist_i) legal at last(h). Throws NoMatchError only
/// if the mandatory last-pair invariant was violated.
std::size_t match_index(const History& h, const NatStrategy& s, const Cgs& cgs);

/// Distribution of the matched pair.
const Distribution& act(const NatStrategy& s, const History& h, const Cgs& cgs);

/// Canonical deterministic strategies for `agent` with complexity <= k whose
/// guards are built from `vocab` leaves, ascending complexity then
/// lexicographic; duplicate-free under the canonical form (no pair is
/// language-subsumed by its predecessors). The visitor returns false to stop.
void enumerate_det(AgentId agent, int k, Setting setting,
                   const std::vector<BoolPtr>& vocab, const Cgs& cgs,
                   const std::function<bool(const NatStrategy&)>& visit);

/// Convenience: materialized enumeration.
std::vector<NatStrategy> enumerate_det_all(AgentId agent, int k, Setting setting,
                                           const std::vector<BoolPtr>& vocab,
                                           const Cgs& cgs);

/// Default guard vocabulary: T, literals over the model's atoms, and
/// conjunctions of two literals, canonicalized.
std::vector<BoolPtr> default_vocab(const Cgs& cgs);

/// All label minterms over the model's atoms (full conjunctions).
std::vector<BoolPtr> minterm_vocab(const Cgs& cgs);

std::string print_strategy(const NatStrategy& s, const Cgs& cgs);

}  // namespace natpatl
