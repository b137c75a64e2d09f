#pragma once

#include "natpatl/checker.hpp"

#include <iosfwd>
#include <map>

namespace natpatl {

// ---------------------------------------------------------------------------
// Multivariate polynomials over script variables, exact coefficients
// ---------------------------------------------------------------------------

class Polynomial {
public:
    // Monomial: sorted (variable, exponent) pairs; empty = constant term.
    using Monomial = std::vector<std::pair<int, int>>;

    Polynomial() = default;
    static Polynomial constant(const Rational& c);
    static Polynomial var(int v);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(const Rational& c) const;

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_value() const;  // 0 for the zero polynomial

    Rational evaluate(const std::vector<Rational>& assignment) const;

    const std::map<Monomial, Rational>& terms() const { return terms_; }

    /// SMT-LIB term form, e.g. (+ (* 1/2 x) (* 1 x y)).
    std::string smt2(const std::vector<std::string>& var_names) const;

private:
    std::map<Monomial, Rational> terms_;
};

// ---------------------------------------------------------------------------
// Constraint tree
// ---------------------------------------------------------------------------

struct RaNode;
using RaNodePtr = std::shared_ptr<const RaNode>;

struct RaNode {
    enum class Kind { Cmp, And, Or };
    enum class Op { Eq, Ge, Gt, Le, Lt };

    Kind kind;
    Op op = Op::Eq;          // Kind::Cmp
    Polynomial lhs, rhs;     // Kind::Cmp
    std::vector<RaNodePtr> children;

    static RaNodePtr cmp(Polynomial l, Op o, Polynomial r);
    static RaNodePtr conj(std::vector<RaNodePtr> kids);
    static RaNodePtr disj(std::vector<RaNodePtr> kids);
};

bool ra_eval(const RaNodePtr& n, const std::vector<Rational>& assignment);

// ---------------------------------------------------------------------------
// The emitted script
// ---------------------------------------------------------------------------

/// One strategy variable r_{x,s,a,q}: member x, model state s, action a, and
/// the accepting automaton state q of the pair's guard automaton.
struct VarMeta {
    std::string name;
    AgentId member;
    int skeleton;     // index into the skeleton disjunction
    int pair_index;   // q, reported as the pair's automaton state
    StateId state;
    ActionId action;
};

struct RealArithScript {
    std::vector<VarMeta> vars;
    // Distribution groups: per (member, skeleton, pair, state), the variable
    // indices that must be nonnegative and sum to one.
    std::vector<std::vector<int>> groups;
    // Equal-probability pairs across states accepted by the same regex.
    std::vector<std::pair<int, int>> equalities;
    // Variables pinned to zero (action unavailable somewhere in the pair's
    // firing region).
    std::vector<int> zeros;
    // The existential body: disjunction over strategy skeletons.
    RaNodePtr body;

    // Echo of the encoded query.
    std::string query;
    int num_skeletons = 0;

    /// Full SMT-LIB script (logic, declarations, well-formedness, body).
    std::string smt2() const;
    /// Companion metadata: one "name member skeleton pair state action" line
    /// per variable, resolved to model names.
    std::string metadata(const Cgs& cgs) const;

    /// Exact evaluation of the entire script under a full assignment,
    /// including the well-formedness constraints.
    bool eval(const std::vector<Rational>& assignment) const;

    /// Variable index lookup; -1 when absent.
    int find_var(AgentId member, int skeleton, int pair_index, StateId state,
                 ActionId action) const;
};

/// Encodes "exists a behavioral natural strategy profile of complexity <= k
/// for the query's coalition such that against every opponent policy the
/// body probability satisfies the threshold". Memoryless setting; the body
/// must be X phi, phi U psi or !(phi U psi) over coalition-free state
/// formulas. Skeletons come from the same canonical enumeration as the
/// checker. Throws BodyNotNatPatlError otherwise.
RealArithScript encode(const Cgs& cgs, const FormulaPtr& query, int k,
                       const std::vector<BoolPtr>& vocab);

/// Cheap constraint propagation: detects disjuncts whose threshold
/// constraint contradicts the Sigma r = 1 bounds (e.g. p > 1) and reports
/// the script unsatisfiable when every disjunct is contradicted.
bool propagate_trivially_unsat(const RealArithScript& script);

/// Assignment placing the witness profile's Dirac values on the matching
/// skeleton and canonical Dirac defaults everywhere else. Throws
/// InvalidStrategyError when no skeleton matches the witness guards.
std::vector<Rational> witness_assignment(const RealArithScript& script,
                                         const Cgs& cgs,
                                         const std::vector<NatStrategy>& profile);

/// All fully deterministic assignments of the script (every distribution
/// group Dirac, zeros respected, equalities respected).
std::vector<std::vector<Rational>> dirac_assignments(const RealArithScript& script);

}  // namespace natpatl
