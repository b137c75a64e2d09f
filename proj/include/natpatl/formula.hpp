#pragma once

#include "natpatl/cgs.hpp"
#include "natpatl/errors.hpp"
#include "natpatl/rational.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace natpatl {

// ---------------------------------------------------------------------------
// Boolean formulas over atomic propositions (strategy guards, Bool(AP))
// ---------------------------------------------------------------------------

struct BoolFormula;
using BoolPtr = std::shared_ptr<const BoolFormula>;

struct BoolFormula {
    enum class Kind { True, Atom, Not, And, Or };

    Kind kind;
    std::string atom;   // Kind::Atom
    BoolPtr lhs, rhs;   // Not uses lhs only

    static BoolPtr mk_true();
    static BoolPtr mk_atom(std::string name);
    static BoolPtr mk_not(BoolPtr f);
    static BoolPtr mk_and(BoolPtr a, BoolPtr b);
    static BoolPtr mk_or(BoolPtr a, BoolPtr b);
};

/// Standard inductive evaluation against val(s). Throws UnknownAtomError
/// for atoms outside the model's AP.
bool eval_bool(const BoolPtr& g, StateId s, const Cgs& cgs);

/// Evaluation against an explicit sorted label set (atom ids), with atoms
/// resolved through the given atom table.
bool eval_bool_labels(const BoolPtr& g, const std::vector<AtomId>& labels,
                      const Cgs& cgs);

/// Symbol count per the complexity measure: atoms, T, !, &, | each count 1;
/// parentheses are not counted.
int bool_symbol_count(const BoolPtr& g);

std::string print_bool(const BoolPtr& g);

/// Parses the guard Boolean grammar: atoms, T, !, &, |, parentheses.
BoolPtr parse_bool(const std::string& text);

/// Structural equality.
bool bool_equal(const BoolPtr& a, const BoolPtr& b);

// ---------------------------------------------------------------------------
// Comparison operators on probability thresholds
// ---------------------------------------------------------------------------

enum class CmpOp { Le, Lt, Gt, Ge };

/// Swaps strictness: conj(<=) = <, conj(<) = <=, conj(>) = >=, conj(>=) = >.
CmpOp conjugate(CmpOp op);

bool cmp_holds(const Rational& lhs, CmpOp op, const Rational& rhs);

std::string cmp_to_string(CmpOp op);

// ---------------------------------------------------------------------------
// NatPATL / NatPATL* formulas
// ---------------------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Kind { True, Atom, Or, And, Not, Next, Until, Coalition };

    Kind kind;
    std::string atom;      // Kind::Atom
    FormulaPtr lhs, rhs;   // Not/Next use lhs only; Until = lhs U rhs

    // Kind::Coalition
    std::vector<std::string> coalition;
    CmpOp cmp = CmpOp::Ge;
    Rational threshold;
    long complexity_bound = 1;
    FormulaPtr body;

    static FormulaPtr mk_true();
    static FormulaPtr mk_atom(std::string name);
    static FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
    static FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
    static FormulaPtr mk_not(FormulaPtr f);
    static FormulaPtr mk_next(FormulaPtr f);
    static FormulaPtr mk_until(FormulaPtr a, FormulaPtr b);
    static FormulaPtr mk_coalition(std::vector<std::string> agents, CmpOp cmp,
                                   Rational d, long k, FormulaPtr body);

    // Sugar, expanded at construction: F f = T U f, G f = !(T U !f).
    static FormulaPtr mk_eventually(FormulaPtr f);
    static FormulaPtr mk_globally(FormulaPtr f);
};

/// Parses the formula grammar shared with the CLI:
///   coalition "<<a,b>>[cmp d, k=N] body", cmp in {<=, <, >, >=},
///   temporal X, U (infix), F, G; Boolean &, |, !, T; parentheses.
/// F/G are expanded; thresholds may be fractions or decimals (converted
/// exactly). Agents are checked against the model when one is supplied.
FormulaPtr parse_formula(const std::string& text, const Cgs* cgs = nullptr);

std::string print_formula(const FormulaPtr& f);

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

enum class Fragment { NatPatl, NatPatlStar };
enum class Parity { Even, Odd };

struct Classification {
    Fragment fragment;
    bool positive;  // no Not node occurs (And permitted)
    // Parity of each subformula occurrence, in preorder, flipping at Not.
    std::vector<std::pair<FormulaPtr, Parity>> parity;
};

Classification classify(const FormulaPtr& f);

}  // namespace natpatl
