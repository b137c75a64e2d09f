#include "natpatl/natstrat.hpp"

#include <cctype>
#include <map>
#include <set>

namespace natpatl {

// ---------------------------------------------------------------------------
// Regex constructors, counting, printing
// ---------------------------------------------------------------------------

RegexPtr GuardRegex::mk_leaf(BoolPtr f) {
    return std::make_shared<GuardRegex>(GuardRegex{Kind::Leaf, std::move(f), nullptr, nullptr});
}
RegexPtr GuardRegex::mk_concat(RegexPtr a, RegexPtr b) {
    return std::make_shared<GuardRegex>(
        GuardRegex{Kind::Concat, nullptr, std::move(a), std::move(b)});
}
RegexPtr GuardRegex::mk_choice(RegexPtr a, RegexPtr b) {
    return std::make_shared<GuardRegex>(
        GuardRegex{Kind::Choice, nullptr, std::move(a), std::move(b)});
}
RegexPtr GuardRegex::mk_star(RegexPtr a) {
    return std::make_shared<GuardRegex>(GuardRegex{Kind::Star, nullptr, std::move(a), nullptr});
}
RegexPtr GuardRegex::mk_top_star() {
    return mk_star(mk_leaf(BoolFormula::mk_true()));
}

int regex_symbol_count(const RegexPtr& r) {
    switch (r->kind) {
        case GuardRegex::Kind::Leaf: return bool_symbol_count(r->leaf);
        case GuardRegex::Kind::Concat:
        case GuardRegex::Kind::Choice:
            return 1 + regex_symbol_count(r->lhs) + regex_symbol_count(r->rhs);
        case GuardRegex::Kind::Star: return 1 + regex_symbol_count(r->lhs);
    }
    return 0;
}

namespace {

// Precedence: + = 1, . = 2, * = 3.
void print_regex_rec(const RegexPtr& r, int parent_prec, std::string& out) {
    switch (r->kind) {
        case GuardRegex::Kind::Leaf: {
            bool atomic = r->leaf->kind == BoolFormula::Kind::Atom ||
                          r->leaf->kind == BoolFormula::Kind::True;
            if (atomic) {
                out += print_bool(r->leaf);
            } else {
                out += "(" + print_bool(r->leaf) + ")";
            }
            return;
        }
        case GuardRegex::Kind::Concat: {
            bool paren = 2 < parent_prec;
            if (paren) out += "(";
            print_regex_rec(r->lhs, 3, out);
            out += " . ";
            print_regex_rec(r->rhs, 2, out);
            if (paren) out += ")";
            return;
        }
        case GuardRegex::Kind::Choice: {
            bool paren = 1 < parent_prec;
            if (paren) out += "(";
            print_regex_rec(r->lhs, 2, out);
            out += " + ";
            print_regex_rec(r->rhs, 1, out);
            if (paren) out += ")";
            return;
        }
        case GuardRegex::Kind::Star: {
            if (r->lhs->kind == GuardRegex::Kind::Leaf) {
                print_regex_rec(r->lhs, 4, out);
            } else {
                out += "(";
                print_regex_rec(r->lhs, 0, out);
                out += ")";
            }
            out += "*";
            return;
        }
    }
}

}  // namespace

std::string print_regex(const RegexPtr& r) {
    std::string out;
    print_regex_rec(r, 0, out);
    return out;
}

bool regex_equal(const RegexPtr& a, const RegexPtr& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    if (a->kind == GuardRegex::Kind::Leaf) return bool_equal(a->leaf, b->leaf);
    if (a->lhs && !regex_equal(a->lhs, b->lhs)) return false;
    if (a->rhs && !regex_equal(a->rhs, b->rhs)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Regex parser (tokens: ident, T, !, &, |, ., +, *, parentheses)
// ---------------------------------------------------------------------------

namespace {

struct RTok {
    enum class Kind { Ident, Not, And, Or, Dot, Plus, Star, LParen, RParen, End };
    Kind kind;
    std::string text;
    std::size_t pos;
};

std::vector<RTok> regex_tokens(const std::string& text) {
    std::vector<RTok> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        switch (c) {
            case '!': out.push_back({RTok::Kind::Not, "!", i}); ++i; continue;
            case '&': out.push_back({RTok::Kind::And, "&", i}); ++i; continue;
            case '|': out.push_back({RTok::Kind::Or, "|", i}); ++i; continue;
            case '.': out.push_back({RTok::Kind::Dot, ".", i}); ++i; continue;
            case '+': out.push_back({RTok::Kind::Plus, "+", i}); ++i; continue;
            case '*': out.push_back({RTok::Kind::Star, "*", i}); ++i; continue;
            case '(': out.push_back({RTok::Kind::LParen, "(", i}); ++i; continue;
            case ')': out.push_back({RTok::Kind::RParen, ")", i}); ++i; continue;
            default: break;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            out.push_back({RTok::Kind::Ident, text.substr(i, j - i), i});
            i = j;
            continue;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "' in guard", i);
    }
    out.push_back({RTok::Kind::End, "", text.size()});
    return out;
}

class RegexParser {
public:
    explicit RegexParser(std::vector<RTok> toks) : toks_(std::move(toks)) {}

    RegexPtr parse() {
        RegexPtr r = parse_choice();
        if (toks_[i_].kind != RTok::Kind::End)
            throw SyntaxError("trailing input in guard", toks_[i_].pos);
        return r;
    }

private:
    RegexPtr parse_choice() {
        RegexPtr r = parse_concat();
        if (toks_[i_].kind == RTok::Kind::Plus) {
            ++i_;
            return GuardRegex::mk_choice(r, parse_choice());
        }
        return r;
    }

    RegexPtr parse_concat() {
        RegexPtr r = parse_starred();
        if (toks_[i_].kind == RTok::Kind::Dot) {
            ++i_;
            return GuardRegex::mk_concat(r, parse_concat());
        }
        return r;
    }

    RegexPtr parse_starred() {
        RegexPtr r = parse_primary();
        while (toks_[i_].kind == RTok::Kind::Star) {
            ++i_;
            r = GuardRegex::mk_star(r);
        }
        return r;
    }

    // A parenthesized group is first tried as a Boolean leaf; on failure it
    // is re-parsed as a regex group.
    RegexPtr parse_primary() {
        if (toks_[i_].kind == RTok::Kind::LParen) {
            std::size_t save = i_;
            try {
                return GuardRegex::mk_leaf(parse_bool_or());
            } catch (const SyntaxError&) {
                i_ = save;
            }
            ++i_;  // (
            RegexPtr r = parse_choice();
            if (toks_[i_].kind != RTok::Kind::RParen)
                throw SyntaxError("expected ) in guard", toks_[i_].pos);
            ++i_;
            return r;
        }
        return GuardRegex::mk_leaf(parse_bool_or());
    }

    BoolPtr parse_bool_or() {
        BoolPtr f = parse_bool_and();
        while (toks_[i_].kind == RTok::Kind::Or) {
            ++i_;
            f = BoolFormula::mk_or(f, parse_bool_and());
        }
        return f;
    }

    BoolPtr parse_bool_and() {
        BoolPtr f = parse_bool_unary();
        while (toks_[i_].kind == RTok::Kind::And) {
            ++i_;
            f = BoolFormula::mk_and(f, parse_bool_unary());
        }
        return f;
    }

    BoolPtr parse_bool_unary() {
        const RTok& t = toks_[i_];
        switch (t.kind) {
            case RTok::Kind::Not:
                ++i_;
                return BoolFormula::mk_not(parse_bool_unary());
            case RTok::Kind::LParen: {
                ++i_;
                BoolPtr f = parse_bool_or();
                if (toks_[i_].kind != RTok::Kind::RParen)
                    throw SyntaxError("expected ) in guard formula", toks_[i_].pos);
                ++i_;
                return f;
            }
            case RTok::Kind::Ident: {
                ++i_;
                if (t.text == "T") return BoolFormula::mk_true();
                return BoolFormula::mk_atom(t.text);
            }
            default:
                throw SyntaxError("expected guard formula", t.pos);
        }
    }

    std::vector<RTok> toks_;
    std::size_t i_ = 0;
};

}  // namespace

RegexPtr parse_regex(const std::string& text) {
    return RegexParser(regex_tokens(text)).parse();
}

// ---------------------------------------------------------------------------
// Thompson construction with epsilon elimination
// ---------------------------------------------------------------------------

namespace {

struct ThompsonNfa {
    // Per state: guarded edges and epsilon edges.
    std::vector<std::vector<GuardNfa::Transition>> guarded;
    std::vector<std::vector<int>> eps;

    int add_state() {
        guarded.emplace_back();
        eps.emplace_back();
        return static_cast<int>(guarded.size()) - 1;
    }
};

struct Frag {
    int start, accept;
};

Frag build(ThompsonNfa& nfa, const RegexPtr& r) {
    switch (r->kind) {
        case GuardRegex::Kind::Leaf: {
            int s = nfa.add_state(), t = nfa.add_state();
            nfa.guarded[s].push_back({r->leaf, t});
            return {s, t};
        }
        case GuardRegex::Kind::Concat: {
            Frag a = build(nfa, r->lhs), b = build(nfa, r->rhs);
            nfa.eps[a.accept].push_back(b.start);
            return {a.start, b.accept};
        }
        case GuardRegex::Kind::Choice: {
            Frag a = build(nfa, r->lhs), b = build(nfa, r->rhs);
            int s = nfa.add_state(), t = nfa.add_state();
            nfa.eps[s].push_back(a.start);
            nfa.eps[s].push_back(b.start);
            nfa.eps[a.accept].push_back(t);
            nfa.eps[b.accept].push_back(t);
            return {s, t};
        }
        case GuardRegex::Kind::Star: {
            Frag a = build(nfa, r->lhs);
            int s = nfa.add_state();
            nfa.eps[s].push_back(a.start);
            nfa.eps[a.accept].push_back(s);
            return {s, s};
        }
    }
    throw Error("unreachable regex kind");
}

std::vector<int> eps_closure(const ThompsonNfa& nfa, int s) {
    std::vector<int> out{s};
    std::vector<bool> seen(nfa.eps.size(), false);
    seen[s] = true;
    std::vector<int> stack{s};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : nfa.eps[u]) {
            if (!seen[v]) {
                seen[v] = true;
                out.push_back(v);
                stack.push_back(v);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

GuardNfa compile_guard(const RegexPtr& r) {
    ThompsonNfa tn;
    Frag f = build(tn, r);
    int n = static_cast<int>(tn.guarded.size());

    GuardNfa out;
    out.transitions_.resize(n);
    std::vector<std::vector<int>> closures(n);
    for (int s = 0; s < n; ++s) closures[s] = eps_closure(tn, s);

    // Fold epsilon closures into the outgoing transitions; a state accepts
    // if its closure contains the Thompson accept state.
    for (int s = 0; s < n; ++s) {
        for (int u : closures[s])
            for (const auto& tr : tn.guarded[u]) out.transitions_[s].push_back(tr);
        if (std::binary_search(closures[s].begin(), closures[s].end(), f.accept))
            out.accepting_.push_back(s);
    }
    out.initial_.push_back(f.start);
    out.accepts_empty_ =
        std::binary_search(closures[f.start].begin(), closures[f.start].end(), f.accept);
    return out;
}

std::vector<int> GuardNfa::step(const std::vector<int>& current,
                                const std::vector<AtomId>& labels, const Cgs& cgs) const {
    std::vector<int> out;
    for (int s : current)
        for (const auto& tr : transitions_[s])
            if (eval_bool_labels(tr.guard, labels, cgs)) out.push_back(tr.target);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool GuardNfa::any_accepting(const std::vector<int>& set) const {
    for (int s : set)
        if (std::binary_search(accepting_.begin(), accepting_.end(), s)) return true;
    return false;
}

bool GuardNfa::accepts(const History& h, const Cgs& cgs) const {
    std::vector<int> set = initial_;
    for (StateId s : h.states()) {
        set = step(set, cgs.labels(s), cgs);
        if (set.empty()) return false;
    }
    return any_accepting(set);
}

std::vector<BoolPtr> GuardNfa::last_position_guards() const {
    std::vector<BoolPtr> out;
    for (const auto& from : transitions_)
        for (const auto& tr : from)
            if (std::binary_search(accepting_.begin(), accepting_.end(), tr.target))
                out.push_back(tr.guard);
    return out;
}

bool consistent(const History& h, const RegexPtr& r, const Cgs& cgs) {
    return compile_guard(r).accepts(h, cgs);
}

// ---------------------------------------------------------------------------
// NatStrategy
// ---------------------------------------------------------------------------

NatStrategy::NatStrategy(AgentId agent, Setting setting, std::vector<StrategyPair> pairs)
    : agent_(agent), setting_(setting), pairs_(std::move(pairs)) {
    if (pairs_.empty()) throw InvalidStrategyError("strategy has no pairs");
    compiled_.reserve(pairs_.size());
    for (const auto& p : pairs_) compiled_.push_back(compile_guard(p.guard));
}

bool NatStrategy::deterministic() const {
    for (const auto& p : pairs_)
        if (!p.dist.is_dirac()) return false;
    return true;
}

void NatStrategy::validate(const Cgs& cgs, bool strict_availability) const {
    if (agent_ < 0 || agent_ >= cgs.num_agents())
        throw InvalidStrategyError("strategy for unknown agent");
    for (const auto& p : pairs_) {
        if (setting_ == Setting::Memoryless && p.guard->kind != GuardRegex::Kind::Leaf)
            throw InvalidStrategyError("memoryless strategy with a non-length-1 guard");
        for (const auto& [a, prob] : p.dist.entries())
            if (a < 0 || a >= cgs.num_actions())
                throw InvalidStrategyError("strategy references unknown action");
    }
    const auto& last = pairs_.back();
    bool top_guard =
        setting_ == Setting::Memoryless
            ? (last.guard->kind == GuardRegex::Kind::Leaf &&
               last.guard->leaf->kind == BoolFormula::Kind::True)
            : regex_equal(last.guard, GuardRegex::mk_top_star());
    if (!top_guard)
        throw InvalidStrategyError(setting_ == Setting::Memoryless
                                       ? "final pair guard must be T"
                                       : "final pair guard must be T*");
    if (!last.dist.is_dirac())
        throw InvalidStrategyError("final pair must be deterministic");
    ActionId fallback = last.dist.dirac_key();
    for (StateId s = 0; s < cgs.num_states(); ++s) {
        if (!cgs.is_legal(s, agent_, fallback))
            throw InvalidStrategyError(
                "final pair action " + cgs.action_names()[fallback] +
                " is not legal in state " + cgs.state_names()[s] +
                "; add a globally legal action such as noop");
    }
    if (strict_availability) {
        // Literal availability reading: wherever a pair can fire, every
        // available action must carry positive probability.
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            for (const auto& g : compiled_[i].last_position_guards()) {
                for (StateId s = 0; s < cgs.num_states(); ++s) {
                    if (!eval_bool(g, s, cgs)) continue;
                    for (ActionId a : cgs.legal(s, agent_))
                        if (!pairs_[i].dist.contains(a))
                            throw InvalidStrategyError(
                                "strict availability: pair " + std::to_string(i + 1) +
                                " omits available action " + cgs.action_names()[a] +
                                " in state " + cgs.state_names()[s]);
                }
            }
        }
    }
}

std::vector<std::string> NatStrategy::lint(const Cgs& cgs) const {
    std::vector<std::string> warnings;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        for (const auto& g : compiled_[i].last_position_guards()) {
            for (StateId s = 0; s < cgs.num_states(); ++s) {
                if (!eval_bool(g, s, cgs)) continue;
                for (const auto& [a, prob] : pairs_[i].dist.entries())
                    if (!cgs.is_legal(s, agent_, a))
                        warnings.push_back("pair " + std::to_string(i + 1) + ": action " +
                                           cgs.action_names()[a] + " illegal in state " +
                                           cgs.state_names()[s] +
                                           " although its guard can end there");
            }
        }
    }
    std::sort(warnings.begin(), warnings.end());
    warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
    return warnings;
}

int complexity(const NatStrategy& s) {
    int total = 0;
    for (const auto& p : s.pairs()) total += regex_symbol_count(p.guard);
    return total;
}

std::size_t match_index(const History& h, const NatStrategy& s, const Cgs& cgs) {
    StateId last = h.last();
    for (std::size_t i = 0; i < s.pairs().size(); ++i) {
        const auto& p = s.pairs()[i];
        bool guard_ok = s.setting() == Setting::Memoryless
                            ? eval_bool(p.guard->leaf, last, cgs)
                            : s.nfa(i).accepts(h, cgs);
        if (!guard_ok) continue;
        bool legal = true;
        for (const auto& [a, prob] : p.dist.entries())
            if (!cgs.is_legal(last, s.agent(), a)) { legal = false; break; }
        if (legal) return i;
    }
    throw NoMatchError("no matching pair; the mandatory final pair is missing or invalid");
}

const Distribution& act(const NatStrategy& s, const History& h, const Cgs& cgs) {
    return s.pairs()[match_index(h, s, cgs)].dist;
}

// ---------------------------------------------------------------------------
// Vocabularies
// ---------------------------------------------------------------------------

std::vector<BoolPtr> default_vocab(const Cgs& cgs) {
    std::vector<BoolPtr> out;
    out.push_back(BoolFormula::mk_true());
    std::vector<BoolPtr> literals;
    for (const auto& p : cgs.atom_names()) {
        literals.push_back(BoolFormula::mk_atom(p));
        literals.push_back(BoolFormula::mk_not(BoolFormula::mk_atom(p)));
    }
    out.insert(out.end(), literals.begin(), literals.end());
    for (std::size_t i = 0; i < literals.size(); ++i) {
        for (std::size_t j = i + 1; j < literals.size(); ++j) {
            // Skip contradictions and tautology-redundant p & !p pairs over
            // the same atom.
            const auto atom_of = [](const BoolPtr& l) {
                return l->kind == BoolFormula::Kind::Not ? l->lhs->atom : l->atom;
            };
            if (atom_of(literals[i]) == atom_of(literals[j])) continue;
            out.push_back(BoolFormula::mk_and(literals[i], literals[j]));
        }
    }
    return out;
}

std::vector<BoolPtr> minterm_vocab(const Cgs& cgs) {
    std::vector<BoolPtr> out;
    int n = cgs.num_atoms();
    if (n == 0) {
        out.push_back(BoolFormula::mk_true());
        return out;
    }
    for (int mask = 0; mask < (1 << n); ++mask) {
        BoolPtr f;
        for (int i = 0; i < n; ++i) {
            BoolPtr lit = BoolFormula::mk_atom(cgs.atom_names()[i]);
            if (!((mask >> i) & 1)) lit = BoolFormula::mk_not(lit);
            f = f ? BoolFormula::mk_and(f, lit) : lit;
        }
        out.push_back(f);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Enumeration of deterministic strategies
// ---------------------------------------------------------------------------

namespace {

struct GuardCandidate {
    RegexPtr regex;
    int cost;
    std::string printed;
    // States whose labels satisfy some possible last letter of the guard.
    std::vector<StateId> last_states;
    // For subsumption tests in the recall setting: per model state, the
    // guard accepts the singleton alphabet letter of that state... we keep
    // the compiled automaton instead.
    GuardNfa nfa;
};

std::vector<StateId> last_states_of(const GuardNfa& nfa, const Cgs& cgs) {
    std::vector<StateId> out;
    for (StateId s = 0; s < cgs.num_states(); ++s)
        for (const auto& g : nfa.last_position_guards())
            if (eval_bool(g, s, cgs)) { out.push_back(s); break; }
    return out;
}

// Words over the alphabet of model states (by their label sets), length
// bounded by `horizon`: is L(a) included in the union of the others?
// Decided by subset construction over the state alphabet; the automata are
// finite so the subset space is explored exhaustively (no horizon needed).
bool language_subsumed(const GuardNfa& a, const std::vector<const GuardNfa*>& union_nfas,
                       const Cgs& cgs) {
    // Product state: (set of a-states, vector of sets for union automata).
    struct Key {
        std::vector<int> a_set;
        std::vector<std::vector<int>> u_sets;
        bool operator<(const Key& o) const {
            if (a_set != o.a_set) return a_set < o.a_set;
            return u_sets < o.u_sets;
        }
    };
    Key start;
    start.a_set = a.initial();
    for (const auto* u : union_nfas) start.u_sets.push_back(u->initial());
    std::set<Key> seen{start};
    std::vector<Key> frontier{start};
    while (!frontier.empty()) {
        Key cur = frontier.back();
        frontier.pop_back();
        bool a_acc = a.any_accepting(cur.a_set);
        if (a_acc) {
            bool covered = false;
            for (std::size_t i = 0; i < union_nfas.size(); ++i)
                if (union_nfas[i]->any_accepting(cur.u_sets[i])) { covered = true; break; }
            if (!covered && !cur.a_set.empty()) {
                // Need a non-empty accepted word; the initial key also
                // represents the empty word, which never matches a history.
                if (!(cur.a_set == start.a_set && cur.u_sets == start.u_sets))
                    return false;
            }
        }
        for (StateId s = 0; s < cgs.num_states(); ++s) {
            Key nxt;
            nxt.a_set = a.step(cur.a_set, cgs.labels(s), cgs);
            if (nxt.a_set.empty()) continue;
            for (std::size_t i = 0; i < union_nfas.size(); ++i)
                nxt.u_sets.push_back(union_nfas[i]->step(cur.u_sets[i], cgs.labels(s), cgs));
            if (seen.insert(nxt).second) frontier.push_back(nxt);
        }
    }
    return true;
}

// Generates canonical regexes over the vocabulary with symbol count <=
// budget. Canonical form: concat and choice right-nested, choice operands
// strictly sorted, no doubled star.
void generate_regexes(const std::vector<BoolPtr>& vocab, int budget,
                      std::vector<std::pair<RegexPtr, int>>& out) {
    std::vector<std::vector<std::pair<RegexPtr, std::string>>> by_cost(budget + 1);
    auto add = [&](int cost, RegexPtr r) {
        if (cost > budget) return;
        std::string p = print_regex(r);
        for (const auto& [existing, ep] : by_cost[cost])
            if (ep == p) return;
        by_cost[cost].emplace_back(std::move(r), std::move(p));
    };
    for (const auto& v : vocab) {
        int c = bool_symbol_count(v);
        add(c, GuardRegex::mk_leaf(v));
    }
    // Fixpoint over increasing cost.
    for (int c = 1; c <= budget; ++c) {
        // Star: operand of cost c-1 that is not already a star.
        for (const auto& [r, p] : by_cost[c - 1])
            if (r->kind != GuardRegex::Kind::Star) add(c, GuardRegex::mk_star(r));
        // Concat: lhs non-concat of cost i, rhs of cost c-1-i.
        for (int i = 1; i <= c - 2; ++i) {
            for (const auto& [l, lp] : by_cost[i]) {
                if (l->kind == GuardRegex::Kind::Concat) continue;
                for (const auto& [rr, rp] : by_cost[c - 1 - i])
                    add(c, GuardRegex::mk_concat(l, rr));
            }
        }
        // Choice: lhs non-choice, lexicographically before the head of rhs.
        for (int i = 1; i <= c - 2; ++i) {
            for (const auto& [l, lp] : by_cost[i]) {
                if (l->kind == GuardRegex::Kind::Choice) continue;
                for (const auto& [rr, rp] : by_cost[c - 1 - i]) {
                    const RegexPtr& head =
                        rr->kind == GuardRegex::Kind::Choice ? rr->lhs : rr;
                    if (!(lp < print_regex(head))) continue;
                    add(c, GuardRegex::mk_choice(l, rr));
                }
            }
        }
    }
    for (int c = 0; c <= budget; ++c)
        for (const auto& [r, p] : by_cost[c]) out.emplace_back(r, c);
}

}  // namespace

void enumerate_det(AgentId agent, int k, Setting setting, const std::vector<BoolPtr>& vocab,
                   const Cgs& cgs, const std::function<bool(const NatStrategy&)>& visit) {
    if (vocab.empty()) throw VocabularyEmptyError("empty guard vocabulary");
    std::vector<ActionId> fallback_actions = cgs.globally_legal(agent);
    if (fallback_actions.empty())
        throw InvalidStrategyError(
            "no action is legal in every state for agent " + cgs.agent_names()[agent] +
            "; add a globally legal action such as noop");

    int final_cost = setting == Setting::Memoryless ? 1 : 2;  // T vs T*
    int budget = k - final_cost;

    std::vector<GuardCandidate> guards;
    if (budget >= 1) {
        std::vector<std::pair<RegexPtr, int>> raw;
        if (setting == Setting::Memoryless) {
            for (const auto& v : vocab) {
                int c = bool_symbol_count(v);
                if (c <= budget) raw.emplace_back(GuardRegex::mk_leaf(v), c);
            }
        } else {
            generate_regexes(vocab, budget, raw);
        }
        for (auto& [r, c] : raw) {
            GuardCandidate g;
            g.regex = r;
            g.cost = c;
            g.printed = print_regex(r);
            g.nfa = compile_guard(r);
            g.last_states = last_states_of(g.nfa, cgs);
            if (g.last_states.empty()) continue;  // guard can never fire
            guards.push_back(std::move(g));
        }
    }

    // A non-final pair (g, a) is viable if a is legal in some state where g
    // can end.
    struct PairCandidate {
        int guard_idx;
        ActionId action;
    };
    std::vector<PairCandidate> pair_candidates;
    for (int gi = 0; gi < static_cast<int>(guards.size()); ++gi) {
        for (ActionId a = 0; a < cgs.num_actions(); ++a) {
            bool somewhere = false;
            for (StateId s : guards[gi].last_states)
                if (cgs.is_legal(s, agent, a)) { somewhere = true; break; }
            if (somewhere) pair_candidates.push_back({gi, a});
        }
    }

    RegexPtr final_guard = setting == Setting::Memoryless
                               ? GuardRegex::mk_leaf(BoolFormula::mk_true())
                               : GuardRegex::mk_top_star();

    std::vector<NatStrategy> results;

    // DFS over prefix pair lists; prefix_guards holds guard indices of
    // chosen pairs (for subsumption pruning).
    GuardNfa final_nfa = compile_guard(final_guard);
    std::vector<PairCandidate> chosen;
    std::function<void(int)> recurse = [&](int used) {
        // Earlier pairs whose action stays legal wherever their guard can
        // end shadow every later pair with a subsumed guard.
        std::vector<const GuardNfa*> shadow;
        for (const auto& prev : chosen) {
            bool always_legal = true;
            for (StateId s : guards[prev.guard_idx].last_states)
                if (!cgs.is_legal(s, agent, prev.action)) { always_legal = false; break; }
            if (always_legal) shadow.push_back(&guards[prev.guard_idx].nfa);
        }
        // If even the mandatory final pair can never fire, the whole prefix
        // (and every extension of it) is non-canonical.
        if (!shadow.empty() && language_subsumed(final_nfa, shadow, cgs)) return;
        for (ActionId fa : fallback_actions) {
            std::vector<StrategyPair> pairs;
            for (const auto& pc : chosen)
                pairs.push_back({guards[pc.guard_idx].regex, Distribution::dirac(pc.action)});
            pairs.push_back({final_guard, Distribution::dirac(fa)});
            results.emplace_back(agent, setting, std::move(pairs));
        }
        for (const auto& pc : pair_candidates) {
            int cost = guards[pc.guard_idx].cost;
            if (used + cost + final_cost > k) continue;
            if (!shadow.empty() &&
                language_subsumed(guards[pc.guard_idx].nfa, shadow, cgs))
                continue;
            chosen.push_back(pc);
            recurse(used + cost);
            chosen.pop_back();
        }
    };
    recurse(0);

    std::vector<std::pair<std::pair<int, std::string>, std::size_t>> order;
    order.reserve(results.size());
    for (std::size_t i = 0; i < results.size(); ++i)
        order.push_back({{complexity(results[i]), print_strategy(results[i], cgs)}, i});
    std::sort(order.begin(), order.end());
    for (const auto& [key, i] : order)
        if (!visit(results[i])) return;
}

std::vector<NatStrategy> enumerate_det_all(AgentId agent, int k, Setting setting,
                                           const std::vector<BoolPtr>& vocab,
                                           const Cgs& cgs) {
    std::vector<NatStrategy> out;
    enumerate_det(agent, k, setting, vocab, cgs, [&](const NatStrategy& s) {
        out.push_back(s);
        return true;
    });
    return out;
}

std::string print_strategy(const NatStrategy& s, const Cgs& cgs) {
    std::string out;
    for (const auto& p : s.pairs()) {
        out += print_regex(p.guard);
        out += " -> ";
        if (p.dist.is_dirac()) {
            out += cgs.action_names()[p.dist.dirac_key()];
        } else {
            out += "{";
            bool first = true;
            for (const auto& [a, prob] : p.dist.entries()) {
                if (!first) out += ", ";
                first = false;
                out += cgs.action_names()[a] + ": " + prob.str();
            }
            out += "}";
        }
        out += "\n";
    }
    return out;
}

}  // namespace natpatl
