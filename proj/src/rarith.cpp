#include "natpatl/rarith.hpp"

#include <algorithm>
#include <sstream>

namespace natpatl {

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

Polynomial Polynomial::constant(const Rational& c) {
    Polynomial p;
    if (c != 0) p.terms_[{}] = c;
    return p;
}

Polynomial Polynomial::var(int v) {
    Polynomial p;
    p.terms_[{{v, 1}}] = 1;
    return p;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial out = *this;
    for (const auto& [m, c] : o.terms_) {
        Rational& slot = out.terms_[m];
        slot += c;
        if (slot == 0) out.terms_.erase(m);
    }
    return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    return *this + o * Rational(-1);
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial out;
    for (const auto& [m1, c1] : terms_) {
        for (const auto& [m2, c2] : o.terms_) {
            Monomial m;
            std::size_t i = 0, j = 0;
            while (i < m1.size() || j < m2.size()) {
                if (j == m2.size() || (i < m1.size() && m1[i].first < m2[j].first))
                    m.push_back(m1[i++]);
                else if (i == m1.size() || m2[j].first < m1[i].first)
                    m.push_back(m2[j++]);
                else {
                    m.emplace_back(m1[i].first, m1[i].second + m2[j].second);
                    ++i, ++j;
                }
            }
            Rational& slot = out.terms_[m];
            slot += c1 * c2;
            if (slot == 0) out.terms_.erase(m);
        }
    }
    return out;
}

Polynomial Polynomial::operator*(const Rational& c) const {
    Polynomial out;
    if (c == 0) return out;
    for (const auto& [m, k] : terms_) out.terms_[m] = k * c;
    return out;
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Polynomial::constant_value() const {
    auto it = terms_.find({});
    return it == terms_.end() ? Rational(0) : it->second;
}

Rational Polynomial::evaluate(const std::vector<Rational>& assignment) const {
    Rational out = 0;
    for (const auto& [m, c] : terms_) {
        Rational term = c;
        for (const auto& [v, e] : m)
            for (int i = 0; i < e; ++i) term *= assignment[v];
        out += term;
    }
    return out;
}

namespace {

std::string smt_rational(const Rational& r) {
    Rational a = r < 0 ? -r : r;
    std::string s = rational_to_string(a);
    auto slash = s.find('/');
    if (slash != std::string::npos)
        s = "(/ " + s.substr(0, slash) + " " + s.substr(slash + 1) + ")";
    if (r < 0) s = "(- " + s + ")";
    return s;
}

}  // namespace

std::string Polynomial::smt2(const std::vector<std::string>& var_names) const {
    if (terms_.empty()) return "0";
    std::vector<std::string> parts;
    for (const auto& [m, c] : terms_) {
        std::string t = smt_rational(c);
        for (const auto& [v, e] : m)
            for (int i = 0; i < e; ++i) t = "(* " + t + " " + var_names[v] + ")";
        parts.push_back(std::move(t));
    }
    if (parts.size() == 1) return parts[0];
    std::string out = "(+";
    for (const auto& p : parts) out += " " + p;
    return out + ")";
}

// ---------------------------------------------------------------------------
// Constraint tree
// ---------------------------------------------------------------------------

RaNodePtr RaNode::cmp(Polynomial l, Op o, Polynomial r) {
    auto n = std::make_shared<RaNode>();
    n->kind = Kind::Cmp;
    n->op = o;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

RaNodePtr RaNode::conj(std::vector<RaNodePtr> kids) {
    auto n = std::make_shared<RaNode>();
    n->kind = Kind::And;
    n->children = std::move(kids);
    return n;
}

RaNodePtr RaNode::disj(std::vector<RaNodePtr> kids) {
    auto n = std::make_shared<RaNode>();
    n->kind = Kind::Or;
    n->children = std::move(kids);
    return n;
}

bool ra_eval(const RaNodePtr& n, const std::vector<Rational>& assignment) {
    switch (n->kind) {
        case RaNode::Kind::Cmp: {
            Rational l = n->lhs.evaluate(assignment), r = n->rhs.evaluate(assignment);
            switch (n->op) {
                case RaNode::Op::Eq: return l == r;
                case RaNode::Op::Ge: return l >= r;
                case RaNode::Op::Gt: return l > r;
                case RaNode::Op::Le: return l <= r;
                case RaNode::Op::Lt: return l < r;
            }
            return false;
        }
        case RaNode::Kind::And:
            for (const auto& k : n->children)
                if (!ra_eval(k, assignment)) return false;
            return true;
        case RaNode::Kind::Or:
            for (const auto& k : n->children)
                if (ra_eval(k, assignment)) return true;
            return false;
    }
    return false;
}

namespace {

std::string op_smt(RaNode::Op o) {
    switch (o) {
        case RaNode::Op::Eq: return "=";
        case RaNode::Op::Ge: return ">=";
        case RaNode::Op::Gt: return ">";
        case RaNode::Op::Le: return "<=";
        case RaNode::Op::Lt: return "<";
    }
    return "=";
}

std::string node_smt(const RaNodePtr& n, const std::vector<std::string>& names) {
    switch (n->kind) {
        case RaNode::Kind::Cmp:
            return "(" + op_smt(n->op) + " " + n->lhs.smt2(names) + " " +
                   n->rhs.smt2(names) + ")";
        case RaNode::Kind::And:
        case RaNode::Kind::Or: {
            if (n->children.empty())
                return n->kind == RaNode::Kind::And ? "true" : "false";
            std::string out = n->kind == RaNode::Kind::And ? "(and" : "(or";
            for (const auto& k : n->children) out += " " + node_smt(k, names);
            return out + ")";
        }
    }
    return "true";
}

}  // namespace

// ---------------------------------------------------------------------------
// Script surface
// ---------------------------------------------------------------------------

int RealArithScript::find_var(AgentId member, int skeleton, int pair_index,
                              StateId state, ActionId action) const {
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const VarMeta& v = vars[i];
        if (v.member == member && v.skeleton == skeleton &&
            v.pair_index == pair_index && v.state == state && v.action == action)
            return static_cast<int>(i);
    }
    return -1;
}

std::string RealArithScript::smt2() const {
    std::vector<std::string> names;
    for (const auto& v : vars) names.push_back(v.name);
    std::ostringstream out;
    out << "; natural-strategy existence encoding\n";
    out << "; query: " << query << "\n";
    out << "; skeletons: " << num_skeletons << "\n";
    out << "(set-logic QF_NRA)\n";
    for (const auto& v : vars) out << "(declare-const " << v.name << " Real)\n";
    for (const auto& v : vars) out << "(assert (>= " << v.name << " 0))\n";
    for (int z : zeros) out << "(assert (= " << vars[z].name << " 0))\n";
    for (const auto& g : groups) {
        out << "(assert (= (+";
        for (int v : g) out << " " << vars[v].name;
        out << ") 1))\n";
    }
    for (const auto& [a, b] : equalities)
        out << "(assert (= " << vars[a].name << " " << vars[b].name << "))\n";
    out << "(assert " << node_smt(body, names) << ")\n";
    out << "(check-sat)\n";
    return out.str();
}

std::string RealArithScript::metadata(const Cgs& cgs) const {
    std::ostringstream out;
    for (const auto& v : vars)
        out << v.name << " " << cgs.agent_names()[v.member] << " " << v.skeleton
            << " " << v.pair_index << " " << cgs.state_names()[v.state] << " "
            << cgs.action_names()[v.action] << "\n";
    return out.str();
}

bool RealArithScript::eval(const std::vector<Rational>& assignment) const {
    if (assignment.size() != vars.size())
        throw Error("assignment size does not match the script's variables");
    for (const auto& v : assignment)
        if (v < 0) return false;
    for (int z : zeros)
        if (assignment[z] != 0) return false;
    for (const auto& g : groups) {
        Rational sum = 0;
        for (int v : g) sum += assignment[v];
        if (sum != 1) return false;
    }
    for (const auto& [a, b] : equalities)
        if (assignment[a] != assignment[b]) return false;
    return ra_eval(body, assignment);
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

namespace {

bool plain_state_formula(const FormulaPtr& f) {
    switch (f->kind) {
        case Formula::Kind::True:
        case Formula::Kind::Atom:
            return true;
        case Formula::Kind::Not:
            return plain_state_formula(f->lhs);
        case Formula::Kind::And:
        case Formula::Kind::Or:
            return plain_state_formula(f->lhs) && plain_state_formula(f->rhs);
        default:
            return false;
    }
}

bool eval_state(const FormulaPtr& f, StateId s, const Cgs& cgs) {
    switch (f->kind) {
        case Formula::Kind::True: return true;
        case Formula::Kind::Atom: {
            auto id = cgs.atom_id(f->atom);
            if (!id) throw UnknownAtomError("unknown atom '" + f->atom + "'");
            return cgs.has_label(s, *id);
        }
        case Formula::Kind::Not: return !eval_state(f->lhs, s, cgs);
        case Formula::Kind::And:
            return eval_state(f->lhs, s, cgs) && eval_state(f->rhs, s, cgs);
        case Formula::Kind::Or:
            return eval_state(f->lhs, s, cgs) || eval_state(f->rhs, s, cgs);
        default:
            throw Error("unreachable");
    }
}

// One member's strategy skeleton: guard list with per-pair firing regions
// (guard-level first match) and the actions available across each region.
struct Skeleton {
    std::vector<RegexPtr> guards;
    std::vector<std::vector<StateId>> region;   // per pair
    std::vector<std::vector<ActionId>> common;  // per pair, sorted
    std::string key;
};

std::vector<Skeleton> member_skeletons(AgentId agent, int k,
                                       const std::vector<BoolPtr>& vocab,
                                       const Cgs& cgs) {
    std::vector<Skeleton> out;
    std::vector<std::string> seen;
    for (const NatStrategy& s :
         enumerate_det_all(agent, k, Setting::Memoryless, vocab, cgs)) {
        Skeleton sk;
        for (const auto& p : s.pairs()) {
            sk.guards.push_back(p.guard);
            sk.key += print_regex(p.guard) + ";";
        }
        if (std::find(seen.begin(), seen.end(), sk.key) != seen.end()) continue;
        seen.push_back(sk.key);

        bool feasible = true;
        std::vector<bool> claimed(cgs.num_states(), false);
        for (const auto& g : sk.guards) {
            std::vector<StateId> region;
            for (StateId st = 0; st < cgs.num_states(); ++st) {
                if (claimed[st]) continue;
                if (eval_bool(g->leaf, st, cgs)) {
                    region.push_back(st);
                    claimed[st] = true;
                }
            }
            std::vector<ActionId> common;
            if (!region.empty()) {
                common = cgs.legal(region[0], agent);
                for (StateId st : region) {
                    std::vector<ActionId> keep;
                    for (ActionId a : common)
                        if (cgs.is_legal(st, agent, a)) keep.push_back(a);
                    common = std::move(keep);
                }
                if (common.empty()) { feasible = false; break; }
            }
            sk.region.push_back(std::move(region));
            sk.common.push_back(std::move(common));
        }
        if (feasible) out.push_back(std::move(sk));
    }
    return out;
}

Polynomial det(std::vector<std::vector<Polynomial>> m) {
    std::size_t n = m.size();
    if (n == 0) return Polynomial::constant(1);
    if (n > 7)
        throw StateBudgetExceededError("determinant expansion too large", 7);
    if (n == 1) return m[0][0];
    Polynomial out;
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i][0].is_zero() && !m[i][0].is_constant()) continue;
        std::vector<std::vector<Polynomial>> minor;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == i) continue;
            std::vector<Polynomial> row(m[r].begin() + 1, m[r].end());
            minor.push_back(std::move(row));
        }
        Polynomial term = m[i][0] * det(std::move(minor));
        if (i % 2) term = term * Rational(-1);
        out = out + term;
    }
    return out;
}

RaNode::Op to_ra(CmpOp c) {
    switch (c) {
        case CmpOp::Ge: return RaNode::Op::Ge;
        case CmpOp::Gt: return RaNode::Op::Gt;
        case CmpOp::Le: return RaNode::Op::Le;
        case CmpOp::Lt: return RaNode::Op::Lt;
    }
    return RaNode::Op::Ge;
}

}  // namespace

RealArithScript encode(const Cgs& cgs, const FormulaPtr& query, int k,
                       const std::vector<BoolPtr>& vocab) {
    if (query->kind != Formula::Kind::Coalition)
        throw BodyNotNatPatlError("encode expects a coalition operator query");
    if (vocab.empty()) throw VocabularyEmptyError("empty guard vocabulary");
    const FormulaPtr& body = query->body;

    enum class Shape { Next, Until, NotUntil } shape;
    FormulaPtr left, right;
    if (body->kind == Formula::Kind::Next && plain_state_formula(body->lhs)) {
        shape = Shape::Next;
        left = body->lhs;
    } else if (body->kind == Formula::Kind::Until && plain_state_formula(body->lhs) &&
               plain_state_formula(body->rhs)) {
        shape = Shape::Until;
        left = body->lhs;
        right = body->rhs;
    } else if (body->kind == Formula::Kind::Not &&
               body->lhs->kind == Formula::Kind::Until &&
               plain_state_formula(body->lhs->lhs) &&
               plain_state_formula(body->lhs->rhs)) {
        shape = Shape::NotUntil;
        left = body->lhs->lhs;
        right = body->lhs->rhs;
    } else {
        throw BodyNotNatPatlError(
            "encodable bodies are X phi, phi U psi or their negation over "
            "coalition-free state formulas; got " + print_formula(body));
    }

    std::vector<AgentId> coalition;
    for (const auto& name : query->coalition) {
        auto id = cgs.agent_id(name);
        if (!id) throw UnknownAgentError("unknown agent '" + name + "'");
        coalition.push_back(*id);
    }
    std::sort(coalition.begin(), coalition.end());
    std::vector<AgentId> free;
    for (AgentId a = 0; a < cgs.num_agents(); ++a)
        if (!std::binary_search(coalition.begin(), coalition.end(), a))
            free.push_back(a);

    std::vector<std::vector<Skeleton>> per_member;
    for (AgentId a : coalition)
        per_member.push_back(member_skeletons(a, k, vocab, cgs));

    // Combined skeletons: one choice per member.
    std::vector<std::vector<int>> combos{{}};
    for (const auto& list : per_member) {
        std::vector<std::vector<int>> next;
        for (const auto& prefix : combos)
            for (int i = 0; i < static_cast<int>(list.size()); ++i) {
                auto c = prefix;
                c.push_back(i);
                next.push_back(std::move(c));
            }
        combos = std::move(next);
    }

    // Opponent policies: every map from states to legal free-agent profiles.
    std::vector<std::vector<std::vector<ActionId>>> policies{{}};
    {
        std::vector<std::vector<std::vector<ActionId>>> per_state(cgs.num_states());
        for (StateId s = 0; s < cgs.num_states(); ++s) {
            per_state[s] = {{}};
            for (AgentId a : free) {
                std::vector<std::vector<ActionId>> next;
                for (const auto& prefix : per_state[s])
                    for (ActionId act : cgs.legal(s, a)) {
                        auto p = prefix;
                        p.push_back(act);
                        next.push_back(std::move(p));
                    }
                per_state[s] = std::move(next);
            }
        }
        for (StateId s = 0; s < cgs.num_states(); ++s) {
            std::vector<std::vector<std::vector<ActionId>>> next;
            for (const auto& prefix : policies)
                for (const auto& choice : per_state[s]) {
                    auto p = prefix;
                    p.push_back(choice);
                    next.push_back(std::move(p));
                }
            policies = std::move(next);
            if (policies.size() > 100000)
                throw StateBudgetExceededError("opponent policy space too large",
                                               100000);
        }
    }

    std::vector<bool> lv(cgs.num_states()), rv(cgs.num_states());
    for (StateId s = 0; s < cgs.num_states(); ++s) {
        lv[s] = eval_state(left, s, cgs);
        if (right) rv[s] = eval_state(right, s, cgs);
    }

    RealArithScript script;
    script.query = print_formula(query);
    StateId s0 = cgs.initial_state();
    Rational d = query->threshold;
    RaNode::Op outer = to_ra(query->cmp);

    std::vector<RaNodePtr> skeleton_nodes;
    for (const auto& combo : combos) {
        int combo_id = static_cast<int>(skeleton_nodes.size());
        // Declare this combo's variables and bookkeeping.
        // pair_var[member][pair][action] -> representative variable.
        std::vector<std::map<int, std::map<ActionId, int>>> rep(coalition.size());
        for (std::size_t x = 0; x < coalition.size(); ++x) {
            const Skeleton& sk = per_member[x][combo[x]];
            for (std::size_t j = 0; j < sk.guards.size(); ++j) {
                if (sk.region[j].empty()) continue;
                std::vector<std::map<ActionId, int>> by_state;
                for (StateId st : sk.region[j]) {
                    std::vector<int> group;
                    std::map<ActionId, int> here;
                    for (ActionId a : cgs.legal(st, coalition[x])) {
                        VarMeta v;
                        v.member = coalition[x];
                        v.skeleton = combo_id;
                        v.pair_index = static_cast<int>(j);
                        v.state = st;
                        v.action = a;
                        v.name = "r_" + cgs.agent_names()[v.member] + "_k" +
                                 std::to_string(combo_id) + "_p" + std::to_string(j) +
                                 "_" + cgs.state_names()[st] + "_" +
                                 cgs.action_names()[a];
                        int idx = static_cast<int>(script.vars.size());
                        script.vars.push_back(std::move(v));
                        group.push_back(idx);
                        here[a] = idx;
                        bool in_common = std::binary_search(sk.common[j].begin(),
                                                            sk.common[j].end(), a);
                        if (!in_common) script.zeros.push_back(idx);
                    }
                    script.groups.push_back(std::move(group));
                    by_state.push_back(std::move(here));
                }
                // Equal probabilities across the region (same regex accepts
                // every state of the region at its accepting state).
                for (std::size_t si = 1; si < by_state.size(); ++si)
                    for (const auto& [a, idx] : by_state[0])
                        if (by_state[si].count(a))
                            script.equalities.emplace_back(idx, by_state[si].at(a));
                for (ActionId a : sk.common[j])
                    rep[x][static_cast<int>(j)][a] = by_state[0].at(a);
            }
        }

        // pair_of[x][s]: which pair of member x fires at state s.
        std::vector<std::vector<int>> pair_of(coalition.size(),
                                              std::vector<int>(cgs.num_states(), -1));
        for (std::size_t x = 0; x < coalition.size(); ++x) {
            const Skeleton& sk = per_member[x][combo[x]];
            for (std::size_t j = 0; j < sk.guards.size(); ++j)
                for (StateId st : sk.region[j]) pair_of[x][st] = static_cast<int>(j);
        }

        // Transition polynomial rows for one opponent policy restricted to a
        // support choice per (member, pair).
        auto rows_for = [&](const std::vector<std::vector<ActionId>>& policy,
                            const std::vector<std::map<int, std::vector<ActionId>>>&
                                support) {
            std::vector<std::vector<Polynomial>> rows(
                cgs.num_states(), std::vector<Polynomial>(cgs.num_states()));
            for (StateId st = 0; st < cgs.num_states(); ++st) {
                std::vector<std::vector<ActionId>> tuples{{}};
                for (std::size_t x = 0; x < coalition.size(); ++x) {
                    std::vector<std::vector<ActionId>> next;
                    for (const auto& prefix : tuples)
                        for (ActionId a : support[x].at(pair_of[x][st])) {
                            auto t = prefix;
                            t.push_back(a);
                            next.push_back(std::move(t));
                        }
                    tuples = std::move(next);
                }
                for (const auto& tuple : tuples) {
                    Polynomial weight = Polynomial::constant(1);
                    JointAction joint(cgs.num_agents());
                    for (std::size_t x = 0; x < coalition.size(); ++x) {
                        weight = weight * Polynomial::var(
                                              rep[x].at(pair_of[x][st]).at(tuple[x]));
                        joint[coalition[x]] = tuple[x];
                    }
                    for (std::size_t i = 0; i < free.size(); ++i)
                        joint[free[i]] = policy[st][i];
                    for (const auto& [t, p] : cgs.successors(st, joint).entries())
                        rows[st][t] = rows[st][t] + weight * p;
                }
            }
            return rows;
        };

        auto until_value = [&](const std::vector<std::vector<Polynomial>>& rows)
            -> std::pair<Polynomial, Polynomial> {
            // (numerator, denominator) of Pr[s0 |= lv U rv], denominator > 0
            // on the support pattern.
            if (rv[s0]) return {Polynomial::constant(1), Polynomial::constant(1)};
            if (!lv[s0]) return {Polynomial::constant(0), Polynomial::constant(1)};
            // Positive-probability edge graph under the pattern.
            std::vector<bool> can(cgs.num_states(), false);
            for (StateId s = 0; s < cgs.num_states(); ++s) can[s] = rv[s];
            for (bool changed = true; changed;) {
                changed = false;
                for (StateId s = 0; s < cgs.num_states(); ++s) {
                    if (can[s] || !lv[s]) continue;
                    for (StateId t = 0; t < cgs.num_states(); ++t)
                        if (can[t] && !rows[s][t].is_zero()) {
                            can[s] = true;
                            changed = true;
                            break;
                        }
                }
            }
            if (!can[s0]) return {Polynomial::constant(0), Polynomial::constant(1)};
            std::vector<int> unknown, pos(cgs.num_states(), -1);
            for (StateId s = 0; s < cgs.num_states(); ++s)
                if (can[s] && !rv[s]) {
                    pos[s] = static_cast<int>(unknown.size());
                    unknown.push_back(s);
                }
            std::size_t n = unknown.size();
            std::vector<std::vector<Polynomial>> m(n, std::vector<Polynomial>(n));
            std::vector<Polynomial> b(n);
            for (std::size_t i = 0; i < n; ++i) {
                m[i][i] = Polynomial::constant(1);
                for (StateId t = 0; t < cgs.num_states(); ++t) {
                    if (rows[unknown[i]][t].is_zero()) continue;
                    if (rv[t]) b[i] = b[i] + rows[unknown[i]][t];
                    else if (pos[t] >= 0)
                        m[i][pos[t]] = m[i][pos[t]] - rows[unknown[i]][t];
                }
            }
            Polynomial dpoly = det(m);
            for (std::size_t i = 0; i < n; ++i) m[i][pos[s0]] = b[i];
            Polynomial npoly = det(std::move(m));
            return {npoly, dpoly};
        };

        std::vector<RaNodePtr> per_combo;
        if (shape == Shape::Next) {
            std::vector<std::map<int, std::vector<ActionId>>> full(coalition.size());
            for (std::size_t x = 0; x < coalition.size(); ++x) {
                const Skeleton& sk = per_member[x][combo[x]];
                for (std::size_t j = 0; j < sk.guards.size(); ++j)
                    if (!sk.region[j].empty())
                        full[x][static_cast<int>(j)] = sk.common[j];
            }
            for (const auto& policy : policies) {
                auto rows = rows_for(policy, full);
                Polynomial p;
                for (StateId t = 0; t < cgs.num_states(); ++t)
                    if (lv[t]) p = p + rows[s0][t];
                per_combo.push_back(
                    RaNode::cmp(p, outer, Polynomial::constant(d)));
            }
            skeleton_nodes.push_back(RaNode::conj(std::move(per_combo)));
            continue;
        }

        // Support-pattern case split for until / invariance bodies.
        struct Slot {
            std::size_t member;
            int pair;
            std::vector<ActionId> actions;
        };
        std::vector<Slot> slots;
        for (std::size_t x = 0; x < coalition.size(); ++x) {
            const Skeleton& sk = per_member[x][combo[x]];
            for (std::size_t j = 0; j < sk.guards.size(); ++j)
                if (!sk.region[j].empty())
                    slots.push_back({x, static_cast<int>(j), sk.common[j]});
        }
        std::vector<std::vector<std::vector<ActionId>>> patterns{{}};
        for (const auto& slot : slots) {
            std::vector<std::vector<std::vector<ActionId>>> next;
            for (std::size_t mask = 1; mask < (1u << slot.actions.size()); ++mask) {
                std::vector<ActionId> sub;
                for (std::size_t i = 0; i < slot.actions.size(); ++i)
                    if ((mask >> i) & 1) sub.push_back(slot.actions[i]);
                for (const auto& prefix : patterns) {
                    auto p = prefix;
                    p.push_back(sub);
                    next.push_back(std::move(p));
                }
            }
            patterns = std::move(next);
        }

        std::vector<RaNodePtr> pattern_nodes;
        for (const auto& pattern : patterns) {
            std::vector<std::map<int, std::vector<ActionId>>> support(
                coalition.size());
            std::vector<RaNodePtr> conds;
            for (std::size_t si = 0; si < slots.size(); ++si) {
                support[slots[si].member][slots[si].pair] = pattern[si];
                for (ActionId a : slots[si].actions) {
                    int v = rep[slots[si].member].at(slots[si].pair).at(a);
                    bool in = std::find(pattern[si].begin(), pattern[si].end(), a) !=
                              pattern[si].end();
                    conds.push_back(RaNode::cmp(Polynomial::var(v),
                                                in ? RaNode::Op::Gt : RaNode::Op::Eq,
                                                Polynomial::constant(0)));
                }
            }
            for (const auto& policy : policies) {
                auto [npoly, dpoly] = until_value(rows_for(policy, support));
                if (shape == Shape::Until) {
                    conds.push_back(RaNode::cmp(npoly, outer, dpoly * d));
                } else {
                    conds.push_back(RaNode::cmp(dpoly - npoly, outer, dpoly * d));
                }
            }
            pattern_nodes.push_back(RaNode::conj(std::move(conds)));
        }
        skeleton_nodes.push_back(RaNode::disj(std::move(pattern_nodes)));
    }

    script.num_skeletons = static_cast<int>(skeleton_nodes.size());
    script.body = RaNode::disj(std::move(skeleton_nodes));
    return script;
}

// ---------------------------------------------------------------------------
// Constraint propagation and assignments
// ---------------------------------------------------------------------------

namespace {

// Crude interval bound under 0 <= r <= 1 and the group sum constraints: a
// linear combination of distinct variables from a single group with maximal
// coefficient c is at most c.
std::pair<Rational, Rational> poly_bounds(const Polynomial& p,
                                          const RealArithScript& script) {
    bool linear = true;
    std::vector<int> vars_used;
    Rational constant = 0, max_coeff = 0;
    bool nonneg_coeffs = true;
    for (const auto& [m, c] : p.terms()) {
        if (m.empty()) { constant = c; continue; }
        if (m.size() != 1 || m[0].second != 1) linear = false;
        else vars_used.push_back(m[0].first);
        if (c < 0) nonneg_coeffs = false;
        if (c > max_coeff) max_coeff = c;
    }
    if (linear && nonneg_coeffs) {
        for (const auto& g : script.groups) {
            bool all_in = true;
            for (int v : vars_used)
                if (std::find(g.begin(), g.end(), v) == g.end()) { all_in = false; break; }
            if (all_in) return {constant, constant + max_coeff};
        }
    }
    // Fallback: each monomial lies in [0, 1].
    Rational lo = 0, hi = 0;
    for (const auto& [m, c] : p.terms()) {
        if (m.empty()) { lo += c; hi += c; continue; }
        if (c > 0) hi += c;
        else lo += c;
    }
    return {lo, hi};
}

bool cmp_impossible(const RaNodePtr& n, const RealArithScript& script) {
    if (!n->rhs.is_constant()) return false;
    Rational d = n->rhs.constant_value();
    auto [lo, hi] = poly_bounds(n->lhs, script);
    switch (n->op) {
        case RaNode::Op::Ge: return hi < d;
        case RaNode::Op::Gt: return hi <= d;
        case RaNode::Op::Le: return lo > d;
        case RaNode::Op::Lt: return lo >= d;
        case RaNode::Op::Eq: return d < lo || d > hi;
    }
    return false;
}

bool node_impossible(const RaNodePtr& n, const RealArithScript& script) {
    switch (n->kind) {
        case RaNode::Kind::Cmp: return cmp_impossible(n, script);
        case RaNode::Kind::And:
            for (const auto& k : n->children)
                if (node_impossible(k, script)) return true;
            return false;
        case RaNode::Kind::Or:
            for (const auto& k : n->children)
                if (!node_impossible(k, script)) return false;
            return !n->children.empty();
    }
    return false;
}

}  // namespace

bool propagate_trivially_unsat(const RealArithScript& script) {
    return node_impossible(script.body, script);
}

namespace {

// Per (member, skeleton, pair): group list and the actions usable there.
struct PairClass {
    AgentId member;
    int skeleton;
    int pair;
    std::vector<ActionId> actions;  // not pinned to zero
};

std::vector<PairClass> pair_classes(const RealArithScript& script) {
    std::vector<PairClass> out;
    std::vector<bool> zero(script.vars.size(), false);
    for (int z : script.zeros) zero[z] = true;
    for (std::size_t i = 0; i < script.vars.size(); ++i) {
        const VarMeta& v = script.vars[i];
        PairClass* cls = nullptr;
        for (auto& c : out)
            if (c.member == v.member && c.skeleton == v.skeleton && c.pair == v.pair_index)
                cls = &c;
        if (!cls) {
            out.push_back({v.member, v.skeleton, v.pair_index, {}});
            cls = &out.back();
        }
        if (!zero[i] &&
            std::find(cls->actions.begin(), cls->actions.end(), v.action) ==
                cls->actions.end())
            cls->actions.push_back(v.action);
    }
    return out;
}

std::vector<Rational> assignment_from_choices(
    const RealArithScript& script, const std::vector<PairClass>& classes,
    const std::vector<ActionId>& choice) {
    std::vector<Rational> out(script.vars.size(), 0);
    for (std::size_t i = 0; i < script.vars.size(); ++i) {
        const VarMeta& v = script.vars[i];
        for (std::size_t c = 0; c < classes.size(); ++c)
            if (classes[c].member == v.member && classes[c].skeleton == v.skeleton &&
                classes[c].pair == v.pair_index && choice[c] == v.action)
                out[i] = 1;
    }
    return out;
}

}  // namespace

std::vector<Rational> witness_assignment(const RealArithScript& script,
                                         const Cgs& cgs,
                                         const std::vector<NatStrategy>& profile) {
    std::vector<PairClass> classes = pair_classes(script);
    std::vector<ActionId> choice(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (classes[c].actions.empty())
            throw InvalidStrategyError("script pair admits no action");
        choice[c] = classes[c].actions.front();
    }

    // Locate the combined skeleton whose guard lists match the witness by
    // comparing variable layouts: for each member, the witness pair guards
    // must reproduce the firing regions recorded in the script.
    for (const NatStrategy& strat : profile) {
        // Region of pair j under the witness guards, guard-level first match.
        std::vector<std::vector<StateId>> region(strat.pairs().size());
        std::vector<bool> claimed(cgs.num_states(), false);
        for (std::size_t j = 0; j < strat.pairs().size(); ++j)
            for (StateId s = 0; s < cgs.num_states(); ++s) {
                if (claimed[s]) continue;
                if (eval_bool(strat.pairs()[j].guard->leaf, s, cgs)) {
                    region[j].push_back(s);
                    claimed[s] = true;
                }
            }
        bool placed = false;
        for (int sk = 0; sk < script.num_skeletons && !placed; ++sk) {
            bool match = true;
            for (std::size_t j = 0; j < strat.pairs().size() && match; ++j) {
                ActionId a = strat.pairs()[j].dist.dirac_key();
                for (StateId s : region[j])
                    if (script.find_var(strat.agent(), sk, static_cast<int>(j), s,
                                        a) < 0) {
                        match = false;
                        break;
                    }
                // Every region state must carry this pair's variables.
                if (!region[j].empty() &&
                    script.find_var(strat.agent(), sk, static_cast<int>(j),
                                    region[j][0],
                                    strat.pairs()[j].dist.dirac_key()) < 0)
                    match = false;
            }
            if (!match) continue;
            for (std::size_t c = 0; c < classes.size(); ++c)
                if (classes[c].member == strat.agent() && classes[c].skeleton == sk &&
                    classes[c].pair < static_cast<int>(strat.pairs().size()))
                    choice[c] = strat.pairs()[classes[c].pair].dist.dirac_key();
            placed = true;
        }
        if (!placed)
            throw InvalidStrategyError(
                "no script skeleton matches the witness guards of agent " +
                cgs.agent_names()[strat.agent()]);
    }
    return assignment_from_choices(script, classes, choice);
}

std::vector<std::vector<Rational>> dirac_assignments(const RealArithScript& script) {
    std::vector<PairClass> classes = pair_classes(script);
    std::vector<std::vector<Rational>> out;
    std::vector<std::size_t> pick(classes.size(), 0);
    while (true) {
        std::vector<ActionId> choice(classes.size());
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (classes[c].actions.empty())
                throw InvalidStrategyError("script pair admits no action");
            choice[c] = classes[c].actions[pick[c]];
        }
        out.push_back(assignment_from_choices(script, classes, choice));
        if (out.size() > 100000)
            throw StateBudgetExceededError("too many deterministic assignments",
                                           100000);
        std::size_t c = 0;
        for (; c < pick.size(); ++c) {
            if (++pick[c] < classes[c].actions.size()) break;
            pick[c] = 0;
        }
        if (c == pick.size()) break;
    }
    return out;
}

}  // namespace natpatl
