#include "natpatl/checker.hpp"

#include <algorithm>

namespace natpatl {

std::string verdict_to_string(Verdict v) {
    switch (v) {
        case Verdict::True: return "true";
        case Verdict::False: return "false";
        case Verdict::Unknown: return "unknown";
    }
    return "?";
}

const std::vector<Verdict>* CheckResult::truth_of(const std::string& printed) const {
    for (const auto& [key, row] : truth)
        if (key == printed) return &row;
    return nullptr;
}

const CoalitionWitness* CheckResult::witness_of(const std::string& printed,
                                                StateId s) const {
    for (const auto& w : witnesses)
        if (w.formula == printed && w.state == s) return &w;
    return nullptr;
}

std::vector<BoolPtr> config_vocab(const CheckConfig& cfg, const Cgs& cgs) {
    switch (cfg.vocab) {
        case VocabMode::Default: return default_vocab(cgs);
        case VocabMode::Minterms: return minterm_vocab(cgs);
        case VocabMode::Custom: return cfg.custom_vocab;
    }
    return {};
}

namespace {

// State formulas may appear inside path bodies; temporal operators may not
// appear outside coalition bodies.
bool is_state_formula(const FormulaPtr& f) {
    switch (f->kind) {
        case Formula::Kind::True:
        case Formula::Kind::Atom:
        case Formula::Kind::Coalition:
            return true;
        case Formula::Kind::Not:
            return is_state_formula(f->lhs);
        case Formula::Kind::And:
        case Formula::Kind::Or:
            return is_state_formula(f->lhs) && is_state_formula(f->rhs);
        case Formula::Kind::Next:
        case Formula::Kind::Until:
            return false;
    }
    return false;
}

Verdict v_not(Verdict a) {
    if (a == Verdict::Unknown) return Verdict::Unknown;
    return a == Verdict::True ? Verdict::False : Verdict::True;
}

Verdict v_and(Verdict a, Verdict b) {
    if (a == Verdict::False || b == Verdict::False) return Verdict::False;
    if (a == Verdict::Unknown || b == Verdict::Unknown) return Verdict::Unknown;
    return Verdict::True;
}

Verdict v_or(Verdict a, Verdict b) {
    if (a == Verdict::True || b == Verdict::True) return Verdict::True;
    if (a == Verdict::Unknown || b == Verdict::Unknown) return Verdict::Unknown;
    return Verdict::False;
}

Optimize dual(Optimize m) { return m == Optimize::Min ? Optimize::Max : Optimize::Min; }

// Half-line comparison sets make endpoint checks decisive for intervals.
Verdict interval_cmp(const Interval& iv, CmpOp op, const Rational& d) {
    bool lo = cmp_holds(iv.lo, op, d), hi = cmp_holds(iv.hi, op, d);
    if (lo && hi) return Verdict::True;
    if (!lo && !hi) return Verdict::False;
    return Verdict::Unknown;
}

struct Evaluator {
    enum class Shape { Next, Until, NotUntil, Omega };

    const Cgs& cgs;
    const CheckConfig& cfg;
    CheckResult& result;
    std::vector<BoolPtr> vocab;
    std::map<std::string, std::vector<Verdict>> memo;
    bool record_witnesses = true;

    Evaluator(const Cgs& c, const CheckConfig& k, CheckResult& r)
        : cgs(c), cfg(k), result(r), vocab(config_vocab(k, c)) {}

    const std::vector<Verdict>& eval(const FormulaPtr& f) {
        std::string key = print_formula(f);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::vector<Verdict> row = eval_uncached(f);
        auto [pos, fresh] = memo.emplace(std::move(key), std::move(row));
        result.truth.emplace_back(pos->first, pos->second);
        return pos->second;
    }

    std::vector<Verdict> eval_uncached(const FormulaPtr& f) {
        int n = cgs.num_states();
        std::vector<Verdict> row(n, Verdict::False);
        switch (f->kind) {
            case Formula::Kind::True:
                row.assign(n, Verdict::True);
                return row;
            case Formula::Kind::Atom: {
                auto id = cgs.atom_id(f->atom);
                if (!id) throw UnknownAtomError("unknown atom '" + f->atom + "'");
                for (int s = 0; s < n; ++s)
                    row[s] = cgs.has_label(s, *id) ? Verdict::True : Verdict::False;
                return row;
            }
            case Formula::Kind::Not: {
                auto sub = eval(f->lhs);
                for (int s = 0; s < n; ++s) row[s] = v_not(sub[s]);
                return row;
            }
            case Formula::Kind::And: {
                auto a = eval(f->lhs), b = eval(f->rhs);
                for (int s = 0; s < n; ++s) row[s] = v_and(a[s], b[s]);
                return row;
            }
            case Formula::Kind::Or: {
                auto a = eval(f->lhs), b = eval(f->rhs);
                for (int s = 0; s < n; ++s) row[s] = v_or(a[s], b[s]);
                return row;
            }
            case Formula::Kind::Next:
            case Formula::Kind::Until:
                throw Error("temporal operator outside a coalition operator: " +
                            print_formula(f));
            case Formula::Kind::Coalition:
                for (int s = 0; s < n; ++s) row[s] = eval_coalition(f, s);
                return row;
        }
        throw Error("unreachable formula kind");
    }

    // ------------------------------------------------------------------
    // Path bodies with decided state subformulas
    // ------------------------------------------------------------------

    // Maximal state subformulas of the body become pseudo-atoms; `unknown`
    // is set when any of their verdicts is Unknown somewhere.
    struct BodyContext {
        std::vector<std::string> keys;
        std::vector<const std::vector<Verdict>*> rows;
        bool unknown = false;

        int pseudo(Evaluator& ev, const FormulaPtr& f) {
            std::string key = print_formula(f);
            for (std::size_t i = 0; i < keys.size(); ++i)
                if (keys[i] == key) return static_cast<int>(i);
            const std::vector<Verdict>& row = ev.eval(f);
            for (Verdict v : row)
                if (v == Verdict::Unknown) unknown = true;
            keys.push_back(std::move(key));
            rows.push_back(&row);
            return static_cast<int>(keys.size()) - 1;
        }

        bool holds(int pseudo_id, StateId s) const {
            return (*rows[pseudo_id])[s] == Verdict::True;
        }
    };

    LtlPtr to_ltl(const FormulaPtr& f, bool positive, BodyContext& ctx) {
        if (is_state_formula(f)) {
            int id = ctx.pseudo(*this, f);
            return positive ? Ltl::atom_(id) : Ltl::natom(id);
        }
        switch (f->kind) {
            case Formula::Kind::Not:
                return to_ltl(f->lhs, !positive, ctx);
            case Formula::Kind::And: {
                auto a = to_ltl(f->lhs, positive, ctx), b = to_ltl(f->rhs, positive, ctx);
                return positive ? Ltl::and_(a, b) : Ltl::or_(a, b);
            }
            case Formula::Kind::Or: {
                auto a = to_ltl(f->lhs, positive, ctx), b = to_ltl(f->rhs, positive, ctx);
                return positive ? Ltl::or_(a, b) : Ltl::and_(a, b);
            }
            case Formula::Kind::Next:
                return Ltl::next(to_ltl(f->lhs, positive, ctx));
            case Formula::Kind::Until: {
                auto a = to_ltl(f->lhs, positive, ctx), b = to_ltl(f->rhs, positive, ctx);
                return positive ? Ltl::until(a, b) : Ltl::release(a, b);
            }
            default:
                throw Error("unreachable path formula kind");
        }
    }

    // ------------------------------------------------------------------
    // Coalition operator
    // ------------------------------------------------------------------

    Verdict eval_coalition(const FormulaPtr& node, StateId s) {
        ++result.stats.coalition_queries;
        std::vector<AgentId> coalition;
        for (const auto& name : node->coalition) {
            auto id = cgs.agent_id(name);
            if (!id) throw UnknownAgentError("unknown agent '" + name + "'");
            coalition.push_back(*id);
        }
        std::sort(coalition.begin(), coalition.end());

        // Body shape decides the solver route.
        const FormulaPtr& body = node->body;
        Shape shape = Shape::Omega;
        if (body->kind == Formula::Kind::Next && is_state_formula(body->lhs))
            shape = Shape::Next;
        else if (body->kind == Formula::Kind::Until && is_state_formula(body->lhs) &&
                 is_state_formula(body->rhs))
            shape = Shape::Until;
        else if (body->kind == Formula::Kind::Not &&
                 body->lhs->kind == Formula::Kind::Until &&
                 is_state_formula(body->lhs->lhs) && is_state_formula(body->lhs->rhs))
            shape = Shape::NotUntil;  // covers the G sugar (invariance games)

        BodyContext ctx;
        LtlPtr ltl;
        int p_next = -1, p_safe = -1, p_target = -1;
        Dra dra;
        if (shape == Shape::Next) {
            p_next = ctx.pseudo(*this, body->lhs);
        } else if (shape == Shape::Until) {
            p_safe = ctx.pseudo(*this, body->lhs);
            p_target = ctx.pseudo(*this, body->rhs);
        } else if (shape == Shape::NotUntil) {
            p_safe = ctx.pseudo(*this, body->lhs->lhs);
            p_target = ctx.pseudo(*this, body->lhs->rhs);
        } else {
            ltl = to_ltl(body, true, ctx);
            dra = nba_to_dra(ltl_to_nba(ltl, static_cast<int>(ctx.keys.size())),
                             cfg.budget);
        }
        if (ctx.unknown) return Verdict::Unknown;

        // Opponents minimize when the coalition needs a high probability.
        Optimize mode = (node->cmp == CmpOp::Ge || node->cmp == CmpOp::Gt)
                            ? Optimize::Min
                            : Optimize::Max;

        // Per-member candidate strategies, ascending (complexity, print);
        // profiles ordered by total complexity, then lexicographically.
        std::vector<std::vector<NatStrategy>> candidates;
        for (AgentId a : coalition)
            candidates.push_back(enumerate_det_all(
                a, static_cast<int>(node->complexity_bound), cfg.setting, vocab, cgs));
        std::vector<std::vector<int>> profiles{{}};
        for (const auto& list : candidates) {
            std::vector<std::vector<int>> next;
            for (const auto& prefix : profiles)
                for (int i = 0; i < static_cast<int>(list.size()); ++i) {
                    auto p = prefix;
                    p.push_back(i);
                    next.push_back(std::move(p));
                }
            profiles = std::move(next);
        }
        std::stable_sort(profiles.begin(), profiles.end(),
                         [&](const std::vector<int>& a, const std::vector<int>& b) {
                             int ca = 0, cb = 0;
                             for (std::size_t i = 0; i < a.size(); ++i) {
                                 ca += complexity(candidates[i][a[i]]);
                                 cb += complexity(candidates[i][b[i]]);
                             }
                             return ca < cb;
                         });

        bool saw_unknown = false;
        for (const auto& idx : profiles) {
            ++result.stats.profiles_tried;
            FixedProfile profile;
            for (std::size_t i = 0; i < idx.size(); ++i)
                profile.push_back({coalition[i], &candidates[i][idx[i]]});

            auto [verdict, prob] =
                profile_verdict(node, s, coalition, profile, shape, ctx, dra, p_next,
                                p_safe, p_target, mode);
            if (verdict == Verdict::True) {
                if (record_witnesses) {
                    CoalitionWitness w;
                    w.formula = print_formula(node);
                    w.state = s;
                    for (std::size_t i = 0; i < idx.size(); ++i)
                        w.profile.push_back(candidates[i][idx[i]]);
                    w.probability = prob;
                    result.witnesses.push_back(std::move(w));
                }
                return Verdict::True;
            }
            if (verdict == Verdict::Unknown) saw_unknown = true;
        }
        return saw_unknown ? Verdict::Unknown : Verdict::False;
    }

    // Worst-case body probability for one coalition profile, with the
    // verdict of "p cmp d". The probability reported alongside True is the
    // exact worst case (or the interval's safe endpoint in iterative mode).
    std::pair<Verdict, Rational> profile_verdict(
        const FormulaPtr& node, StateId s, const std::vector<AgentId>& coalition,
        const FixedProfile& profile, Shape shape, const BodyContext& ctx,
        const Dra& dra, int p_next, int p_safe, int p_target, Optimize mode) {

        if (cfg.opponent == OpponentMode::MdpAdversary) {
            Mdp mdp = fix_coalition(cgs, coalition, profile, s);
            ++result.stats.solver_calls;
            if ((shape == Shape::Until || shape == Shape::NotUntil) &&
                cfg.solve == SolveMode::Iterative) {
                UntilObjective obj = lift_until(mdp, ctx, p_safe, p_target);
                Optimize sub = shape == Shape::Until ? mode : dual(mode);
                Interval iv = solve_iterative(simple_view(mdp), obj, sub,
                                              mdp.initial(), cfg.tolerance);
                if (shape == Shape::NotUntil) iv = {1 - iv.hi, 1 - iv.lo};
                Verdict v = interval_cmp(iv, node->cmp, node->threshold);
                return {v, mode == Optimize::Min ? iv.lo : iv.hi};
            }
            Rational p = mdp_body_value(mdp, shape, ctx, dra, p_next, p_safe,
                                        p_target, mode);
            return {cmp_holds(p, node->cmp, node->threshold) ? Verdict::True
                                                             : Verdict::False,
                    p};
        }

        // Enumerated opponents: worst over deterministic natural strategies
        // of every free agent, bounded by cfg.opponent_bound.
        std::vector<AgentId> free;
        for (AgentId a = 0; a < cgs.num_agents(); ++a)
            if (!std::binary_search(coalition.begin(), coalition.end(), a))
                free.push_back(a);
        std::vector<std::vector<NatStrategy>> opp;
        for (AgentId a : free)
            opp.push_back(
                enumerate_det_all(a, cfg.opponent_bound, cfg.setting, vocab, cgs));
        bool first = true;
        Rational worst = 0;
        std::vector<std::size_t> pick(opp.size(), 0);
        while (true) {
            FixedProfile full = profile;
            for (std::size_t i = 0; i < free.size(); ++i)
                full.push_back({free[i], &opp[i][pick[i]]});
            std::sort(full.begin(), full.end(),
                      [](const FixedAgent& a, const FixedAgent& b) {
                          return a.agent < b.agent;
                      });
            MarkovChain chain = fix_all(cgs, full, s);
            ++result.stats.solver_calls;
            Rational p = chain_body_value(chain, shape, ctx, dra, p_next, p_safe,
                                          p_target);
            if (first || (mode == Optimize::Min ? p < worst : p > worst)) worst = p;
            first = false;
            std::size_t i = 0;
            for (; i < pick.size(); ++i) {
                if (++pick[i] < opp[i].size()) break;
                pick[i] = 0;
            }
            if (i == pick.size()) break;
        }
        return {cmp_holds(worst, node->cmp, node->threshold) ? Verdict::True
                                                             : Verdict::False,
                worst};
    }

    UntilObjective lift_until(const Mdp& mdp, const BodyContext& ctx, int p_safe,
                              int p_target) {
        UntilObjective obj;
        obj.safe.resize(mdp.num_states());
        obj.target.resize(mdp.num_states());
        for (int i = 0; i < mdp.num_states(); ++i) {
            obj.safe[i] = ctx.holds(p_safe, mdp.pstate(i).base);
            obj.target[i] = ctx.holds(p_target, mdp.pstate(i).base);
        }
        return obj;
    }

    Rational mdp_body_value(const Mdp& mdp, Shape shape, const BodyContext& ctx,
                            const Dra& dra, int p_next, int p_safe, int p_target,
                            Optimize mode) {
        switch (shape) {
            case Shape::Next: {
                std::vector<bool> target(mdp.num_states());
                for (int i = 0; i < mdp.num_states(); ++i)
                    target[i] = ctx.holds(p_next, mdp.pstate(i).base);
                return mdp_next(mdp, target, mdp.initial(), mode).value();
            }
            case Shape::Until:
                return mdp_until(mdp, lift_until(mdp, ctx, p_safe, p_target),
                                 mdp.initial(), mode)
                    .value();
            case Shape::NotUntil:
                return 1 - mdp_until(mdp, lift_until(mdp, ctx, p_safe, p_target),
                                     mdp.initial(), dual(mode))
                                .value();
            case Shape::Omega: {
                std::vector<Letter> letters(mdp.num_states(), 0);
                for (int i = 0; i < mdp.num_states(); ++i)
                    for (std::size_t a = 0; a < ctx.keys.size(); ++a)
                        if (ctx.holds(static_cast<int>(a), mdp.pstate(i).base))
                            letters[i] |= 1u << a;
                return mdp_omega(mdp, dra, letters, mdp.initial(), mode, cfg.budget)
                    .value();
            }
        }
        throw Error("unreachable body shape");
    }

    Rational chain_body_value(const MarkovChain& chain, Shape shape,
                              const BodyContext& ctx, const Dra& dra, int p_next,
                              int p_safe, int p_target) {
        switch (shape) {
            case Shape::Next: {
                Rational p = 0;
                for (const auto& [t, q] : chain.row(chain.initial()).entries())
                    if (ctx.holds(p_next, chain.pstate(t).base)) p += q;
                return p;
            }
            case Shape::Until:
            case Shape::NotUntil: {
                UntilObjective obj;
                obj.safe.resize(chain.num_states());
                obj.target.resize(chain.num_states());
                for (int i = 0; i < chain.num_states(); ++i) {
                    obj.safe[i] = ctx.holds(p_safe, chain.pstate(i).base);
                    obj.target[i] = ctx.holds(p_target, chain.pstate(i).base);
                }
                Rational p = mc_until(chain, obj, chain.initial()).value();
                return shape == Shape::Until ? p : 1 - p;
            }
            case Shape::Omega: {
                std::vector<Letter> letters(chain.num_states(), 0);
                for (int i = 0; i < chain.num_states(); ++i)
                    for (std::size_t a = 0; a < ctx.keys.size(); ++a)
                        if (ctx.holds(static_cast<int>(a), chain.pstate(i).base))
                            letters[i] |= 1u << a;
                // A chain is the one-choice MDP; both modes coincide.
                return mdp_omega_simple(simple_view(chain), dra, letters,
                                        chain.initial(), Optimize::Max, cfg.budget)
                    .value();
            }
        }
        throw Error("unreachable body shape");
    }
};

}  // namespace

CheckResult check(const Cgs& cgs, StateId s0, const FormulaPtr& f,
                  const CheckConfig& cfg) {
    if (s0 < 0 || s0 >= cgs.num_states()) throw Error("state out of range");
    CheckResult result;
    Evaluator ev(cgs, cfg, result);
    result.verdict = ev.eval(f)[s0];
    return result;
}

CheckResult check_positive_np_path(const Cgs& cgs, StateId s0, const FormulaPtr& f,
                                   const CheckConfig& cfg) {
    if (!classify(f).positive)
        throw NotPositiveFragmentError(
            "formula contains negation; the NP path needs the positive fragment");
    // The positive fragment never flips the quantification parity, so the
    // shared enumeration applies unchanged; only coalition-member witnesses
    // are produced either way.
    return check(cgs, s0, f, cfg);
}

}  // namespace natpatl
