#include "doctest.h"
#include "natpatl/product.hpp"
#include "support/fixtures.hpp"

#include <sstream>

using namespace natpatl;

namespace {

NatStrategy top_strategy(const Cgs& cgs, AgentId agent, const char* action,
                         Setting setting = Setting::Memoryless) {
    RegexPtr guard = setting == Setting::Memoryless
                         ? GuardRegex::mk_leaf(BoolFormula::mk_true())
                         : GuardRegex::mk_top_star();
    return NatStrategy(agent, setting,
                       {{guard, Distribution::dirac(*cgs.action_id(action))}});
}

// Probability of reaching a target-labeled state within `depth` steps under
// a full strategy profile, by direct history-tree expansion.
Rational brute_reach(const Cgs& cgs, const std::vector<const NatStrategy*>& profile,
                     std::vector<StateId>& h, AtomId target, int depth) {
    if (cgs.has_label(h.back(), target)) return 1;
    if (depth == 0) return 0;
    History hist(h);
    std::vector<const Distribution*> dists;
    for (AgentId a = 0; a < cgs.num_agents(); ++a)
        dists.push_back(&act(*profile[a], hist, cgs));
    Rational total = 0;
    std::vector<std::size_t> idx(dists.size(), 0);
    while (true) {
        Rational w = 1;
        JointAction full(cgs.num_agents());
        for (std::size_t a = 0; a < dists.size(); ++a) {
            const auto& e = dists[a]->entries()[idx[a]];
            full[a] = e.first;
            w *= e.second;
        }
        for (const auto& [t, p] : cgs.successors(h.back(), full).entries()) {
            h.push_back(t);
            total += w * p * brute_reach(cgs, profile, h, target, depth - 1);
            h.pop_back();
        }
        int a = static_cast<int>(dists.size()) - 1;
        while (a >= 0) {
            if (++idx[a] < dists[a]->size()) break;
            idx[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return total;
}

Rational chain_reach(const MarkovChain& mc, int state, AtomId target, int depth) {
    const auto& l = mc.labels(state);
    if (std::binary_search(l.begin(), l.end(), target)) return 1;
    if (depth == 0) return 0;
    Rational total = 0;
    for (const auto& [t, p] : mc.row(state).entries())
        total += p * chain_reach(mc, t, target, depth - 1);
    return total;
}

}  // namespace

TEST_CASE("coin coalition with toss strategy degenerates to a chain") {
    Cgs cgs = fixtures::coin();
    NatStrategy s = top_strategy(cgs, 0, "toss");
    Mdp mdp = fix_coalition(cgs, {0}, {{0, &s}}, cgs.initial_state());
    CHECK(mdp.free_agents().empty());
    CHECK(mdp.num_states() == 3);
    REQUIRE(mdp.choices(mdp.initial()).size() == 1);
    const Distribution& d = mdp.choices(mdp.initial())[0].dist;
    CHECK(d.size() == 2);
    for (const auto& [t, p] : d.entries()) CHECK(p == Rational(1, 2));
}

TEST_CASE("empty coalition leaves the full CGS free") {
    Cgs cgs = fixtures::two_agent();
    Mdp mdp = fix_coalition(cgs, {}, {}, cgs.initial_state());
    CHECK(mdp.free_agents() == std::vector<AgentId>{0, 1});
    CHECK(mdp.num_states() == 2);
    CHECK(mdp.choices(mdp.initial()).size() == 4);  // all joint actions free
}

TEST_CASE("fix_all on memoryless profiles keeps only reachable cgs states") {
    Cgs cgs = fixtures::coin();
    NatStrategy s = top_strategy(cgs, 0, "toss");
    MarkovChain mc = fix_all(cgs, {{0, &s}}, cgs.initial_state());
    CHECK(mc.num_states() == 3);
    for (int i = 0; i < mc.num_states(); ++i) CHECK(mc.pstate(i).memory[0].empty());
    CHECK(chain_reach(mc, mc.initial(), *cgs.atom_id("heads"), 6) == Rational(1, 2));
}

TEST_CASE("memory_update") {
    Cgs cgs = fixtures::two_state();
    NatStrategy mem0 = top_strategy(cgs, 0, "go");
    FixedProfile p0{{0, &mem0}};
    MemoryVector m = initial_memory(cgs.labels(0), p0, cgs);
    CHECK(m == MemoryVector{{}});
    CHECK(memory_update(m, cgs.labels(1), p0, cgs) == m);

    NatStrategy rec(0, Setting::Recall,
                    {{parse_regex("T* . p"), Distribution::dirac(0)},
                     {GuardRegex::mk_top_star(), Distribution::dirac(0)}});
    FixedProfile p1{{0, &rec}};
    StateId u = *cgs.state_id("u"), v = *cgs.state_id("v");
    MemoryVector at_u = initial_memory(cgs.labels(u), p1, cgs);
    CHECK_FALSE(rec.nfa(0).any_accepting(at_u[0][0]));
    CHECK(rec.nfa(1).any_accepting(at_u[0][1]));  // T* accepts everywhere
    MemoryVector at_uv = memory_update(at_u, cgs.labels(v), p1, cgs);
    CHECK(rec.nfa(0).any_accepting(at_uv[0][0]));
    MemoryVector at_uvu = memory_update(at_uv, cgs.labels(u), p1, cgs);
    CHECK_FALSE(rec.nfa(0).any_accepting(at_uvu[0][0]));
}

TEST_CASE("recall product measure agrees with history-tree expansion") {
    Cgs cgs = fixtures::chooser();
    // Once p has been observed, play x (stay at v); before that, x too from
    // u but y would reset: pick a history-dependent strategy p-seen -> x.
    NatStrategy rec(0, Setting::Recall,
                    {{parse_regex("T* . p . T*"),
                      Distribution::dirac(*cgs.action_id("x"))},
                     {GuardRegex::mk_top_star(),
                      Distribution::dirac(*cgs.action_id("x"))}});
    MarkovChain mc = fix_all(cgs, {{0, &rec}}, cgs.initial_state());
    CHECK(mc.num_states() >= cgs.num_states());
    std::vector<StateId> h{cgs.initial_state()};
    std::vector<const NatStrategy*> profile{&rec};
    AtomId p = *cgs.atom_id("p");
    for (int depth = 1; depth <= 6; ++depth)
        CHECK(chain_reach(mc, mc.initial(), p, depth) ==
              brute_reach(cgs, profile, h, p, depth));
}

TEST_CASE("behavioral strategies mix exactly") {
    Cgs cgs = fixtures::chooser();
    Distribution mix = Distribution::make(
        {{*cgs.action_id("x"), Rational(1, 3)}, {*cgs.action_id("y"), Rational(2, 3)}});
    NatStrategy s(0, Setting::Memoryless,
                  {{GuardRegex::mk_leaf(parse_bool("!p")), mix},
                   {GuardRegex::mk_leaf(BoolFormula::mk_true()),
                    Distribution::dirac(*cgs.action_id("x"))}});
    MarkovChain mc = fix_all(cgs, {{0, &s}}, cgs.initial_state());
    // From u: 1/3 x (half u, half v) + 2/3 y (u) -> u: 1/3*1/2 + 2/3 = 5/6.
    const Distribution& row = mc.row(mc.initial());
    CHECK(row.prob(mc.initial()) == Rational(5, 6));
    std::vector<StateId> h{cgs.initial_state()};
    std::vector<const NatStrategy*> profile{&s};
    AtomId p = *cgs.atom_id("p");
    for (int depth = 1; depth <= 6; ++depth)
        CHECK(chain_reach(mc, mc.initial(), p, depth) ==
              brute_reach(cgs, profile, h, p, depth));
}

TEST_CASE("fix_coalition with every agent fixed agrees with fix_all") {
    Cgs cgs = fixtures::two_agent();
    NatStrategy sa = top_strategy(cgs, 0, "l");
    NatStrategy sb = top_strategy(cgs, 1, "r");
    Mdp mdp = fix_coalition(cgs, {0, 1}, {{0, &sa}, {1, &sb}}, cgs.initial_state());
    MarkovChain mc = fix_all(cgs, {{0, &sa}, {1, &sb}}, cgs.initial_state());
    REQUIRE(mdp.num_states() == mc.num_states());
    for (int i = 0; i < mdp.num_states(); ++i) {
        REQUIRE(mdp.choices(i).size() == 1);
        CHECK(mdp.choices(i)[0].dist == mc.row(i));
        CHECK(mdp.pstate(i) == mc.pstate(i));
    }
}

TEST_CASE("profile errors") {
    Cgs cgs = fixtures::two_agent();
    NatStrategy sa = top_strategy(cgs, 0, "l");
    CHECK_THROWS_AS(fix_coalition(cgs, {1}, {{1, &sa}}, 0), StrategyAgentMismatchError);
    CHECK_THROWS_AS(fix_coalition(cgs, {0, 1}, {{0, &sa}}, 0),
                    StrategyAgentMismatchError);
    CHECK_THROWS_AS(fix_all(cgs, {{0, &sa}}, 0), MissingAgentStrategyError);
}

TEST_CASE("explicit-state export") {
    Cgs cgs = fixtures::coin();
    NatStrategy s = top_strategy(cgs, 0, "toss");
    MarkovChain mc = fix_all(cgs, {{0, &s}}, cgs.initial_state());
    std::ostringstream out;
    mc.export_explicit(out, cgs);
    CHECK(out.str().find("s0 - sH 1/2") != std::string::npos);
    CHECK(out.str().find("sH - sH 1") != std::string::npos);

    Cgs game = fixtures::two_agent();
    NatStrategy ga = top_strategy(game, 0, "l");
    Mdp mdp = fix_coalition(game, {0}, {{0, &ga}}, game.initial_state());
    std::ostringstream mout;
    mdp.export_explicit(mout, game);
    CHECK(mout.str().find("g0 l g1 1") != std::string::npos);
}
