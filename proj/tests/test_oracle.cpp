#include "doctest.h"

#include "natpatl/oracle.hpp"
#include "support/fixtures.hpp"

#include <cmath>

using namespace natpatl;

namespace {

NatStrategy always(const Cgs& cgs, const std::string& agent,
                   const std::string& action) {
    return NatStrategy(*cgs.agent_id(agent), Setting::Memoryless,
                       {{parse_regex("T"),
                         Distribution::dirac(*cgs.action_id(action))}});
}

UntilObjective reach(const Cgs& cgs, const std::string& atom) {
    UntilObjective obj;
    obj.safe.assign(cgs.num_states(), true);
    obj.target.resize(cgs.num_states());
    for (StateId s = 0; s < cgs.num_states(); ++s)
        obj.target[s] = cgs.has_label(s, *cgs.atom_id(atom));
    return obj;
}

}  // namespace

TEST_CASE("coin estimate lands within three sigma of one half") {
    Cgs cgs = fixtures::coin();
    std::vector<NatStrategy> profile{always(cgs, "a", "toss")};
    Estimate e = estimate_until(cgs, profile, cgs.initial_state(),
                                reach(cgs, "heads"), 1, 100000, 42);
    CHECK(e.samples == 100000);
    CHECK(e.horizon == 1);
    double p = static_cast<double>(e.hits) / 100000.0;
    CHECK(std::abs(p - 0.5) <= 3.0 * e.sigma());
}

TEST_CASE("certain objectives give exact estimates with empty intervals") {
    Cgs cgs = fixtures::coin();
    std::vector<NatStrategy> profile{always(cgs, "a", "toss")};
    UntilObjective all;
    all.safe.assign(cgs.num_states(), true);
    all.target.assign(cgs.num_states(), true);
    Estimate e =
        estimate_until(cgs, profile, cgs.initial_state(), all, 3, 1000, 7);
    CHECK(e.value == Rational(1));
    CHECK(e.ci_low == 1.0);
    CHECK(e.ci_high == 1.0);
    CHECK(e.sigma() == 0.0);
}

TEST_CASE("horizon zero inspects only the start state") {
    Cgs cgs = fixtures::coin();
    std::vector<NatStrategy> profile{always(cgs, "a", "toss")};
    UntilObjective obj = reach(cgs, "heads");
    CHECK(estimate_until(cgs, profile, *cgs.state_id("s0"), obj, 0, 100, 1).value ==
          Rational(0));
    CHECK(estimate_until(cgs, profile, *cgs.state_id("sH"), obj, 0, 100, 1).value ==
          Rational(1));
}

TEST_CASE("estimates and traces are reproducible bit for bit") {
    Cgs cgs = fixtures::two_state();
    std::vector<NatStrategy> profile{always(cgs, "a", "go")};
    UntilObjective obj = reach(cgs, "p");
    Estimate a = estimate_until(cgs, profile, 0, obj, 5, 2000, 123);
    Estimate b = estimate_until(cgs, profile, 0, obj, 5, 2000, 123);
    CHECK(a.hits == b.hits);
    CHECK(a.value == b.value);
    CHECK(simulate_traces(cgs, profile, 0, 5, 10, 123) ==
          simulate_traces(cgs, profile, 0, 5, 10, 123));
    // A different seed does reshuffle the sample paths.
    CHECK(simulate_traces(cgs, profile, 0, 5, 10, 123) !=
          simulate_traces(cgs, profile, 0, 5, 10, 124));
}

TEST_CASE("batched estimation matches a single sequential run") {
    Cgs cgs = fixtures::two_state();
    std::vector<NatStrategy> profile{always(cgs, "a", "go")};
    UntilObjective obj = reach(cgs, "p");
    Estimate whole = estimate_until(cgs, profile, 0, obj, 4, 9000, 99);
    Estimate parts = estimate_until_batched(cgs, profile, 0, obj, 4,
                                            {1000, 5000, 0, 3000}, 99);
    CHECK(whole.hits == parts.hits);
    CHECK(whole.samples == parts.samples);
    CHECK(whole.value == parts.value);
    CHECK(whole.ci_low == parts.ci_low);
    CHECK(whole.ci_high == parts.ci_high);
}

TEST_CASE("behavioral strategies are sampled") {
    Cgs cgs = fixtures::chooser();
    // Mix x and y evenly at every state: one step hits p with chance 1/4.
    NatStrategy mix(*cgs.agent_id("a"), Setting::Memoryless,
                    {{parse_regex("T"),
                      Distribution::make({{*cgs.action_id("x"), Rational(1, 2)},
                                          {*cgs.action_id("y"), Rational(1, 2)}})}});
    Estimate e = estimate_until(cgs, {mix}, cgs.initial_state(),
                                reach(cgs, "p"), 1, 100000, 5);
    double p = static_cast<double>(e.hits) / 100000.0;
    CHECK(std::abs(p - 0.25) <= 3.0 * e.sigma());
}

TEST_CASE("interval half width follows the documented formula") {
    Cgs cgs = fixtures::coin();
    std::vector<NatStrategy> profile{always(cgs, "a", "toss")};
    Estimate e = estimate_until(cgs, profile, cgs.initial_state(),
                                reach(cgs, "heads"), 1, 10000, 3);
    double p = static_cast<double>(e.hits) / 10000.0;
    double hw = kZ99 * std::sqrt(p * (1.0 - p) / 10000.0);
    CHECK(e.ci_low == doctest::Approx(p - hw).epsilon(1e-12));
    CHECK(e.ci_high == doctest::Approx(p + hw).epsilon(1e-12));
}

TEST_CASE("incomplete profiles are rejected") {
    Cgs cgs = fixtures::two_agent();
    std::vector<NatStrategy> only_a{always(cgs, "a", "l")};
    CHECK_THROWS_AS(estimate_until(cgs, only_a, 0, reach(cgs, "win"), 2, 10, 1),
                    MissingAgentStrategyError);
}

TEST_CASE("trace lines alternate states and joint actions") {
    Cgs cgs = fixtures::two_agent();
    std::vector<NatStrategy> profile{always(cgs, "a", "l"), always(cgs, "b", "l")};
    std::string t = simulate_traces(cgs, profile, 0, 2, 3, 11);
    CHECK(t == "g0 (l,l) g1 (l,l) g1\ng0 (l,l) g1 (l,l) g1\ng0 (l,l) g1 (l,l) g1\n");
}
