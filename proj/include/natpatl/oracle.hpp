#pragma once

#include "natpatl/natstrat.hpp"
#include "natpatl/probsolve.hpp"

#include <cstdint>

namespace natpatl {

// ---------------------------------------------------------------------------
// Monte-Carlo estimation of fully-fixed profiles
// ---------------------------------------------------------------------------

/// 99% two-sided normal quantile; the interval half-width is
/// z * sqrt(p(1-p)/n) with p = hits/n, clamped to [0, 1].
inline constexpr double kZ99 = 2.5758293035489404;

struct Estimate {
    Rational value;       // hits / samples, exact
    double ci_low = 0.0;  // normal-approximation interval at 99%
    double ci_high = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
    int horizon = 0;

    double sigma() const;  // sqrt(p(1-p)/n), 0 when n = 0
};

/// splitmix64 of (seed + index): the derived per-sample seed. Sample i of any
/// partition into batches uses derive_seed(seed, i), so parallel batches
/// aggregate exactly as a sequential run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Estimates Pr(safe U target within `horizon` steps) from `from` under the
/// profile (one strategy per agent of the model; behavioral strategies are
/// sampled). `obj` is indexed by model states. Horizon 0 inspects only
/// `from`. Deterministic given the seed: the generator is std::mt19937_64
/// seeded per sample via derive_seed. Throws MissingAgentStrategyError when
/// the profile does not cover every agent.
Estimate estimate_until(const Cgs& cgs, const std::vector<NatStrategy>& profile,
                        StateId from, const UntilObjective& obj, int horizon,
                        std::uint64_t n, std::uint64_t seed);

/// Same estimate computed in batches of the given sizes starting at sample
/// offset 0; bit-identical to a single call with n = sum of sizes.
Estimate estimate_until_batched(const Cgs& cgs,
                                const std::vector<NatStrategy>& profile,
                                StateId from, const UntilObjective& obj,
                                int horizon,
                                const std::vector<std::uint64_t>& batch_sizes,
                                std::uint64_t seed);

/// Raw hit count for samples [first, first + count); the building block of
/// the batched estimators, exposed so callers can parallelize batches.
std::uint64_t batch_hits(const Cgs& cgs, const std::vector<NatStrategy>& profile,
                         StateId from, const UntilObjective& obj, int horizon,
                         std::uint64_t first, std::uint64_t count,
                         std::uint64_t seed);

/// Builds an Estimate from an externally aggregated hit count using the
/// same interval formula as estimate_until.
Estimate make_estimate(std::uint64_t hits, std::uint64_t samples, int horizon);

/// Horizon escalation for unbounded untils: doubles the horizon from
/// |S| until a pilot of `pilot` samples leaves at most a `tol` fraction of
/// plays undecided (neither target hit nor safety violated), capped at
/// `max_horizon`. The exact solver remains the authority on tails.
int choose_horizon(const Cgs& cgs, const std::vector<NatStrategy>& profile,
                   StateId from, const UntilObjective& obj, std::uint64_t pilot,
                   double tol, int max_horizon, std::uint64_t seed);

/// Simulated plays for inspection: one play per line, alternating state
/// names and the joint action taken, e.g. "s0 (toss) sH (noop) sH". Uses the
/// same per-sample seeds as estimate_until.
std::string simulate_traces(const Cgs& cgs,
                            const std::vector<NatStrategy>& profile,
                            StateId from, int horizon, std::uint64_t count,
                            std::uint64_t seed);

}  // namespace natpatl
