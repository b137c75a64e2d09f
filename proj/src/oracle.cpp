#include "natpatl/oracle.hpp"

#include "natpatl/product.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace natpatl {

double Estimate::sigma() const {
    if (samples == 0) return 0.0;
    double p = static_cast<double>(hits) / static_cast<double>(samples);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over seed + index.
    std::uint64_t z = seed + index + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

void check_profile(const Cgs& cgs, const std::vector<NatStrategy>& profile) {
    for (AgentId a = 0; a < cgs.num_agents(); ++a) {
        bool found = false;
        for (const auto& s : profile) found = found || s.agent() == a;
        if (!found)
            throw MissingAgentStrategyError("no strategy for agent " +
                                            cgs.agent_names()[a]);
    }
}

// Inverse-CDF draw with a 53-bit uniform variate. Doubles keep sampling
// deterministic across runs; exactness is the solvers' job, not the
// oracle's.
int sample_dist(const Distribution& d, std::mt19937_64& rng) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double acc = 0.0;
    for (const auto& [key, p] : d.entries()) {
        acc += to_double(p);
        if (u < acc) return key;
    }
    return d.entries().back().first;
}

struct Play {
    std::vector<StateId> states;
    std::vector<JointAction> actions;
};

// Strategy memory is advanced incrementally via the product-module update,
// so a play of length H costs O(H) automaton steps rather than O(H^2)
// reruns over growing histories. When `stop` is given, the play ends as
// soon as its outcome is decided (target hit or safety violated); the
// decision is unchanged, only unneeded tail steps are skipped.
Play run_play(const Cgs& cgs, const std::vector<NatStrategy>& profile,
              StateId from, int horizon, std::mt19937_64& rng,
              const UntilObjective* stop = nullptr) {
    FixedProfile fixed;
    for (const auto& s : profile) fixed.push_back({s.agent(), &s});
    std::sort(fixed.begin(), fixed.end(),
              [](const FixedAgent& a, const FixedAgent& b) {
                  return a.agent < b.agent;
              });
    Play play;
    play.states.push_back(from);
    MemoryVector memory = initial_memory(cgs.labels(from), fixed, cgs);
    for (int step = 0; step < horizon; ++step) {
        StateId here = play.states.back();
        if (stop && (stop->target[here] || !stop->safe[here])) break;
        JointAction joint(cgs.num_agents());
        for (std::size_t i = 0; i < fixed.size(); ++i) {
            const Distribution& d =
                act_from_memory(*fixed[i].strategy, memory[i], here, cgs);
            joint[fixed[i].agent] = d.is_dirac() ? d.dirac_key()
                                                 : sample_dist(d, rng);
        }
        StateId next = sample_dist(cgs.successors(here, joint), rng);
        play.actions.push_back(std::move(joint));
        play.states.push_back(next);
        memory = memory_update(memory, cgs.labels(next), fixed, cgs);
    }
    return play;
}

bool play_hits(const std::vector<StateId>& states, const UntilObjective& obj) {
    for (StateId s : states) {
        if (obj.target[s]) return true;
        if (!obj.safe[s]) return false;
    }
    return false;
}

Estimate finish(std::uint64_t hits, std::uint64_t n, int horizon) {
    Estimate e;
    e.hits = hits;
    e.samples = n;
    e.horizon = horizon;
    e.value = n == 0 ? Rational(0) : Rational(hits) / Rational(n);
    double p = n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
    double hw = kZ99 * e.sigma();
    e.ci_low = std::max(0.0, p - hw);
    e.ci_high = std::min(1.0, p + hw);
    return e;
}

// Deterministic memoryless profiles induce a plain Markov chain over model
// states; sampling it from a precomputed CDF table avoids the per-step
// strategy machinery. Per-sample outcomes match the general path: plays
// end once decided or stuck in a non-target absorbing state, neither of
// which can change the decision, so estimates are unchanged.
struct ChainTable {
    std::vector<std::vector<double>> cdf;
    std::vector<std::vector<int>> succ;
};

std::optional<ChainTable> chain_table(const Cgs& cgs,
                                      const std::vector<NatStrategy>& profile) {
    for (const auto& s : profile)
        if (!s.deterministic() || s.setting() != Setting::Memoryless)
            return std::nullopt;
    ChainTable t;
    t.cdf.resize(cgs.num_states());
    t.succ.resize(cgs.num_states());
    for (StateId s = 0; s < cgs.num_states(); ++s) {
        JointAction joint(cgs.num_agents());
        History h({s});
        for (const auto& strat : profile)
            joint[strat.agent()] = act(strat, h, cgs).dirac_key();
        double acc = 0.0;
        for (const auto& [target, p] : cgs.successors(s, joint).entries()) {
            acc += to_double(p);
            t.cdf[s].push_back(acc);
            t.succ[s].push_back(target);
        }
    }
    return t;
}

std::uint64_t count_hits(const Cgs& cgs, const std::vector<NatStrategy>& profile,
                         StateId from, const UntilObjective& obj, int horizon,
                         std::uint64_t first, std::uint64_t count,
                         std::uint64_t seed) {
    std::uint64_t hits = 0;
    if (auto table = chain_table(cgs, profile)) {
        for (std::uint64_t i = 0; i < count; ++i) {
            std::mt19937_64 rng(derive_seed(seed, first + i));
            StateId s = from;
            for (int step = 0;; ++step) {
                if (obj.target[s]) { ++hits; break; }
                if (!obj.safe[s] || step == horizon) break;
                const auto& cdf = table->cdf[s];
                // A non-target absorbing state can never decide later.
                if (cdf.size() == 1 && table->succ[s][0] == s) break;
                double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                std::size_t j = 0;
                while (j + 1 < cdf.size() && u >= cdf[j]) ++j;
                s = table->succ[s][j];
            }
        }
        return hits;
    }
    for (std::uint64_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(derive_seed(seed, first + i));
        Play play = run_play(cgs, profile, from, horizon, rng, &obj);
        if (play_hits(play.states, obj)) ++hits;
    }
    return hits;
}

}  // namespace

std::uint64_t batch_hits(const Cgs& cgs, const std::vector<NatStrategy>& profile,
                         StateId from, const UntilObjective& obj, int horizon,
                         std::uint64_t first, std::uint64_t count,
                         std::uint64_t seed) {
    check_profile(cgs, profile);
    return count_hits(cgs, profile, from, obj, horizon, first, count, seed);
}

Estimate make_estimate(std::uint64_t hits, std::uint64_t samples, int horizon) {
    return finish(hits, samples, horizon);
}

int choose_horizon(const Cgs& cgs, const std::vector<NatStrategy>& profile,
                   StateId from, const UntilObjective& obj, std::uint64_t pilot,
                   double tol, int max_horizon, std::uint64_t seed) {
    check_profile(cgs, profile);
    int h = std::max(1, cgs.num_states());
    std::uint64_t prev = pilot + 1;
    while (h < max_horizon) {
        std::uint64_t undecided = 0;
        for (std::uint64_t i = 0; i < pilot; ++i) {
            std::mt19937_64 rng(derive_seed(seed, i));
            Play play = run_play(cgs, profile, from, h, rng);
            bool decided = false;
            for (StateId s : play.states)
                if (obj.target[s] || !obj.safe[s]) { decided = true; break; }
            if (!decided) ++undecided;
        }
        if (pilot == 0 ||
            static_cast<double>(undecided) <= tol * static_cast<double>(pilot))
            break;
        // Mass stuck in target-free recurrent behavior never decides; stop
        // escalating once doubling stops paying (under 10% improvement).
        if (undecided * 10 >= prev * 9) break;
        prev = undecided;
        h *= 2;
    }
    return std::min(h, max_horizon);
}

Estimate estimate_until(const Cgs& cgs, const std::vector<NatStrategy>& profile,
                        StateId from, const UntilObjective& obj, int horizon,
                        std::uint64_t n, std::uint64_t seed) {
    check_profile(cgs, profile);
    if (horizon < 0) throw Error("negative horizon");
    return finish(count_hits(cgs, profile, from, obj, horizon, 0, n, seed), n,
                  horizon);
}

Estimate estimate_until_batched(const Cgs& cgs,
                                const std::vector<NatStrategy>& profile,
                                StateId from, const UntilObjective& obj,
                                int horizon,
                                const std::vector<std::uint64_t>& batch_sizes,
                                std::uint64_t seed) {
    check_profile(cgs, profile);
    if (horizon < 0) throw Error("negative horizon");
    std::uint64_t hits = 0, offset = 0;
    for (std::uint64_t size : batch_sizes) {
        hits += count_hits(cgs, profile, from, obj, horizon, offset, size, seed);
        offset += size;
    }
    return finish(hits, offset, horizon);
}

std::string simulate_traces(const Cgs& cgs,
                            const std::vector<NatStrategy>& profile,
                            StateId from, int horizon, std::uint64_t count,
                            std::uint64_t seed) {
    check_profile(cgs, profile);
    std::ostringstream out;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        Play play = run_play(cgs, profile, from, horizon, rng);
        for (std::size_t j = 0; j < play.states.size(); ++j) {
            if (j > 0) {
                out << " (";
                const JointAction& joint = play.actions[j - 1];
                for (std::size_t a = 0; a < joint.size(); ++a) {
                    if (a > 0) out << ",";
                    out << cgs.action_names()[joint[a]];
                }
                out << ") ";
            }
            out << cgs.state_names()[play.states[j]];
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace natpatl
