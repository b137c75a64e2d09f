#pragma once

#include "natpatl/omega.hpp"

#include <map>
#include <optional>

namespace natpatl {

enum class Verdict { True, False, Unknown };

enum class VocabMode { Default, Minterms, Custom };
enum class SolveMode { Exact, Iterative };
enum class OpponentMode { MdpAdversary, Enumerate };

struct CheckConfig {
    Setting setting = Setting::Memoryless;
    VocabMode vocab = VocabMode::Default;
    std::vector<BoolPtr> custom_vocab;
    SolveMode solve = SolveMode::Exact;
    Rational tolerance = Rational(1, 1000);
    OpponentMode opponent = OpponentMode::MdpAdversary;
    int opponent_bound = 1;
    std::size_t budget = 100000;
};

/// A successful coalition profile for one (state, coalition subformula)
/// query, with the worst-case probability it achieves.
struct CoalitionWitness {
    std::string formula;
    StateId state;
    std::vector<NatStrategy> profile;  // coalition members, agent order
    Rational probability;
};

struct CheckStats {
    long coalition_queries = 0;
    long profiles_tried = 0;
    long solver_calls = 0;
};

struct CheckResult {
    Verdict verdict = Verdict::Unknown;  // for the whole formula at s0

    // Bottom-up truth tables: printed subformula -> verdict per state.
    std::vector<std::pair<std::string, std::vector<Verdict>>> truth;
    std::vector<CoalitionWitness> witnesses;
    CheckStats stats;

    const std::vector<Verdict>* truth_of(const std::string& printed) const;
    const CoalitionWitness* witness_of(const std::string& printed, StateId s) const;
};

/// Bottom-up decision procedure. Coalition operators enumerate deterministic
/// coalition profiles (each member's complexity bounded by the operator's k)
/// in ascending complexity order; opponents are resolved per cfg.opponent.
/// Verdict Unknown arises only in iterative solve mode, when a certified
/// interval straddles the threshold.
CheckResult check(const Cgs& cgs, StateId s0, const FormulaPtr& f,
                  const CheckConfig& cfg);

/// The positive-fragment procedure: identical verdicts to check; exposed
/// separately because only coalition-member witnesses are needed there.
/// Throws NotPositiveFragmentError outside the fragment.
CheckResult check_positive_np_path(const Cgs& cgs, StateId s0, const FormulaPtr& f,
                                   const CheckConfig& cfg);

/// The guard vocabulary a config denotes on a model.
std::vector<BoolPtr> config_vocab(const CheckConfig& cfg, const Cgs& cgs);

std::string verdict_to_string(Verdict v);

}  // namespace natpatl
