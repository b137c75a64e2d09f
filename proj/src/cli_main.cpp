#include "natpatl/modelio.hpp"
#include "natpatl/oracle.hpp"
#include "natpatl/rarith.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <future>
#include <iostream>

using namespace natpatl;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

struct CommonCheckFlags {
    std::string setting = "r";
    std::string vocab = "literals";
    std::string solve = "exact";
    std::string opponent = "mdp";
};

CheckConfig make_config(const CommonCheckFlags& flags, const Cgs& cgs) {
    CheckConfig cfg;
    if (flags.setting == "r") cfg.setting = Setting::Memoryless;
    else if (flags.setting == "R") cfg.setting = Setting::Recall;
    else throw Error("--setting must be r or R");

    if (flags.vocab == "literals") {
        cfg.vocab = VocabMode::Default;
    } else if (flags.vocab == "minterms") {
        cfg.vocab = VocabMode::Minterms;
    } else {
        cfg.vocab = VocabMode::Custom;
        // Vocabulary files hold Boolean guard leaves, one per line.
        std::istringstream in(read_file(flags.vocab));
        std::string line;
        cfg.custom_vocab.clear();
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            cfg.custom_vocab.push_back(parse_bool(line));
        }
    }

    if (flags.solve == "exact") {
        cfg.solve = SolveMode::Exact;
    } else if (flags.solve.rfind("iter:", 0) == 0) {
        cfg.solve = SolveMode::Iterative;
        cfg.tolerance = parse_rational(flags.solve.substr(5));
    } else {
        throw Error("--solve must be exact or iter:TOL");
    }

    if (flags.opponent == "mdp") {
        cfg.opponent = OpponentMode::MdpAdversary;
    } else if (flags.opponent.rfind("enumerate:", 0) == 0) {
        cfg.opponent = OpponentMode::Enumerate;
        cfg.opponent_bound = std::stoi(flags.opponent.substr(10));
    } else {
        throw Error("--opponent must be mdp or enumerate:BOUND");
    }
    return cfg;
}

json config_json(const CommonCheckFlags& flags) {
    return json{{"setting", flags.setting},
                {"vocab", flags.vocab},
                {"solve", flags.solve},
                {"opponent", flags.opponent}};
}

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

bool eval_plain(const FormulaPtr& f, StateId s, const Cgs& cgs) {
    switch (f->kind) {
        case Formula::Kind::True: return true;
        case Formula::Kind::Atom: {
            auto id = cgs.atom_id(f->atom);
            if (!id) throw UnknownAtomError("unknown atom '" + f->atom + "'");
            return cgs.has_label(s, *id);
        }
        case Formula::Kind::Not: return !eval_plain(f->lhs, s, cgs);
        case Formula::Kind::And:
            return eval_plain(f->lhs, s, cgs) && eval_plain(f->rhs, s, cgs);
        case Formula::Kind::Or:
            return eval_plain(f->lhs, s, cgs) || eval_plain(f->rhs, s, cgs);
        default:
            throw Error("objective operands must be Boolean state formulas");
    }
}

UntilObjective objective_from(const std::string& text, const Cgs& cgs) {
    FormulaPtr f = parse_formula(text, &cgs);
    if (f->kind != Formula::Kind::Until || !plain_state_formula(f->lhs) ||
        !plain_state_formula(f->rhs))
        throw Error("--until expects 'phi U psi' (or F psi) over Boolean "
                    "state formulas");
    UntilObjective obj;
    obj.safe.resize(cgs.num_states());
    obj.target.resize(cgs.num_states());
    for (StateId s = 0; s < cgs.num_states(); ++s) {
        obj.safe[s] = eval_plain(f->lhs, s, cgs);
        obj.target[s] = eval_plain(f->rhs, s, cgs);
    }
    return obj;
}

StateId resolve_state(const Cgs& cgs, const std::string& name) {
    if (name.empty()) return cgs.initial_state();
    auto id = cgs.state_id(name);
    if (!id) throw Error("unknown state '" + name + "'");
    return *id;
}

std::vector<NatStrategy> load_profile(const std::string& spec, const Cgs& cgs) {
    std::vector<NatStrategy> profile;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t comma = spec.find(',', start);
        std::string path = spec.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!path.empty()) profile.push_back(load_strategy(path, cgs));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return profile;
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
    if (const char* env = std::getenv("NATPATL_SEED")) return std::stoull(env);
    return flag_seed;
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::True: return 0;
        case Verdict::False: return 1;
        case Verdict::Unknown: return 2;
    }
    return 3;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

int run_check(const std::string& model, const std::vector<std::string>& formulas,
              const std::string& formula_file, const std::string& state,
              const CommonCheckFlags& flags, bool as_json, bool positive_only) {
    auto t0 = std::chrono::steady_clock::now();
    Cgs cgs = load_cgs(model);
    CheckConfig cfg = make_config(flags, cgs);
    StateId s0 = resolve_state(cgs, state);

    std::vector<FormulaPtr> fs;
    for (const auto& text : formulas) fs.push_back(parse_formula(text, &cgs));
    if (!formula_file.empty())
        for (auto& f : load_formulas(formula_file, cgs)) fs.push_back(std::move(f));
    if (fs.empty()) throw Error("no formula given (--formula or --formulas)");

    int exit_code = 0;
    json results = json::array();
    for (const auto& f : fs) {
        CheckResult r = positive_only ? check_positive_np_path(cgs, s0, f, cfg)
                                      : check(cgs, s0, f, cfg);
        exit_code = std::max(exit_code, verdict_exit(r.verdict));

        json jw = json::array();
        for (const auto& w : r.witnesses) {
            json profile = json::array();
            for (const auto& s : w.profile)
                profile.push_back(json{{"agent", cgs.agent_names()[s.agent()]},
                                       {"strategy", print_strategy(s, cgs)}});
            jw.push_back(json{{"formula", w.formula},
                              {"state", cgs.state_names()[w.state]},
                              {"probability", rational_to_string(w.probability)},
                              {"profile", profile}});
        }
        results.push_back(
            json{{"formula", print_formula(f)},
                 {"verdict", verdict_to_string(r.verdict)},
                 {"witnesses", jw},
                 {"stats", json{{"coalition_queries", r.stats.coalition_queries},
                                {"profiles_tried", r.stats.profiles_tried},
                                {"solver_calls", r.stats.solver_calls}}}});
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();

    if (as_json) {
        json report{{"tool", "natpatl"},
                    {"version", kVersion},
                    {"schema", kSchemaVersion},
                    {"command", "check"},
                    {"model", model},
                    {"state", cgs.state_names()[s0]},
                    {"config", config_json(flags)},
                    {"results", results},
                    {"elapsed_ms", ms}};
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "model: " << model << "  state: " << cgs.state_names()[s0]
                  << "\n";
        for (const auto& r : results)
            std::cout << r["verdict"].get<std::string>() << "  "
                      << r["formula"].get<std::string>() << "\n";
        for (const auto& r : results)
            for (const auto& w : r["witnesses"]) {
                std::cout << "\nwitness for " << w["formula"].get<std::string>()
                          << " at " << w["state"].get<std::string>()
                          << " (probability "
                          << w["probability"].get<std::string>() << "):\n";
                for (const auto& p : w["profile"])
                    std::cout << "  agent " << p["agent"].get<std::string>()
                              << ":\n"
                              << p["strategy"].get<std::string>();
            }
        std::cout << "elapsed: " << ms << " ms\n";
    }
    return exit_code;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int run_simulate(const std::string& model, const std::string& profile_spec,
                 const std::string& until, std::uint64_t n, std::uint64_t seed,
                 int horizon, int jobs, std::uint64_t traces, bool as_json) {
    Cgs cgs = load_cgs(model);
    std::vector<NatStrategy> profile = load_profile(profile_spec, cgs);
    UntilObjective obj = objective_from(until, cgs);
    StateId s0 = cgs.initial_state();
    seed = effective_seed(seed);

    if (horizon <= 0)
        horizon = choose_horizon(cgs, profile, s0, obj, std::min<std::uint64_t>(n, 1000),
                                 1.0 / 1000.0, 1 << 14, seed);

    // Fixed batch split by sample index: the aggregate is the same for any
    // jobs value because sample i always uses derive_seed(seed, i).
    if (jobs < 1) jobs = 1;
    std::vector<std::future<std::uint64_t>> tasks;
    std::uint64_t per = n / static_cast<std::uint64_t>(jobs);
    std::uint64_t offset = 0;
    for (int j = 0; j < jobs; ++j) {
        std::uint64_t count = j + 1 == jobs ? n - offset : per;
        tasks.push_back(std::async(std::launch::async, [&, offset, count] {
            return batch_hits(cgs, profile, s0, obj, horizon, offset, count, seed);
        }));
        offset += count;
    }
    std::uint64_t hits = 0;
    for (auto& t : tasks) hits += t.get();
    Estimate e = make_estimate(hits, n, horizon);

    std::string trace_text;
    if (traces > 0) trace_text = simulate_traces(cgs, profile, s0, horizon, traces, seed);

    if (as_json) {
        json report{{"tool", "natpatl"},
                    {"version", kVersion},
                    {"schema", kSchemaVersion},
                    {"command", "simulate"},
                    {"model", model},
                    {"until", until},
                    {"seed", seed},
                    {"n", e.samples},
                    {"horizon", e.horizon},
                    {"hits", e.hits},
                    {"estimate", rational_to_string(e.value)},
                    {"ci99", json::array({e.ci_low, e.ci_high})}};
        if (traces > 0) report["traces"] = trace_text;
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "estimate: " << rational_to_string(e.value) << " ("
                  << to_double(e.value) << ")\n"
                  << "99% interval: [" << e.ci_low << ", " << e.ci_high << "]\n"
                  << "samples: " << e.samples << "  horizon: " << e.horizon
                  << "  seed: " << seed << "\n";
        if (traces > 0) std::cout << trace_text;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// enumerate / encode / export
// ---------------------------------------------------------------------------

int run_enumerate(const std::string& model, const std::string& agent, int k,
                  const CommonCheckFlags& flags, long limit) {
    Cgs cgs = load_cgs(model);
    CheckConfig cfg = make_config(flags, cgs);
    auto id = cgs.agent_id(agent);
    if (!id) throw Error("unknown agent '" + agent + "'");
    long count = 0;
    enumerate_det(*id, k, cfg.setting, config_vocab(cfg, cgs), cgs,
                  [&](const NatStrategy& s) {
                      std::cout << "# c = " << complexity(s) << "\n"
                                << print_strategy(s, cgs) << "\n";
                      ++count;
                      return limit <= 0 || count < limit;
                  });
    std::cout << "# total: " << count << "\n";
    return 0;
}

int run_encode(const std::string& model, const std::string& formula,
               const CommonCheckFlags& flags, bool meta) {
    Cgs cgs = load_cgs(model);
    CheckConfig cfg = make_config(flags, cgs);
    FormulaPtr f = parse_formula(formula, &cgs);
    if (f->kind != Formula::Kind::Coalition)
        throw Error("encode expects a coalition formula");
    RealArithScript script = encode(cgs, f, static_cast<int>(f->complexity_bound),
                                    config_vocab(cfg, cgs));
    std::cout << (meta ? script.metadata(cgs) : script.smt2());
    return 0;
}

int run_export(const std::string& model, const std::string& profile_spec,
               const std::string& state) {
    Cgs cgs = load_cgs(model);
    std::vector<NatStrategy> profile = load_profile(profile_spec, cgs);
    StateId s0 = resolve_state(cgs, state);
    FixedProfile fixed;
    std::vector<AgentId> coalition;
    for (const auto& s : profile) {
        fixed.push_back({s.agent(), &s});
        coalition.push_back(s.agent());
    }
    std::sort(fixed.begin(), fixed.end(),
              [](const FixedAgent& a, const FixedAgent& b) { return a.agent < b.agent; });
    std::sort(coalition.begin(), coalition.end());
    if (static_cast<int>(profile.size()) == cgs.num_agents()) {
        MarkovChain mc = fix_all(cgs, fixed, s0);
        mc.export_explicit(std::cout, cgs);
    } else {
        Mdp mdp = fix_coalition(cgs, coalition, fixed, s0);
        mdp.export_explicit(std::cout, cgs);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"natpatl: model checking NatPATL/NatPATL* over stochastic "
                 "concurrent game structures"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string model, state, formula_file, profile_spec, until, agent, formula;
    std::vector<std::string> formulas;
    CommonCheckFlags flags;
    bool as_json = false, meta = false, positive_only = false;
    std::uint64_t n = 10000, seed = 0, traces = 0;
    int horizon = 0, jobs = 1, k = 1;
    long limit = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("model", model, "model file (.cgs)")->required();
        cmd->add_option("--setting", flags.setting, "strategy setting: r or R");
        cmd->add_option("--vocab", flags.vocab,
                        "guard vocabulary: literals, minterms or a file");
    };

    CLI::App* c = app.add_subcommand("check", "evaluate formulas at a state");
    add_common(c);
    c->add_option("--formula", formulas, "formula text (repeatable)");
    c->add_option("--formulas", formula_file, "formula list file (.nf)");
    c->add_option("--state", state, "state to report (default: initial)");
    c->add_option("--solve", flags.solve, "exact or iter:TOL");
    c->add_option("--opponent", flags.opponent, "mdp or enumerate:BOUND");
    c->add_option("--jobs", jobs, "parallelism (reserved; output independent)");
    c->add_flag("--json", as_json, "machine-readable report");
    c->add_flag("--positive", positive_only, "use the positive-fragment procedure");

    CLI::App* s = app.add_subcommand("simulate", "Monte-Carlo estimation");
    s->add_option("model", model, "model file (.cgs)")->required();
    s->add_option("--profile", profile_spec, "comma-separated .nstrat files")
        ->required();
    s->add_option("--until", until, "objective 'phi U psi' or 'F psi'")->required();
    s->add_option("--n", n, "sample count");
    s->add_option("--seed", seed, "RNG seed (NATPATL_SEED overrides)");
    s->add_option("--horizon", horizon, "play length (default: escalated)");
    s->add_option("--jobs", jobs, "parallel batches; aggregate independent of N");
    s->add_option("--trace", traces, "also print this many plays");
    s->add_flag("--json", as_json, "machine-readable report");

    CLI::App* e = app.add_subcommand("enumerate", "list canonical strategies");
    add_common(e);
    e->add_option("--agent", agent, "agent name")->required();
    e->add_option("--k", k, "complexity bound")->required();
    e->add_option("--limit", limit, "stop after this many (0: all)");

    CLI::App* n_ = app.add_subcommand("encode", "real-arithmetic script (SMT-LIB)");
    add_common(n_);
    n_->add_option("--formula", formula, "coalition formula")->required();
    n_->add_flag("--meta", meta, "print variable metadata instead");

    CLI::App* x = app.add_subcommand("export", "explicit product dump");
    x->add_option("model", model, "model file (.cgs)")->required();
    x->add_option("--profile", profile_spec, "comma-separated .nstrat files")
        ->required();
    x->add_option("--state", state, "start state (default: initial)");

    try {
        app.parse(argc, argv);
        if (c->parsed())
            return run_check(model, formulas, formula_file, state, flags, as_json,
                             positive_only);
        if (s->parsed())
            return run_simulate(model, profile_spec, until, n, seed, horizon, jobs,
                                traces, as_json);
        if (e->parsed()) return run_enumerate(model, agent, k, flags, limit);
        if (n_->parsed()) return run_encode(model, formula, flags, meta);
        if (x->parsed()) return run_export(model, profile_spec, state);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        // CLI11 maps help to 0 and usage errors to >100; both are fine for
        // the >2 error contract.
        return code;
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 4;
    }
    return 3;
}
