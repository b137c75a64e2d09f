// Python bindings: the main operations (loading, parsing, checking,
// simulation, enumeration, encoding) with plain dict/str results so the
// module is usable without mirroring the whole C++ API.

#include "natpatl/checker.hpp"
#include "natpatl/modelio.hpp"
#include "natpatl/oracle.hpp"
#include "natpatl/rarith.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace natpatl;

namespace {

CheckConfig make_config(const std::string& setting, const std::string& vocab,
                        const std::string& solve, const std::string& tolerance,
                        const std::string& opponent, int opponent_bound) {
    CheckConfig cfg;
    if (setting == "r") cfg.setting = Setting::Memoryless;
    else if (setting == "R") cfg.setting = Setting::Recall;
    else throw Error("setting must be 'r' or 'R'");

    if (vocab == "literals") cfg.vocab = VocabMode::Default;
    else if (vocab == "minterms") cfg.vocab = VocabMode::Minterms;
    else throw Error("vocab must be 'literals' or 'minterms'");

    if (solve == "exact") cfg.solve = SolveMode::Exact;
    else if (solve == "iterative") cfg.solve = SolveMode::Iterative;
    else throw Error("solve must be 'exact' or 'iterative'");
    cfg.tolerance = parse_rational(tolerance);

    if (opponent == "mdp") cfg.opponent = OpponentMode::MdpAdversary;
    else if (opponent == "enumerate") cfg.opponent = OpponentMode::Enumerate;
    else throw Error("opponent must be 'mdp' or 'enumerate'");
    cfg.opponent_bound = opponent_bound;
    return cfg;
}

StateId resolve_state(const Cgs& cgs, const std::optional<std::string>& name) {
    if (!name) return cgs.initial_state();
    auto id = cgs.state_id(*name);
    if (!id) throw Error("unknown state '" + *name + "'");
    return *id;
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
        throw Error("until expects 'phi U psi' (or F psi) over Boolean "
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

py::dict result_dict(const CheckResult& r, const Cgs& cgs) {
    py::dict out;
    out["verdict"] = verdict_to_string(r.verdict);
    py::list witnesses;
    for (const auto& w : r.witnesses) {
        py::list profile;
        for (const auto& s : w.profile)
            profile.append(py::make_tuple(cgs.agent_names()[s.agent()],
                                          print_strategy(s, cgs)));
        py::dict jw;
        jw["formula"] = w.formula;
        jw["state"] = cgs.state_names()[w.state];
        jw["probability"] = rational_to_string(w.probability);
        jw["profile"] = profile;
        witnesses.append(jw);
    }
    out["witnesses"] = witnesses;
    py::dict stats;
    stats["coalition_queries"] = r.stats.coalition_queries;
    stats["profiles_tried"] = r.stats.profiles_tried;
    stats["solver_calls"] = r.stats.solver_calls;
    out["stats"] = stats;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "NatPATL/NatPATL* model checking over stochastic concurrent "
              "game structures";

    py::register_exception<Error>(m, "NatPatlError");

    py::class_<Cgs>(m, "Cgs")
        .def_property_readonly("num_states", &Cgs::num_states)
        .def_property_readonly("num_agents", &Cgs::num_agents)
        .def_property_readonly("states",
                               [](const Cgs& c) { return c.state_names(); })
        .def_property_readonly("agents",
                               [](const Cgs& c) { return c.agent_names(); })
        .def_property_readonly("atoms",
                               [](const Cgs& c) { return c.atom_names(); })
        .def_property_readonly("initial_state", [](const Cgs& c) {
            return c.state_names()[c.initial_state()];
        });

    py::class_<NatStrategy>(m, "NatStrategy")
        .def_property_readonly("setting",
                               [](const NatStrategy& s) {
                                   return s.setting() == Setting::Memoryless
                                              ? "r" : "R";
                               })
        .def_property_readonly("deterministic", &NatStrategy::deterministic)
        .def_property_readonly("complexity",
                               [](const NatStrategy& s) { return complexity(s); });

    m.def("load_cgs", &load_cgs, py::arg("path"),
          "Parse and validate a .cgs model file.");
    m.def("parse_cgs", [](const std::string& text) {
        return validate_cgs(parse_cgs_text(text));
    }, py::arg("text"), "Parse and validate model text.");

    m.def("load_strategy", &load_strategy, py::arg("path"), py::arg("model"));
    m.def("parse_strategy", &parse_strategy_text, py::arg("text"),
          py::arg("model"));
    m.def("print_strategy",
          [](const NatStrategy& s, const Cgs& cgs) {
              return print_strategy(s, cgs);
          },
          py::arg("strategy"), py::arg("model"));

    m.def("parse_formula",
          [](const std::string& text, const Cgs& cgs) {
              return print_formula(parse_formula(text, &cgs));
          },
          py::arg("text"), py::arg("model"),
          "Parse a formula against a model; returns the canonical print.");

    m.def("check",
          [](const Cgs& cgs, const std::string& formula,
             const std::optional<std::string>& state, const std::string& setting,
             const std::string& vocab, const std::string& solve,
             const std::string& tolerance, const std::string& opponent,
             int opponent_bound, bool positive) {
              CheckConfig cfg = make_config(setting, vocab, solve, tolerance,
                                            opponent, opponent_bound);
              FormulaPtr f = parse_formula(formula, &cgs);
              StateId s0 = resolve_state(cgs, state);
              CheckResult r = positive
                                  ? check_positive_np_path(cgs, s0, f, cfg)
                                  : check(cgs, s0, f, cfg);
              return result_dict(r, cgs);
          },
          py::arg("model"), py::arg("formula"), py::arg("state") = py::none(),
          py::arg("setting") = "r", py::arg("vocab") = "literals",
          py::arg("solve") = "exact", py::arg("tolerance") = "1/1000",
          py::arg("opponent") = "mdp", py::arg("opponent_bound") = 1,
          py::arg("positive") = false);

    m.def("estimate_until",
          [](const Cgs& cgs, const std::vector<NatStrategy>& profile,
             const std::string& until, std::uint64_t n, std::uint64_t seed,
             int horizon, const std::optional<std::string>& state) {
              UntilObjective obj = objective_from(until, cgs);
              StateId s0 = resolve_state(cgs, state);
              if (horizon <= 0)
                  horizon = choose_horizon(cgs, profile, s0, obj,
                                           std::min<std::uint64_t>(n, 1000),
                                           1.0 / 1000.0, 1 << 14, seed);
              Estimate e = estimate_until(cgs, profile, s0, obj, horizon, n, seed);
              py::dict out;
              out["estimate"] = rational_to_string(e.value);
              out["value"] = to_double(e.value);
              out["ci99"] = py::make_tuple(e.ci_low, e.ci_high);
              out["hits"] = e.hits;
              out["samples"] = e.samples;
              out["horizon"] = e.horizon;
              return out;
          },
          py::arg("model"), py::arg("profile"), py::arg("until"),
          py::arg("n") = 10000, py::arg("seed") = 0, py::arg("horizon") = 0,
          py::arg("state") = py::none());

    m.def("enumerate_strategies",
          [](const Cgs& cgs, const std::string& agent, int k,
             const std::string& setting, const std::string& vocab, long limit) {
              CheckConfig cfg = make_config(setting, vocab, "exact", "1/1000",
                                            "mdp", 1);
              auto id = cgs.agent_id(agent);
              if (!id) throw Error("unknown agent '" + agent + "'");
              std::vector<std::string> out;
              enumerate_det(*id, k, cfg.setting, config_vocab(cfg, cgs), cgs,
                            [&](const NatStrategy& s) {
                                out.push_back(print_strategy(s, cgs));
                                return limit <= 0 ||
                                       static_cast<long>(out.size()) < limit;
                            });
              return out;
          },
          py::arg("model"), py::arg("agent"), py::arg("k"),
          py::arg("setting") = "r", py::arg("vocab") = "literals",
          py::arg("limit") = 0);

    m.def("encode",
          [](const Cgs& cgs, const std::string& formula,
             const std::string& vocab) {
              CheckConfig cfg = make_config("r", vocab, "exact", "1/1000",
                                            "mdp", 1);
              FormulaPtr f = parse_formula(formula, &cgs);
              if (f->kind != Formula::Kind::Coalition)
                  throw Error("encode expects a coalition formula");
              RealArithScript script =
                  encode(cgs, f, static_cast<int>(f->complexity_bound),
                         config_vocab(cfg, cgs));
              py::dict out;
              out["smt2"] = script.smt2();
              out["metadata"] = script.metadata(cgs);
              out["num_skeletons"] = script.num_skeletons;
              out["num_vars"] = static_cast<int>(script.vars.size());
              return out;
          },
          py::arg("model"), py::arg("formula"), py::arg("vocab") = "literals");
}
