#pragma once

#include "natpatl/natstrat.hpp"

namespace natpatl {

/// Parses the model DSL (.cgs). Line oriented, '#' starts a comment:
///
///   agents <name>+
///   props <name>*
///   actions <name>+
///   state <name> { <prop>* }
///   legal <state> <agent> { <action>+ }
///   trans <state> (<a1>, ..., <an>) -> { <state>: <p>/<q>, ... }
///   init <state>
///
/// Probabilities are fractions or integers; decimals are rejected. The
/// result is structurally unchecked; run validate_cgs for a Cgs.
RawModel parse_cgs_text(const std::string& text);

/// Convenience: parse + validate a model file.
Cgs load_cgs(const std::string& path);

/// Parses the strategy format (.nstrat):
///
///   agent <name>
///   setting r|R
///   <guard-regex> -> <action>
///   <guard-regex> -> { <action>: <p>/<q>, ... }
///
/// Pairs are ordered as written; the strategy is validated against the
/// model.
NatStrategy parse_strategy_text(const std::string& text, const Cgs& cgs);

NatStrategy load_strategy(const std::string& path, const Cgs& cgs);

/// Parses a formula list (.nf): one formula per line, '#' comments.
std::vector<FormulaPtr> parse_formula_list(const std::string& text, const Cgs& cgs);

std::vector<FormulaPtr> load_formulas(const std::string& path, const Cgs& cgs);

/// Reads a whole file; throws Error with the path on failure.
std::string read_file(const std::string& path);

}  // namespace natpatl
