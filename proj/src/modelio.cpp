#include "natpatl/modelio.hpp"

#include <fstream>
#include <sstream>

namespace natpatl {

namespace {

std::vector<std::string> tokenize_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
            out.push_back("->");
            i += 2;
            continue;
        }
        if (std::string("{}(),:").find(c) != std::string::npos) {
            out.push_back(std::string(1, c));
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
               std::string("{}(),:#").find(line[j]) == std::string::npos &&
               !(line[j] == '-' && j + 1 < line.size() && line[j + 1] == '>'))
            ++j;
        out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

[[noreturn]] void fail(int lineno, const std::string& msg) {
    throw SyntaxError("model file: " + msg + " (line " + std::to_string(lineno) + ")",
                      static_cast<std::size_t>(lineno));
}

Rational parse_prob(const std::string& tok, int lineno) {
    if (tok.find('.') != std::string::npos)
        fail(lineno, "decimal probabilities are not allowed, use fractions");
    try {
        return parse_rational(tok);
    } catch (const std::exception&) {
        fail(lineno, "malformed probability '" + tok + "'");
    }
}

// Consumes "{ item... }" starting at pos; returns the items.
std::vector<std::string> braced(const std::vector<std::string>& toks,
                                std::size_t& pos, int lineno) {
    if (pos >= toks.size() || toks[pos] != "{") fail(lineno, "expected '{'");
    ++pos;
    std::vector<std::string> items;
    while (pos < toks.size() && toks[pos] != "}") items.push_back(toks[pos++]);
    if (pos >= toks.size()) fail(lineno, "missing '}'");
    ++pos;
    return items;
}

}  // namespace

RawModel parse_cgs_text(const std::string& text) {
    RawModel m;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string> toks = tokenize_line(line);
        if (toks.empty()) continue;
        const std::string& head = toks[0];
        if (head == "agents") {
            m.agents.assign(toks.begin() + 1, toks.end());
        } else if (head == "props") {
            m.atoms.assign(toks.begin() + 1, toks.end());
        } else if (head == "actions") {
            m.actions.assign(toks.begin() + 1, toks.end());
        } else if (head == "state") {
            if (toks.size() < 2) fail(lineno, "state needs a name");
            std::size_t pos = 2;
            std::vector<std::string> labels;
            if (pos < toks.size()) labels = braced(toks, pos, lineno);
            if (pos != toks.size()) fail(lineno, "trailing tokens after state");
            m.states.emplace_back(toks[1], std::move(labels));
        } else if (head == "legal") {
            if (toks.size() < 4) fail(lineno, "legal needs state, agent and actions");
            std::size_t pos = 3;
            std::vector<std::string> acts = braced(toks, pos, lineno);
            if (pos != toks.size()) fail(lineno, "trailing tokens after legal");
            m.legality.emplace_back(toks[1], toks[2], std::move(acts));
        } else if (head == "trans") {
            if (toks.size() < 3) fail(lineno, "malformed trans");
            std::size_t pos = 2;
            if (toks[pos] != "(") fail(lineno, "expected '(' after state");
            ++pos;
            std::vector<std::string> profile;
            while (pos < toks.size() && toks[pos] != ")") {
                if (toks[pos] != ",") profile.push_back(toks[pos]);
                ++pos;
            }
            if (pos >= toks.size()) fail(lineno, "missing ')'");
            ++pos;
            if (pos >= toks.size() || toks[pos] != "->")
                fail(lineno, "expected '->' after profile");
            ++pos;
            std::vector<std::string> items = braced(toks, pos, lineno);
            if (pos != toks.size()) fail(lineno, "trailing tokens after trans");
            std::vector<std::pair<std::string, Rational>> row;
            // items: state : p (commas already stripped to separate tokens)
            for (std::size_t i = 0; i < items.size();) {
                if (items[i] == ",") { ++i; continue; }
                if (i + 2 >= items.size() || items[i + 1] != ":")
                    fail(lineno, "expected 'state: prob' entries");
                row.emplace_back(items[i], parse_prob(items[i + 2], lineno));
                i += 3;
            }
            m.transitions.emplace_back(toks[1], std::move(profile), std::move(row));
        } else if (head == "init") {
            if (toks.size() != 2) fail(lineno, "init needs exactly one state");
            m.initial = toks[1];
        } else {
            fail(lineno, "unknown directive '" + head + "'");
        }
    }
    return m;
}

Cgs load_cgs(const std::string& path) {
    return validate_cgs(parse_cgs_text(read_file(path)));
}

NatStrategy parse_strategy_text(const std::string& text, const Cgs& cgs) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::string agent;
    std::string setting;
    std::vector<StrategyPair> pairs;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream probe(line);
        std::string first;
        if (!(probe >> first)) continue;
        if (first == "agent") {
            if (!(probe >> agent)) fail(lineno, "agent needs a name");
            continue;
        }
        if (first == "setting") {
            if (!(probe >> setting) || (setting != "r" && setting != "R"))
                fail(lineno, "setting must be r or R");
            continue;
        }
        auto arrow = line.find("->");
        if (arrow == std::string::npos) fail(lineno, "expected 'guard -> action'");
        RegexPtr guard = parse_regex(line.substr(0, arrow));
        std::string rhs = line.substr(arrow + 2);
        std::vector<std::string> toks = tokenize_line(rhs);
        Distribution dist;
        if (toks.size() == 1) {
            auto a = cgs.action_id(toks[0]);
            if (!a) fail(lineno, "unknown action '" + toks[0] + "'");
            dist = Distribution::dirac(*a);
        } else {
            std::size_t pos = 0;
            std::vector<std::string> items = braced(toks, pos, lineno);
            if (pos != toks.size()) fail(lineno, "trailing tokens after distribution");
            std::vector<Distribution::Entry> entries;
            for (std::size_t i = 0; i < items.size();) {
                if (items[i] == ",") { ++i; continue; }
                if (i + 2 >= items.size() || items[i + 1] != ":")
                    fail(lineno, "expected 'action: prob' entries");
                auto a = cgs.action_id(items[i]);
                if (!a) fail(lineno, "unknown action '" + items[i] + "'");
                entries.emplace_back(*a, parse_prob(items[i + 2], lineno));
                i += 3;
            }
            dist = Distribution::make(std::move(entries));
        }
        pairs.push_back({guard, dist});
    }
    if (agent.empty()) throw SyntaxError("strategy file: missing 'agent' line", 0);
    if (setting.empty()) throw SyntaxError("strategy file: missing 'setting' line", 0);
    auto id = cgs.agent_id(agent);
    if (!id) throw UnknownAgentError("unknown agent '" + agent + "'");
    NatStrategy s(*id, setting == "r" ? Setting::Memoryless : Setting::Recall,
                  std::move(pairs));
    s.validate(cgs);
    return s;
}

NatStrategy load_strategy(const std::string& path, const Cgs& cgs) {
    return parse_strategy_text(read_file(path), cgs);
}

std::vector<FormulaPtr> parse_formula_list(const std::string& text, const Cgs& cgs) {
    std::vector<FormulaPtr> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse_formula(line, &cgs));
    }
    return out;
}

std::vector<FormulaPtr> load_formulas(const std::string& path, const Cgs& cgs) {
    return parse_formula_list(read_file(path), cgs);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace natpatl
