#include "natpatl/formula.hpp"

#include <cctype>
#include <functional>

namespace natpatl {

// ---------------------------------------------------------------------------
// BoolFormula
// ---------------------------------------------------------------------------

BoolPtr BoolFormula::mk_true() {
    static BoolPtr t = std::make_shared<BoolFormula>(BoolFormula{Kind::True, "", nullptr, nullptr});
    return t;
}
BoolPtr BoolFormula::mk_atom(std::string name) {
    return std::make_shared<BoolFormula>(BoolFormula{Kind::Atom, std::move(name), nullptr, nullptr});
}
BoolPtr BoolFormula::mk_not(BoolPtr f) {
    return std::make_shared<BoolFormula>(BoolFormula{Kind::Not, "", std::move(f), nullptr});
}
BoolPtr BoolFormula::mk_and(BoolPtr a, BoolPtr b) {
    return std::make_shared<BoolFormula>(BoolFormula{Kind::And, "", std::move(a), std::move(b)});
}
BoolPtr BoolFormula::mk_or(BoolPtr a, BoolPtr b) {
    return std::make_shared<BoolFormula>(BoolFormula{Kind::Or, "", std::move(a), std::move(b)});
}

bool eval_bool_labels(const BoolPtr& g, const std::vector<AtomId>& labels, const Cgs& cgs) {
    switch (g->kind) {
        case BoolFormula::Kind::True: return true;
        case BoolFormula::Kind::Atom: {
            auto id = cgs.atom_id(g->atom);
            if (!id) throw UnknownAtomError("unknown atom " + g->atom);
            return std::binary_search(labels.begin(), labels.end(), *id);
        }
        case BoolFormula::Kind::Not: return !eval_bool_labels(g->lhs, labels, cgs);
        case BoolFormula::Kind::And:
            return eval_bool_labels(g->lhs, labels, cgs) && eval_bool_labels(g->rhs, labels, cgs);
        case BoolFormula::Kind::Or:
            return eval_bool_labels(g->lhs, labels, cgs) || eval_bool_labels(g->rhs, labels, cgs);
    }
    return false;
}

bool eval_bool(const BoolPtr& g, StateId s, const Cgs& cgs) {
    return eval_bool_labels(g, cgs.labels(s), cgs);
}

int bool_symbol_count(const BoolPtr& g) {
    switch (g->kind) {
        case BoolFormula::Kind::True:
        case BoolFormula::Kind::Atom: return 1;
        case BoolFormula::Kind::Not: return 1 + bool_symbol_count(g->lhs);
        case BoolFormula::Kind::And:
        case BoolFormula::Kind::Or:
            return 1 + bool_symbol_count(g->lhs) + bool_symbol_count(g->rhs);
    }
    return 0;
}

namespace {

// Precedence: | = 1, & = 2, ! = 3.
void print_bool_rec(const BoolPtr& g, int parent_prec, std::string& out) {
    switch (g->kind) {
        case BoolFormula::Kind::True: out += "T"; return;
        case BoolFormula::Kind::Atom: out += g->atom; return;
        case BoolFormula::Kind::Not:
            out += "!";
            print_bool_rec(g->lhs, 3, out);
            return;
        case BoolFormula::Kind::And:
        case BoolFormula::Kind::Or: {
            bool is_and = g->kind == BoolFormula::Kind::And;
            int prec = is_and ? 2 : 1;
            bool paren = prec < parent_prec;
            if (paren) out += "(";
            print_bool_rec(g->lhs, prec, out);
            out += is_and ? " & " : " | ";
            print_bool_rec(g->rhs, prec + 1, out);
            if (paren) out += ")";
            return;
        }
    }
}

}  // namespace

std::string print_bool(const BoolPtr& g) {
    std::string out;
    print_bool_rec(g, 0, out);
    return out;
}

bool bool_equal(const BoolPtr& a, const BoolPtr& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->atom != b->atom) return false;
    if (!!a->lhs != !!b->lhs || !!a->rhs != !!b->rhs) return false;
    if (a->lhs && !bool_equal(a->lhs, b->lhs)) return false;
    if (a->rhs && !bool_equal(a->rhs, b->rhs)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Tokenizer shared by the Boolean and NatPATL parsers
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind {
        Ident, Number, Not, And, Or, LParen, RParen,
        CoalOpen, CoalClose, LBracket, RBracket, Comma, Equals,
        Le, Lt, Gt, Ge, End
    };
    Kind kind;
    std::string text;
    std::size_t pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return cur_; }

    Token next() {
        Token t = cur_;
        advance();
        return t;
    }

    void expect(Token::Kind k, const char* what) {
        if (cur_.kind != k) throw SyntaxError(std::string("expected ") + what, cur_.pos);
        advance();
    }

private:
    void advance() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
        std::size_t start = i_;
        if (i_ >= text_.size()) { cur_ = {Token::Kind::End, "", start}; return; }
        char c = text_[i_];
        auto two = text_.substr(i_, 2);
        if (two == "<<") { i_ += 2; cur_ = {Token::Kind::CoalOpen, two, start}; return; }
        if (two == ">>") { i_ += 2; cur_ = {Token::Kind::CoalClose, two, start}; return; }
        if (two == "<=") { i_ += 2; cur_ = {Token::Kind::Le, two, start}; return; }
        if (two == ">=") { i_ += 2; cur_ = {Token::Kind::Ge, two, start}; return; }
        switch (c) {
            case '!': ++i_; cur_ = {Token::Kind::Not, "!", start}; return;
            case '&': ++i_; cur_ = {Token::Kind::And, "&", start}; return;
            case '|': ++i_; cur_ = {Token::Kind::Or, "|", start}; return;
            case '(': ++i_; cur_ = {Token::Kind::LParen, "(", start}; return;
            case ')': ++i_; cur_ = {Token::Kind::RParen, ")", start}; return;
            case '[': ++i_; cur_ = {Token::Kind::LBracket, "[", start}; return;
            case ']': ++i_; cur_ = {Token::Kind::RBracket, "]", start}; return;
            case ',': ++i_; cur_ = {Token::Kind::Comma, ",", start}; return;
            case '=': ++i_; cur_ = {Token::Kind::Equals, "=", start}; return;
            case '<': ++i_; cur_ = {Token::Kind::Lt, "<", start}; return;
            case '>': ++i_; cur_ = {Token::Kind::Gt, ">", start}; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            while (j < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[j])) || text_[j] == '/' ||
                    text_[j] == '.'))
                ++j;
            cur_ = {Token::Kind::Number, text_.substr(i_, j - i_), start};
            i_ = j;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
                ++j;
            cur_ = {Token::Kind::Ident, text_.substr(i_, j - i_), start};
            i_ = j;
            return;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", start);
    }

    const std::string& text_;
    std::size_t i_ = 0;
    Token cur_{Token::Kind::End, "", 0};
};

class BoolParser {
public:
    explicit BoolParser(Lexer& lex) : lex_(lex) {}

    BoolPtr parse_or() {
        BoolPtr f = parse_and();
        while (lex_.peek().kind == Token::Kind::Or) {
            lex_.next();
            f = BoolFormula::mk_or(f, parse_and());
        }
        return f;
    }

private:
    BoolPtr parse_and() {
        BoolPtr f = parse_unary();
        while (lex_.peek().kind == Token::Kind::And) {
            lex_.next();
            f = BoolFormula::mk_and(f, parse_unary());
        }
        return f;
    }

    BoolPtr parse_unary() {
        const Token& t = lex_.peek();
        switch (t.kind) {
            case Token::Kind::Not:
                lex_.next();
                return BoolFormula::mk_not(parse_unary());
            case Token::Kind::LParen: {
                lex_.next();
                BoolPtr f = parse_or();
                lex_.expect(Token::Kind::RParen, ")");
                return f;
            }
            case Token::Kind::Ident: {
                Token id = lex_.next();
                if (id.text == "T") return BoolFormula::mk_true();
                return BoolFormula::mk_atom(id.text);
            }
            default:
                throw SyntaxError("expected guard formula", t.pos);
        }
    }

    Lexer& lex_;
};

}  // namespace

BoolPtr parse_bool(const std::string& text) {
    Lexer lex(text);
    BoolParser p(lex);
    BoolPtr f = p.parse_or();
    if (lex.peek().kind != Token::Kind::End)
        throw SyntaxError("trailing input after guard", lex.peek().pos);
    return f;
}

// ---------------------------------------------------------------------------
// CmpOp
// ---------------------------------------------------------------------------

CmpOp conjugate(CmpOp op) {
    switch (op) {
        case CmpOp::Le: return CmpOp::Lt;
        case CmpOp::Lt: return CmpOp::Le;
        case CmpOp::Gt: return CmpOp::Ge;
        case CmpOp::Ge: return CmpOp::Gt;
    }
    return CmpOp::Ge;
}

bool cmp_holds(const Rational& lhs, CmpOp op, const Rational& rhs) {
    switch (op) {
        case CmpOp::Le: return lhs <= rhs;
        case CmpOp::Lt: return lhs < rhs;
        case CmpOp::Gt: return lhs > rhs;
        case CmpOp::Ge: return lhs >= rhs;
    }
    return false;
}

std::string cmp_to_string(CmpOp op) {
    switch (op) {
        case CmpOp::Le: return "<=";
        case CmpOp::Lt: return "<";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Formula constructors
// ---------------------------------------------------------------------------

namespace {
FormulaPtr mk(Formula f) { return std::make_shared<Formula>(std::move(f)); }
}

FormulaPtr Formula::mk_true() {
    Formula f{};
    f.kind = Kind::True;
    return mk(std::move(f));
}
FormulaPtr Formula::mk_atom(std::string name) {
    Formula f{};
    f.kind = Kind::Atom;
    f.atom = std::move(name);
    return mk(std::move(f));
}
FormulaPtr Formula::mk_or(FormulaPtr a, FormulaPtr b) {
    Formula f{};
    f.kind = Kind::Or;
    f.lhs = std::move(a);
    f.rhs = std::move(b);
    return mk(std::move(f));
}
FormulaPtr Formula::mk_and(FormulaPtr a, FormulaPtr b) {
    Formula f{};
    f.kind = Kind::And;
    f.lhs = std::move(a);
    f.rhs = std::move(b);
    return mk(std::move(f));
}
FormulaPtr Formula::mk_not(FormulaPtr g) {
    Formula f{};
    f.kind = Kind::Not;
    f.lhs = std::move(g);
    return mk(std::move(f));
}
FormulaPtr Formula::mk_next(FormulaPtr g) {
    Formula f{};
    f.kind = Kind::Next;
    f.lhs = std::move(g);
    return mk(std::move(f));
}
FormulaPtr Formula::mk_until(FormulaPtr a, FormulaPtr b) {
    Formula f{};
    f.kind = Kind::Until;
    f.lhs = std::move(a);
    f.rhs = std::move(b);
    return mk(std::move(f));
}
FormulaPtr Formula::mk_coalition(std::vector<std::string> agents, CmpOp cmp, Rational d,
                                 long k, FormulaPtr body) {
    if (d < 0 || d > 1)
        throw ThresholdOutOfRangeError("threshold " + d.str() + " not in [0,1]");
    if (k < 1) throw Error("complexity bound must be at least 1");
    Formula f{};
    f.kind = Kind::Coalition;
    f.coalition = std::move(agents);
    std::sort(f.coalition.begin(), f.coalition.end());
    f.coalition.erase(std::unique(f.coalition.begin(), f.coalition.end()), f.coalition.end());
    f.cmp = cmp;
    f.threshold = std::move(d);
    f.complexity_bound = k;
    f.body = std::move(body);
    return mk(std::move(f));
}
FormulaPtr Formula::mk_eventually(FormulaPtr g) {
    return mk_until(mk_true(), std::move(g));
}
FormulaPtr Formula::mk_globally(FormulaPtr g) {
    return mk_not(mk_until(mk_true(), mk_not(std::move(g))));
}

// ---------------------------------------------------------------------------
// Formula parser
// ---------------------------------------------------------------------------

namespace {

class FormulaParser {
public:
    FormulaParser(Lexer& lex, const Cgs* cgs) : lex_(lex), cgs_(cgs) {}

    FormulaPtr parse() { return parse_or(); }

private:
    FormulaPtr parse_or() {
        FormulaPtr f = parse_and();
        while (lex_.peek().kind == Token::Kind::Or) {
            lex_.next();
            f = Formula::mk_or(f, parse_and());
        }
        return f;
    }

    FormulaPtr parse_and() {
        FormulaPtr f = parse_until();
        while (lex_.peek().kind == Token::Kind::And) {
            lex_.next();
            f = Formula::mk_and(f, parse_until());
        }
        return f;
    }

    FormulaPtr parse_until() {
        FormulaPtr f = parse_unary();
        if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "U") {
            lex_.next();
            return Formula::mk_until(f, parse_until());  // right associative
        }
        return f;
    }

    FormulaPtr parse_unary() {
        const Token& t = lex_.peek();
        switch (t.kind) {
            case Token::Kind::Not:
                lex_.next();
                return Formula::mk_not(parse_unary());
            case Token::Kind::LParen: {
                lex_.next();
                FormulaPtr f = parse_or();
                lex_.expect(Token::Kind::RParen, ")");
                return f;
            }
            case Token::Kind::CoalOpen:
                return parse_coalition();
            case Token::Kind::Ident: {
                Token id = lex_.next();
                if (id.text == "T") return Formula::mk_true();
                if (id.text == "X") return Formula::mk_next(parse_unary());
                if (id.text == "F") return Formula::mk_eventually(parse_unary());
                if (id.text == "G") return Formula::mk_globally(parse_unary());
                return Formula::mk_atom(id.text);
            }
            default:
                throw SyntaxError("expected formula", t.pos);
        }
    }

    FormulaPtr parse_coalition() {
        lex_.expect(Token::Kind::CoalOpen, "<<");
        std::vector<std::string> agents;
        while (lex_.peek().kind == Token::Kind::Ident) {
            Token id = lex_.next();
            if (cgs_ && !cgs_->agent_id(id.text))
                throw UnknownAgentError("unknown agent " + id.text);
            agents.push_back(id.text);
            if (lex_.peek().kind == Token::Kind::Comma)
                lex_.next();
            else
                break;
        }
        lex_.expect(Token::Kind::CoalClose, ">>");
        lex_.expect(Token::Kind::LBracket, "[");
        CmpOp cmp;
        switch (lex_.peek().kind) {
            case Token::Kind::Le: cmp = CmpOp::Le; break;
            case Token::Kind::Lt: cmp = CmpOp::Lt; break;
            case Token::Kind::Gt: cmp = CmpOp::Gt; break;
            case Token::Kind::Ge: cmp = CmpOp::Ge; break;
            default: throw SyntaxError("expected comparison operator", lex_.peek().pos);
        }
        lex_.next();
        if (lex_.peek().kind != Token::Kind::Number)
            throw SyntaxError("expected threshold", lex_.peek().pos);
        Rational d = parse_rational(lex_.next().text);
        if (d < 0 || d > 1) throw ThresholdOutOfRangeError("threshold " + d.str());
        lex_.expect(Token::Kind::Comma, ",");
        Token kword = lex_.next();
        if (kword.kind != Token::Kind::Ident || kword.text != "k")
            throw SyntaxError("expected k=", kword.pos);
        lex_.expect(Token::Kind::Equals, "=");
        if (lex_.peek().kind != Token::Kind::Number)
            throw SyntaxError("expected complexity bound", lex_.peek().pos);
        long k = std::stol(lex_.next().text);
        lex_.expect(Token::Kind::RBracket, "]");
        FormulaPtr body = parse_unary();
        return Formula::mk_coalition(std::move(agents), cmp, std::move(d), k, std::move(body));
    }

    Lexer& lex_;
    const Cgs* cgs_;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, const Cgs* cgs) {
    Lexer lex(text);
    FormulaParser p(lex, cgs);
    FormulaPtr f = p.parse();
    if (lex.peek().kind != Token::Kind::End)
        throw SyntaxError("trailing input after formula", lex.peek().pos);
    return f;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Precedence: | = 1, & = 2, U = 3, unary = 4.
void print_rec(const FormulaPtr& f, int parent_prec, std::string& out) {
    switch (f->kind) {
        case Formula::Kind::True: out += "T"; return;
        case Formula::Kind::Atom: out += f->atom; return;
        case Formula::Kind::Or:
        case Formula::Kind::And: {
            bool is_and = f->kind == Formula::Kind::And;
            int prec = is_and ? 2 : 1;
            bool paren = prec < parent_prec;
            if (paren) out += "(";
            print_rec(f->lhs, prec, out);
            out += is_and ? " & " : " | ";
            print_rec(f->rhs, prec + 1, out);
            if (paren) out += ")";
            return;
        }
        case Formula::Kind::Until: {
            if (f->lhs->kind == Formula::Kind::True) {  // F sugar
                out += "F ";
                print_rec(f->rhs, 5, out);
                return;
            }
            bool paren = 3 < parent_prec;
            if (paren) out += "(";
            print_rec(f->lhs, 4, out);
            out += " U ";
            print_rec(f->rhs, 3, out);
            if (paren) out += ")";
            return;
        }
        case Formula::Kind::Not: {
            const FormulaPtr& u = f->lhs;
            if (u->kind == Formula::Kind::Until && u->lhs->kind == Formula::Kind::True &&
                u->rhs->kind == Formula::Kind::Not) {  // G sugar
                out += "G ";
                print_rec(u->rhs->lhs, 5, out);
                return;
            }
            out += "!";
            print_rec(f->lhs, 5, out);
            return;
        }
        case Formula::Kind::Next:
            out += "X ";
            print_rec(f->lhs, 5, out);
            return;
        case Formula::Kind::Coalition: {
            out += "<<";
            for (std::size_t i = 0; i < f->coalition.size(); ++i) {
                if (i) out += ",";
                out += f->coalition[i];
            }
            out += ">>[" + cmp_to_string(f->cmp) + f->threshold.str() + ", k=" +
                   std::to_string(f->complexity_bound) + "] ";
            print_rec(f->body, 5, out);
            return;
        }
    }
}

}  // namespace

std::string print_formula(const FormulaPtr& f) {
    std::string out;
    print_rec(f, 0, out);
    return out;
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->atom != b->atom) return false;
    if (a->kind == Formula::Kind::Coalition) {
        if (a->coalition != b->coalition || a->cmp != b->cmp ||
            a->threshold != b->threshold || a->complexity_bound != b->complexity_bound)
            return false;
        return formula_equal(a->body, b->body);
    }
    if (!!a->lhs != !!b->lhs || !!a->rhs != !!b->rhs) return false;
    if (a->lhs && !formula_equal(a->lhs, b->lhs)) return false;
    if (a->rhs && !formula_equal(a->rhs, b->rhs)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

namespace {

// Def. 2 shape: a state formula whose temporal operators appear only as the
// immediate body of a coalition operator (X phi or phi U psi over state
// formulas).
bool is_state_formula(const FormulaPtr& f) {
    switch (f->kind) {
        case Formula::Kind::True:
        case Formula::Kind::Atom: return true;
        case Formula::Kind::Or:
        case Formula::Kind::And:
            return is_state_formula(f->lhs) && is_state_formula(f->rhs);
        case Formula::Kind::Not: return is_state_formula(f->lhs);
        case Formula::Kind::Next:
        case Formula::Kind::Until: return false;
        case Formula::Kind::Coalition: {
            const FormulaPtr& b = f->body;
            if (b->kind == Formula::Kind::Next) return is_state_formula(b->lhs);
            if (b->kind == Formula::Kind::Until)
                return is_state_formula(b->lhs) && is_state_formula(b->rhs);
            return false;
        }
    }
    return false;
}

bool has_negation(const FormulaPtr& f) {
    switch (f->kind) {
        case Formula::Kind::True:
        case Formula::Kind::Atom: return false;
        case Formula::Kind::Not: return true;
        case Formula::Kind::Or:
        case Formula::Kind::And:
        case Formula::Kind::Until:
            return has_negation(f->lhs) || has_negation(f->rhs);
        case Formula::Kind::Next: return has_negation(f->lhs);
        case Formula::Kind::Coalition: return has_negation(f->body);
    }
    return false;
}

void parity_rec(const FormulaPtr& f, Parity p,
                std::vector<std::pair<FormulaPtr, Parity>>& out) {
    out.emplace_back(f, p);
    Parity flipped = p == Parity::Even ? Parity::Odd : Parity::Even;
    switch (f->kind) {
        case Formula::Kind::True:
        case Formula::Kind::Atom: return;
        case Formula::Kind::Not: parity_rec(f->lhs, flipped, out); return;
        case Formula::Kind::Or:
        case Formula::Kind::And:
        case Formula::Kind::Until:
            parity_rec(f->lhs, p, out);
            parity_rec(f->rhs, p, out);
            return;
        case Formula::Kind::Next: parity_rec(f->lhs, p, out); return;
        case Formula::Kind::Coalition: parity_rec(f->body, p, out); return;
    }
}

}  // namespace

Classification classify(const FormulaPtr& f) {
    Classification c;
    c.fragment = is_state_formula(f) ? Fragment::NatPatl : Fragment::NatPatlStar;
    c.positive = !has_negation(f);
    parity_rec(f, Parity::Even, c.parity);
    return c;
}

}  // namespace natpatl
