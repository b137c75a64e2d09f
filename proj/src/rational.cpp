#include "natpatl/rational.hpp"

#include <cctype>

namespace natpatl {

namespace {

// Decimal reading always; cpp_int would treat a leading 0 as octal.
BigInt parse_big(const std::string& text) {
    std::string t = text;
    bool neg = !t.empty() && t[0] == '-';
    std::size_t i = neg ? 1 : 0;
    while (i + 1 < t.size() && t[i] == '0') ++i;
    t = (neg ? "-" : "") + t.substr(i);
    return BigInt(t);
}

}  // namespace

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num = parse_big(text.substr(0, slash));
        BigInt den = parse_big(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in " + text);
        return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        std::size_t frac_len = text.size() - dot - 1;
        if (frac_len == 0) throw std::invalid_argument("bad decimal literal " + text);
        BigInt num = parse_big(digits);
        BigInt den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        return Rational(num, den);
    }
    return Rational(parse_big(text));
}

std::string rational_to_string(const Rational& r) {
    return r.str();
}

double to_double(const Rational& r) {
    return r.convert_to<double>();
}

}  // namespace natpatl
