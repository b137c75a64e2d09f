#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace natpatl {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Exact probability value in [0, 1]. All arithmetic on the underlying
/// rational is exact; the range check happens at construction.
class Prob {
public:
    Prob() : value_(0) {}

    explicit Prob(Rational v) : value_(std::move(v)) {
        if (value_ < 0 || value_ > 1)
            throw std::invalid_argument("probability out of [0,1]: " + to_string());
    }

    Prob(long num, long den) : Prob(Rational(num, den)) {}

    const Rational& value() const { return value_; }

    bool is_zero() const { return value_ == 0; }
    bool is_one() const { return value_ == 1; }

    std::string to_string() const {
        return value_.str();
    }

    friend bool operator==(const Prob& a, const Prob& b) { return a.value_ == b.value_; }
    friend bool operator!=(const Prob& a, const Prob& b) { return a.value_ != b.value_; }
    friend bool operator<(const Prob& a, const Prob& b) { return a.value_ < b.value_; }
    friend bool operator<=(const Prob& a, const Prob& b) { return a.value_ <= b.value_; }
    friend bool operator>(const Prob& a, const Prob& b) { return a.value_ > b.value_; }
    friend bool operator>=(const Prob& a, const Prob& b) { return a.value_ >= b.value_; }

    static Prob zero() { return Prob(); }
    static Prob one() { return Prob(Rational(1)); }

private:
    Rational value_;
};

/// Parses "a/b", an integer, or a decimal literal ("0.9" -> 9/10) exactly.
Rational parse_rational(const std::string& text);

std::string rational_to_string(const Rational& r);

double to_double(const Rational& r);

}  // namespace natpatl
