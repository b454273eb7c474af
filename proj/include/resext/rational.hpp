#pragma once

// Exact rational arithmetic used for weights, exponents and jumping numbers.

#include "resext/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace resext {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Largest integer <= q.
inline BigInt floor(const Rational& q)
{
    const BigInt& num = boost::multiprecision::numerator(q);
    const BigInt& den = boost::multiprecision::denominator(q);
    BigInt quot = num / den; // truncates toward zero
    if (num < 0 && quot * den != num) {
        quot -= 1;
    }
    return quot;
}

inline bool is_integer(const Rational& q)
{
    return boost::multiprecision::denominator(q) == 1;
}

inline double to_double(const Rational& q)
{
    return q.convert_to<double>();
}

inline long long to_ll(const BigInt& z)
{
    return z.convert_to<long long>();
}

/// Parses "p/q", "p" or a terminating decimal such as "0.25".
inline Rational parse_rational(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text.empty()) {
        throw PreconditionError("empty rational literal");
    }
    auto parse_int = [&](std::string_view s) -> BigInt {
        s = trim(s);
        std::size_t i = 0;
        if (!s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
        if (i == s.size()) throw PreconditionError("bad rational literal: " + std::string(text));
        for (std::size_t k = i; k < s.size(); ++k) {
            if (!std::isdigit(static_cast<unsigned char>(s[k]))) {
                throw PreconditionError("bad rational literal: " + std::string(text));
            }
        }
        return BigInt(std::string(s));
    };

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        BigInt num = parse_int(text.substr(0, slash));
        BigInt den = parse_int(text.substr(slash + 1));
        if (den == 0) throw PreconditionError("zero denominator: " + std::string(text));
        return Rational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        bool negative = !whole.empty() && whole[0] == '-';
        BigInt w = (whole.empty() || whole == "-" || whole == "+") ? BigInt(0) : parse_int(whole);
        if (w < 0) w = -w;
        BigInt f = frac.empty() ? BigInt(0) : parse_int(frac);
        BigInt scale = 1;
        for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
        Rational q = Rational(w) + Rational(f, scale);
        return negative ? Rational(-q) : q;
    }
    return Rational(parse_int(text));
}

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& q)
{
    if (is_integer(q)) {
        return boost::multiprecision::numerator(q).str();
    }
    return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

inline std::vector<Rational> parse_rational_list(std::string_view csv)
{
    std::vector<Rational> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        if (comma == std::string_view::npos) comma = csv.size();
        out.push_back(parse_rational(csv.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

} // namespace resext
