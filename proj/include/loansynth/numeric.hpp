#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace loansynth {

/// On-ledger integer amount in base units. 256-bit signed with overflow checks,
/// so arithmetic overflow surfaces as an exception instead of wrapping.
using Amount = boost::multiprecision::checked_int256_t;

/// Exact rational, used for prices and USD-denominated profit.
using Rational = boost::multiprecision::cpp_rational;

namespace detail {
// cpp_int treats a leading 0 as an octal prefix; strip it for decimal input.
inline std::string decimal_digits(std::string text)
{
    bool neg = !text.empty() && text[0] == '-';
    if (neg || (!text.empty() && text[0] == '+'))
        text.erase(0, 1);
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("not a decimal integer: " + text);
    auto nz = text.find_first_not_of('0');
    text = nz == std::string::npos ? "0" : text.substr(nz);
    return neg ? "-" + text : text;
}
} // namespace detail

inline Amount parse_amount(const std::string& text)
{
    // Accept plain integers and the "<mantissa>e<exp>" shorthand used in
    // benchmark files ("2900030e18").
    auto pos = text.find_first_of("eE");
    if (pos == std::string::npos)
        return Amount(detail::decimal_digits(text));
    std::string mant = text.substr(0, pos);
    int exp = std::stoi(text.substr(pos + 1));
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
        int frac = static_cast<int>(mant.size() - dot - 1);
        mant.erase(dot, 1);
        exp -= frac;
    }
    if (exp < 0)
        throw std::invalid_argument("amount is not an integer: " + text);
    Amount value(detail::decimal_digits(mant));
    for (int i = 0; i < exp; ++i)
        value *= 10;
    return value;
}

inline Rational parse_rational(const std::string& text)
{
    auto slash = text.find('/');
    if (slash != std::string::npos)
        return Rational(boost::multiprecision::cpp_int(detail::decimal_digits(text.substr(0, slash))),
                        boost::multiprecision::cpp_int(detail::decimal_digits(text.substr(slash + 1))));
    auto dot = text.find('.');
    if (dot == std::string::npos)
        return Rational(boost::multiprecision::cpp_int(detail::decimal_digits(text)));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    boost::multiprecision::cpp_int den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i)
        den *= 10;
    return Rational(boost::multiprecision::cpp_int(detail::decimal_digits(digits)), den);
}

inline double to_double(const Amount& a) { return a.convert_to<double>(); }
inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Amount amount_from_double(double v)
{
    if (!std::isfinite(v))
        throw std::domain_error("non-finite amount");
    return Amount(boost::multiprecision::cpp_int(std::round(v)));
}

inline Amount pow10(int exp)
{
    Amount v = 1;
    for (int i = 0; i < exp; ++i)
        v *= 10;
    return v;
}

inline Amount isqrt(const Amount& v)
{
    if (v < 0)
        throw std::domain_error("isqrt of negative");
    return Amount(boost::multiprecision::sqrt(boost::multiprecision::cpp_int(v)));
}

inline std::string to_string(const Amount& a) { return a.str(); }

} // namespace loansynth
