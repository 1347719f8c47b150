#include "dunkl/rational.hpp"

#include <cctype>

#include "dunkl/error.hpp"

namespace dunkl {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

Rational parse_decimal(const std::string& s) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        negative = s[pos] == '-';
        ++pos;
    }
    std::string digits;
    long exponent = 0;
    bool seen_digit = false;
    bool after_point = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seen_digit = true;
            if (after_point) --exponent;
        } else if (c == '.' && !after_point) {
            after_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw InvalidArgument("malformed number '" + s + "'");
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        ++pos;
        std::size_t used = 0;
        long e = 0;
        try {
            e = std::stol(s.substr(pos), &used);
        } catch (const std::exception&) {
            throw InvalidArgument("malformed exponent in '" + s + "'");
        }
        pos += used;
        exponent += e;
    }
    if (pos != s.size()) throw InvalidArgument("trailing characters in '" + s + "'");
    mpz_class num(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational q = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string s = trim(text);
    if (s.empty()) throw InvalidArgument("empty number");
    auto slash = s.find('/');
    if (slash == std::string::npos) return parse_decimal(s);
    Rational num = parse_decimal(trim(std::string_view(s).substr(0, slash)));
    Rational den = parse_decimal(trim(std::string_view(s).substr(slash + 1)));
    if (den == 0) throw InvalidArgument("zero denominator in '" + s + "'");
    Rational q = num / den;
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace dunkl
