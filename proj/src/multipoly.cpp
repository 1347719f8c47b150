#include "dunkl/multipoly.hpp"

#include <cctype>
#include <sstream>

namespace dunkl {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

RationalPoly parse_term(const std::string& term, int dim, const std::string& whole) {
    Rational coeff = 1;
    std::array<int, kMaxPolyDim> e{};
    std::stringstream ss(term);
    std::string factor;
    bool any = false;
    while (std::getline(ss, factor, '*')) {
        std::string f = trim(factor);
        if (f.empty()) throw InvalidArgument("empty factor in polynomial '" + whole + "'");
        any = true;
        if (f[0] == 'x') {
            std::size_t caret = f.find('^');
            std::string idx = f.substr(1, caret == std::string::npos ? std::string::npos : caret - 1);
            int var = 0;
            try {
                var = std::stoi(idx);
            } catch (const std::exception&) {
                throw InvalidArgument("bad variable '" + f + "' in polynomial '" + whole + "'");
            }
            if (var < 1 || var > dim) throw InvalidArgument("variable '" + f + "' out of range for dimension " + std::to_string(dim));
            int power = 1;
            if (caret != std::string::npos) {
                try {
                    power = std::stoi(f.substr(caret + 1));
                } catch (const std::exception&) {
                    throw InvalidArgument("bad exponent in '" + f + "'");
                }
                if (power < 0) throw InvalidArgument("negative exponent in '" + f + "'");
            }
            e[static_cast<std::size_t>(var - 1)] += power;
        } else {
            coeff *= parse_rational(f);
        }
    }
    if (!any) throw InvalidArgument("empty term in polynomial '" + whole + "'");
    RationalPoly p(dim);
    p.add_term(Monomial::from(std::span<const int>(e.data(), static_cast<std::size_t>(dim))), coeff);
    return p;
}

template <class T>
std::string format_impl(const MultiPoly<T>& p) {
    if (p.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    // highest degree first for readability
    std::vector<std::pair<Monomial, T>> terms(p.terms().begin(), p.terms().end());
    std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first.degree() > b.first.degree(); });
    for (const auto& [m, c] : terms) {
        bool neg = c < 0;
        T mag = neg ? T(-c) : c;
        if (first)
            out << (neg ? "-" : "");
        else
            out << (neg ? " - " : " + ");
        first = false;
        bool unit = (mag == T(1)) && m.degree() > 0;
        bool need_star = false;
        if (!unit) {
            if constexpr (std::is_same_v<T, Rational>)
                out << mag.get_str();
            else
                out << mag;
            need_star = true;
        }
        for (int i = 0; i < p.dim(); ++i) {
            int e = m.exp(i);
            if (e == 0) continue;
            if (need_star) out << '*';
            out << 'x' << (i + 1);
            if (e > 1) out << '^' << e;
            need_star = true;
        }
    }
    return out.str();
}

}  // namespace

RationalPoly parse_poly(std::string_view text, int dim) {
    std::string s = trim(text);
    if (s.empty()) throw InvalidArgument("empty polynomial literal");
    RationalPoly p(dim);
    std::string cur;
    int sign = 1;
    auto flush = [&](bool at_end) {
        std::string t = trim(cur);
        if (t.empty()) {
            if (at_end || !cur.empty()) throw InvalidArgument("dangling operator in polynomial '" + s + "'");
            return;
        }
        RationalPoly term = parse_term(t, dim, s);
        if (sign < 0) term = -term;
        p += term;
        cur.clear();
    };
    bool leading = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        // '+'/'-' split terms unless they follow '^', '/', '*' or an exponent marker
        bool binary = (c == '+' || c == '-');
        if (binary) {
            std::string t = trim(cur);
            char prev = t.empty() ? '\0' : t.back();
            if (prev == '^' || prev == '/' || prev == '*') {
                cur.push_back(c);
                continue;
            }
            if (t.empty()) {
                if (!leading) throw InvalidArgument("dangling operator in polynomial '" + s + "'");
                sign = (c == '-') ? -sign : sign;
                continue;
            }
            flush(false);
            sign = (c == '-') ? -1 : 1;
            leading = true;
            continue;
        }
        if (!std::isspace(static_cast<unsigned char>(c))) leading = false;
        cur.push_back(c);
    }
    flush(true);
    return p;
}

std::string format_poly(const RationalPoly& p) { return format_impl(p); }
std::string format_poly(const FloatPoly& p) { return format_impl(p); }

}  // namespace dunkl
