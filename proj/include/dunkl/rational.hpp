#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace dunkl {

using Rational = mpq_class;

// Accepts "3", "-3/4", "0.125", "1e-3". Decimals are converted exactly.
Rational parse_rational(std::string_view text);

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double v) { return v; }

std::string to_string(const Rational& q);

}  // namespace dunkl
