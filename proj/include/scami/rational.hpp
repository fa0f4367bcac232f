#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace scami {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational coefficients for every symbolic computation; floating
// point enters only when polynomials are evaluated on measured moments.
using Rational = boost::multiprecision::cpp_rational;

// "3", "-5/2"; denominator omitted when it is 1.
std::string fraction_string(const Rational& r);

// Inverse of fraction_string; accepts "n" and "n/d". Throws FormatError.
Rational parse_fraction(const std::string& text);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace scami
