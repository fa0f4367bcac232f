#include "scami/rational.hpp"

#include "scami/errors.hpp"

namespace scami {

std::string fraction_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) {
    s += "/";
    s += denominator(r).str();
  }
  return s;
}

Rational parse_fraction(const std::string& text) {
  try {
    auto slash = text.find('/');
    if (slash == std::string::npos) {
      return Rational(BigInt(text));
    }
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw FormatError("zero denominator in '" + text + "'");
    return Rational(num, den);
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception&) {
    throw FormatError("not a rational: '" + text + "'");
  }
}

}  // namespace scami
