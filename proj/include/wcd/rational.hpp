#ifndef WCD_RATIONAL_HPP
#define WCD_RATIONAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

#include "wcd/errors.hpp"

namespace wcd {

using Integer = boost::multiprecision::mpz_int;

/// Exact rational, always in lowest terms. Used for every probability and ratio.
using Rational = boost::multiprecision::mpq_rational;

/// A probability in [0,1]. Same representation as Rational; the alias documents intent.
using Probability = Rational;

/// Ratio that may be infinite (std::nullopt).
using ExtendedRatio = std::optional<Rational>;

inline Rational make_rational(const Integer& num, const Integer& den) { return Rational(num, den); }

inline Rational make_rational(std::int64_t num, std::int64_t den) { return Rational(Integer(num), Integer(den)); }

inline Integer numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

/// `num/den`, or `num` when the denominator is 1 and `always_fraction` is false.
inline std::string to_fraction_string(const Rational& r, bool always_fraction = true) {
  Integer den = denominator_of(r);
  if (den == 1 && !always_fraction) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + den.str();
}

/// Fixed-point decimal with `digits` fractional digits, rounded half away from zero.
/// Computed with integer arithmetic so the rendering is identical on every platform.
inline std::string to_decimal_string(const Rational& r, unsigned digits = 10) {
  Integer num = numerator_of(r);
  Integer den = denominator_of(r);
  bool negative = num < 0;
  if (negative) num = -num;
  Integer scale = 1;
  for (unsigned i = 0; i < digits; ++i) scale *= 10;
  Integer scaled = (num * scale * 2 + den) / (den * 2);
  Integer whole = scaled / scale;
  Integer frac = scaled % scale;
  std::string frac_str = frac.str();
  std::string out = (negative && scaled != 0 ? "-" : "") + whole.str();
  if (digits > 0) out += "." + std::string(digits - frac_str.size(), '0') + frac_str;
  return out;
}

/// `num/den (decimal)`, the presentation format used by the CLI.
inline std::string to_display_string(const Rational& r, unsigned digits = 6) {
  return to_fraction_string(r) + " (" + to_decimal_string(r, digits) + ")";
}

/// Accepts `N`, `N/D` or a plain decimal `I.F`; the result is exact.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&]() { return ValidationError("not a rational number: '" + std::string(text) + "'"); };
  auto is_int = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  auto to_int = [](std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    return Integer(std::string(s));
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto n = text.substr(0, slash);
    auto d = text.substr(slash + 1);
    if (!is_int(n) || !is_int(d)) throw bad();
    Integer den = to_int(d);
    if (den == 0) throw ValidationError("zero denominator in '" + std::string(text) + "'");
    return Rational(to_int(n), den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    if (frac.empty() || !is_int(frac) || frac.front() == '-' || frac.front() == '+') throw bad();
    bool negative = !whole.empty() && whole.front() == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole = "0";
    if (!is_int(whole)) throw bad();
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Integer w = to_int(whole);
    if (w < 0) w = -w;
    Integer num = w * scale + to_int(frac);
    return Rational(negative ? Integer(-num) : num, scale);
  }
  if (!is_int(text)) throw bad();
  return Rational(to_int(text));
}

}  // namespace wcd

#endif  // WCD_RATIONAL_HPP
