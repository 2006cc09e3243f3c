#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "wvn/error.hpp"

namespace wvn {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Arithmetic hooks that differ between the double and exact-rational
// instantiations of the closed-set queries. Conversions from double are exact.
template <class T>
struct number_traits;

template <>
struct number_traits<double> {
  static double from_double(double x) { return x; }
  static double to_double(double x) { return x; }
  static double floor(double x) { return std::floor(x); }
  static std::int64_t to_int64(double x) { return static_cast<std::int64_t>(x); }
  static double pow_int(double base, double exponent) { return std::pow(base, exponent); }
};

template <>
struct number_traits<Rational> {
  static Rational from_double(double x) { return Rational(x); }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }

  static Rational floor(const Rational& x) {
    const BigInt num = boost::multiprecision::numerator(x);
    const BigInt den = boost::multiprecision::denominator(x);
    BigInt q = num / den;
    if (num < 0 && q * den != num) q -= 1;
    return Rational(q);
  }

  static std::int64_t to_int64(const Rational& x) { return x.convert_to<std::int64_t>(); }

  // Exact for integral exponents up to 4096; beyond that the value is the
  // rational image of the double power (only reachable for geometric radii
  // that have long since underflowed any comparison we make).
  static Rational pow_int(const Rational& base, const Rational& exponent) {
    if (exponent > 4096 || exponent < 0) {
      return Rational(std::pow(to_double(base), to_double(exponent)));
    }
    auto e = exponent.convert_to<std::uint64_t>();
    Rational result = 1;
    Rational b = base;
    while (e != 0) {
      if (e & 1U) result *= b;
      b *= b;
      e >>= 1U;
    }
    return result;
  }
};

inline std::string to_string(const Rational& x) {
  return boost::multiprecision::numerator(x).str() + "/" +
         boost::multiprecision::denominator(x).str();
}

// "p" or "p/q" with decimal integers.
inline Rational rational_from_string(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    const BigInt den(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorCode::parse_error, "zero denominator in '" + text + "'");
    return Rational(BigInt(text.substr(0, slash)), den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse_error, "not a rational: '" + text + "'");
  }
}

}  // namespace wvn
