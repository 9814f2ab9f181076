#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lcktk {

using Rational = boost::multiprecision::cpp_rational;

/// Exact real scalar: a rational linear combination of 1 and log(p) for primes p.
///
/// The logarithms of distinct primes are linearly independent over the
/// rationals (and independent of 1), so equality on this representation is
/// genuine equality of real numbers. Everything the combinatorial layer does
/// with scalars is linear, which keeps values such as log 2 or log 10 exact.
class Exact {
 public:
  Exact() = default;
  Exact(long long v);  // NOLINT(google-explicit-constructor)
  Exact(const Rational& v);  // NOLINT(google-explicit-constructor)

  /// log(q) for a positive rational q, expanded over primes.
  static Exact log(const Rational& q);
  /// Parses "1/3", "-0.25", "log(10)", "2/3*log(2) - 1".
  static Exact parse(std::string_view text);

  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const;
  Rational rational_part() const;
  /// Coefficient of log(p); zero when absent.
  Rational log_coefficient(long long prime) const;
  const std::vector<std::pair<long long, Rational>>& terms() const { return terms_; }

  double to_double() const;
  std::string str() const;

  Exact operator-() const;
  Exact& operator+=(const Exact& o);
  Exact& operator-=(const Exact& o);
  Exact& operator*=(const Rational& k);
  Exact& operator/=(const Rational& k);

  friend Exact operator+(Exact a, const Exact& b) { return a += b; }
  friend Exact operator-(Exact a, const Exact& b) { return a -= b; }
  friend Exact operator*(Exact a, const Rational& k) { return a *= k; }
  friend Exact operator*(const Rational& k, Exact a) { return a *= k; }
  friend Exact operator/(Exact a, const Rational& k) { return a /= k; }
  friend bool operator==(const Exact& a, const Exact& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Exact& a, const Exact& b) { return !(a == b); }

 private:
  // Sorted by key; key 0 is the rational unit, other keys are primes.
  std::vector<std::pair<long long, Rational>> terms_;
};

std::ostream& operator<<(std::ostream& os, const Exact& v);

/// Exact complex scalar stored as a (re, im) pair.
struct ComplexExact {
  Exact re, im;

  ComplexExact() = default;
  ComplexExact(Exact r, Exact i = Exact()) : re(std::move(r)), im(std::move(i)) {}  // NOLINT

  ComplexExact operator-() const { return {-re, -im}; }
  ComplexExact& operator+=(const ComplexExact& o) { re += o.re; im += o.im; return *this; }
  ComplexExact& operator-=(const ComplexExact& o) { re -= o.re; im -= o.im; return *this; }
  friend ComplexExact operator+(ComplexExact a, const ComplexExact& b) { return a += b; }
  friend ComplexExact operator-(ComplexExact a, const ComplexExact& b) { return a -= b; }
  friend bool operator==(const ComplexExact& a, const ComplexExact& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const ComplexExact& a, const ComplexExact& b) { return !(a == b); }
};

/// Tolerance used for floating scalar modes when comparing overlap differences.
inline constexpr double kFloatTolerance = 1e-12;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Exact> {
  static constexpr bool exact = true;
  static constexpr bool real = true;
  static constexpr const char* name = "exact";
  static bool equal(const Exact& a, const Exact& b) { return a == b; }
  static bool is_zero(const Exact& a) { return a.is_zero(); }
  static double real_value(const Exact& a) { return a.to_double(); }
  static std::string str(const Exact& a) { return a.str(); }
  static Exact from_log(const Rational& q) { return Exact::log(q); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr bool real = true;
  static constexpr const char* name = "float";
  static bool equal(double a, double b);
  static bool is_zero(double a) { return equal(a, 0.0); }
  static double real_value(double a) { return a; }
  static std::string str(double a);
  static double from_log(const Rational& q);
};

template <>
struct ScalarTraits<std::complex<double>> {
  static constexpr bool exact = false;
  static constexpr bool real = false;
  static constexpr const char* name = "complex";
  static bool equal(std::complex<double> a, std::complex<double> b);
  static bool is_zero(std::complex<double> a) { return equal(a, {}); }
  static std::string str(std::complex<double> a);
};

template <>
struct ScalarTraits<ComplexExact> {
  static constexpr bool exact = true;
  static constexpr bool real = false;
  static constexpr const char* name = "complex-exact";
  static bool equal(const ComplexExact& a, const ComplexExact& b) { return a == b; }
  static bool is_zero(const ComplexExact& a) { return a.re.is_zero() && a.im.is_zero(); }
  static std::string str(const ComplexExact& a);
};

}  // namespace lcktk
