#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bhcal {

using Rational = mpq_class;

/// The two arithmetic modes. Every computation is instantiated for exactly
/// one of them, so mixing modes is a compile-time error.
template <class T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

/// Malformed input: unbounded bodies, dependent bases, bad weights, parse errors.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of incompatible ambient dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& q);
std::string format_double(double x);

template <Scalar T>
struct Arith;

template <>
struct Arith<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* mode_name = "exact";

  static Rational abs(const Rational& x) { return ::abs(x); }
  static int sign(const Rational& x) { return sgn(x); }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static double to_double(const Rational& x) { return x.get_d(); }
  static std::string to_string(const Rational& x) { return format_rational(x); }
  static Rational parse(std::string_view s) { return parse_rational(s); }
  static Rational from_rational(const Rational& q) { return q; }
  // Exact comparisons: the scale argument is ignored.
  static bool leq(const Rational& a, const Rational& b, double = 1.0) { return a <= b; }
  static bool eq(const Rational& a, const Rational& b, double = 1.0) { return a == b; }
  static bool negligible(const Rational& x, double = 1.0) { return sgn(x) == 0; }
};

template <>
struct Arith<double> {
  static constexpr bool exact = false;
  static constexpr const char* mode_name = "float";
  /// Relative tolerance used by the float-mode merge/collinearity tests.
  static constexpr double merge_eps = 1e-12;
  /// Relative tolerance for float-mode inequality and identity checks.
  static constexpr double check_eps = 1e-9;

  static double abs(double x) { return std::fabs(x); }
  static int sign(double x) { return (x > 0) - (x < 0); }
  static bool is_zero(double x) { return x == 0.0; }
  static double to_double(double x) { return x; }
  static std::string to_string(double x) { return format_double(x); }
  static double parse(std::string_view s) { return parse_rational(s).get_d(); }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static bool leq(double a, double b, double scale = 1.0) {
    return a <= b + check_eps * std::max(1.0, scale);
  }
  static bool eq(double a, double b, double scale = 1.0) {
    return std::fabs(a - b) <= check_eps * std::max(1.0, scale);
  }
  static bool negligible(double x, double scale = 1.0) {
    return std::fabs(x) <= merge_eps * std::max(1.0, scale);
  }
};

/// A quantity of the form coeff * pi^power. Busemann-Hausdorff and alpha
/// values carry power 1, Holmes-Thompson values power -1, so comparisons
/// between quantities of equal power never touch an approximation of pi.
template <Scalar T>
struct PiScaled {
  T coeff{};
  int pi_power = 1;

  double to_double() const;
  std::string to_string() const;
};

/// Text form used in reports: "pi/4", "-3*pi/16", "2/pi", "3/(4*pi)", "0".
std::string format_pi(const Rational& coeff, int pi_power);
std::string format_pi(double coeff, int pi_power);
/// Inverse of format_pi for exact values.
PiScaled<Rational> parse_pi(std::string_view text);

inline constexpr double kPi = 3.14159265358979323846;

/// Volume of the Euclidean unit ball in R^k, as coeff * pi^power.
struct UnitBallVolume {
  Rational coeff;
  int pi_power;
};
UnitBallVolume unit_ball_volume(int k);

}  // namespace bhcal
