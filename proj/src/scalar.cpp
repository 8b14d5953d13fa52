#include "bhcal/scalar.hpp"

#include <cctype>
#include <cstdio>

namespace bhcal {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  bool negative = false;
  std::string_view body = s;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational out;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw InputError("malformed rational '" + std::string(text) + "'");
    mpz_class n{std::string(num), 10}, d{std::string(den), 10};
    if (d == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    out = Rational(n, d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac)))
      throw InputError("malformed decimal '" + std::string(text) + "'");
    mpz_class scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::string digits = std::string(whole) + std::string(frac);
    out = Rational(mpz_class(digits.empty() ? "0" : digits, 10), scale);
  } else {
    if (!all_digits(body)) throw InputError("malformed rational '" + std::string(text) + "'");
    out = Rational(mpz_class(std::string(body), 10));
  }
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

std::string format_rational(const Rational& q) { return q.get_str(); }

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_pi(const Rational& coeff, int pi_power) {
  if (sgn(coeff) == 0) return "0";
  if (pi_power == 0) return format_rational(coeff);
  mpz_class num = coeff.get_num();
  mpz_class den = coeff.get_den();
  std::string sign = num < 0 ? "-" : "";
  mpz_class mag = abs(num);
  if (pi_power == 1) {
    std::string head = mag == 1 ? "pi" : mag.get_str() + "*pi";
    return sign + head + (den == 1 ? "" : "/" + den.get_str());
  }
  if (pi_power == -1) {
    std::string tail = den == 1 ? "pi" : "(" + den.get_str() + "*pi)";
    return sign + mag.get_str() + "/" + tail;
  }
  throw std::invalid_argument("format_pi: unsupported power of pi");
}

std::string format_pi(double coeff, int pi_power) {
  if (pi_power == 0) return format_double(coeff);
  if (pi_power == 1) return format_double(coeff) + "*pi";
  if (pi_power == -1) return format_double(coeff) + "/pi";
  throw std::invalid_argument("format_pi: unsupported power of pi");
}

PiScaled<Rational> parse_pi(std::string_view text) {
  std::string s(trim(text));
  if (s == "0") return {Rational(0), 1};
  bool negative = !s.empty() && s.front() == '-';
  if (negative) s.erase(0, 1);
  auto pos = s.find("pi");
  if (pos == std::string::npos) throw InputError("not a pi multiple: '" + std::string(text) + "'");
  PiScaled<Rational> out;
  const bool inverse = s.ends_with("/pi") || s.ends_with("*pi)");
  if (!inverse) {
    // [num*]pi[/den]
    std::string num = pos == 0 ? "1" : s.substr(0, pos - 1);
    std::string rest = s.substr(pos + 2);
    std::string den = "1";
    if (!rest.empty()) {
      if (rest.front() != '/') throw InputError("malformed pi multiple '" + std::string(text) + "'");
      den = rest.substr(1);
    }
    out = {parse_rational(num) / parse_rational(den), 1};
  } else {
    // num/pi or num/(den*pi)
    auto slash = s.find('/');
    if (slash == std::string::npos) throw InputError("malformed pi multiple '" + std::string(text) + "'");
    std::string num = s.substr(0, slash);
    std::string rest = s.substr(slash + 1);
    Rational den(1);
    if (rest != "pi") {
      if (rest.size() < 6 || rest.front() != '(' || rest.substr(rest.size() - 4) != "*pi)")
        throw InputError("malformed pi multiple '" + std::string(text) + "'");
      den = parse_rational(rest.substr(1, rest.size() - 5));
    }
    out = {parse_rational(num) / den, -1};
  }
  if (negative) out.coeff = -out.coeff;
  return out;
}

template <>
double PiScaled<Rational>::to_double() const {
  return coeff.get_d() * std::pow(kPi, pi_power);
}
template <>
double PiScaled<double>::to_double() const {
  return coeff * std::pow(kPi, pi_power);
}
template <>
std::string PiScaled<Rational>::to_string() const {
  return format_pi(coeff, pi_power);
}
template <>
std::string PiScaled<double>::to_string() const {
  return format_pi(coeff, pi_power);
}

UnitBallVolume unit_ball_volume(int k) {
  switch (k) {
    case 1: return {Rational(2), 0};
    case 2: return {Rational(1), 1};
    case 3: return {Rational(4, 3), 1};
    case 4: return {Rational(1, 2), 2};
    default: throw std::invalid_argument("unit_ball_volume: k must be in 1..4");
  }
}

}  // namespace bhcal
