#include "lcktk/exact.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace lcktk {

namespace {

using boost::multiprecision::cpp_int;

void add_term(std::vector<std::pair<long long, Rational>>& terms, long long key, const Rational& c) {
  if (c == 0) return;
  auto it = std::lower_bound(terms.begin(), terms.end(), key,
                             [](const auto& t, long long k) { return t.first < k; });
  if (it != terms.end() && it->first == key) {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  } else {
    terms.insert(it, {key, c});
  }
}

// Trial division; the integers seen here are small (grid sizes, user constants).
std::vector<std::pair<long long, int>> factor(cpp_int n) {
  if (n <= 0) throw std::invalid_argument("factor: expected a positive integer");
  if (n > cpp_int(std::numeric_limits<long long>::max()))
    throw std::invalid_argument("log of rational: integer too large to factor");
  auto m = n.convert_to<long long>();
  std::vector<std::pair<long long, int>> out;
  for (long long p = 2; p * p <= m; ++p) {
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (m > 1) out.emplace_back(m, 1);
  return out;
}

Rational parse_decimal(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    Rational num = parse_decimal(s.substr(0, slash));
    Rational den = parse_decimal(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return num / den;
  }
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  cpp_int mant = 0;
  cpp_int scale = 1;
  bool seen_digit = false;
  bool after_point = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (after_point) throw std::invalid_argument("malformed number: " + std::string(s));
      after_point = true;
      continue;
    }
    if (c == 'e' || c == 'E') {
      int ex = std::stoi(std::string(s.substr(i + 1)));
      Rational r(mant, scale);
      cpp_int p = boost::multiprecision::pow(cpp_int(10), std::abs(ex));
      r = ex >= 0 ? r * Rational(p) : r / Rational(p);
      return neg ? -r : r;
    }
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("malformed number: " + std::string(s));
    seen_digit = true;
    mant = mant * 10 + (c - '0');
    if (after_point) scale *= 10;
  }
  if (!seen_digit) throw std::invalid_argument("malformed number: " + std::string(s));
  Rational r(mant, scale);
  return neg ? -r : r;
}

std::string trim(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

// One additive term: [coef[*]]log(q) | coef | e
Exact parse_term(const std::string& t) {
  auto lp = t.find("log(");
  if (lp == std::string::npos) {
    if (t == "e") throw std::invalid_argument("bare 'e' is not an exact scalar; use log(...)");
    return Exact(parse_decimal(t));
  }
  if (t.back() != ')') throw std::invalid_argument("malformed log term: " + t);
  std::string coef = t.substr(0, lp);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  Rational k = 1;
  if (coef == "-") k = -1;
  else if (coef == "+" || coef.empty()) k = 1;
  else k = parse_decimal(coef);
  std::string arg = t.substr(lp + 4, t.size() - lp - 5);
  Exact lg = arg == "e" ? Exact(1) : Exact::log(parse_decimal(arg));
  return lg * k;
}

}  // namespace

Exact::Exact(long long v) {
  if (v != 0) terms_.emplace_back(0, Rational(v));
}

Exact::Exact(const Rational& v) {
  if (v != 0) terms_.emplace_back(0, v);
}

Exact Exact::log(const Rational& q) {
  if (q <= 0) throw std::invalid_argument("log of a non-positive rational");
  Exact out;
  for (auto [p, e] : factor(boost::multiprecision::numerator(q))) add_term(out.terms_, p, Rational(e));
  for (auto [p, e] : factor(boost::multiprecision::denominator(q))) add_term(out.terms_, p, Rational(-e));
  return out;
}

Exact Exact::parse(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty scalar");
  Exact out;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    bool split = i == s.size();
    if (!split) {
      char c = s[i];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      // A sign splits terms unless it is leading, follows '*', '/', or an exponent marker.
      if ((c == '+' || c == '-') && depth == 0 && i > start) {
        char prev = s[i - 1];
        split = prev != '*' && prev != '/' && prev != 'e' && prev != 'E';
      }
    }
    if (split) {
      std::string term = s.substr(start, i - start);
      if (!term.empty() && term != "+") out += parse_term(term);
      start = i;
    }
  }
  return out;
}

bool Exact::is_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }

Rational Exact::rational_part() const {
  return !terms_.empty() && terms_[0].first == 0 ? terms_[0].second : Rational(0);
}

Rational Exact::log_coefficient(long long prime) const {
  for (const auto& [k, c] : terms_)
    if (k == prime) return c;
  return 0;
}

double Exact::to_double() const {
  long double acc = 0;
  for (const auto& [k, c] : terms_) {
    long double coef = c.convert_to<long double>();
    acc += k == 0 ? coef : coef * std::log(static_cast<long double>(k));
  }
  return static_cast<double>(acc);
}

std::string Exact::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    Rational a = c;
    if (!first) {
      os << (a < 0 ? "-" : "+");
      if (a < 0) a = -a;
    }
    if (k == 0) {
      os << a;
    } else {
      if (a == -1) os << "-";
      else if (a != 1) os << a << "*";
      os << "log(" << k << ")";
    }
    first = false;
  }
  return os.str();
}

Exact Exact::operator-() const {
  Exact out = *this;
  for (auto& t : out.terms_) t.second = -t.second;
  return out;
}

Exact& Exact::operator+=(const Exact& o) {
  for (const auto& [k, c] : o.terms_) add_term(terms_, k, c);
  return *this;
}

Exact& Exact::operator-=(const Exact& o) {
  for (const auto& [k, c] : o.terms_) add_term(terms_, k, -c);
  return *this;
}

Exact& Exact::operator*=(const Rational& k) {
  if (k == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= k;
  return *this;
}

Exact& Exact::operator/=(const Rational& k) {
  if (k == 0) throw std::domain_error("Exact: division by zero");
  for (auto& t : terms_) t.second /= k;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Exact& v) { return os << v.str(); }

bool ScalarTraits<double>::equal(double a, double b) { return std::abs(a - b) <= kFloatTolerance; }

std::string ScalarTraits<double>::str(double a) {
  std::ostringstream os;
  os << std::setprecision(17) << a;
  return os.str();
}

double ScalarTraits<double>::from_log(const Rational& q) { return std::log(q.convert_to<double>()); }

bool ScalarTraits<std::complex<double>>::equal(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) <= kFloatTolerance;
}

std::string ScalarTraits<std::complex<double>>::str(std::complex<double> a) {
  std::ostringstream os;
  os << std::setprecision(17) << a.real() << (a.imag() < 0 ? "" : "+") << a.imag() << "i";
  return os.str();
}

std::string ScalarTraits<ComplexExact>::str(const ComplexExact& a) {
  return "(" + a.re.str() + ", " + a.im.str() + ")";
}

}  // namespace lcktk
