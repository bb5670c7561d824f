#pragma once

// Arithmetic backends.  Three scalar types flow through the templated core:
//
//   Rat    exact rationals (GMP-backed)      - default exact backend
//   Q5     p + q*sqrt(5), p,q rational       - exact golden-rotation arithmetic
//   double binary64                          - experiment throughput
//
// The core algorithms only use +, -, *, comparisons and abs_k(); equality
// against a tolerance is written as abs_k(u - v) <= tol, with tol = 0 on the
// exact backends.

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "ietsurf/errors.hpp"

namespace ietsurf {

using Rat = boost::multiprecision::mpq_rational;

inline double to_dbl(const Rat& v) { return v.convert_to<double>(); }
inline double to_dbl(double v) { return v; }

inline Rat abs_k(const Rat& v) { return v < 0 ? Rat(-v) : v; }
inline double abs_k(double v) { return std::fabs(v); }

inline int sign_of(const Rat& v) { return v.sign(); }
inline int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// ---------------------------------------------------------------------------
// Q(sqrt 5).  Comparisons are exact: the sign of p + q*sqrt5 with p, q of
// opposite signs is decided by comparing p^2 against 5 q^2 (they can never be
// equal for p, q != 0 since sqrt5 is irrational).
struct Q5 {
  Rat p{0};
  Rat q{0};

  Q5() = default;
  Q5(int v) : p(v) {}                    // NOLINT: implicit by design
  Q5(Rat v) : p(std::move(v)) {}         // NOLINT
  Q5(Rat p_, Rat q_) : p(std::move(p_)), q(std::move(q_)) {}

  static Q5 sqrt5() { return Q5(Rat(0), Rat(1)); }
  static Q5 golden() { return Q5(Rat(1) / 2, Rat(1) / 2); }  // (1+sqrt5)/2

  Q5 operator+(const Q5& o) const { return Q5(p + o.p, q + o.q); }
  Q5 operator-(const Q5& o) const { return Q5(p - o.p, q - o.q); }
  Q5 operator-() const { return Q5(-p, -q); }
  Q5 operator*(const Q5& o) const {
    return Q5(p * o.p + 5 * q * o.q, p * o.q + q * o.p);
  }
  Q5& operator+=(const Q5& o) { p += o.p; q += o.q; return *this; }
  Q5& operator-=(const Q5& o) { p -= o.p; q -= o.q; return *this; }
  Q5& operator*=(const Q5& o) { *this = *this * o; return *this; }
  Q5 operator/(const Q5& o) const {
    // 1/(p+q*sqrt5) = (p-q*sqrt5)/(p^2-5q^2); the norm vanishes only at 0.
    const Rat n = o.p * o.p - 5 * o.q * o.q;
    if (n == 0) throw InternalError("Q5 division by zero");
    return *this * Q5(o.p / n, -o.q / n);
  }
  Q5& operator/=(const Q5& o) { *this = *this / o; return *this; }

  int sign() const {
    int sp = p.sign(), sq = q.sign();
    if (sq == 0) return sp;
    if (sp == 0) return sq;
    if (sp == sq) return sp;
    int c = (p * p > 5 * q * q) ? 1 : -1;  // equality impossible
    return sp > 0 ? c : -c;
  }

  bool operator==(const Q5& o) const { return p == o.p && q == o.q; }
  bool operator!=(const Q5& o) const { return !(*this == o); }
  bool operator<(const Q5& o) const { return (*this - o).sign() < 0; }
  bool operator>(const Q5& o) const { return o < *this; }
  bool operator<=(const Q5& o) const { return !(o < *this); }
  bool operator>=(const Q5& o) const { return !(*this < o); }
};

inline Q5 abs_k(const Q5& v) { return v.sign() < 0 ? -v : v; }
inline int sign_of(const Q5& v) { return v.sign(); }
inline double to_dbl(const Q5& v) {
  return to_dbl(v.p) + to_dbl(v.q) * std::sqrt(5.0);
}

template <class K>
inline constexpr bool is_exact_v = true;
template <>
inline constexpr bool is_exact_v<double> = false;

// Parse an exact rational literal: "3", "-7/2".  Throws ParseError.
inline Rat parse_rational(const std::string& s) {
  try {
    Rat r(s);
    return r;
  } catch (const std::exception&) {
    throw ParseError("not a rational literal: '" + s + "'");
  }
}

inline std::string to_string(const Rat& v) { return v.str(); }
inline std::string to_string(const Q5& v) {
  if (v.q == 0) return v.p.str();
  std::string root = (v.q < 0 ? "-" : "+") + Rat(abs(v.q)).str() + "*sqrt5";
  if (v.p == 0) return v.q < 0 ? root : root.substr(1);
  return v.p.str() + root;
}

}  // namespace ietsurf
