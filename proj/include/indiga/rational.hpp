#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>

#include "indiga/errors.hpp"

namespace indiga {

// Exact rational number, always in lowest terms with positive denominator.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long n) : v_(static_cast<signed long>(n)) {}  // NOLINT: implicit by design
  Rational(int n) : v_(static_cast<signed long>(n)) {}   // NOLINT
  Rational(long num, long den) : v_(num, 1) {
    if (den == 0) throw Error("rational with zero denominator");
    v_ /= mpq_class(den, 1);
  }
  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  // Accepts "3", "-3", "3/4"; denominator must be nonzero.
  static Rational from_string(const std::string& text);

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_one() const { return v_ == 1; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw Error("division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return mpq_cmp(a.v_.get_mpq_t(), b.v_.get_mpq_t()) == 0; }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) { return mpq_cmp(a.v_.get_mpq_t(), b.v_.get_mpq_t()) < 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  Rational abs() const { return Rational(mpq_class(::abs(v_))); }
  Rational inverse() const {
    if (is_zero()) throw Error("inverse of zero");
    return Rational(mpq_class(1) / v_);
  }
  Rational pow(unsigned long k) const;

  // "num/den" when den > 1, else "num".
  std::string str() const { return v_.get_str(); }
  std::string numerator_str() const { return v_.get_num().get_str(); }
  std::string denominator_str() const { return v_.get_den().get_str(); }

  // PRE: integer that fits a long.
  long to_long() const {
    if (!is_integer() || !v_.get_num().fits_slong_p()) throw Error("rational does not fit a machine integer: " + str());
    return v_.get_num().get_si();
  }

  static Rational factorial(unsigned long n);
  static Rational binomial(unsigned long n, unsigned long k);

  const mpq_class& raw() const { return v_; }

 private:
  mpq_class v_;
};

}  // namespace indiga
