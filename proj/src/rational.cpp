#include "indiga/rational.hpp"

namespace indiga {

Rational Rational::from_string(const std::string& text) {
  mpq_class v;
  if (text.empty() || v.set_str(text, 10) != 0) throw ParseError("bad rational literal: '" + text + "'");
  if (sgn(v.get_den()) == 0) throw Error("rational with zero denominator: '" + text + "'");
  v.canonicalize();
  return Rational(std::move(v));
}

Rational Rational::pow(unsigned long k) const {
  mpq_class r(1);
  mpq_class base = v_;
  while (k > 0) {
    if (k & 1) r *= base;
    base *= base;
    k >>= 1;
  }
  return Rational(std::move(r));
}

Rational Rational::factorial(unsigned long n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Rational(mpq_class(f));
}

Rational Rational::binomial(unsigned long n, unsigned long k) {
  if (k > n) return Rational(0);
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Rational(mpq_class(b));
}

}  // namespace indiga
