#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "indiga/errors.hpp"
#include "indiga/rational.hpp"

namespace indiga {

// Variable identity: a plain symbol ("u") or a member of a countable family ("X[3]").
struct VarId {
  std::string name;
  long index = -1;  // -1 marks a plain symbol

  VarId() = default;
  VarId(std::string n) : name(std::move(n)) {}  // NOLINT: symbols convert implicitly
  VarId(std::string n, long i) : name(std::move(n)), index(i) {}

  bool indexed() const { return index >= 0; }
  std::string str() const;

  friend bool operator==(const VarId&, const VarId&) = default;
  friend std::strong_ordering operator<=>(const VarId&, const VarId&) = default;
};

// Immutable ordered list of distinct variables. Position 0 is the most
// significant slot under every monomial order.
class Universe {
 public:
  explicit Universe(std::vector<VarId> vars);

  size_t size() const { return vars_.size(); }
  const VarId& operator[](size_t i) const { return vars_[i]; }
  const std::vector<VarId>& vars() const { return vars_; }
  std::optional<size_t> find(const VarId& v) const;
  bool contains(const VarId& v) const { return find(v).has_value(); }
  std::string str() const;

  friend bool operator==(const Universe&, const Universe&) = default;

 private:
  std::vector<VarId> vars_;
};

using UniversePtr = std::shared_ptr<const Universe>;

UniversePtr make_universe(std::vector<VarId> vars);
UniversePtr extend_universe(const UniversePtr& base, const std::vector<VarId>& extra);
// Sorted union of both variable sets; canonical regardless of operand order.
UniversePtr merge_universes(const UniversePtr& a, const UniversePtr& b);

// Exponent vector aligned with a universe.
using Monomial = std::vector<uint32_t>;

unsigned long monomial_degree(const Monomial& m);
Monomial monomial_mul(const Monomial& a, const Monomial& b);
bool monomial_divides(const Monomial& a, const Monomial& b);   // a | b
Monomial monomial_quotient(const Monomial& b, const Monomial& a);  // b / a, PRE divides
Monomial monomial_lcm(const Monomial& a, const Monomial& b);

// Total order on monomials of equal length. Elim compares the leading block
// first (grevlex within each block), so block-0 variables are eliminated.
class MonomialOrder {
 public:
  enum class Kind { Lex, GrevLex, Elim };

  static MonomialOrder lex() { return MonomialOrder(Kind::Lex, 0); }
  static MonomialOrder grevlex() { return MonomialOrder(Kind::GrevLex, 0); }
  static MonomialOrder elim(size_t first_block) { return MonomialOrder(Kind::Elim, first_block); }

  Kind kind() const { return kind_; }
  size_t split() const { return split_; }
  // True when a is strictly larger than b.
  bool above(const Monomial& a, const Monomial& b) const;
  std::string str() const;

  friend bool operator==(const MonomialOrder&, const MonomialOrder&) = default;

 private:
  MonomialOrder(Kind k, size_t s) : kind_(k), split_(s) {}
  Kind kind_;
  size_t split_;
};

// Sparse polynomial with exact rational coefficients over a fixed universe.
// Arithmetic demands identical universes; embedding is explicit (reuniverse).
class Poly {
 public:
  explicit Poly(UniversePtr uni);
  static Poly constant(UniversePtr uni, const Rational& c);
  static Poly variable(const UniversePtr& uni, const VarId& v);
  static Poly from_monomial(UniversePtr uni, Monomial m, const Rational& c);

  const UniversePtr& universe() const { return uni_; }
  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // coefficient of the empty monomial
  size_t term_count() const { return terms_.size(); }
  unsigned long total_degree() const;  // 0 for the zero polynomial
  unsigned long degree_in(const VarId& v) const;
  Rational coefficient(const Monomial& m) const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  Poly& operator*=(const Rational& c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Poly& b) { return a *= b; }
  friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
  friend Poly operator*(const Rational& c, Poly a) { return a *= c; }
  Poly pow(unsigned long k) const;

  // Ring morphism: every variable occurring with positive exponent must have
  // an image over `target`.
  Poly substitute(const std::map<VarId, Poly>& images, const UniversePtr& target) const;
  // Embed into a universe containing every occurring variable.
  Poly reuniverse(const UniversePtr& target) const;
  Poly formal_partial(const VarId& v) const;
  Rational evaluate(const std::map<VarId, Rational>& point) const;

  // Decomposition as a polynomial in the given variables: exponent vector over
  // `vs` -> coefficient with those exponents stripped.
  std::map<std::vector<uint32_t>, Poly> coefficients_in(const std::vector<VarId>& vs) const;
  unsigned long degree_in_set(const std::vector<VarId>& vs) const;

  std::optional<Monomial> leading_monomial(const MonomialOrder& order) const;
  Rational leading_coefficient(const MonomialOrder& order) const;

  std::string render(const MonomialOrder& order = MonomialOrder::grevlex()) const;

  // Structural equality: same universe, same terms.
  // Universes compare by contents, not pointer identity: structurally equal
  // universes are rebuilt freely (extend/merge), and equal polynomials over
  // them must still compare equal.
  friend bool operator==(const Poly& a, const Poly& b) {
    return (a.uni_ == b.uni_ || *a.uni_ == *b.uni_) && a.terms_ == b.terms_;
  }

  void add_term(const Monomial& m, const Rational& c);  // accumulate, pruning zeros

 private:
  UniversePtr uni_;
  std::map<Monomial, Rational> terms_;  // lexicographic key order; no zero values
};

// Equality after embedding both into the merged universe (formula layer).
bool equal_as_formulas(const Poly& a, const Poly& b);
Poly reconcile_mul(const Poly& a, const Poly& b);
Poly reconcile_add(const Poly& a, const Poly& b);
Poly reconcile_sub(const Poly& a, const Poly& b);

}  // namespace indiga
