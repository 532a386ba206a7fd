#include "doctest.h"
#include "gens.hpp"
#include "indiga/poly.hpp"

using namespace indiga;

namespace {
UniversePtr xy() { return make_universe({VarId("x"), VarId("y")}); }
}  // namespace

TEST_CASE("universes demand distinct variables and find positions") {
  UniversePtr u = xy();
  CHECK(u->size() == 2);
  CHECK(u->find(VarId("x")) == size_t{0});
  CHECK(u->find(VarId("z")) == std::nullopt);
  CHECK_THROWS_AS(make_universe({VarId("x"), VarId("x")}), UniverseError);
}

TEST_CASE("indexed variables render and order") {
  VarId a("X", 3);
  CHECK(a.indexed());
  CHECK(a.str() == "X[3]");
  CHECK(VarId("X", 2) < VarId("X", 10));
  CHECK_FALSE(VarId("x").indexed());
}

TEST_CASE("arithmetic is commutative-ring arithmetic") {
  UniversePtr u = xy();
  Poly x = Poly::variable(u, VarId("x"));
  Poly y = Poly::variable(u, VarId("y"));
  Poly p = (x + y) * (x - y);
  Poly q = x * x - y * y;
  CHECK(p == q);
  CHECK((p - q).is_zero());
  CHECK(p.pow(2) == p * p);
  CHECK((x * Rational(0)).is_zero());
  CHECK(p.total_degree() == 2);
  CHECK(p.degree_in(VarId("x")) == 2);
}

TEST_CASE("distributivity on random triples") {
  gens::Rng g(2024);
  UniversePtr u = xy();
  for (int i = 0; i < 40; ++i) {
    Poly a = gens::poly(g, u, 3, 4);
    Poly b = gens::poly(g, u, 3, 4);
    Poly c = gens::poly(g, u, 3, 4);
    CHECK((a + b) * c == a * c + b * c);
    CHECK(a * b == b * a);
  }
}

TEST_CASE("substitution is a ring morphism") {
  UniversePtr u = xy();
  Poly x = Poly::variable(u, VarId("x"));
  Poly y = Poly::variable(u, VarId("y"));
  std::map<VarId, Poly> images{{VarId("x"), y * y}, {VarId("y"), x + Poly::constant(u, Rational(1))}};
  gens::Rng g(7);
  for (int i = 0; i < 20; ++i) {
    Poly a = gens::poly(g, u, 2, 3);
    Poly b = gens::poly(g, u, 2, 3);
    CHECK((a * b).substitute(images, u) == a.substitute(images, u) * b.substitute(images, u));
    CHECK((a + b).substitute(images, u) == a.substitute(images, u) + b.substitute(images, u));
  }
  // Missing image for an occurring variable is an error.
  std::map<VarId, Poly> partial{{VarId("x"), y}};
  CHECK_THROWS_AS((x * y).substitute(partial, u), UniverseError);
}

TEST_CASE("formal partials satisfy the Leibniz rule") {
  gens::Rng g(99);
  UniversePtr u = xy();
  for (int i = 0; i < 25; ++i) {
    Poly a = gens::poly(g, u, 3, 4);
    Poly b = gens::poly(g, u, 3, 4);
    for (const VarId& v : u->vars()) {
      CHECK((a * b).formal_partial(v) == a.formal_partial(v) * b + a * b.formal_partial(v));
    }
  }
  Poly x = Poly::variable(u, VarId("x"));
  CHECK(x.pow(4).formal_partial(VarId("x")) == x.pow(3) * Rational(4));
  CHECK(Poly::constant(u, Rational(5)).formal_partial(VarId("x")).is_zero());
}

TEST_CASE("evaluation agrees with substitution by constants") {
  UniversePtr u = xy();
  Poly x = Poly::variable(u, VarId("x"));
  Poly y = Poly::variable(u, VarId("y"));
  Poly p = x * x * y - y + Poly::constant(u, Rational(3));
  std::map<VarId, Rational> at{{VarId("x"), Rational(2)}, {VarId("y"), Rational(1, 2)}};
  CHECK(p.evaluate(at) == Rational(2) - Rational(1, 2) + Rational(3));
}

TEST_CASE("monomial orders disagree where they should") {
  // x^3 vs x*y^2: lex prefers x^3; grevlex ranks by total degree then ties.
  Monomial a{3, 0}, b{1, 2};
  CHECK(MonomialOrder::lex().above(a, b));
  CHECK(MonomialOrder::grevlex().above(a, b));
  Monomial c{1, 1}, d{0, 3};
  CHECK(MonomialOrder::lex().above(c, d));
  CHECK_FALSE(MonomialOrder::grevlex().above(c, d));  // total degree wins
  // Elimination order: any positive power of the first block dominates.
  Monomial e{1, 0}, f{0, 5};
  CHECK(MonomialOrder::elim(1).above(e, f));
}

TEST_CASE("leading data tracks the order") {
  UniversePtr u = xy();
  Poly x = Poly::variable(u, VarId("x"));
  Poly y = Poly::variable(u, VarId("y"));
  Poly p = x * y + y.pow(3) * Rational(2);
  CHECK(*p.leading_monomial(MonomialOrder::lex()) == Monomial{1, 1});
  CHECK(*p.leading_monomial(MonomialOrder::grevlex()) == Monomial{0, 3});
  CHECK(p.leading_coefficient(MonomialOrder::grevlex()) == Rational(2));
  CHECK(Poly(u).leading_monomial(MonomialOrder::lex()) == std::nullopt);
}

TEST_CASE("reuniverse embeds and refuses to drop occurring variables") {
  UniversePtr u = xy();
  UniversePtr w = make_universe({VarId("x"), VarId("y"), VarId("z")});
  Poly p = Poly::variable(u, VarId("x")) * Poly::variable(u, VarId("y"));
  Poly q = p.reuniverse(w);
  CHECK(q.universe() == w);
  CHECK(q.total_degree() == 2);
  CHECK(q.reuniverse(u) == p);
  UniversePtr only_x = make_universe({VarId("x")});
  CHECK_THROWS_AS(p.reuniverse(only_x), UniverseError);
}

TEST_CASE("coefficients_in strips the chosen variables") {
  UniversePtr u = make_universe({VarId("x"), VarId("T")});
  Poly x = Poly::variable(u, VarId("x"));
  Poly t = Poly::variable(u, VarId("T"));
  Poly p = x + x * x * t + t * t * Rational(3);
  auto coeffs = p.coefficients_in({VarId("T")});
  CHECK(coeffs.size() == 3);
  CHECK(coeffs.at({0}) == x);
  CHECK(coeffs.at({1}) == x * x);
  CHECK(coeffs.at({2}) == Poly::constant(u, Rational(3)));
  CHECK(p.degree_in_set({VarId("T")}) == 2);
}

TEST_CASE("rendering is canonical per order") {
  UniversePtr u = xy();
  Poly x = Poly::variable(u, VarId("x"));
  Poly y = Poly::variable(u, VarId("y"));
  Poly p = y + x * x * Rational(-1);
  CHECK(p.render(MonomialOrder::grevlex()) == "-x^2 + y");
  CHECK(Poly(u).render() == "0");
  CHECK(Poly::constant(u, Rational(-1, 2)).render() == "-1/2");
}

TEST_CASE("formula-level reconciliation merges universes") {
  Poly a = Poly::variable(make_universe({VarId("x")}), VarId("x"));
  Poly b = Poly::variable(make_universe({VarId("y")}), VarId("y"));
  Poly s = reconcile_add(a, b);
  CHECK(s.universe()->size() == 2);
  CHECK(equal_as_formulas(s, reconcile_add(b, a)));
  CHECK(equal_as_formulas(reconcile_mul(a, b), reconcile_mul(b, a)));
  CHECK(equal_as_formulas(reconcile_sub(s, b), a));
}
