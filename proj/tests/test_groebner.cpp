#include "doctest.h"
#include "gens.hpp"
#include "indiga/groebner.hpp"
#include "oracles.hpp"

using namespace indiga;

namespace {

UniversePtr xyz() { return make_universe({VarId("x"), VarId("y"), VarId("z")}); }

Poly v(const UniversePtr& u, const char* name) { return Poly::variable(u, VarId(name)); }

}  // namespace

TEST_CASE("basis of the zero ideal is empty and reduction is identity") {
  UniversePtr u = xyz();
  GroebnerBasis b = buchberger({}, u, MonomialOrder::grevlex());
  CHECK(b.is_zero_ideal());
  CHECK_FALSE(b.contains_one());
  Poly p = v(u, "x") * v(u, "y") + v(u, "z");
  CHECK(normal_form(p, b) == p);
}

TEST_CASE("unit ideals are detected") {
  UniversePtr u = xyz();
  Poly one = Poly::constant(u, Rational(3));
  GroebnerBasis b = buchberger({one}, u, MonomialOrder::grevlex());
  CHECK(b.contains_one());
  CHECK(normal_form(v(u, "x"), b).is_zero());
  // 1 in the ideal discovered through S-polynomials: (x, x+1).
  GroebnerBasis c = buchberger({v(u, "x"), v(u, "x") + Poly::constant(u, Rational(1))}, u,
                               MonomialOrder::grevlex());
  CHECK(c.contains_one());
}

TEST_CASE("normal form is idempotent and ideal members reduce to zero") {
  UniversePtr u = xyz();
  Poly g1 = v(u, "x") * v(u, "z") - v(u, "y") * v(u, "y");
  Poly g2 = v(u, "y") * v(u, "z") - v(u, "x");
  GroebnerBasis b = buchberger({g1, g2}, u, MonomialOrder::grevlex());
  gens::Rng g(11);
  for (int i = 0; i < 30; ++i) {
    Poly q1 = gens::poly(g, u, 2, 3);
    Poly q2 = gens::poly(g, u, 2, 3);
    Poly member = q1 * g1 + q2 * g2;
    CHECK(normal_form(member, b).is_zero());
    Poly p = gens::poly(g, u, 3, 4);
    Poly r = normal_form(p, b);
    CHECK(normal_form(r, b) == r);
    // The reduction moved by an ideal member.
    CHECK(normal_form(p - r, b).is_zero());
  }
}

TEST_CASE("reduced basis is canonical across generator presentations") {
  UniversePtr u = xyz();
  Poly g1 = v(u, "x") * v(u, "x") - v(u, "y");
  Poly g2 = v(u, "x") * v(u, "y") - v(u, "z");
  GroebnerBasis b1 = buchberger({g1, g2}, u, MonomialOrder::grevlex());
  GroebnerBasis b2 = buchberger({g2, g1 + g2, g1}, u, MonomialOrder::grevlex());
  REQUIRE(b1.generators().size() == b2.generators().size());
  for (size_t i = 0; i < b1.generators().size(); ++i) {
    CHECK(b1.generators()[i] == b2.generators()[i]);
  }
}

TEST_CASE("elimination order pushes the leading block out of the basis tail") {
  // w inverts x: in k[w,x]/(wx - 1), NF(x*w^2) must be w.
  UniversePtr u = make_universe({VarId("w"), VarId("x")});
  Poly rel = Poly::variable(u, VarId("w")) * Poly::variable(u, VarId("x")) -
             Poly::constant(u, Rational(1));
  GroebnerBasis b = buchberger({rel}, u, MonomialOrder::elim(1));
  Poly ww = Poly::variable(u, VarId("w"));
  Poly xx = Poly::variable(u, VarId("x"));
  CHECK(normal_form(xx * ww * ww, b) == normal_form(ww, b));
  CHECK(normal_form(xx * ww, b) == Poly::constant(u, Rational(1)));
}

TEST_CASE("membership agrees with the degree-bounded linear oracle") {
  gens::Rng g(404);
  UniversePtr u = xyz();
  int checked = 0;
  while (checked < 25) {
    std::vector<Poly> gens_list;
    int count = static_cast<int>(gens::pick(g, 1, 3));
    for (int i = 0; i < count; ++i) {
      Poly q = gens::poly(g, u, 3, 3);
      if (!q.is_zero()) gens_list.push_back(q);
    }
    if (gens_list.empty()) continue;
    GroebnerBasis b = buchberger(gens_list, u, MonomialOrder::grevlex());
    if (b.contains_one()) continue;  // unit certificates can exceed the oracle window
    Poly member(u);
    for (const Poly& q : gens_list) member += gens::poly(g, u, 2, 2) * q;
    CHECK(normal_form(member, b).is_zero());
    CHECK(oracles::member_up_to_degree(member, gens_list, 5));
    Poly outside = member + Poly::constant(u, Rational(1));
    CHECK_FALSE(normal_form(outside, b).is_zero());
    CHECK_FALSE(oracles::member_up_to_degree(outside, gens_list, 5));
    ++checked;
  }
}

TEST_CASE("caps abort runaway completions") {
  UniversePtr u = xyz();
  // Leading monomials share variables, so the product criterion cannot skip
  // the pair and the completion must grow past a one-pair budget.
  Poly g1 = v(u, "x").pow(2) * v(u, "y") - v(u, "z");
  Poly g2 = v(u, "x") * v(u, "y").pow(2) - Poly::constant(u, Rational(1));
  GroebnerCaps tiny{1, 1};
  CHECK_THROWS_AS(buchberger({g1, g2}, u, MonomialOrder::grevlex(), tiny), ResourceExceeded);
}
