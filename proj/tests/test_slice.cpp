#include "doctest.h"
#include "gens.hpp"
#include "indiga/slice.hpp"
#include "oracles.hpp"

using namespace indiga;

namespace {

TowerPtr line() { return make_discrete_tower({VarId("x")}, {}, {}); }

RestrictedExponential ddx_exp(const TowerPtr& t) {
  ContinuousDerivation d = ContinuousDerivation::make(
      t, {{VarId("x"), t->constant_element(Rational(1))}}, {}, std::nullopt, 3);
  return make_exponential(d, {3, 8});
}

TowerPtr u_adic() {
  UniversePtr uni = make_universe({VarId("u")});
  return make_adic_tower({VarId("u")}, {Poly::variable(uni, VarId("u"))}, {});
}

}  // namespace

TEST_CASE("x slices the derivative flow with unit leading coefficient") {
  TowerPtr t = line();
  RestrictedExponential e = ddx_exp(t);
  SliceData sd = make_slice(e, t->generator_element(VarId("x")), 3, {3, 8});
  CHECK(element_compare(sd.s1, t->constant_element(Rational(1)), 3).equal);
  TowerElement sig_vs_x = sd.sigma - transport_element(sd.localized, t->generator_element(VarId("x")));
  CHECK(sig_vs_x.is_zero_to(3));
}

TEST_CASE("the reynolds operator evaluates at the slice origin") {
  TowerPtr t = line();
  RestrictedExponential e = ddx_exp(t);
  SliceData sd = make_slice(e, t->generator_element(VarId("x")), 3, {3, 8});
  UniversePtr uni = make_universe({VarId("x")});
  gens::Rng g(17);
  for (int trial = 0; trial < 10; ++trial) {
    Poly p = gens::poly(g, uni, 4, 4);
    TowerElement b = t->element_from_formula(p);
    TowerElement r = dixmier_reynolds(sd, b);
    Rational at0 = p.evaluate({{VarId("x"), Rational(0)}});
    CHECK(element_compare(r, sd.localized->constant_element(at0), 3).equal);
    CHECK(element_compare(dixmier_reynolds(sd, r), r, 3).equal);  // idempotent
  }
}

TEST_CASE("the reynolds operator is a projection onto invariants") {
  TowerPtr t = line();
  RestrictedExponential e = ddx_exp(t);
  SliceData sd = make_slice(e, t->generator_element(VarId("x")), 3, {3, 8});
  UniversePtr uni = make_universe({VarId("x")});
  gens::Rng g(23);
  for (int trial = 0; trial < 10; ++trial) {
    TowerElement b = t->element_from_formula(gens::poly(g, uni, 3, 3));
    TowerElement b2 = t->element_from_formula(gens::poly(g, uni, 3, 3));
    TowerElement lhs = dixmier_reynolds(sd, dixmier_reynolds(sd, b) * transport_element(sd.localized, b2));
    TowerElement rhs = dixmier_reynolds(sd, b) * dixmier_reynolds(sd, b2);
    CHECK(element_compare(lhs, rhs, 3).equal);
  }
}

TEST_CASE("cylinder coefficients are the maclaurin coefficients along x") {
  TowerPtr t = line();
  RestrictedExponential e = ddx_exp(t);
  SliceData sd = make_slice(e, t->generator_element(VarId("x")), 3, {3, 8});
  UniversePtr uni = make_universe({VarId("x")});
  Poly p = eval_expr_formula(parse_expr_text("2*x^5 - x^3 + 4*x - 7/2"), {});
  CylinderDecomposition cd = cylinder_decompose(sd, t->element_from_formula(p));
  REQUIRE(cd.coefficients.size() == 6);
  CHECK(cd.reconstructs);
  for (unsigned i = 0; i < 6; ++i) {
    Rational want = oracles::maclaurin_coefficient(p.reuniverse(uni), VarId("x"), i);
    CHECK(element_compare(cd.coefficients[i], sd.localized->constant_element(want), 3).equal);
  }
}

TEST_CASE("a triangular flow decomposes the square of the moving variable") {
  TowerPtr t = make_discrete_tower({VarId("x"), VarId("y")}, {}, {});
  UniversePtr uni = t->level(1)->universe;
  Poly x = Poly::variable(uni, VarId("x"));
  ContinuousDerivation d = ContinuousDerivation::make(
      t, {{VarId("x"), t->constant_element(Rational(0))}, {VarId("y"), t->element_from_formula(x)}},
      {}, std::nullopt, 3);
  RestrictedExponential e = make_exponential(d, {3, 8});
  SliceData sd = make_slice(e, t->generator_element(VarId("y")), 3, {3, 8});
  CHECK(element_compare(sd.s1, t->generator_element(VarId("x")), 3).equal);

  TowerElement y2 = t->generator_element(VarId("y")) * t->generator_element(VarId("y"));
  CylinderDecomposition cd = cylinder_decompose(sd, y2);
  REQUIRE(cd.coefficients.size() == 3);
  CHECK(cd.reconstructs);
  CHECK(cd.coefficients[0].is_zero_to(3));
  CHECK(cd.coefficients[1].is_zero_to(3));
  TowerElement xx = transport_element(sd.localized, t->generator_element(VarId("x")).pow(2));
  CHECK(element_compare(cd.coefficients[2], xx, 3).equal);
}

TEST_CASE("slice search reports every rejection on the adic line") {
  TowerPtr t = u_adic();
  TowerElement u = t->generator_element(VarId("u"));
  ContinuousDerivation d = ContinuousDerivation::make(t, {{VarId("u"), u * u}}, {}, std::nullopt, 4);
  RestrictedExponential e = make_exponential(d, {6, 12});
  SliceSearch search = find_local_slice(e, {u, u * u}, 5, {6, 12});
  CHECK_FALSE(search.found.has_value());
  CHECK(search.index == -1);
  REQUIRE(search.rejected.size() == 2);
  for (const auto& reason : search.rejected) {
    CHECK(reason.find("not a slice") != std::string::npos);
  }
  CHECK_THROWS_AS(make_slice(e, u, 5, {6, 12}), PreconditionError);
}

TEST_CASE("slice search takes the first qualifying candidate") {
  TowerPtr t = line();
  RestrictedExponential e = ddx_exp(t);
  TowerElement x = t->generator_element(VarId("x"));
  SliceSearch search = find_local_slice(e, {x * x, x}, 3, {3, 8});
  REQUIRE(search.found.has_value());
  CHECK(search.index == 1);
  CHECK(search.rejected.size() == 1);
}
