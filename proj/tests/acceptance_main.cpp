// Acceptance suite: one line per criterion, exit code counts the failures.

#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "gens.hpp"
#include "indiga/derivation.hpp"
#include "indiga/exponential.hpp"
#include "indiga/fixtures.hpp"
#include "indiga/session.hpp"
#include "indiga/slice.hpp"
#include "oracles.hpp"

using namespace indiga;

namespace {

int g_failures = 0;

struct Checks {
  bool ok = true;
  std::string why;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why = what;
    if (!cond) ok = false;
  }
};

void criterion(int num, const std::string& label, const std::function<void(Checks&)>& body) {
  Checks c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("threw: ") + e.what());
  }
  std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion " << num << ": " << label;
  if (!c.ok) std::cout << "  (" << c.why << ")";
  std::cout << std::endl;
  if (!c.ok) ++g_failures;
}

TowerPtr u_adic() {
  UniversePtr uni = make_universe({VarId("u")});
  return make_adic_tower({VarId("u")}, {Poly::variable(uni, VarId("u"))}, {});
}

ContinuousDerivation square_der(const TowerPtr& t) {
  TowerElement u = t->generator_element(VarId("u"));
  return ContinuousDerivation::make(t, {{VarId("u"), u * u}}, {}, std::nullopt, 4);
}

ContinuousDerivation::IndexRule rule(const std::string& family, const std::string& pattern,
                                     const std::string& rhs) {
  return {family, extract_affine(parse_expr_text(pattern)), parse_expr_text(rhs), rhs};
}

ContinuousDerivation raise_der(const TowerPtr& cut) {
  return ContinuousDerivation::make(cut, {}, {rule("X", "i", "(i+1)*X[i+1]")}, std::nullopt, 6);
}

ContinuousDerivation mixed_der(const TowerPtr& cut) {
  return ContinuousDerivation::make(
      cut, {{VarId("X", 0), cut->generator_element(VarId("X", 1))}},
      {rule("X", "2*i+1", "X[2*i+3]"), rule("X", "2*i", "X[2*i-2]")}, std::nullopt, 6);
}

TowerPtr line() { return make_discrete_tower({VarId("x")}, {}, {}); }

ContinuousDerivation ddx(const TowerPtr& t) {
  return ContinuousDerivation::make(t, {{VarId("x"), t->constant_element(Rational(1))}}, {},
                                    std::nullopt, 3);
}

void c1_adic_square(Checks& c) {
  TowerPtr t = u_adic();
  ContinuousDerivation d = square_der(t);
  IntegrabilityVerdict v = check_integrable(d, {6, 12});
  c.expect(v.certified(), "not certified at (6,12)");
  RestrictedExponential e = make_exponential(d, {6, 12});
  const VarId& T = RestrictedExponential::param();
  for (int n = 2; n <= 6; ++n) {
    UniversePtr ext = extend_universe(t->level(n)->universe, {T});
    Poly u = Poly::variable(ext, VarId("u"));
    Poly tp = Poly::variable(ext, T);
    Poly expect(ext);
    for (int k = 0; k + 2 <= n; ++k) expect += u.pow(k + 1) * tp.pow(k);
    Poly got = e.level_series(n, Poly::variable(t->level(n)->universe, VarId("u")));
    c.expect(equal_as_formulas(got, expect), "series tail wrong at level " + std::to_string(n));
  }
  TowerElement g = t->constant_element(Rational(1)) - t->generator_element(VarId("u"));
  c.expect(!invariant_test(e, g, 6).invariant, "1-u reported invariant");
  TowerElement ue = t->generator_element(VarId("u"));
  SliceSearch s = find_local_slice(e, {ue, ue * ue}, 5, {6, 12});
  c.expect(!s.found.has_value(), "a slice was found on the adic line");
  c.expect(s.rejected.size() == 2, "expected two rejection reasons");
}

void c2_raising(Checks& c) {
  TowerPtr cut = make_cutoff_tower("X", {}, {});
  ContinuousDerivation d = raise_der(cut);
  IntegrabilityVerdict v = check_integrable(d, {6, 12});
  c.expect(v.certified(), "not certified at (6,12)");
  KernelReport kr = kernel_basis(d, 5, 3);
  c.expect(kr.basis.size() == 1, "kernel basis size " + std::to_string(kr.basis.size()));
  if (kr.basis.size() == 1) {
    c.expect(kr.basis[0].is_constant() && kr.basis[0].constant_value() == Rational(1),
             "kernel basis is not {1}");
  }
}

void c3_mixed(Checks& c) {
  TowerPtr cut = make_cutoff_tower("X", {}, {});
  ContinuousDerivation d = mixed_der(cut);
  IntegrabilityVerdict v = check_integrable(d, {6, 12});
  c.expect(v.status == IntegrabilityVerdict::Status::Refuted, "expected a refutation");
  for (long l = 1; l <= 3; ++l) {
    bool found = false;
    for (const auto& w : v.witnesses) {
      if (w.generator == VarId("X", 2 * l) && w.power == static_cast<unsigned long>(l) &&
          w.observed_level == 1) {
        found = replay_witness(d, w);
        if (found) break;
      }
    }
    c.expect(found, "no replayable witness (X[" + std::to_string(2 * l) + "], power " +
                        std::to_string(l) + ", level 1)");
    UniversePtr uni = make_universe({VarId("X", 2 * l)});
    Poly f = Poly::variable(uni, VarId("X", 2 * l));
    for (long i = 0; i < l; ++i) f = d.formula_derivative(f);
    UniversePtr u0 = make_universe({VarId("X", 0)});
    c.expect(equal_as_formulas(f, Poly::variable(u0, VarId("X", 0))),
             "derivative power " + std::to_string(l) + " of X[" + std::to_string(2 * l) +
                 "] is not X[0]");
  }
}

void c4_coaction(Checks& c) {
  gens::Rng g(1001);
  TowerPtr ta = u_adic();
  RestrictedExponential ea = make_exponential(square_der(ta), {6, 12});
  TowerPtr cut = make_cutoff_tower("X", {}, {});
  RestrictedExponential ed = make_exponential(raise_der(cut), {6, 12});
  TowerPtr tl = line();
  RestrictedExponential el = make_exponential(ddx(tl), {5, 10});

  auto run = [&](const RestrictedExponential& e, const TowerPtr& t, int hint, const char* tag) {
    std::vector<TowerElement> samples;
    for (int i = 0; i < 20; ++i) samples.push_back(gens::element(g, t, hint, 3, 3));
    CoactionReport r = verify_coaction(coaction_of(e), samples, 5);
    c.expect(r.pass, std::string(tag) + " coaction failed: " + r.failed_check + " at level " +
                         std::to_string(r.level));
    c.expect(r.samples == 20, std::string(tag) + " did not run 20 samples");
  };
  run(ea, ta, 2, "adic square");
  run(ed, cut, 5, "index raising");
  run(el, tl, 1, "derivative on the line");

  Poly img = eval_expr_formula(parse_expr_text("u + u*T"), {});
  CoactionMap cand = coaction_from_formulas(ta, {{VarId("u"), img}});
  CoactionReport r = verify_coaction(cand, {ta->generator_element(VarId("u"))}, 4);
  c.expect(!r.pass, "bad candidate passed");
  c.expect(r.failed_check == "coassociativity", "bad candidate failed " + r.failed_check);
  c.expect(r.param_monomial == "T*T'", "violation reported at " + r.param_monomial);
}

void c5_flows(Checks& c) {
  gens::Rng g(5005);
  TowerPtr ta = u_adic();
  RestrictedExponential ea = make_exponential(square_der(ta), {6, 12});
  TowerPtr cut = make_cutoff_tower("X", {}, {});
  RestrictedExponential ed = make_exponential(raise_der(cut), {6, 12});
  TowerPtr tl = line();
  RestrictedExponential el = make_exponential(ddx(tl), {5, 10});

  auto run = [&](const RestrictedExponential& e, const TowerPtr& t, int hint, int depth,
                 const char* tag) {
    for (int i = 0; i < 20; ++i) {
      TowerElement b = gens::element(g, t, hint, 3, 3);
      Rational t1 = gens::rational(g);
      Rational t2 = gens::rational(g);
      bool group = element_compare(e.flow_at(t1, e.flow_at(t2, b)), e.flow_at(t1 + t2, b), depth).equal;
      bool unit = element_compare(e.flow_at(Rational(1), e.flow_at(Rational(-1), b)), b, depth).equal;
      c.expect(group, std::string(tag) + " group law failed on sample " + std::to_string(i));
      c.expect(unit, std::string(tag) + " inverse law failed on sample " + std::to_string(i));
      if (!group || !unit) return;
    }
  };
  run(ea, ta, 2, 5, "adic square");
  run(ed, cut, 5, 5, "index raising");
  run(el, tl, 1, 4, "derivative on the line");

  UniversePtr pt = make_universe({VarId("x")});
  DualCoordinateData dual =
      dual_derivation({VarId("x")}, {{VarId("x"), Poly::constant(pt, Rational(1))}}, 5);
  RestrictedExponential e = make_exponential(dual.derivation, {5, 10});
  for (int trial = 0; trial < 10; ++trial) {
    Poly p = gens::poly(g, pt, 4, 4);
    Rational a = gens::rational(g);
    Rational t = gens::rational(g);
    std::vector<Rational> coords;
    for (unsigned k = 0; k < 6; ++k) coords.push_back(oracles::maclaurin_coefficient(p, VarId("x"), k));
    std::vector<Rational> out = orbit_coordinates(dual, e, coords, t);
    Rational lhs = dual_point_value(dual, out, {{VarId("x"), a}});
    Rational rhs = p.evaluate({{VarId("x"), a - t}});
    c.expect(lhs == rhs, "orbit triple " + std::to_string(trial) + " disagrees with f(x-t)");
    if (lhs != rhs) return;
  }
}

void c6_quotient_surface(Checks& c) {
  std::vector<VarId> vars = {VarId("x"), VarId("y"), VarId("z")};
  UniversePtr uni = make_universe(vars);
  TowerPtr base = make_adic_tower(vars, {Poly::variable(uni, VarId("x"))}, {});
  Poly x = Poly::variable(uni, VarId("x"));
  Poly y = Poly::variable(uni, VarId("y"));
  Poly z = Poly::variable(uni, VarId("z"));
  ContinuousDerivation d = ContinuousDerivation::make(
      base,
      {{VarId("x"), base->constant_element(Rational(0))},
       {VarId("y"), base->element_from_formula(x)},
       {VarId("z"), base->element_from_formula(y * Rational(2))}},
      {}, std::nullopt, 4);
  TowerElement rel = base->element_from_formula(x * z - y * y);
  c.expect(d.apply(rel).is_zero_to(4), "derivative of xz - y^2 does not vanish");

  auto [q, qd] = quotient_derivation(d, {rel}, 4);
  for (int n = 0; n <= 4; ++n) {
    LevelPtr L = q->level(n);
    c.expect(L != nullptr, "quotient level missing");
  }
  c.expect(transport_element(q, rel).is_zero_to(4), "relation survives in the quotient");
  IntegrabilityVerdict v = check_integrable(qd, {4, 10});
  c.expect(v.certified(), "quotient derivation not certified at (4,10)");
  RestrictedExponential e = make_exponential(qd, {4, 10});
  c.expect(invariant_test(e, transport_element(q, rel), 4).invariant,
           "xz - y^2 is not invariant downstairs");
}

void c7_slice(Checks& c) {
  TowerPtr t = line();
  RestrictedExponential e = make_exponential(ddx(t), {3, 8});
  SliceData sd = make_slice(e, t->generator_element(VarId("x")), 3, {3, 8});
  UniversePtr uni = make_universe({VarId("x")});
  gens::Rng g(7007);
  for (int i = 0; i < 20; ++i) {
    Poly p = gens::poly(g, uni, 4, 4);
    TowerElement b = t->element_from_formula(p);
    TowerElement r = dixmier_reynolds(sd, b);
    Rational at0 = p.evaluate({{VarId("x"), Rational(0)}});
    bool evals = element_compare(r, sd.localized->constant_element(at0), 3).equal;
    bool idem = element_compare(dixmier_reynolds(sd, r), r, 3).equal;
    c.expect(evals, "R(p) != p(0) on sample " + std::to_string(i));
    c.expect(idem, "R not idempotent on sample " + std::to_string(i));
    if (!evals || !idem) return;
  }
  for (int i = 0; i < 20; ++i) {
    TowerElement b = t->element_from_formula(gens::poly(g, uni, 3, 3));
    TowerElement b2 = t->element_from_formula(gens::poly(g, uni, 3, 3));
    TowerElement lhs =
        dixmier_reynolds(sd, dixmier_reynolds(sd, b) * transport_element(sd.localized, b2));
    TowerElement rhs = dixmier_reynolds(sd, b) * dixmier_reynolds(sd, b2);
    if (!element_compare(lhs, rhs, 3).equal) {
      c.expect(false, "Reynolds identity failed on sample " + std::to_string(i));
      return;
    }
  }
  for (int i = 0; i < 5; ++i) {
    Poly p = gens::poly(g, uni, 5, 5);
    CylinderDecomposition cd = cylinder_decompose(sd, t->element_from_formula(p));
    c.expect(cd.reconstructs, "cylinder does not reconstruct sample " + std::to_string(i));
    for (unsigned k = 0; k <= 5; ++k) {
      Rational want = oracles::maclaurin_coefficient(p, VarId("x"), k);
      TowerElement got = k < cd.coefficients.size() ? cd.coefficients[k]
                                                    : sd.localized->constant_element(Rational(0));
      if (!element_compare(got, sd.localized->constant_element(want), 3).equal) {
        c.expect(false, "maclaurin coefficient " + std::to_string(k) + " wrong");
        return;
      }
    }
  }

  TowerPtr t2 = make_discrete_tower({VarId("x"), VarId("y")}, {}, {});
  UniversePtr u2 = t2->level(1)->universe;
  Poly x2 = Poly::variable(u2, VarId("x"));
  ContinuousDerivation tri = ContinuousDerivation::make(
      t2,
      {{VarId("x"), t2->constant_element(Rational(0))}, {VarId("y"), t2->element_from_formula(x2)}},
      {}, std::nullopt, 3);
  RestrictedExponential e2 = make_exponential(tri, {3, 8});
  SliceData sd2 = make_slice(e2, t2->generator_element(VarId("y")), 3, {3, 8});
  TowerElement y2 = t2->generator_element(VarId("y")).pow(2);
  CylinderDecomposition cd = cylinder_decompose(sd2, y2);
  c.expect(cd.reconstructs, "triangular cylinder does not reconstruct y^2");
  c.expect(cd.coefficients.size() == 3, "triangular decomposition has wrong width");
  if (cd.coefficients.size() == 3) {
    TowerElement xx = transport_element(sd2.localized, t2->generator_element(VarId("x")).pow(2));
    c.expect(cd.coefficients[0].is_zero_to(3) && cd.coefficients[1].is_zero_to(3) &&
                 element_compare(cd.coefficients[2], xx, 3).equal,
             "y^2 != x^2 sigma^2 in the decomposition");
  }
}

void c8_localization(Checks& c) {
  TowerPtr t = u_adic();
  ZeroLocalizationReport za = is_zero_localization(t, t->generator_element(VarId("u")), 6);
  c.expect(za.zero, "inverting u should collapse the adic line");
  c.expect(za.first_nonzero_level == -1, "a level stayed alive");
  for (bool level : za.level_zero) {
    c.expect(level, "non-collapsed level in the report");
  }

  TowerPtr l = line();
  TowerElement x = l->generator_element(VarId("x"));
  ZeroLocalizationReport zl = is_zero_localization(l, x, 3);
  c.expect(!zl.zero, "inverting x on the plain line should keep the ring alive");
  TowerPtr loc = localization_tower(l, x);
  TowerElement wx = loc->generator_element(VarId("w")) * transport_element(loc, x);
  c.expect(element_compare(wx, loc->constant_element(Rational(1)), 3).equal, "w*x != 1");
}

void c9_membership(Checks& c) {
  gens::Rng g(2026);
  std::vector<VarId> all = {VarId("x"), VarId("y"), VarId("z")};
  int agree = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Poly> gen_polys;
    UniversePtr uni;
    bool proper = false;
    while (!proper) {
      long nv = gens::pick(g, 1, 3);
      uni = make_universe(std::vector<VarId>(all.begin(), all.begin() + nv));
      gen_polys.clear();
      long ng = gens::pick(g, 1, 3);
      for (long i = 0; i < ng; ++i) {
        Poly p = gens::poly(g, uni, 3, 3);
        if (!p.is_zero()) gen_polys.push_back(p);
      }
      if (gen_polys.empty()) continue;
      GroebnerBasis gb = buchberger(gen_polys, uni, MonomialOrder::grevlex(), {});
      if (gb.contains_one()) continue;
      proper = true;

      Poly m(uni);
      for (const Poly& gp : gen_polys) m += gens::poly(g, uni, 1, 2) * gp;
      Poly m1 = m + Poly::constant(uni, Rational(1));
      // Cofactor degree <= 1 and generator degree <= 3 keep every certificate
      // inside the oracle's degree-4 window, so the oracle is complete here.
      bool nf_member = normal_form(m, gb, {}).is_zero();
      bool nf_nonmember = normal_form(m1, gb, {}).is_zero();
      bool oracle_member = oracles::member_up_to_degree(m, gen_polys, 4);
      bool oracle_nonmember = oracles::member_up_to_degree(m1, gen_polys, 4);
      if (nf_member == oracle_member && nf_nonmember == oracle_nonmember && nf_member &&
          !nf_nonmember) {
        ++agree;
      }
    }
  }
  c.expect(agree == 100, "agreement " + std::to_string(agree) + "/100");
}

void c10_higher_components(Checks& c) {
  gens::Rng g(8088);
  TowerPtr ta = u_adic();
  ContinuousDerivation da = square_der(ta);
  TowerPtr cut = make_cutoff_tower("X", {}, {});
  ContinuousDerivation dd = raise_der(cut);
  TowerPtr tl = line();
  ContinuousDerivation dl = ddx(tl);

  auto run = [&](const ContinuousDerivation& d, int level, const char* tag) {
    LevelPtr L = d.tower()->level(level);
    for (int s = 0; s < 20; ++s) {
      Poly a = gens::poly(g, L->universe, 3, 3);
      Poly b = gens::poly(g, L->universe, 3, 3);
      for (unsigned long k = 0; k <= 8; ++k) {
        Poly lhs = higher_component(d, level, a * b, k);
        Poly rhs(L->universe);
        for (unsigned long i = 0; i <= k; ++i) {
          rhs += higher_component(d, level, a, i) * higher_component(d, level, b, k - i);
        }
        if (!(L->nf(lhs) == L->nf(rhs))) {
          c.expect(false, std::string(tag) + " convolution failed at k=" + std::to_string(k));
          return;
        }
      }
      for (unsigned long i = 0; i <= 8; ++i) {
        for (unsigned long j = 0; i + j <= 8; ++j) {
          Poly lhs = higher_component(d, level, higher_component(d, level, a, j), i);
          Poly rhs = higher_component(d, level, a, i + j) * Rational::binomial(i + j, i);
          if (!(L->nf(lhs) == L->nf(rhs))) {
            c.expect(false, std::string(tag) + " composition failed at (" + std::to_string(i) +
                                "," + std::to_string(j) + ")");
            return;
          }
        }
      }
    }
  };
  run(da, 6, "adic square");
  run(dd, 5, "index raising");
  run(dl, 1, "derivative on the line");
}

void c11_determinism(Checks& c) {
  for (const auto& f : bundled_fixtures()) {
    SessionScript script = parse_session(f.name, f.text);
    SessionConfig cfg;
    Report first = execute(script, cfg);
    Report second = execute(script, cfg);
    c.expect(first.failed == 0, f.name + " reported " + std::to_string(first.failed) + " failures");
    c.expect(emit_json(first) == emit_json(second), f.name + " is not byte-deterministic");
  }
}

}  // namespace

int main() {
  criterion(1, "adic square derivation: certificate, series tail, invariants, slices", c1_adic_square);
  criterion(2, "index raising derivation: certificate and kernel", c2_raising);
  criterion(3, "mixed shift derivation: refutation with replayable witnesses", c3_mixed);
  criterion(4, "coaction axioms: certified maps pass, candidate fails on T*T'", c4_coaction);
  criterion(5, "flows: one-parameter group law and dual orbit shift", c5_flows);
  criterion(6, "quotient surface: descent, certificate, invariant relation", c6_quotient_surface);
  criterion(7, "slice: Reynolds projection and cylinder decomposition", c7_slice);
  criterion(8, "localization: collapse on the adic line, inversion on the plain line", c8_localization);
  criterion(9, "ideal membership agrees with the linear oracle 100/100", c9_membership);
  criterion(10, "higher components: convolution Leibniz and binomial composition", c10_higher_components);
  criterion(11, "bundled sessions: clean runs, byte-identical reports", c11_determinism);
  return g_failures;
}
