#include "indiga/exponential.hpp"

#include <algorithm>
#include <sstream>

namespace indiga {

namespace {

constexpr unsigned long kSeriesCap = 4096;  // safety net; certificates bound the real order

Poly identity_sub(const LevelRing& L, const Poly& p, const std::map<VarId, Poly>& overrides,
                  const UniversePtr& target) {
  std::map<VarId, Poly> sub;
  for (const VarId& v : p.universe()->vars()) {
    if (p.degree_in(v) == 0) continue;
    auto it = overrides.find(v);
    sub.emplace(v, it != overrides.end() ? it->second : Poly::variable(target, v));
  }
  (void)L;
  return p.substitute(sub, target);
}

}  // namespace

Poly TowerMap::image_poly(const VarId& v) const {
  auto it = images.find(v);
  if (it != images.end()) return it->second;
  return Poly::variable(make_universe({v}), v);
}

TowerElement TowerMap::image_of(const VarId& v) const {
  return tower->element_from_formula(image_poly(v));
}

Poly TowerMap::apply_formula(const Poly& f) const {
  UniversePtr target = f.universe();
  std::map<VarId, Poly> sub;
  for (const VarId& v : f.universe()->vars()) {
    if (f.degree_in(v) == 0) continue;
    Poly img = image_poly(v);
    target = merge_universes(target, img.universe());
    sub.emplace(v, img);
  }
  for (auto& [v, img] : sub) img = img.reuniverse(target);
  return f.substitute(sub, target);
}

TowerElement TowerMap::apply(const TowerElement& b) const {
  if (b.tower() != tower) throw UniverseError("element lives on a different tower");
  std::optional<Poly> formula;
  if (b.formula()) formula = apply_formula(*b.formula());
  TowerMap m = *this;
  TowerPtr t = tower;
  auto raw = [m, b, t](int n) {
    LevelPtr L = t->level(n);
    const Poly& r = b.rep(n);
    std::map<VarId, Poly> sub;
    for (const VarId& v : L->universe->vars()) {
      if (r.degree_in(v) == 0) continue;
      sub.emplace(v, t->element_from_formula(m.image_poly(v)).rep(n));
    }
    return r.substitute(sub, L->universe);
  };
  return TowerElement(t, raw, formula);
}

const VarId& RestrictedExponential::param() {
  static const VarId t("T");
  return t;
}

RestrictedExponential RestrictedExponential::make(const ContinuousDerivation& d,
                                                  const IntegrabilityWindow& w) {
  IntegrabilityVerdict cert = check_integrable(d, w);
  if (!cert.certified()) {
    throw RequiresCertificate("exponential needs a certified derivation; verdict is " +
                              cert.status_str() + " (" + cert.detail + ")");
  }
  return RestrictedExponential(d, std::move(cert));
}

RestrictedExponential make_exponential(const ContinuousDerivation& d,
                                       const IntegrabilityWindow& w) {
  return RestrictedExponential::make(d, w);
}

Poly RestrictedExponential::level_series(int n, const Poly& p) const {
  LevelPtr L = tower()->level(n);
  UniversePtr ext = extend_universe(L->universe, {param()});
  Poly tvar = Poly::variable(ext, param());
  Poly out(ext);
  Poly cur = L->nf(p.reuniverse(L->universe));
  Poly tpow = Poly::constant(ext, Rational(1));
  unsigned long k = 0;
  while (!cur.is_zero()) {
    if (k >= kSeriesCap) throw ResourceExceeded("exponential series exceeded the iteration cap");
    out += cur.reuniverse(ext) * tpow * Rational::factorial(k).inverse();
    cur = der_.level_apply(n, cur);
    tpow *= tvar;
    ++k;
  }
  return out;
}

RestrictedSeries RestrictedExponential::apply(const TowerElement& b) const {
  if (b.tower() != tower()) throw UniverseError("element lives on a different tower");
  RestrictedExponential self = *this;
  return RestrictedSeries(tower(), {param()},
                          [self, b](int n) { return self.level_series(n, b.rep(n)); });
}

TowerElement RestrictedExponential::component(const TowerElement& b, unsigned long i) const {
  return apply(b).coefficient({static_cast<uint32_t>(i)});
}

TowerElement RestrictedExponential::flow_at(const Rational& t, const TowerElement& b) const {
  return eval_at(apply(b), {t});
}

TowerElement RestrictedExponential::flow_at(const TowerElement& t, const TowerElement& b,
                                            int depth) const {
  InvariantReport inv = invariant_test(*this, t, depth);
  if (!inv.invariant) {
    throw PreconditionError("flow time is not invariant: residual " + inv.residual + " at level " +
                            std::to_string(inv.first_bad_level));
  }
  return eval_ones(scale(apply(b), {t}));
}

CoactionMap coaction_of(const RestrictedExponential& e) {
  RestrictedExponential self = e;
  return CoactionMap{e.tower(), [self](int n, const Poly& p) { return self.level_series(n, p); },
                     "exponential of a certified derivation"};
}

CoactionMap coaction_from_formulas(const TowerPtr& tower, const std::map<VarId, Poly>& images) {
  const VarId T = RestrictedExponential::param();
  for (const auto& [v, f] : images) {
    if (!tower->is_generator(v)) throw UniverseError("image given for a non-generator: " + v.str());
    for (const VarId& s : f.universe()->vars()) {
      if (f.degree_in(s) > 0 && s != T && !tower->is_generator(s)) {
        throw UniverseError("candidate image mentions a foreign symbol: " + s.str());
      }
    }
  }
  auto shared = std::make_shared<std::map<VarId, Poly>>(images);
  TowerPtr t = tower;
  auto map = [shared, t, T](int n, const Poly& p) {
    LevelPtr L = t->level(n);
    UniversePtr ext = extend_universe(L->universe, {T});
    Poly tvar = Poly::variable(ext, T);
    std::map<VarId, Poly> sub;
    for (const VarId& v : L->universe->vars()) {
      auto it = shared->find(v);
      if (it == shared->end()) {
        sub.emplace(v, Poly::variable(ext, v));
        continue;
      }
      // Promote the T-coefficients of the image formula to level n.
      auto parts = it->second.coefficients_in({T});
      Poly img(ext);
      for (const auto& [exps, coeff] : parts) {
        img += t->element_from_formula(coeff).rep(n).reuniverse(ext) * tvar.pow(exps[0]);
      }
      sub.emplace(v, img);
    }
    Poly q = p.reuniverse(L->universe);
    return nf_with_params(*L, {T}, q.substitute(sub, ext));
  };
  return CoactionMap{tower, map, "candidate from generator formulas"};
}

CoactionReport verify_coaction(const CoactionMap& e, const std::vector<TowerElement>& samples,
                               int depth) {
  CoactionReport report;
  report.samples = static_cast<int>(samples.size());
  report.depth = depth;
  const VarId T = RestrictedExponential::param();
  const VarId T2 = VarId("T'");

  for (size_t si = 0; si < samples.size(); ++si) {
    const TowerElement& b = samples[si];
    if (b.tower() != e.tower) throw UniverseError("sample lives on a different tower");
    for (int n = 0; n <= depth; ++n) {
      LevelPtr L = e.tower->level(n);
      if (L->zero_ring()) continue;
      const Poly& bn = b.rep(n);
      Poly s = e.level_map(n, bn);
      UniversePtr ext2 = extend_universe(L->universe, {T, T2});

      // Counit: parameters at zero give back the input.
      std::map<VarId, Poly> kill;
      kill.emplace(T, Poly::constant(L->universe, Rational(0)));
      Poly back = identity_sub(*L, s, kill, L->universe);
      if (!(back == bn)) {
        report.pass = false;
        report.failed_check = "counit";
        report.sample_index = static_cast<int>(si);
        report.level = n;
        report.param_monomial = "1";
        report.residual = (back - bn).render(L->order);
        return report;
      }

      // Coassociativity: applying the map to the coefficients (fresh
      // parameter) must equal substituting T -> T + T'.
      std::map<VarId, Poly> shift;
      shift.emplace(T, Poly::variable(ext2, T) + Poly::variable(ext2, T2));
      Poly rhs = identity_sub(*L, s, shift, ext2);

      Poly lhs(ext2);
      std::map<VarId, Poly> rename;
      rename.emplace(T, Poly::variable(ext2, T2));
      for (const auto& [exps, coeff] : s.coefficients_in({T})) {
        Poly ec = e.level_map(n, coeff);
        Poly ec2 = identity_sub(*L, ec, rename, ext2);
        lhs += ec2 * Poly::variable(ext2, T).pow(exps[0]);
      }

      Poly diff = lhs - rhs;
      if (!diff.is_zero()) {
        report.pass = false;
        report.failed_check = "coassociativity";
        report.sample_index = static_cast<int>(si);
        report.level = n;
        auto parts = diff.coefficients_in({T, T2});
        for (const auto& [exps, coeff] : parts) {
          if (coeff.is_zero()) continue;
          std::string pm;
          if (exps[0] > 0) pm = exps[0] == 1 ? "T" : "T^" + std::to_string(exps[0]);
          if (exps[1] > 0) {
            if (!pm.empty()) pm += "*";
            pm += exps[1] == 1 ? "T'" : "T'^" + std::to_string(exps[1]);
          }
          if (pm.empty()) pm = "1";
          report.param_monomial = pm;
          report.residual = coeff.render(L->order);
          break;
        }
        return report;
      }
    }
  }
  return report;
}

InvariantReport invariant_test(const RestrictedExponential& e, const TowerElement& b, int depth) {
  if (b.tower() != e.tower()) throw UniverseError("element lives on a different tower");
  InvariantReport report;
  report.depth = depth;
  for (int n = 0; n <= depth; ++n) {
    LevelPtr L = e.tower()->level(n);
    if (L->zero_ring()) continue;
    Poly s = e.level_series(n, b.rep(n));
    UniversePtr ext = s.universe();
    Poly expect = b.rep(n).reuniverse(ext);
    if (!(s == expect)) {
      report.invariant = false;
      report.first_bad_level = n;
      report.residual = (s - expect).render(L->order);
      return report;
    }
  }
  return report;
}

RestrictedExponential conjugate(const RestrictedExponential& e, const TowerMap& fwd,
                                const TowerMap& inv, const IntegrabilityWindow& w, int depth) {
  const TowerPtr& tower = e.tower();
  if (fwd.tower != tower || inv.tower != tower) {
    throw UniverseError("conjugating maps live on a different tower");
  }
  for (const VarId& g : tower->generators(depth + 2)) {
    TowerElement gid = tower->generator_element(g);
    if (!element_compare(fwd.apply(inv.image_of(g)), gid, depth).equal ||
        !element_compare(inv.apply(fwd.image_of(g)), gid, depth).equal) {
      throw PreconditionError("maps are not mutually inverse on " + g.str() + " to depth " +
                              std::to_string(depth));
    }
  }
  ContinuousDerivation d = e.derivation();
  TowerMap f = fwd, s = inv;
  ContinuousDerivation dc = ContinuousDerivation::from_image_fn(
      tower, [d, f, s](const VarId& v) { return f.apply(d.apply(s.image_of(v))); },
      d.declared_shift(), depth);
  return RestrictedExponential::make(dc, w);
}

RestrictedExponential compose_commuting(const RestrictedExponential& a,
                                        const RestrictedExponential& b,
                                        const IntegrabilityWindow& w, int depth) {
  ContinuousDerivation sum = sum_commuting(a.derivation(), b.derivation(), depth);
  return RestrictedExponential::make(sum, w);
}

std::vector<Rational> orbit_coordinates(const DualCoordinateData& dual,
                                        const RestrictedExponential& e,
                                        const std::vector<Rational>& coords, const Rational& t) {
  if (e.tower() != dual.tower) throw UniverseError("exponential lives on a different tower");
  int n = -1;
  for (size_t lv = 0; lv < dual.dims.size(); ++lv) {
    if (dual.dims[lv] >= coords.size()) {
      n = static_cast<int>(lv);
      break;
    }
  }
  if (n < 0) throw PreconditionError("coordinate vector does not fit the computed exhaustion");
  const size_t dim = dual.dims[n];
  LevelPtr L = dual.tower->level(n);

  std::map<VarId, Rational> point;
  for (size_t j = 0; j < dim; ++j) {
    point.emplace(VarId("X", static_cast<long>(j)), j < coords.size() ? coords[j] : Rational(0));
  }
  point.emplace(RestrictedExponential::param(), -t);

  std::vector<Rational> out;
  out.reserve(dim);
  for (size_t k = 0; k < dim; ++k) {
    Poly xk = Poly::variable(L->universe, VarId("X", static_cast<long>(k)));
    out.push_back(e.level_series(n, xk).evaluate(point));
  }
  return out;
}

}  // namespace indiga
