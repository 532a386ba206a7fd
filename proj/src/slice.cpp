#include "indiga/slice.hpp"

#include <sstream>

namespace indiga {

SliceData make_slice(const RestrictedExponential& e, const TowerElement& s, int depth,
                     const IntegrabilityWindow& w) {
  const TowerPtr& tower = e.tower();
  if (s.tower() != tower) throw UniverseError("slice candidate lives on a different tower");

  RestrictedSeries es = e.apply(s);
  int deepest = -1;
  for (int n = 0; n <= depth; ++n) {
    if (tower->level(n)->zero_ring()) continue;
    deepest = n;
    unsigned long d = es.param_degree(n);
    if (d > 1) {
      throw PreconditionError("not a slice: exponential has parameter degree " +
                              std::to_string(d) + " at level " + std::to_string(n));
    }
  }
  if (deepest >= 0 && es.param_degree(deepest) != 1) {
    throw PreconditionError("not a slice: exponential is parameter-free at level " +
                            std::to_string(deepest));
  }

  TowerElement s1 = es.coefficient({1});
  InvariantReport inv = invariant_test(e, s1, depth);
  if (!inv.invariant) {
    throw PreconditionError("slice coefficient is not invariant: residual " + inv.residual +
                            " at level " + std::to_string(inv.first_bad_level));
  }

  auto [loc, dloc] = localize_derivation(e.derivation(), s1, depth);
  RestrictedExponential eloc = make_exponential(dloc, w);
  TowerElement sigma = loc->generator_element(VarId("w")) * transport_element(loc, s);

  // e(sigma) = sigma + T at every audited nonzero level.
  for (int n = 0; n <= depth; ++n) {
    LevelPtr L = loc->level(n);
    if (L->zero_ring()) continue;
    Poly got = eloc.level_series(n, sigma.rep(n));
    UniversePtr ext = got.universe();
    Poly want = sigma.rep(n).reuniverse(ext) +
                Poly::variable(ext, RestrictedExponential::param());
    if (!(got == want)) {
      throw PreconditionError("normalized slice fails e(sigma) = sigma + T at level " +
                              std::to_string(n) + ": " + (got - want).render(L->order));
    }
  }

  return SliceData{s, s1, loc, dloc, eloc, sigma, depth};
}

SliceSearch find_local_slice(const RestrictedExponential& e,
                             const std::vector<TowerElement>& candidates, int depth,
                             const IntegrabilityWindow& w) {
  SliceSearch search;
  for (size_t i = 0; i < candidates.size(); ++i) {
    try {
      search.found = make_slice(e, candidates[i], depth, w);
      search.index = static_cast<int>(i);
      return search;
    } catch (const PreconditionError& err) {
      search.rejected.push_back(err.what());
    }
  }
  return search;
}

TowerElement dixmier_reynolds(const SliceData& sd, const TowerElement& b) {
  TowerElement bl = transport_element(sd.localized, b);
  RestrictedExponential eloc = sd.local_exp;
  TowerElement sig = sd.sigma;
  TowerPtr loc = sd.localized;
  auto raw = [eloc, bl, sig, loc](int n) {
    LevelPtr L = loc->level(n);
    Poly series = eloc.level_series(n, bl.rep(n));
    std::map<VarId, Poly> sub;
    for (const VarId& v : series.universe()->vars()) {
      if (series.degree_in(v) == 0) continue;
      if (v == RestrictedExponential::param()) {
        sub.emplace(v, -sig.rep(n));
      } else {
        sub.emplace(v, Poly::variable(L->universe, v));
      }
    }
    return series.substitute(sub, L->universe);
  };
  return TowerElement(loc, raw, std::nullopt);
}

CylinderDecomposition cylinder_decompose(const SliceData& sd, const TowerElement& b) {
  TowerElement bl = transport_element(sd.localized, b);
  RestrictedSeries eb = sd.local_exp.apply(bl);
  unsigned long top = 0;
  for (int n = 0; n <= sd.depth; ++n) {
    if (sd.localized->level(n)->zero_ring()) continue;
    top = std::max(top, eb.param_degree(n));
  }
  std::vector<TowerElement> coeffs;
  for (unsigned long i = 0; i <= top; ++i) {
    coeffs.push_back(dixmier_reynolds(sd, eb.coefficient({static_cast<uint32_t>(i)})));
  }
  TowerElement recon = sd.localized->constant_element(Rational(0));
  for (unsigned long i = 0; i <= top; ++i) {
    recon = recon + coeffs[i] * sd.sigma.pow(i);
  }
  bool ok = element_compare(recon, bl, sd.depth).equal;
  return CylinderDecomposition{std::move(coeffs), ok, sd.depth};
}

}  // namespace indiga
