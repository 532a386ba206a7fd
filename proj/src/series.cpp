#include "indiga/series.hpp"

#include <algorithm>
#include <sstream>

namespace indiga {

const std::vector<VarId>& series_param_pool() {
  static const std::vector<VarId> pool{VarId("T"), VarId("T'"), VarId("T''")};
  return pool;
}

size_t param_pool_index(const VarId& p) {
  const auto& pool = series_param_pool();
  for (size_t i = 0; i < pool.size(); ++i) {
    if (pool[i] == p) return i;
  }
  throw Error("series parameter must come from the pool T, T', T'': got " + p.str());
}

std::vector<VarId> sorted_params(std::vector<VarId> params) {
  std::sort(params.begin(), params.end(),
            [](const VarId& a, const VarId& b) { return param_pool_index(a) < param_pool_index(b); });
  params.erase(std::unique(params.begin(), params.end()), params.end());
  return params;
}

Poly nf_with_params(const LevelRing& level, const std::vector<VarId>& params, const Poly& p) {
  UniversePtr ext = extend_universe(level.universe, params);
  Poly out(ext);
  for (const auto& [key, coeff] : p.reuniverse(ext).coefficients_in(params)) {
    Poly reduced = level.nf(coeff.reuniverse(level.universe)).reuniverse(ext);
    if (reduced.is_zero()) continue;
    Monomial pm(ext->size(), 0);
    for (size_t k = 0; k < params.size(); ++k) {
      auto pos = ext->find(params[k]);
      pm[*pos] = key[k];
    }
    out += reduced * Poly::from_monomial(ext, pm, Rational(1));
  }
  return out;
}

RestrictedSeries::RestrictedSeries(TowerPtr tower, std::vector<VarId> params, std::function<Poly(int)> raw)
    : tower_(std::move(tower)), params_(std::move(params)), state_(std::make_shared<State>()) {
  for (const VarId& p : params_) param_pool_index(p);
  std::vector<VarId> sorted = sorted_params(params_);
  if (sorted != params_) throw Error("series parameters must be distinct and in pool order");
  state_->raw = std::move(raw);
}

UniversePtr RestrictedSeries::level_universe(int n) const {
  return extend_universe(tower_->level(n)->universe, params_);
}

const Poly& RestrictedSeries::at_level(int n) const {
  std::lock_guard<std::mutex> lock(state_->mu);
  auto it = state_->cache.find(n);
  if (it != state_->cache.end()) return it->second;

  LevelPtr L = tower_->level(n);
  Poly p = nf_with_params(*L, params_, state_->raw(n));

  // Coefficientwise transition audit against the nearest cached neighbors.
  auto push_to = [this](int from, int to, const Poly& val) {
    LevelPtr target = tower_->level(to);
    UniversePtr ext = extend_universe(target->universe, params_);
    Poly out(ext);
    for (const auto& [key, coeff] : val.coefficients_in(params_)) {
      Poly down = tower_->push_down(from, to, coeff.reuniverse(tower_->level(from)->universe)).reuniverse(ext);
      Monomial pm(ext->size(), 0);
      for (size_t k = 0; k < params_.size(); ++k) pm[*ext->find(params_[k])] = key[k];
      out += down * Poly::from_monomial(ext, pm, Rational(1));
    }
    return out;
  };
  auto above = state_->cache.upper_bound(n);
  if (above != state_->cache.end()) {
    Poly down = push_to(above->first, n, above->second);
    if (!(down == p)) {
      std::ostringstream msg;
      msg << "series levels disagree: level " << above->first << " pushes to " << down.render()
          << " at level " << n << ", got " << p.render();
      throw CompatibilityError(msg.str());
    }
  }
  if (above != state_->cache.begin()) {
    auto below = std::prev(above);
    Poly down = push_to(n, below->first, p);
    if (!(down == below->second)) {
      std::ostringstream msg;
      msg << "series levels disagree: level " << n << " pushes to " << down.render() << " at level "
          << below->first << ", cached " << below->second.render();
      throw CompatibilityError(msg.str());
    }
  }
  return state_->cache.emplace(n, std::move(p)).first->second;
}

TowerElement RestrictedSeries::coefficient(const std::vector<uint32_t>& exps) const {
  if (exps.size() != params_.size()) throw Error("coefficient index arity mismatch");
  RestrictedSeries self = *this;
  auto raw = [self, exps](int n) {
    const Poly& p = self.at_level(n);
    auto coeffs = p.coefficients_in(self.params_);
    auto it = coeffs.find(exps);
    LevelPtr L = self.tower_->level(n);
    if (it == coeffs.end()) return Poly(L->universe);
    return it->second.reuniverse(L->universe);
  };
  return TowerElement(tower_, raw, std::nullopt);
}

unsigned long RestrictedSeries::param_degree(int n) const { return at_level(n).degree_in_set(params_); }

RestrictedSeries RestrictedSeries::embed(const TowerElement& b, std::vector<VarId> params) {
  TowerElement copy = b;
  TowerPtr tower = b.tower();
  std::vector<VarId> ps = sorted_params(std::move(params));
  return RestrictedSeries(tower, ps, [copy, ps, tower](int n) {
    return copy.rep(n).reuniverse(extend_universe(tower->level(n)->universe, ps));
  });
}

namespace {

void require_same_shape(const RestrictedSeries& a, const RestrictedSeries& b) {
  if (a.tower().get() != b.tower().get()) throw UniverseError("series live on different towers");
  if (a.params() != b.params()) throw Error("series parameter lists differ");
}

}  // namespace

RestrictedSeries operator+(const RestrictedSeries& a, const RestrictedSeries& b) {
  require_same_shape(a, b);
  RestrictedSeries sa = a, sb = b;
  return RestrictedSeries(a.tower(), a.params(), [sa, sb](int n) { return sa.at_level(n) + sb.at_level(n); });
}

RestrictedSeries operator*(const RestrictedSeries& a, const RestrictedSeries& b) {
  require_same_shape(a, b);
  RestrictedSeries sa = a, sb = b;
  return RestrictedSeries(a.tower(), a.params(), [sa, sb](int n) { return sa.at_level(n) * sb.at_level(n); });
}

RestrictedSeries RestrictedSeries::operator*(const Rational& c) const {
  RestrictedSeries self = *this;
  return RestrictedSeries(tower_, params_, [self, c](int n) { return self.at_level(n) * c; });
}

TowerElement counit(const RestrictedSeries& s) {
  return eval_at(s, std::vector<Rational>(s.params().size(), Rational(0)));
}

RestrictedSeries coinvert(const RestrictedSeries& s) {
  RestrictedSeries self = s;
  return RestrictedSeries(s.tower(), s.params(), [self](int n) {
    const Poly& p = self.at_level(n);
    UniversePtr ext = p.universe();
    std::map<VarId, Poly> images;
    for (const VarId& v : ext->vars()) images.emplace(v, Poly::variable(ext, v));
    for (const VarId& t : self.params()) images.at(t) = -Poly::variable(ext, t);
    return p.substitute(images, ext);
  });
}

RestrictedSeries comultiply(const RestrictedSeries& s, const VarId& param, const VarId& fresh) {
  param_pool_index(fresh);
  if (std::find(s.params().begin(), s.params().end(), param) == s.params().end()) {
    throw Error("comultiply: series has no parameter " + param.str());
  }
  if (std::find(s.params().begin(), s.params().end(), fresh) != s.params().end()) {
    throw Error("comultiply: parameter " + fresh.str() + " already in use");
  }
  std::vector<VarId> params = s.params();
  params.push_back(fresh);
  params = sorted_params(std::move(params));
  RestrictedSeries self = s;
  TowerPtr tower = s.tower();
  return RestrictedSeries(tower, params, [self, params, param, fresh, tower](int n) {
    UniversePtr ext = extend_universe(tower->level(n)->universe, params);
    Poly p = self.at_level(n).reuniverse(ext);
    std::map<VarId, Poly> images;
    for (const VarId& v : p.universe()->vars()) images.emplace(v, Poly::variable(ext, v));
    images.at(param) = Poly::variable(ext, param) + Poly::variable(ext, fresh);
    return p.substitute(images, ext);
  });
}

RestrictedSeries diagonal(const RestrictedSeries& s, const VarId& target) {
  param_pool_index(target);
  RestrictedSeries self = s;
  TowerPtr tower = s.tower();
  std::vector<VarId> params{target};
  return RestrictedSeries(tower, params, [self, target, tower, params](int n) {
    UniversePtr ext = extend_universe(tower->level(n)->universe, params);
    std::map<VarId, Poly> images;
    for (const VarId& v : self.at_level(n).universe()->vars()) {
      images.emplace(v, ext->contains(v) ? Poly::variable(ext, v) : Poly::variable(ext, target));
    }
    return self.at_level(n).substitute(images, ext);
  });
}

RestrictedSeries scale(const RestrictedSeries& s, const std::vector<TowerElement>& weights) {
  if (weights.size() != s.params().size()) throw Error("scale: one weight per parameter required");
  for (const auto& w : weights) {
    if (w.tower().get() != s.tower().get()) throw UniverseError("scale weight lives on a different tower");
  }
  RestrictedSeries self = s;
  std::vector<TowerElement> ws = weights;
  TowerPtr tower = s.tower();
  return RestrictedSeries(tower, s.params(), [self, ws, tower](int n) {
    const Poly& p = self.at_level(n);
    UniversePtr ext = p.universe();
    std::map<VarId, Poly> images;
    for (const VarId& v : ext->vars()) images.emplace(v, Poly::variable(ext, v));
    for (size_t k = 0; k < self.params().size(); ++k) {
      images.at(self.params()[k]) = ws[k].rep(n).reuniverse(ext) * Poly::variable(ext, self.params()[k]);
    }
    return p.substitute(images, ext);
  });
}

TowerElement eval_at(const RestrictedSeries& s, const std::vector<Rational>& values) {
  if (values.size() != s.params().size()) throw Error("eval_at: one value per parameter required");
  RestrictedSeries self = s;
  std::vector<Rational> vs = values;
  TowerPtr tower = s.tower();
  auto raw = [self, vs, tower](int n) {
    LevelPtr L = tower->level(n);
    const Poly& p = self.at_level(n);
    std::map<VarId, Poly> images;
    for (const VarId& v : p.universe()->vars()) {
      if (L->universe->contains(v)) images.emplace(v, Poly::variable(L->universe, v));
    }
    for (size_t k = 0; k < self.params().size(); ++k) {
      images.emplace(self.params()[k], Poly::constant(L->universe, vs[k]));
    }
    return p.substitute(images, L->universe);
  };
  return TowerElement(tower, raw, std::nullopt);
}

TowerElement eval_ones(const RestrictedSeries& s) {
  return eval_at(s, std::vector<Rational>(s.params().size(), Rational(1)));
}

}  // namespace indiga
