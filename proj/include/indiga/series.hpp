#pragma once

#include <functional>
#include <vector>

#include "indiga/tower.hpp"

namespace indiga {

// Series parameters come from a fixed pool; a series uses a subset, kept in
// pool order so renderings and comparisons are canonical.
const std::vector<VarId>& series_param_pool();
size_t param_pool_index(const VarId& p);
std::vector<VarId> sorted_params(std::vector<VarId> params);

// Element of A{T...}: a polynomial in the parameters at every level, with
// coefficients tending to 0 (enforced structurally: each level poly is finite
// and transitions push coefficients down).
class RestrictedSeries {
 public:
  RestrictedSeries(TowerPtr tower, std::vector<VarId> params, std::function<Poly(int)> raw);

  const TowerPtr& tower() const { return tower_; }
  const std::vector<VarId>& params() const { return params_; }
  // Level-n value over level universe extended by the parameters; memoized,
  // normal-formed coefficientwise, audited against cached neighbor levels.
  const Poly& at_level(int n) const;
  UniversePtr level_universe(int n) const;

  // Coefficient of the parameter monomial `exps` (aligned with params()).
  TowerElement coefficient(const std::vector<uint32_t>& exps) const;
  unsigned long param_degree(int n) const;  // total parameter degree at level n

  static RestrictedSeries embed(const TowerElement& b, std::vector<VarId> params);

  friend RestrictedSeries operator+(const RestrictedSeries& a, const RestrictedSeries& b);
  friend RestrictedSeries operator*(const RestrictedSeries& a, const RestrictedSeries& b);
  RestrictedSeries operator*(const Rational& c) const;

 private:
  struct State {
    std::function<Poly(int)> raw;
    std::map<int, Poly> cache;
    std::mutex mu;
  };
  TowerPtr tower_;
  std::vector<VarId> params_;
  std::shared_ptr<State> state_;
};

// Hopf structure maps on the parameter side.
TowerElement counit(const RestrictedSeries& s);                       // all params -> 0
RestrictedSeries coinvert(const RestrictedSeries& s);                 // params -> -params
// param -> fresh + param; the fresh parameter joins the series.
RestrictedSeries comultiply(const RestrictedSeries& s, const VarId& param, const VarId& fresh);
RestrictedSeries diagonal(const RestrictedSeries& s, const VarId& target);  // all params -> target
// param_k -> a_k * param_k with tower-element weights (Rational via constants).
RestrictedSeries scale(const RestrictedSeries& s, const std::vector<TowerElement>& weights);
TowerElement eval_at(const RestrictedSeries& s, const std::vector<Rational>& values);
TowerElement eval_ones(const RestrictedSeries& s);

// Normal form respecting parameters: reduce coefficients only.
Poly nf_with_params(const LevelRing& level, const std::vector<VarId>& params, const Poly& p);

}  // namespace indiga
