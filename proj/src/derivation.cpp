#include "indiga/derivation.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "indiga/linalg.hpp"

namespace indiga {

namespace {

void gen_monomials(size_t slot, size_t width, unsigned long remaining, Monomial& cur,
                   std::vector<Monomial>& out) {
  if (slot == width) {
    out.push_back(cur);
    return;
  }
  for (uint32_t e = 0; e <= remaining; ++e) {
    cur[slot] = e;
    gen_monomials(slot + 1, width, remaining - e, cur, out);
  }
  cur[slot] = 0;
}

std::vector<Monomial> enumerate_monomials(const UniversePtr& uni, unsigned long max_deg) {
  std::vector<Monomial> out;
  Monomial cur(uni->size(), 0);
  gen_monomials(0, uni->size(), max_deg, cur, out);
  return out;
}

// First variable of the formula that actually occurs (universe order).
VarId leading_var(const Poly& f) {
  for (const VarId& v : f.universe()->vars()) {
    if (f.degree_in(v) > 0) return v;
  }
  return VarId("1");
}

void audit_well_defined(const ContinuousDerivation& d, int depth) {
  for (int n = 0; n <= depth; ++n) {
    LevelPtr L = d.tower()->level(n);
    if (L->zero_ring()) continue;
    for (const Poly& g : L->ideal.generators()) {
      Poly img = d.level_apply(n, g);
      if (!img.is_zero()) {
        std::ostringstream msg;
        msg << "images do not preserve the level-" << n << " ideal: derivative of "
            << g.render(L->order) << " reduces to " << img.render(L->order);
        throw IllDefinedDerivation(msg.str());
      }
    }
  }
}

}  // namespace

ContinuousDerivation ContinuousDerivation::make(TowerPtr tower, std::map<VarId, TowerElement> images,
                                                std::vector<IndexRule> rules,
                                                std::optional<int> declared_shift, int audit_depth) {
  for (const auto& [v, e] : images) {
    if (!tower->is_generator(v)) throw UniverseError("image given for a non-generator: " + v.str());
    if (e.tower() != tower) throw UniverseError("image of " + v.str() + " lives on a different tower");
  }
  auto shared_images = std::make_shared<std::map<VarId, TowerElement>>(std::move(images));
  auto shared_rules = std::make_shared<std::vector<IndexRule>>(std::move(rules));
  TowerPtr t = tower;
  auto fn = [shared_images, shared_rules, t](const VarId& v) -> TowerElement {
    auto it = shared_images->find(v);
    if (it != shared_images->end()) return it->second;
    if (v.indexed()) {
      for (const IndexRule& r : *shared_rules) {
        if (r.family != v.name) continue;
        auto i = r.pattern.match(v.index);
        if (!i) continue;
        std::map<std::string, long> env{{"i", *i}};
        Poly formula = eval_expr_formula(r.rhs, env);
        return t->element_from_formula(formula);
      }
    }
    throw IllDefinedDerivation("no image for generator " + v.str());
  };
  return from_image_fn(std::move(tower), std::move(fn), declared_shift, audit_depth);
}

ContinuousDerivation ContinuousDerivation::from_image_fn(
    TowerPtr tower, std::function<TowerElement(const VarId&)> image_fn,
    std::optional<int> declared_shift, int audit_depth) {
  ContinuousDerivation d;
  d.tower_ = std::move(tower);
  d.image_fn_ = std::move(image_fn);
  d.declared_shift_ = declared_shift;
  d.audit_depth_ = audit_depth;
  audit_well_defined(d, audit_depth);
  return d;
}

TowerElement ContinuousDerivation::image(const VarId& gen) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->images.find(gen);
    if (it != cache_->images.end()) return it->second;
  }
  TowerElement e = image_fn_(gen);
  std::lock_guard<std::mutex> lock(cache_->mu);
  return cache_->images.emplace(gen, std::move(e)).first->second;
}

std::optional<Poly> ContinuousDerivation::image_formula(const VarId& gen) const {
  return image(gen).formula();
}

bool ContinuousDerivation::formulaic(long index_bound) const {
  for (const VarId& v : tower_->generators(static_cast<int>(index_bound))) {
    try {
      if (!image_formula(v)) return false;
    } catch (const IllDefinedDerivation&) {
      return false;
    }
  }
  return true;
}

Poly ContinuousDerivation::level_apply(int n, const Poly& p) const {
  LevelPtr L = tower_->level(n);
  Poly q = p.reuniverse(L->universe);
  Poly out(L->universe);
  for (const VarId& v : L->universe->vars()) {
    if (q.degree_in(v) == 0) continue;
    out += q.formal_partial(v) * image(v).rep(n);
  }
  return L->nf(out);
}

Poly ContinuousDerivation::level_apply_power(int n, Poly p, unsigned long k) const {
  for (unsigned long i = 0; i < k && !p.is_zero(); ++i) p = level_apply(n, p);
  return tower_->level(n)->nf(p.reuniverse(tower_->level(n)->universe));
}

TowerElement ContinuousDerivation::apply(const TowerElement& b) const {
  if (b.tower() != tower_) throw UniverseError("element lives on a different tower");
  std::optional<Poly> formula;
  if (b.formula()) {
    try {
      formula = formula_derivative(*b.formula());
    } catch (const IllDefinedDerivation&) {
      formula = std::nullopt;
    }
  }
  ContinuousDerivation self = *this;
  return TowerElement(
      tower_, [self, b](int n) { return self.level_apply(n, b.rep(n)); }, formula);
}

TowerElement ContinuousDerivation::apply_to_formula(const Poly& formula) const {
  TowerElement out = tower_->constant_element(Rational(0));
  for (const VarId& v : formula.universe()->vars()) {
    if (formula.degree_in(v) == 0) continue;
    out = out + tower_->element_from_formula(formula.formal_partial(v)) * image(v);
  }
  return out;
}

Poly ContinuousDerivation::formula_derivative(const Poly& formula) const {
  Poly out(make_universe({}));
  for (const VarId& v : formula.universe()->vars()) {
    if (formula.degree_in(v) == 0) continue;
    auto img = image_formula(v);
    if (!img) throw IllDefinedDerivation("image of " + v.str() + " has no closed formula");
    out = reconcile_add(out, reconcile_mul(formula.formal_partial(v), *img));
  }
  return out;
}

std::string IntegrabilityVerdict::status_str() const {
  switch (status) {
    case Status::Certified: return "certified";
    case Status::Refuted: return "refuted";
    case Status::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

IntegrabilityVerdict check_integrable(const ContinuousDerivation& d, const IntegrabilityWindow& w) {
  IntegrabilityVerdict v;
  v.window = w;
  const TowerPtr& tower = d.tower();
  const long form_bound = w.max_level + 2L * w.max_power + 4;

  v.filtration_holds = true;
  std::string note;
  for (int n = 0; n <= w.max_level && v.filtration_holds; ++n) {
    LevelPtr L = tower->level(n);
    if (L->zero_ring()) continue;
    for (const Poly& g : tower->ideal_formulas(n, form_bound)) {
      TowerElement der = d.apply_to_formula(g);
      const Poly& r = der.rep(n);
      if (!r.is_zero()) {
        v.filtration_holds = false;
        note = "derivative of " + g.render() + " leaves the level-" + std::to_string(n) +
               " ideal: " + r.render(L->order);
        break;
      }
    }
  }

  if (v.filtration_holds) {
    bool nilpotent = true;
    std::map<int, unsigned long> orders;
    for (int n = 0; n <= w.max_level && nilpotent; ++n) {
      LevelPtr L = tower->level(n);
      if (L->zero_ring()) {
        orders[n] = 0;
        continue;
      }
      unsigned long level_order = 0;
      for (const VarId& x : L->universe->vars()) {
        Poly p = L->nf(Poly::variable(L->universe, x));
        unsigned long k = 0;
        while (!p.is_zero()) {
          if (k >= static_cast<unsigned long>(w.max_power)) {
            nilpotent = false;
            note = x.str() + " at level " + std::to_string(n) + " survives " +
                   std::to_string(w.max_power) + " applications";
            break;
          }
          p = d.level_apply(n, p);
          ++k;
        }
        if (!nilpotent) break;
        level_order = std::max(level_order, k);
      }
      if (nilpotent) orders[n] = level_order;
    }
    if (nilpotent) {
      v.status = IntegrabilityVerdict::Status::Certified;
      v.level_orders = std::move(orders);
      v.detail = "filtration and levelwise nilpotency verified on the window";
      return v;
    }
  }

  if (!d.formulaic(form_bound)) {
    v.status = IntegrabilityVerdict::Status::Inconclusive;
    v.detail = note + "; witness search needs closed-form images";
    return v;
  }

  for (int i = 1; i <= w.max_level; ++i) {
    if (tower->level(i)->zero_ring()) continue;
    const MonomialOrder& ord_i = tower->level(i)->order;
    std::vector<IntegrabilityVerdict::Witness> family;
    bool complete = true;
    for (int j = 1; j <= w.max_level && complete; ++j) {
      if (tower->level(j)->zero_ring()) continue;
      bool found = false;
      for (const Poly& g : tower->ideal_formulas(j, j + 2L * w.max_power + 2)) {
        Poly f = g;
        for (unsigned long p = 1; p <= static_cast<unsigned long>(w.max_power) && !found; ++p) {
          f = d.formula_derivative(f);
          if (f.is_zero()) break;
          Poly r = tower->element_from_formula(f).rep(i);
          if (!r.is_zero()) {
            family.push_back({leading_var(g), g, j, p, i, r.render(ord_i)});
            found = true;
          }
        }
        if (found) break;
      }
      if (!found) complete = false;
    }
    if (complete && !family.empty()) {
      v.status = IntegrabilityVerdict::Status::Refuted;
      v.witnesses = std::move(family);
      v.detail = "escape witnessed for every source level, visible at level " + std::to_string(i);
      return v;
    }
  }

  v.status = IntegrabilityVerdict::Status::Inconclusive;
  v.detail = note.empty() ? "window exhausted without certificate or witness"
                          : note + "; window exhausted without witness";
  return v;
}

bool replay_witness(const ContinuousDerivation& d, const IntegrabilityVerdict::Witness& wit) {
  Poly f = wit.formula;
  for (unsigned long p = 0; p < wit.power; ++p) f = d.formula_derivative(f);
  if (f.is_zero()) return false;
  Poly r = d.tower()->element_from_formula(f).rep(wit.observed_level);
  if (r.is_zero()) return false;
  return r.render(d.tower()->level(wit.observed_level)->order) == wit.escaped_to;
}

ContinuousDerivation scale_by_invariant(const ContinuousDerivation& d, const TowerElement& f,
                                        int depth) {
  if (f.tower() != d.tower()) throw UniverseError("scalar lives on a different tower");
  for (int n = 0; n <= depth; ++n) {
    LevelPtr L = d.tower()->level(n);
    if (L->zero_ring()) continue;
    Poly df = d.level_apply(n, f.rep(n));
    if (!df.is_zero()) {
      throw PreconditionError("scalar is not invariant: derivative at level " + std::to_string(n) +
                              " is " + df.render(L->order));
    }
  }
  ContinuousDerivation base = d;
  return ContinuousDerivation::from_image_fn(
      d.tower(), [base, f](const VarId& v) { return f * base.image(v); }, d.declared_shift(),
      depth);
}

ContinuousDerivation sum_commuting(const ContinuousDerivation& a, const ContinuousDerivation& b,
                                   int depth) {
  if (a.tower() != b.tower()) throw UniverseError("derivations live on different towers");
  for (const VarId& g : a.tower()->generators(depth + 2)) {
    TowerElement ab = a.apply(b.image(g));
    TowerElement ba = b.apply(a.image(g));
    CompareResult cr = element_compare(ab, ba, depth);
    if (!cr.equal) {
      throw PreconditionError("derivations do not commute on " + g.str() +
                              ": first divergence at level " + std::to_string(cr.first_divergence));
    }
  }
  ContinuousDerivation da = a, db = b;
  std::optional<int> shift;
  if (a.declared_shift() && b.declared_shift()) {
    shift = std::min(*a.declared_shift(), *b.declared_shift());
  }
  return ContinuousDerivation::from_image_fn(
      a.tower(), [da, db](const VarId& v) { return da.image(v) + db.image(v); }, shift, depth);
}

std::pair<TowerPtr, ContinuousDerivation> quotient_derivation(
    const ContinuousDerivation& d, const std::vector<TowerElement>& relations, int depth) {
  TowerPtr q = quotient_tower(d.tower(), relations);
  for (const TowerElement& r : relations) {
    TowerElement dr = d.apply(r);
    for (int n = 0; n <= depth; ++n) {
      LevelPtr L = q->level(n);
      if (L->zero_ring()) continue;
      Poly img = L->nf(dr.rep(n).reuniverse(L->universe));
      if (!img.is_zero()) {
        throw PreconditionError("derivation does not descend: image of a relation at level " +
                                std::to_string(n) + " is " + img.render(L->order));
      }
    }
  }
  ContinuousDerivation base = d;
  ContinuousDerivation dq = ContinuousDerivation::from_image_fn(
      q, [base, q](const VarId& v) { return transport_element(q, base.image(v)); }, d.declared_shift(),
      depth);
  return {q, dq};
}

std::pair<TowerPtr, ContinuousDerivation> localize_derivation(const ContinuousDerivation& d,
                                                              const TowerElement& f, int depth) {
  if (f.tower() != d.tower()) throw UniverseError("denominator lives on a different tower");
  for (int n = 0; n <= depth; ++n) {
    LevelPtr L = d.tower()->level(n);
    if (L->zero_ring()) continue;
    Poly df = d.level_apply(n, f.rep(n));
    if (!df.is_zero()) {
      throw PreconditionError("denominator is not invariant: derivative at level " +
                              std::to_string(n) + " is " + df.render(L->order));
    }
  }
  TowerPtr loc = localization_tower(d.tower(), f);
  ContinuousDerivation base = d;
  VarId w("w");
  ContinuousDerivation dl = ContinuousDerivation::from_image_fn(
      loc,
      [base, loc, w](const VarId& v) {
        if (v == w) return loc->constant_element(Rational(0));
        return transport_element(loc, base.image(v));
      },
      d.declared_shift(), depth);
  return {loc, dl};
}

KernelReport kernel_basis(const ContinuousDerivation& d, int level, unsigned long deg_bound) {
  LevelPtr L = d.tower()->level(level);
  KernelReport report{{}, level, deg_bound, level + static_cast<int>(deg_bound) + 2};
  if (L->zero_ring()) return report;

  std::vector<Poly> nfs;
  for (const Monomial& m : enumerate_monomials(L->universe, deg_bound)) {
    Poly p = L->nf(Poly::from_monomial(L->universe, m, Rational(1)));
    if (!p.is_zero()) nfs.push_back(p);
  }

  auto column_index = [&](const std::vector<Poly>& ps) {
    std::set<Monomial> s;
    for (const Poly& p : ps) {
      for (const auto& [m, c] : p.terms()) s.insert(m);
    }
    std::vector<Monomial> cols(s.begin(), s.end());
    std::sort(cols.begin(), cols.end(),
              [&](const Monomial& x, const Monomial& y) { return L->order.above(x, y); });
    return cols;
  };
  auto to_rows = [](const std::vector<Poly>& ps, const std::vector<Monomial>& cols) {
    linalg::Mat m;
    for (const Poly& p : ps) {
      linalg::Vec row(cols.size(), Rational(0));
      for (size_t c = 0; c < cols.size(); ++c) row[c] = p.coefficient(cols[c]);
      m.push_back(std::move(row));
    }
    return m;
  };
  auto from_rows = [&](const linalg::Mat& m, const std::vector<Monomial>& cols) {
    std::vector<Poly> out;
    for (const linalg::Vec& row : m) {
      Poly p(L->universe);
      for (size_t c = 0; c < cols.size(); ++c) {
        if (!row[c].is_zero()) p.add_term(cols[c], row[c]);
      }
      if (!p.is_zero()) out.push_back(std::move(p));
    }
    return out;
  };

  std::vector<Monomial> cand_cols = column_index(nfs);
  linalg::Mat cand_rows = to_rows(nfs, cand_cols);
  linalg::rref(cand_rows);
  std::vector<Poly> cands = from_rows(cand_rows, cand_cols);
  if (cands.empty()) return report;

  const int deep = report.audit_level;
  std::vector<Poly> der_reps;
  der_reps.reserve(cands.size());
  for (const Poly& c : cands) der_reps.push_back(d.apply_to_formula(c).rep(deep));

  std::set<Monomial> sup;
  for (const Poly& r : der_reps) {
    for (const auto& [m, c] : r.terms()) sup.insert(m);
  }
  std::vector<Monomial> eq_rows(sup.begin(), sup.end());
  linalg::Mat sys(eq_rows.size(), linalg::Vec(cands.size(), Rational(0)));
  for (size_t c = 0; c < cands.size(); ++c) {
    for (size_t r = 0; r < eq_rows.size(); ++r) sys[r][c] = der_reps[c].coefficient(eq_rows[r]);
  }
  linalg::Mat null = linalg::nullspace(sys, cands.size());

  std::vector<Poly> combos;
  for (const linalg::Vec& x : null) {
    Poly p(L->universe);
    for (size_t c = 0; c < cands.size(); ++c) {
      if (!x[c].is_zero()) p += cands[c] * x[c];
    }
    if (!p.is_zero()) combos.push_back(std::move(p));
  }
  std::vector<Monomial> out_cols = column_index(combos);
  linalg::Mat out_rows = to_rows(combos, out_cols);
  linalg::rref(out_rows);
  report.basis = from_rows(out_rows, out_cols);
  std::sort(report.basis.begin(), report.basis.end(), [&](const Poly& x, const Poly& y) {
    return L->order.above(*y.leading_monomial(L->order), *x.leading_monomial(L->order));
  });
  return report;
}

Poly higher_component(const ContinuousDerivation& d, int n, const Poly& p, unsigned long i) {
  LevelPtr L = d.tower()->level(n);
  Poly q = L->nf(p.reuniverse(L->universe));
  for (unsigned long k = 0; k < i && !q.is_zero(); ++k) q = d.level_apply(n, q);
  return q * Rational::factorial(i).inverse();
}

DualCoordinateData dual_derivation(const std::vector<VarId>& r_vars, const std::map<VarId, Poly>& delta,
                                   int max_level, unsigned long nilpotency_bound,
                                   const GroebnerCaps& caps) {
  if (max_level < 0) throw PreconditionError("dual construction needs max_level >= 0");
  UniversePtr R = make_universe(r_vars);
  std::map<VarId, Poly> images;
  for (const VarId& v : r_vars) {
    auto it = delta.find(v);
    if (it == delta.end()) throw IllDefinedDerivation("no image for " + v.str());
    images.emplace(v, it->second.reuniverse(R));
  }
  auto apply_delta = [&](const Poly& p) {
    Poly out(R);
    for (const VarId& v : r_vars) {
      if (p.degree_in(v) == 0) continue;
      out += p.formal_partial(v) * images.at(v);
    }
    return out;
  };

  for (const VarId& v : r_vars) {
    Poly p = Poly::variable(R, v);
    unsigned long k = 0;
    while (!p.is_zero()) {
      if (k >= nilpotency_bound) {
        throw NotLocallyNilpotent(v.str() + " survives " + std::to_string(nilpotency_bound) +
                                  " applications");
      }
      p = apply_delta(p);
      ++k;
    }
  }

  const MonomialOrder ord = MonomialOrder::grevlex();
  std::vector<Poly> basis;
  auto reduce = [&](Poly p) {
    bool changed = true;
    while (changed && !p.is_zero()) {
      changed = false;
      for (const Poly& b : basis) {
        Rational c = p.coefficient(*b.leading_monomial(ord));
        if (!c.is_zero()) {
          p -= b * c;
          changed = true;
        }
      }
    }
    return p;
  };
  auto insert_closed = [&](Poly seed) {
    std::vector<Poly> work{std::move(seed)};
    while (!work.empty()) {
      Poly p = reduce(std::move(work.back()));
      work.pop_back();
      if (p.is_zero()) continue;
      if (basis.size() >= 4096) throw ResourceExceeded("dual basis closure exceeded 4096 vectors");
      p *= p.leading_coefficient(ord).inverse();
      Poly dp = apply_delta(p);
      basis.push_back(std::move(p));
      if (!dp.is_zero()) work.push_back(std::move(dp));
    }
  };

  std::vector<size_t> dims;
  for (int n = 0; n <= max_level; ++n) {
    for (const Monomial& m : enumerate_monomials(R, static_cast<unsigned long>(n))) {
      insert_closed(Poly::from_monomial(R, m, Rational(1)));
    }
    dims.push_back(basis.size());
  }

  TowerPtr tower = make_dual_coordinate_tower("X", dims, caps);
  const size_t top = dims.back();
  std::vector<std::map<size_t, Rational>> expansion(top);  // j -> coeff of basis[k] in delta(basis[j])
  for (size_t j = 0; j < top; ++j) {
    Poly q = apply_delta(basis[j]);
    while (!q.is_zero()) {
      Monomial lm = *q.leading_monomial(ord);
      size_t k = top;
      for (size_t t = 0; t < top; ++t) {
        if (*basis[t].leading_monomial(ord) == lm) {
          k = t;
          break;
        }
      }
      if (k == top) throw Error("dual basis is not closed under delta");
      Rational c = q.leading_coefficient(ord);
      expansion[j][k] = c;
      q -= basis[k] * c;
    }
  }

  std::vector<VarId> xs;
  for (size_t k = 0; k < top; ++k) xs.emplace_back("X", static_cast<long>(k));
  UniversePtr XU = make_universe(xs);
  std::map<VarId, TowerElement> dimages;
  for (size_t k = 0; k < top; ++k) {
    Poly img(XU);
    for (size_t j = 0; j < top; ++j) {
      auto it = expansion[j].find(k);
      if (it != expansion[j].end()) img += Poly::variable(XU, xs[j]) * it->second;
    }
    dimages.emplace(xs[k], tower->element_from_formula(img));
  }
  ContinuousDerivation der = ContinuousDerivation::make(tower, std::move(dimages), {}, 0, max_level);
  return DualCoordinateData{tower, std::move(der), std::move(basis), std::move(dims), R};
}

Rational dual_point_value(const DualCoordinateData& dual, const std::vector<Rational>& coords,
                          const std::map<VarId, Rational>& point) {
  if (coords.size() > dual.basis.size()) {
    throw PreconditionError("coordinate vector longer than the computed basis");
  }
  Rational out(0);
  for (size_t k = 0; k < coords.size(); ++k) {
    if (coords[k].is_zero()) continue;
    out += coords[k] * dual.basis[k].evaluate(point);
  }
  return out;
}

}  // namespace indiga
