#include "indiga/tower.hpp"

#include <algorithm>
#include <sstream>

namespace indiga {

namespace {

constexpr size_t kAdicProductCap = 5000;  // generators of J^n enumerated per level

LevelPtr make_zero_level(const GroebnerCaps& caps) {
  UniversePtr uni = make_universe({});
  std::vector<Poly> one{Poly::constant(uni, Rational(1))};
  return std::make_shared<const LevelRing>(
      LevelRing{uni, MonomialOrder::grevlex(), buchberger(one, uni, MonomialOrder::grevlex(), caps), caps});
}

std::string join_vars(const std::vector<VarId>& vars) {
  std::string out;
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i) out += ",";
    out += vars[i].str();
  }
  return out;
}

}  // namespace

LevelPtr TowerRing::level(int n) const {
  if (n < 0) throw Error("tower level must be nonnegative");
  std::lock_guard<std::mutex> lock(mu_);
  auto it = levels_.find(n);
  if (it == levels_.end()) it = levels_.emplace(n, spec_.make_level(n)).first;
  return it->second;
}

Assignment TowerRing::transition(int m, int n) const {
  if (m < n) throw Error("transition runs from deeper to shallower levels");
  return spec_.make_transition(*this, m, n);
}

Poly TowerRing::push_down(int m, int n, const Poly& rep_m) const {
  LevelPtr target = level(n);
  if (m == n) return target->nf(rep_m.reuniverse(target->universe));
  Assignment a = transition(m, n);
  return target->nf(rep_m.reuniverse(level(m)->universe).substitute(a, target->universe));
}

Poly TowerRing::generator_rep(const VarId& v, int n) const {
  if (!spec_.is_generator(v)) throw UniverseError("not a generator of this tower: " + v.str());
  LevelPtr L = level(n);
  return L->nf(spec_.generator_rep(*this, v, n));
}

TowerElement TowerRing::generator_element(const VarId& v) const {
  if (!spec_.is_generator(v)) throw UniverseError("not a generator of this tower: " + v.str());
  return element_from_formula(Poly::variable(make_universe({v}), v));
}

TowerElement TowerRing::constant_element(const Rational& c) const {
  return element_from_formula(Poly::constant(make_universe({}), c));
}

TowerElement TowerRing::element_from_formula(const Poly& formula) const {
  for (const VarId& v : formula.universe()->vars()) {
    if (formula.degree_in(v) > 0 && !spec_.is_generator(v)) {
      throw UniverseError("not a generator of this tower: " + v.str());
    }
  }
  TowerPtr self = shared_from_this();
  auto raw = [self, formula](int n) {
    LevelPtr L = self->level(n);
    std::map<VarId, Poly> images;
    for (const VarId& v : formula.universe()->vars()) {
      if (formula.degree_in(v) > 0) images.emplace(v, self->generator_rep(v, n));
    }
    return formula.substitute(images, L->universe);
  };
  return TowerElement(self, raw, formula);
}

TowerElement::TowerElement(TowerPtr tower, std::function<Poly(int)> raw_promoter,
                           std::optional<Poly> formula)
    : tower_(std::move(tower)), state_(std::make_shared<State>()) {
  state_->raw = std::move(raw_promoter);
  state_->formula = std::move(formula);
}

const std::optional<Poly>& TowerElement::formula() const {
  static const std::optional<Poly> none;
  return state_ ? state_->formula : none;
}

const Poly& TowerElement::rep(int n) const {
  if (!state_) throw Error("empty tower element");
  std::lock_guard<std::mutex> lock(state_->mu);
  auto it = state_->cache.find(n);
  if (it != state_->cache.end()) return it->second;

  LevelPtr L = tower_->level(n);
  Poly p = L->nf(state_->raw(n).reuniverse(L->universe));

  // Compatibility audit against the nearest cached neighbors.
  auto above = state_->cache.upper_bound(n);
  if (above != state_->cache.end()) {
    Poly down = tower_->push_down(above->first, n, above->second);
    if (!(down == p)) {
      std::ostringstream msg;
      msg << "element representatives disagree: level " << above->first << " pushes to "
          << down.render() << " at level " << n << ", promoter gave " << p.render();
      throw CompatibilityError(msg.str());
    }
  }
  if (above != state_->cache.begin()) {
    auto below = std::prev(above);
    if (below->first < n) {
      Poly down = tower_->push_down(n, below->first, p);
      if (!(down == below->second)) {
        std::ostringstream msg;
        msg << "element representatives disagree: level " << n << " pushes to " << down.render()
            << " at level " << below->first << ", cached " << below->second.render();
        throw CompatibilityError(msg.str());
      }
    }
  }
  return state_->cache.emplace(n, std::move(p)).first->second;
}

namespace {

void require_same_tower(const TowerElement& a, const TowerElement& b) {
  if (a.tower().get() != b.tower().get()) {
    throw UniverseError("elements live on different towers: " + a.tower()->describe() + " vs " +
                        b.tower()->describe());
  }
}

}  // namespace

TowerElement TowerElement::operator-() const {
  TowerElement self = *this;
  std::optional<Poly> f;
  if (formula()) f = -*formula();
  return TowerElement(tower_, [self](int n) { return -self.rep(n); }, f);
}

TowerElement operator+(const TowerElement& a, const TowerElement& b) {
  require_same_tower(a, b);
  std::optional<Poly> f;
  if (a.formula() && b.formula()) f = reconcile_add(*a.formula(), *b.formula());
  return TowerElement(a.tower(), [a, b](int n) { return a.rep(n) + b.rep(n); }, f);
}

TowerElement operator-(const TowerElement& a, const TowerElement& b) {
  require_same_tower(a, b);
  std::optional<Poly> f;
  if (a.formula() && b.formula()) f = reconcile_sub(*a.formula(), *b.formula());
  return TowerElement(a.tower(), [a, b](int n) { return a.rep(n) - b.rep(n); }, f);
}

TowerElement operator*(const TowerElement& a, const TowerElement& b) {
  require_same_tower(a, b);
  std::optional<Poly> f;
  if (a.formula() && b.formula()) f = reconcile_mul(*a.formula(), *b.formula());
  return TowerElement(a.tower(), [a, b](int n) { return a.tower()->level(n)->nf(a.rep(n) * b.rep(n)); }, f);
}

TowerElement TowerElement::operator*(const Rational& c) const {
  TowerElement self = *this;
  std::optional<Poly> f;
  if (formula()) f = *formula() * c;
  return TowerElement(tower_, [self, c](int n) { return self.rep(n) * c; }, f);
}

TowerElement TowerElement::pow(unsigned long k) const {
  TowerElement self = *this;
  std::optional<Poly> f;
  if (formula()) f = formula()->pow(k);
  return TowerElement(tower_, [self, k](int n) { return self.tower()->level(n)->nf(self.rep(n).pow(k)); }, f);
}

bool TowerElement::is_zero_to(int depth) const {
  for (int n = 0; n <= depth; ++n) {
    if (!rep(n).is_zero()) return false;
  }
  return true;
}

CompareResult element_compare(const TowerElement& a, const TowerElement& b, int depth) {
  require_same_tower(a, b);
  for (int n = 0; n <= depth; ++n) {
    if (!(a.rep(n) == b.rep(n))) {
      Rational metric = n == 0 ? Rational(1) : Rational(1, 2).pow(static_cast<unsigned long>(n - 1));
      return CompareResult{false, n, metric, depth};
    }
  }
  return CompareResult{true, -1, Rational(0), depth};
}

// ---------------------------------------------------------------------------
// Constructors

TowerPtr make_adic_tower(const std::vector<VarId>& vars, const std::vector<Poly>& ideal_gens,
                         const GroebnerCaps& caps) {
  UniversePtr uni = make_universe(vars);
  std::vector<Poly> gens;
  for (const Poly& g : ideal_gens) {
    Poly h = g.reuniverse(uni);
    if (h.is_zero()) continue;
    if (h.is_constant()) throw PresentationError("improper adic ideal: contains the unit " + h.render());
    gens.push_back(h);
  }

  TowerRing::Spec spec;
  spec.kind = TowerRing::Kind::Adic;
  spec.describe = "adic(" + join_vars(vars) + ")";
  spec.caps = caps;

  auto products_of = [gens, uni, caps](int n) {
    // All products of n generators with repetition.
    std::vector<Poly> out;
    std::vector<size_t> pick(static_cast<size_t>(n), 0);
    if (gens.empty() || n == 0) return out;
    while (true) {
      Poly p = Poly::constant(uni, Rational(1));
      for (size_t k : pick) p *= gens[k];
      out.push_back(std::move(p));
      if (out.size() > kAdicProductCap) throw ResourceExceeded("adic power ideal has too many generators");
      // Next nondecreasing index vector.
      size_t i = pick.size();
      while (i > 0 && pick[i - 1] == gens.size() - 1) --i;
      if (i == 0) break;
      size_t v = pick[i - 1] + 1;
      for (size_t j = i - 1; j < pick.size(); ++j) pick[j] = v;
    }
    return out;
  };

  spec.make_level = [uni, caps, products_of](int n) -> LevelPtr {
    if (n == 0) {
      std::vector<Poly> one{Poly::constant(uni, Rational(1))};
      return std::make_shared<const LevelRing>(
          LevelRing{uni, MonomialOrder::grevlex(), buchberger(one, uni, MonomialOrder::grevlex(), caps), caps});
    }
    return std::make_shared<const LevelRing>(LevelRing{
        uni, MonomialOrder::grevlex(), buchberger(products_of(n), uni, MonomialOrder::grevlex(), caps), caps});
  };
  spec.make_transition = [uni](const TowerRing& t, int m, int n) {
    Assignment a;
    UniversePtr target = t.level(n)->universe;
    for (const VarId& v : uni->vars()) a.emplace(v, Poly::variable(target, v));
    return a;
  };
  std::vector<VarId> vars_copy = vars;
  spec.generators = [vars_copy](int) { return vars_copy; };
  spec.is_generator = [uni](const VarId& v) { return uni->contains(v); };
  spec.generator_rep = [](const TowerRing& t, const VarId& v, int n) {
    return Poly::variable(t.level(n)->universe, v);
  };
  spec.ideal_formulas = [uni, products_of](const TowerRing&, int n, long) -> std::vector<Poly> {
    if (n == 0) return {Poly::constant(make_universe({}), Rational(1))};
    return products_of(n);
  };
  return std::make_shared<TowerRing>(std::move(spec));
}

TowerPtr make_cutoff_tower(const std::string& family, const std::vector<Rational>& centers,
                           const GroebnerCaps& caps) {
  auto center = [centers](long i) -> Rational {
    if (centers.empty()) return Rational(0);
    return centers[std::min<size_t>(static_cast<size_t>(i), centers.size() - 1)];
  };
  auto level_universe = [family](int n) {
    std::vector<VarId> vars;
    for (int i = 0; i < n; ++i) vars.emplace_back(family, i);
    return make_universe(std::move(vars));
  };

  TowerRing::Spec spec;
  spec.kind = TowerRing::Kind::Cutoff;
  spec.describe = "cutoff(" + family + ")";
  spec.caps = caps;
  spec.make_level = [level_universe, caps](int n) -> LevelPtr {
    if (n == 0) return make_zero_level(caps);
    UniversePtr uni = level_universe(n);
    return std::make_shared<const LevelRing>(
        LevelRing{uni, MonomialOrder::grevlex(), buchberger({}, uni, MonomialOrder::grevlex(), caps), caps});
  };
  spec.make_transition = [family, center](const TowerRing& t, int m, int n) {
    Assignment a;
    UniversePtr target = t.level(n)->universe;
    for (int i = 0; i < m; ++i) {
      VarId v(family, i);
      a.emplace(v, i < n ? Poly::variable(target, v) : Poly::constant(target, center(i)));
    }
    return a;
  };
  spec.generators = [family](int hint) {
    std::vector<VarId> vars;
    for (int i = 0; i < hint; ++i) vars.emplace_back(family, i);
    return vars;
  };
  spec.is_generator = [family](const VarId& v) { return v.name == family && v.indexed(); };
  spec.generator_rep = [center](const TowerRing& t, const VarId& v, int n) {
    UniversePtr uni = t.level(n)->universe;
    if (v.index < n) return Poly::variable(uni, v);
    return Poly::constant(uni, center(v.index));
  };
  spec.ideal_formulas = [family, center](const TowerRing&, int n, long bound) -> std::vector<Poly> {
    if (n == 0) return {Poly::constant(make_universe({}), Rational(1))};
    std::vector<Poly> out;
    for (long i = n; i <= bound; ++i) {
      VarId v(family, i);
      UniversePtr uni = make_universe({v});
      out.push_back(Poly::variable(uni, v) - Poly::constant(uni, center(i)));
    }
    return out;
  };
  return std::make_shared<TowerRing>(std::move(spec));
}

TowerPtr make_discrete_tower(const std::vector<VarId>& vars, const std::vector<Poly>& ideal_gens,
                             const GroebnerCaps& caps) {
  UniversePtr uni = make_universe(vars);
  std::vector<Poly> gens;
  for (const Poly& g : ideal_gens) gens.push_back(g.reuniverse(uni));

  TowerRing::Spec spec;
  spec.kind = TowerRing::Kind::Discrete;
  spec.describe = "discrete(" + join_vars(vars) + ")";
  spec.caps = caps;
  spec.make_level = [uni, gens, caps](int) -> LevelPtr {
    return std::make_shared<const LevelRing>(
        LevelRing{uni, MonomialOrder::grevlex(), buchberger(gens, uni, MonomialOrder::grevlex(), caps), caps});
  };
  spec.make_transition = [uni](const TowerRing& t, int, int n) {
    Assignment a;
    UniversePtr target = t.level(n)->universe;
    for (const VarId& v : uni->vars()) a.emplace(v, Poly::variable(target, v));
    return a;
  };
  std::vector<VarId> vars_copy = vars;
  spec.generators = [vars_copy](int) { return vars_copy; };
  spec.is_generator = [uni](const VarId& v) { return uni->contains(v); };
  spec.generator_rep = [](const TowerRing& t, const VarId& v, int n) {
    return Poly::variable(t.level(n)->universe, v);
  };
  spec.ideal_formulas = [](const TowerRing&, int, long) { return std::vector<Poly>{}; };
  return std::make_shared<TowerRing>(std::move(spec));
}

TowerPtr make_dual_coordinate_tower(const std::string& family, std::vector<size_t> dims,
                                    const GroebnerCaps& caps) {
  if (dims.empty()) throw PresentationError("dual-coordinate tower needs at least one level dimension");
  for (size_t i = 1; i < dims.size(); ++i) {
    if (dims[i] < dims[i - 1]) throw PresentationError("dual-coordinate dimensions must be nondecreasing");
  }
  auto dim_at = [dims](int n) -> size_t {
    if (n < 0) throw Error("tower level must be nonnegative");
    if (static_cast<size_t>(n) >= dims.size()) {
      throw Error("dual-coordinate tower is only defined to level " + std::to_string(dims.size() - 1));
    }
    return dims[static_cast<size_t>(n)];
  };
  auto level_universe = [family, dim_at](int n) {
    std::vector<VarId> vars;
    for (size_t i = 0; i < dim_at(n); ++i) vars.emplace_back(family, static_cast<long>(i));
    return make_universe(std::move(vars));
  };

  TowerRing::Spec spec;
  spec.kind = TowerRing::Kind::DualCoordinate;
  spec.describe = "dual(" + family + ")";
  spec.caps = caps;
  spec.make_level = [level_universe, caps](int n) -> LevelPtr {
    UniversePtr uni = level_universe(n);
    return std::make_shared<const LevelRing>(
        LevelRing{uni, MonomialOrder::grevlex(), buchberger({}, uni, MonomialOrder::grevlex(), caps), caps});
  };
  spec.make_transition = [family, dim_at](const TowerRing& t, int m, int n) {
    Assignment a;
    UniversePtr target = t.level(n)->universe;
    for (size_t i = 0; i < dim_at(m); ++i) {
      VarId v(family, static_cast<long>(i));
      a.emplace(v, i < dim_at(n) ? Poly::variable(target, v) : Poly(target));
    }
    return a;
  };
  size_t top = dims.back();
  spec.generators = [family, top](int hint) {
    std::vector<VarId> vars;
    size_t count = std::min<size_t>(top, static_cast<size_t>(std::max(hint, 0)));
    for (size_t i = 0; i < count; ++i) vars.emplace_back(family, static_cast<long>(i));
    return vars;
  };
  spec.is_generator = [family, top](const VarId& v) {
    return v.name == family && v.indexed() && static_cast<size_t>(v.index) < top;
  };
  spec.generator_rep = [dim_at](const TowerRing& t, const VarId& v, int n) {
    UniversePtr uni = t.level(n)->universe;
    if (static_cast<size_t>(v.index) < dim_at(n)) return Poly::variable(uni, v);
    return Poly(uni);
  };
  spec.ideal_formulas = [family, dim_at, top](const TowerRing&, int n, long bound) -> std::vector<Poly> {
    std::vector<Poly> out;
    long hi = std::min<long>(bound, static_cast<long>(top) - 1);
    for (long i = static_cast<long>(dim_at(n)); i <= hi; ++i) {
      VarId v(family, i);
      out.push_back(Poly::variable(make_universe({v}), v));
    }
    return out;
  };
  return std::make_shared<TowerRing>(std::move(spec));
}

TowerPtr quotient_tower(const TowerPtr& base, const std::vector<TowerElement>& relations) {
  for (const auto& r : relations) {
    if (r.tower().get() != base.get()) throw UniverseError("quotient relation lives on a different tower");
  }
  TowerRing::Spec spec;
  spec.kind = TowerRing::Kind::Quotient;
  spec.describe = base->describe() + "/(relations)";
  spec.caps = base->caps();
  std::vector<TowerElement> rels = relations;
  spec.make_level = [base, rels](int n) -> LevelPtr {
    LevelPtr b = base->level(n);
    std::vector<Poly> gens = b->ideal.generators();
    for (const auto& r : rels) gens.push_back(r.rep(n));
    return std::make_shared<const LevelRing>(
        LevelRing{b->universe, b->order, buchberger(gens, b->universe, b->order, b->caps), b->caps});
  };
  spec.make_transition = [base](const TowerRing&, int m, int n) { return base->transition(m, n); };
  spec.generators = [base](int hint) { return base->generators(hint); };
  spec.is_generator = [base](const VarId& v) { return base->is_generator(v); };
  spec.generator_rep = [base](const TowerRing& t, const VarId& v, int n) {
    return base->generator_rep(v, n).reuniverse(t.level(n)->universe);
  };
  spec.ideal_formulas = [base](const TowerRing&, int n, long bound) {
    return base->ideal_formulas(n, bound);
  };
  return std::make_shared<TowerRing>(std::move(spec));
}

TowerPtr tensor_tower(const TowerPtr& a, const TowerPtr& b) {
  TowerRing::Spec spec;
  spec.kind = TowerRing::Kind::Tensor;
  spec.describe = a->describe() + " (x) " + b->describe();
  spec.caps = a->caps();
  spec.make_level = [a, b](int n) -> LevelPtr {
    LevelPtr la = a->level(n), lb = b->level(n);
    std::vector<VarId> vars = la->universe->vars();
    for (const VarId& v : lb->universe->vars()) {
      if (la->universe->contains(v)) throw UniverseError("tensor factors share variable " + v.str());
      vars.push_back(v);
    }
    UniversePtr uni = make_universe(std::move(vars));
    std::vector<Poly> gens;
    for (const Poly& g : la->ideal.generators()) gens.push_back(g.reuniverse(uni));
    for (const Poly& g : lb->ideal.generators()) gens.push_back(g.reuniverse(uni));
    GroebnerCaps caps = la->caps;
    return std::make_shared<const LevelRing>(
        LevelRing{uni, MonomialOrder::grevlex(), buchberger(gens, uni, MonomialOrder::grevlex(), caps), caps});
  };
  spec.make_transition = [a, b](const TowerRing& t, int m, int n) {
    Assignment out;
    UniversePtr target = t.level(n)->universe;
    for (const auto& [v, img] : a->transition(m, n)) out.emplace(v, img.reuniverse(target));
    for (const auto& [v, img] : b->transition(m, n)) out.emplace(v, img.reuniverse(target));
    return out;
  };
  spec.generators = [a, b](int hint) {
    std::vector<VarId> vars = a->generators(hint);
    std::vector<VarId> vb = b->generators(hint);
    vars.insert(vars.end(), vb.begin(), vb.end());
    return vars;
  };
  spec.is_generator = [a, b](const VarId& v) { return a->is_generator(v) || b->is_generator(v); };
  spec.generator_rep = [a, b](const TowerRing& t, const VarId& v, int n) {
    UniversePtr target = t.level(n)->universe;
    if (a->is_generator(v)) return a->generator_rep(v, n).reuniverse(target);
    return b->generator_rep(v, n).reuniverse(target);
  };
  spec.ideal_formulas = [a, b](const TowerRing&, int n, long bound) {
    std::vector<Poly> out = a->ideal_formulas(n, bound);
    std::vector<Poly> fb = b->ideal_formulas(n, bound);
    out.insert(out.end(), fb.begin(), fb.end());
    return out;
  };
  return std::make_shared<TowerRing>(std::move(spec));
}

TowerPtr localization_tower(const TowerPtr& base, const TowerElement& f) {
  if (f.tower().get() != base.get()) throw UniverseError("localization element lives on a different tower");
  VarId w("w");
  TowerRing::Spec spec;
  spec.kind = TowerRing::Kind::Localized;
  spec.describe = base->describe() + "[1/f]";
  spec.caps = base->caps();
  TowerElement fe = f;
  spec.make_level = [base, fe, w](int n) -> LevelPtr {
    LevelPtr b = base->level(n);
    if (b->universe->contains(w)) throw UniverseError("base level already uses the inversion variable w");
    std::vector<VarId> vars{w};
    for (const VarId& v : b->universe->vars()) vars.push_back(v);
    UniversePtr uni = make_universe(std::move(vars));
    MonomialOrder order = MonomialOrder::elim(1);
    std::vector<Poly> gens;
    for (const Poly& g : b->ideal.generators()) gens.push_back(g.reuniverse(uni));
    gens.push_back(Poly::variable(uni, w) * fe.rep(n).reuniverse(uni) - Poly::constant(uni, Rational(1)));
    return std::make_shared<const LevelRing>(
        LevelRing{uni, order, buchberger(gens, uni, order, b->caps), b->caps});
  };
  spec.make_transition = [base, w](const TowerRing& t, int m, int n) {
    Assignment out;
    UniversePtr target = t.level(n)->universe;
    for (const auto& [v, img] : base->transition(m, n)) out.emplace(v, img.reuniverse(target));
    out.emplace(w, Poly::variable(target, w));
    return out;
  };
  spec.generators = [base, w](int hint) {
    std::vector<VarId> vars = base->generators(hint);
    vars.push_back(w);
    return vars;
  };
  spec.is_generator = [base, w](const VarId& v) { return v == w || base->is_generator(v); };
  spec.generator_rep = [base, w](const TowerRing& t, const VarId& v, int n) {
    UniversePtr target = t.level(n)->universe;
    if (v == w) return Poly::variable(target, w);
    return base->generator_rep(v, n).reuniverse(target);
  };
  spec.ideal_formulas = [base](const TowerRing&, int n, long bound) {
    return base->ideal_formulas(n, bound);
  };
  return std::make_shared<TowerRing>(std::move(spec));
}

ZeroLocalizationReport is_zero_localization(const TowerPtr& base, const TowerElement& f, int depth) {
  TowerPtr loc = localization_tower(base, f);
  ZeroLocalizationReport report{true, -1, {}, depth};
  for (int n = 0; n <= depth; ++n) {
    bool z = loc->level(n)->zero_ring();
    report.level_zero.push_back(z);
    if (!z && report.first_nonzero_level < 0) {
      report.first_nonzero_level = n;
      report.zero = false;
    }
  }
  return report;
}

TowerElement partial_product_element(const TowerPtr& tower, const std::string& family) {
  TowerPtr t = tower;
  auto raw = [t, family](int n) {
    LevelPtr L = t->level(n);
    Poly p = Poly::constant(L->universe, Rational(1));
    for (const VarId& v : L->universe->vars()) {
      if (v.name == family && v.indexed()) p *= Poly::variable(L->universe, v);
    }
    return p;
  };
  return TowerElement(t, raw, std::nullopt);
}

TowerElement transport_element(const TowerPtr& target, const TowerElement& src) {
  if (src.tower() == target) return src;
  return TowerElement(target, [src](int n) { return src.rep(n); }, src.formula());
}

}  // namespace indiga
