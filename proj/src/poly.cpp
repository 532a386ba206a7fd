#include "indiga/poly.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace indiga {

namespace {

constexpr uint32_t kExponentCap = 1u << 24;  // far beyond any sane fixture; hit = bug

uint32_t checked_exp_add(uint32_t a, uint32_t b) {
  uint64_t s = static_cast<uint64_t>(a) + b;
  if (s >= kExponentCap) throw Error("monomial exponent overflow");
  return static_cast<uint32_t>(s);
}

}  // namespace

std::string VarId::str() const {
  if (!indexed()) return name;
  return name + "[" + std::to_string(index) + "]";
}

Universe::Universe(std::vector<VarId> vars) : vars_(std::move(vars)) {
  std::set<VarId> seen;
  for (const auto& v : vars_) {
    if (!seen.insert(v).second) throw UniverseError("duplicate variable in universe: " + v.str());
  }
}

std::optional<size_t> Universe::find(const VarId& v) const {
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i] == v) return i;
  }
  return std::nullopt;
}

std::string Universe::str() const {
  std::string out = "[";
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (i) out += ", ";
    out += vars_[i].str();
  }
  return out + "]";
}

UniversePtr make_universe(std::vector<VarId> vars) {
  return std::make_shared<const Universe>(std::move(vars));
}

UniversePtr extend_universe(const UniversePtr& base, const std::vector<VarId>& extra) {
  std::vector<VarId> vars = base->vars();
  vars.insert(vars.end(), extra.begin(), extra.end());
  return make_universe(std::move(vars));
}

UniversePtr merge_universes(const UniversePtr& a, const UniversePtr& b) {
  std::set<VarId> all(a->vars().begin(), a->vars().end());
  all.insert(b->vars().begin(), b->vars().end());
  return make_universe(std::vector<VarId>(all.begin(), all.end()));
}

unsigned long monomial_degree(const Monomial& m) {
  unsigned long d = 0;
  for (uint32_t e : m) d += e;
  return d;
}

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = checked_exp_add(a[i], b[i]);
  return r;
}

bool monomial_divides(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

Monomial monomial_quotient(const Monomial& b, const Monomial& a) {
  Monomial r(b.size());
  for (size_t i = 0; i < b.size(); ++i) r[i] = b[i] - a[i];
  return r;
}

Monomial monomial_lcm(const Monomial& a, const Monomial& b) {
  Monomial r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

namespace {

// grevlex on the slice [lo, hi): higher degree wins; on ties the last
// variable with differing exponent decides, smaller exponent winning.
int grevlex_cmp(const Monomial& a, const Monomial& b, size_t lo, size_t hi) {
  unsigned long da = 0, db = 0;
  for (size_t i = lo; i < hi; ++i) {
    da += a[i];
    db += b[i];
  }
  if (da != db) return da > db ? 1 : -1;
  for (size_t i = hi; i > lo; --i) {
    uint32_t ea = a[i - 1], eb = b[i - 1];
    if (ea != eb) return ea < eb ? 1 : -1;
  }
  return 0;
}

int lex_cmp(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i] ? 1 : -1;
  }
  return 0;
}

}  // namespace

bool MonomialOrder::above(const Monomial& a, const Monomial& b) const {
  if (a.size() != b.size()) throw UniverseError("monomial length mismatch");
  switch (kind_) {
    case Kind::Lex:
      return lex_cmp(a, b) > 0;
    case Kind::GrevLex:
      return grevlex_cmp(a, b, 0, a.size()) > 0;
    case Kind::Elim: {
      size_t s = std::min(split_, a.size());
      int c = grevlex_cmp(a, b, 0, s);
      if (c != 0) return c > 0;
      return grevlex_cmp(a, b, s, a.size()) > 0;
    }
  }
  return false;
}

std::string MonomialOrder::str() const {
  switch (kind_) {
    case Kind::Lex:
      return "lex";
    case Kind::GrevLex:
      return "grevlex";
    case Kind::Elim:
      return "elim(" + std::to_string(split_) + ")";
  }
  return "?";
}

Poly::Poly(UniversePtr uni) : uni_(std::move(uni)) {
  if (!uni_) throw UniverseError("polynomial without a universe");
}

Poly Poly::constant(UniversePtr uni, const Rational& c) {
  Poly p(std::move(uni));
  if (!c.is_zero()) p.terms_.emplace(Monomial(p.uni_->size(), 0), c);
  return p;
}

Poly Poly::variable(const UniversePtr& uni, const VarId& v) {
  auto pos = uni->find(v);
  if (!pos) throw UniverseError("variable " + v.str() + " not in universe " + uni->str());
  Monomial m(uni->size(), 0);
  m[*pos] = 1;
  return from_monomial(uni, std::move(m), Rational(1));
}

Poly Poly::from_monomial(UniversePtr uni, Monomial m, const Rational& c) {
  Poly p(std::move(uni));
  if (m.size() != p.uni_->size()) throw UniverseError("monomial length mismatch");
  if (!c.is_zero()) p.terms_.emplace(std::move(m), c);
  return p;
}

bool Poly::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && monomial_degree(terms_.begin()->first) == 0;
}

Rational Poly::constant_value() const {
  Monomial one(uni_->size(), 0);
  return coefficient(one);
}

unsigned long Poly::total_degree() const {
  unsigned long d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, monomial_degree(m));
  return d;
}

unsigned long Poly::degree_in(const VarId& v) const {
  auto pos = uni_->find(v);
  if (!pos) return 0;
  unsigned long d = 0;
  for (const auto& [m, c] : terms_) d = std::max<unsigned long>(d, m[*pos]);
  return d;
}

Rational Poly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms_.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly r(uni_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

namespace {

void require_same_universe(const Poly& a, const Poly& b) {
  if (!(*a.universe() == *b.universe())) {
    throw UniverseError("universe mismatch: " + a.universe()->str() + " vs " + b.universe()->str());
  }
}

}  // namespace

Poly& Poly::operator+=(const Poly& o) {
  require_same_universe(*this, o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  require_same_universe(*this, o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly& Poly::operator*=(const Poly& o) {
  require_same_universe(*this, o);
  Poly r(uni_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) r.add_term(monomial_mul(ma, mb), ca * cb);
  }
  terms_ = std::move(r.terms_);
  return *this;
}

Poly& Poly::operator*=(const Rational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Poly Poly::pow(unsigned long k) const {
  Poly r = Poly::constant(uni_, Rational(1));
  Poly base = *this;
  while (k > 0) {
    if (k & 1) r *= base;
    if (k >>= 1) base *= base;
  }
  return r;
}

Poly Poly::substitute(const std::map<VarId, Poly>& images, const UniversePtr& target) const {
  // Per-variable image powers are cached across terms.
  std::map<size_t, std::vector<Poly>> powers;
  Poly out(target);
  for (const auto& [m, c] : terms_) {
    Poly term = Poly::constant(target, c);
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      auto& cache = powers[i];
      if (cache.empty()) {
        auto it = images.find((*uni_)[i]);
        if (it == images.end()) throw UniverseError("substitute: no image for " + (*uni_)[i].str());
        if (!(*it->second.universe() == *target)) {
          throw UniverseError("substitute: image of " + (*uni_)[i].str() + " lives in the wrong universe");
        }
        cache.push_back(Poly::constant(target, Rational(1)));
        cache.push_back(it->second);
      }
      while (cache.size() <= m[i]) cache.push_back(cache.back() * cache[1]);
      term *= cache[m[i]];
    }
    out += term;
  }
  return out;
}

Poly Poly::reuniverse(const UniversePtr& target) const {
  if (*uni_ == *target) {
    Poly copy = *this;
    copy.uni_ = target;
    return copy;
  }
  std::vector<std::optional<size_t>> slot(uni_->size());
  for (size_t i = 0; i < uni_->size(); ++i) slot[i] = target->find((*uni_)[i]);
  Poly out(target);
  for (const auto& [m, c] : terms_) {
    Monomial t(target->size(), 0);
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (!slot[i]) throw UniverseError("reuniverse: " + (*uni_)[i].str() + " absent from " + target->str());
      t[*slot[i]] = m[i];
    }
    out.add_term(t, c);
  }
  return out;
}

Poly Poly::formal_partial(const VarId& v) const {
  auto pos = uni_->find(v);
  if (!pos) return Poly(uni_);
  Poly out(uni_);
  for (const auto& [m, c] : terms_) {
    if (m[*pos] == 0) continue;
    Monomial t = m;
    t[*pos] -= 1;
    out.add_term(t, c * Rational(static_cast<long>(m[*pos])));
  }
  return out;
}

Rational Poly::evaluate(const std::map<VarId, Rational>& point) const {
  Rational total(0);
  for (const auto& [m, c] : terms_) {
    Rational v = c;
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      auto it = point.find((*uni_)[i]);
      if (it == point.end()) throw UniverseError("evaluate: no value for " + (*uni_)[i].str());
      v *= it->second.pow(m[i]);
    }
    total += v;
  }
  return total;
}

std::map<std::vector<uint32_t>, Poly> Poly::coefficients_in(const std::vector<VarId>& vs) const {
  std::vector<std::optional<size_t>> pos(vs.size());
  for (size_t i = 0; i < vs.size(); ++i) pos[i] = uni_->find(vs[i]);
  std::map<std::vector<uint32_t>, Poly> out;
  for (const auto& [m, c] : terms_) {
    std::vector<uint32_t> key(vs.size(), 0);
    Monomial rest = m;
    for (size_t i = 0; i < vs.size(); ++i) {
      if (!pos[i]) continue;
      key[i] = m[*pos[i]];
      rest[*pos[i]] = 0;
    }
    auto it = out.find(key);
    if (it == out.end()) it = out.emplace(key, Poly(uni_)).first;
    it->second.add_term(rest, c);
  }
  return out;
}

unsigned long Poly::degree_in_set(const std::vector<VarId>& vs) const {
  std::vector<std::optional<size_t>> pos(vs.size());
  for (size_t i = 0; i < vs.size(); ++i) pos[i] = uni_->find(vs[i]);
  unsigned long d = 0;
  for (const auto& [m, c] : terms_) {
    unsigned long t = 0;
    for (const auto& p : pos) {
      if (p) t += m[*p];
    }
    d = std::max(d, t);
  }
  return d;
}

std::optional<Monomial> Poly::leading_monomial(const MonomialOrder& order) const {
  if (terms_.empty()) return std::nullopt;
  auto best = terms_.begin();
  for (auto it = std::next(terms_.begin()); it != terms_.end(); ++it) {
    if (order.above(it->first, best->first)) best = it;
  }
  return best->first;
}

Rational Poly::leading_coefficient(const MonomialOrder& order) const {
  auto lm = leading_monomial(order);
  return lm ? coefficient(*lm) : Rational(0);
}

std::string Poly::render(const MonomialOrder& order) const {
  if (terms_.empty()) return "0";
  std::vector<const std::pair<const Monomial, Rational>*> sorted;
  sorted.reserve(terms_.size());
  for (const auto& t : terms_) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(),
            [&order](const auto* a, const auto* b) { return order.above(a->first, b->first); });
  std::ostringstream out;
  bool first = true;
  for (const auto* t : sorted) {
    const Rational& c = t->second;
    if (first) {
      if (c.sign() < 0) out << "-";
      first = false;
    } else {
      out << (c.sign() < 0 ? " - " : " + ");
    }
    Rational mag = c.abs();
    std::string mono;
    for (size_t i = 0; i < t->first.size(); ++i) {
      uint32_t e = t->first[i];
      if (e == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += (*uni_)[i].str();
      if (e > 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty()) {
      out << mag.str();
    } else {
      if (!mag.is_one()) out << mag.str() << "*";
      out << mono;
    }
  }
  return out.str();
}

bool equal_as_formulas(const Poly& a, const Poly& b) {
  UniversePtr u = merge_universes(a.universe(), b.universe());
  return a.reuniverse(u).terms() == b.reuniverse(u).terms();
}

Poly reconcile_mul(const Poly& a, const Poly& b) {
  UniversePtr u = merge_universes(a.universe(), b.universe());
  return a.reuniverse(u) * b.reuniverse(u);
}

Poly reconcile_add(const Poly& a, const Poly& b) {
  UniversePtr u = merge_universes(a.universe(), b.universe());
  return a.reuniverse(u) + b.reuniverse(u);
}

Poly reconcile_sub(const Poly& a, const Poly& b) {
  UniversePtr u = merge_universes(a.universe(), b.universe());
  return a.reuniverse(u) - b.reuniverse(u);
}

}  // namespace indiga
