#include "indiga/groebner.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace indiga {

namespace {

struct Pair {
  size_t i, j;
  Monomial lcm;
  unsigned long degree;
};

// Normal strategy: smallest lcm degree first; ties broken by the order on
// lcm monomials, then by indices, keeping runs deterministic.
bool pair_before(const Pair& a, const Pair& b, const MonomialOrder& order) {
  if (a.degree != b.degree) return a.degree < b.degree;
  if (a.lcm != b.lcm) return !order.above(a.lcm, b.lcm);
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

Poly reduce_full(const Poly& p, const std::vector<Poly>& basis, const MonomialOrder& order,
                 const GroebnerCaps& caps, size_t* steps) {
  Poly rem(p.universe());
  Poly cur = p;
  while (!cur.is_zero()) {
    Monomial lm = *cur.leading_monomial(order);
    bool reduced = false;
    for (const Poly& g : basis) {
      if (g.is_zero()) continue;
      Monomial glm = *g.leading_monomial(order);
      if (!monomial_divides(glm, lm)) continue;
      if (++*steps > caps.step_cap) throw ResourceExceeded("normal form exceeded the reduction step cap");
      Rational f = cur.coefficient(lm) / g.coefficient(glm);
      Poly mult = Poly::from_monomial(cur.universe(), monomial_quotient(lm, glm), f);
      cur -= mult * g;
      reduced = true;
      break;
    }
    if (!reduced) {
      // Leading term survives; move it to the remainder.
      rem.add_term(lm, cur.coefficient(lm));
      Poly lt = Poly::from_monomial(cur.universe(), lm, cur.coefficient(lm));
      cur -= lt;
    }
  }
  return rem;
}

bool coprime(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0 && b[i] > 0) return false;
  }
  return true;
}

}  // namespace

GroebnerBasis::GroebnerBasis(UniversePtr uni, MonomialOrder order, std::vector<Poly> reduced)
    : uni_(std::move(uni)), order_(order), gens_(std::move(reduced)) {}

bool GroebnerBasis::contains_one() const {
  for (const Poly& g : gens_) {
    if (g.is_constant() && !g.is_zero()) return true;
  }
  return false;
}

GroebnerBasis buchberger(const std::vector<Poly>& gens, const UniversePtr& uni,
                         const MonomialOrder& order, const GroebnerCaps& caps) {
  std::vector<Poly> basis;
  for (const Poly& g : gens) {
    if (!(*g.universe() == *uni)) throw UniverseError("ideal generator outside the ring universe");
    if (!g.is_zero()) basis.push_back(g);
  }
  size_t steps = 0;
  size_t pairs_made = 0;

  std::vector<Pair> queue;
  auto push_pairs_for = [&](size_t j) {
    Monomial lmj = *basis[j].leading_monomial(order);
    for (size_t i = 0; i < j; ++i) {
      if (basis[i].is_zero()) continue;
      if (++pairs_made > caps.pair_cap) throw ResourceExceeded("Buchberger exceeded the pair cap");
      Monomial lmi = *basis[i].leading_monomial(order);
      queue.push_back(Pair{i, j, monomial_lcm(lmi, lmj), monomial_degree(monomial_lcm(lmi, lmj))});
    }
  };
  for (size_t j = 0; j < basis.size(); ++j) push_pairs_for(j);

  std::set<std::pair<size_t, size_t>> done;
  while (!queue.empty()) {
    size_t best = 0;
    for (size_t k = 1; k < queue.size(); ++k) {
      if (pair_before(queue[k], queue[best], order)) best = k;
    }
    Pair pr = queue[best];
    queue.erase(queue.begin() + best);
    done.insert({pr.i, pr.j});

    if (basis[pr.i].is_zero() || basis[pr.j].is_zero()) continue;
    Monomial lmi = *basis[pr.i].leading_monomial(order);
    Monomial lmj = *basis[pr.j].leading_monomial(order);
    if (coprime(lmi, lmj)) continue;  // first Buchberger criterion
    // Chain criterion: some k with LT(k) | lcm and both companion pairs done.
    bool skip = false;
    for (size_t k = 0; k < basis.size() && !skip; ++k) {
      if (k == pr.i || k == pr.j || basis[k].is_zero()) continue;
      if (!monomial_divides(*basis[k].leading_monomial(order), pr.lcm)) continue;
      auto key = [](size_t a, size_t b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
      if (done.count(key(pr.i, k)) && done.count(key(k, pr.j))) skip = true;
    }
    if (skip) continue;

    Poly si = Poly::from_monomial(uni, monomial_quotient(pr.lcm, lmi),
                                  basis[pr.i].coefficient(lmi).inverse());
    Poly sj = Poly::from_monomial(uni, monomial_quotient(pr.lcm, lmj),
                                  basis[pr.j].coefficient(lmj).inverse());
    Poly s = si * basis[pr.i] - sj * basis[pr.j];
    Poly rem = reduce_full(s, basis, order, caps, &steps);
    if (!rem.is_zero()) {
      basis.push_back(rem);
      push_pairs_for(basis.size() - 1);
    }
  }

  // Inter-reduce to the unique reduced basis: drop redundant leading terms,
  // fully reduce tails, normalize to monic, sort ascending.
  std::vector<Poly> reduced;
  for (size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].is_zero()) continue;
    Monomial lm = *basis[i].leading_monomial(order);
    bool redundant = false;
    for (size_t j = 0; j < basis.size() && !redundant; ++j) {
      if (j == i || basis[j].is_zero()) continue;
      Monomial lmj = *basis[j].leading_monomial(order);
      if (monomial_divides(lmj, lm) && (lmj != lm || j < i)) redundant = true;
    }
    if (!redundant) reduced.push_back(basis[i]);
  }
  for (size_t i = 0; i < reduced.size(); ++i) {
    std::vector<Poly> others;
    for (size_t j = 0; j < reduced.size(); ++j) {
      if (j != i) others.push_back(reduced[j]);
    }
    reduced[i] = reduce_full(reduced[i], others, order, caps, &steps);
  }
  std::vector<Poly> final_basis;
  for (Poly& g : reduced) {
    if (g.is_zero()) continue;
    g *= g.leading_coefficient(order).inverse();
    final_basis.push_back(std::move(g));
  }
  std::sort(final_basis.begin(), final_basis.end(), [&order](const Poly& a, const Poly& b) {
    return order.above(*b.leading_monomial(order), *a.leading_monomial(order));
  });
  return GroebnerBasis(uni, order, std::move(final_basis));
}

Poly normal_form(const Poly& p, const GroebnerBasis& basis, const GroebnerCaps& caps) {
  if (!(*p.universe() == *basis.universe())) throw UniverseError("normal form outside the ring universe");
  size_t steps = 0;
  return reduce_full(p, basis.generators(), basis.order(), caps, &steps);
}

}  // namespace indiga
