#pragma once

#include <cstddef>
#include <vector>

#include "indiga/poly.hpp"

namespace indiga {

struct GroebnerCaps {
  size_t pair_cap = 100000;
  size_t step_cap = 100000;
};

// Reduced Groebner basis: monic generators, none reducible by the others,
// sorted by leading monomial from small to large. Unique for (ideal, order),
// hence independent of generator presentation.
class GroebnerBasis {
 public:
  GroebnerBasis(UniversePtr uni, MonomialOrder order, std::vector<Poly> reduced);

  const UniversePtr& universe() const { return uni_; }
  const MonomialOrder& order() const { return order_; }
  const std::vector<Poly>& generators() const { return gens_; }
  bool is_zero_ideal() const { return gens_.empty(); }
  bool contains_one() const;

 private:
  UniversePtr uni_;
  MonomialOrder order_;
  std::vector<Poly> gens_;
};

// Buchberger with the normal pair-selection strategy and both classical
// skip criteria; throws ResourceExceeded when a cap is hit.
GroebnerBasis buchberger(const std::vector<Poly>& gens, const UniversePtr& uni,
                         const MonomialOrder& order, const GroebnerCaps& caps = {});

// Full normal form (no term of the result is divisible by any leading term).
Poly normal_form(const Poly& p, const GroebnerBasis& basis, const GroebnerCaps& caps = {});

}  // namespace indiga
