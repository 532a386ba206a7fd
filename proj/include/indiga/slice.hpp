#pragma once

#include <optional>
#include <vector>

#include "indiga/exponential.hpp"

namespace indiga {

// A local slice s for e: e(s) has parameter degree <= 1 at every audited
// level and exactly 1 at the deepest nonzero one. s1 = e_1(s) is invariant;
// sigma = s/s1 lives in the localization at s1 and satisfies e(sigma) =
// sigma + T there.
struct SliceData {
  TowerElement s;
  TowerElement s1;
  TowerPtr localized;
  ContinuousDerivation local_der;
  RestrictedExponential local_exp;
  TowerElement sigma;  // w * s in the localized tower
  int depth;
};

// Throws PreconditionError when s does not qualify.
SliceData make_slice(const RestrictedExponential& e, const TowerElement& s, int depth,
                     const IntegrabilityWindow& w);
// First qualifying candidate, with the index it had in the list.
struct SliceSearch {
  std::optional<SliceData> found;
  int index = -1;
  std::vector<std::string> rejected;  // one reason per skipped candidate
};
SliceSearch find_local_slice(const RestrictedExponential& e,
                             const std::vector<TowerElement>& candidates, int depth,
                             const IntegrabilityWindow& w);

// The projection b -> sum_i e_i(b)(-sigma)^i onto local invariants, computed
// levelwise in the localized tower. Accepts elements of the base tower or of
// the localized tower.
TowerElement dixmier_reynolds(const SliceData& sd, const TowerElement& b);

struct CylinderDecomposition {
  std::vector<TowerElement> coefficients;  // c_i = R(e_i(b)), in the localized tower
  bool reconstructs;                       // sum c_i sigma^i == b to the audited depth
  int depth;
};
CylinderDecomposition cylinder_decompose(const SliceData& sd, const TowerElement& b);

}  // namespace indiga
