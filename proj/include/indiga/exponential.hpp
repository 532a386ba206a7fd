#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "indiga/derivation.hpp"
#include "indiga/series.hpp"

namespace indiga {

// Continuous endomorphism presented by generator-image formulas; generators
// without an entry map to themselves.
struct TowerMap {
  TowerPtr tower;
  std::map<VarId, Poly> images;

  Poly image_poly(const VarId& v) const;
  TowerElement image_of(const VarId& v) const;
  TowerElement apply(const TowerElement& b) const;
  Poly apply_formula(const Poly& f) const;
};

// exp(T d) as a homomorphism into restricted series; construction demands a
// certified integrability verdict.
class RestrictedExponential {
 public:
  static RestrictedExponential make(const ContinuousDerivation& d, const IntegrabilityWindow& w);

  const ContinuousDerivation& derivation() const { return der_; }
  const IntegrabilityVerdict& certificate() const { return cert_; }
  const TowerPtr& tower() const { return der_.tower(); }
  static const VarId& param();

  // Level-n image: sum_k d^k(p)/k! T^k over the level universe extended by T.
  Poly level_series(int n, const Poly& p) const;
  RestrictedSeries apply(const TowerElement& b) const;
  TowerElement component(const TowerElement& b, unsigned long i) const;  // e_i(b)

  TowerElement flow_at(const Rational& t, const TowerElement& b) const;
  // Time from the invariant subring: scale the parameter, then evaluate at 1.
  TowerElement flow_at(const TowerElement& t, const TowerElement& b, int depth) const;

 private:
  RestrictedExponential(ContinuousDerivation d, IntegrabilityVerdict cert)
      : der_(std::move(d)), cert_(std::move(cert)) {}
  ContinuousDerivation der_;
  IntegrabilityVerdict cert_;
};

RestrictedExponential make_exponential(const ContinuousDerivation& d, const IntegrabilityWindow& w);

// A candidate coaction A -> A{T}, levelwise. Covers genuine exponentials and
// hand-written candidates that may fail the axioms.
struct CoactionMap {
  TowerPtr tower;
  std::function<Poly(int, const Poly&)> level_map;
  std::string describe;
};
CoactionMap coaction_of(const RestrictedExponential& e);
// Candidate from generator images over generator symbols plus the parameter T.
CoactionMap coaction_from_formulas(const TowerPtr& tower, const std::map<VarId, Poly>& images);

struct CoactionReport {
  bool pass = true;
  int samples = 0;
  int depth = 0;
  // First violation, when pass is false:
  std::string failed_check;     // "counit" or "coassociativity"
  int sample_index = -1;
  int level = -1;
  std::string param_monomial;   // parameter monomial of the first bad coefficient
  std::string residual;         // that coefficient of lhs - rhs
};
CoactionReport verify_coaction(const CoactionMap& e, const std::vector<TowerElement>& samples,
                               int depth);

struct InvariantReport {
  bool invariant = true;
  int first_bad_level = -1;
  std::string residual;
  int depth = 0;
};
InvariantReport invariant_test(const RestrictedExponential& e, const TowerElement& b, int depth);

// alpha e alpha^{-1}; the maps are audited to be mutually inverse on
// generators to `depth` before the conjugated derivation is certified.
RestrictedExponential conjugate(const RestrictedExponential& e, const TowerMap& fwd,
                                const TowerMap& inv, const IntegrabilityWindow& w, int depth);
RestrictedExponential compose_commuting(const RestrictedExponential& a,
                                        const RestrictedExponential& b,
                                        const IntegrabilityWindow& w, int depth);

// Coordinates of t.f for the dual-coordinate action: the flow at -t of the
// coordinate functionals, evaluated at the coordinates of f.
std::vector<Rational> orbit_coordinates(const DualCoordinateData& dual,
                                        const RestrictedExponential& e,
                                        const std::vector<Rational>& coords, const Rational& t);

}  // namespace indiga
