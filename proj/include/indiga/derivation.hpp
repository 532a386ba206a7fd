#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "indiga/expr.hpp"
#include "indiga/tower.hpp"

namespace indiga {

// Continuous k-derivation of a tower, presented by generator images: an
// explicit image per named generator plus indexed rules for families
// (first match wins, matched by residue class of the index).
class ContinuousDerivation {
 public:
  struct IndexRule {
    std::string family;
    AffineIndex pattern;   // matches family[stride*i + offset]
    ExprPtr rhs;           // instantiated with the matched i
    std::string rhs_text;
  };

  static ContinuousDerivation make(TowerPtr tower, std::map<VarId, TowerElement> images,
                                   std::vector<IndexRule> rules, std::optional<int> declared_shift,
                                   int audit_depth);
  // Raw constructor for transforms; audits well-definedness like make.
  static ContinuousDerivation from_image_fn(TowerPtr tower,
                                            std::function<TowerElement(const VarId&)> image_fn,
                                            std::optional<int> declared_shift, int audit_depth);

  const TowerPtr& tower() const { return tower_; }
  std::optional<int> declared_shift() const { return declared_shift_; }
  int audit_depth() const { return audit_depth_; }

  // Image of a generator; rule instantiation is cached.
  TowerElement image(const VarId& gen) const;
  std::optional<Poly> image_formula(const VarId& gen) const;
  // True when every generator image up to the index bound carries a formula.
  bool formulaic(long index_bound) const;

  // The induced endomorphism-candidate of level n (Leibniz + normal form).
  Poly level_apply(int n, const Poly& p) const;
  Poly level_apply_power(int n, Poly p, unsigned long k) const;

  // Levelwise application; yields a coherent element when the shift-0
  // filtration holds (the compatibility audit fires otherwise).
  TowerElement apply(const TowerElement& b) const;
  // Symbolic Leibniz on a generator formula, as element arithmetic.
  TowerElement apply_to_formula(const Poly& formula) const;
  // Fully symbolic derivative of a generator formula (formulaic images only).
  Poly formula_derivative(const Poly& formula) const;

 private:
  ContinuousDerivation() = default;
  TowerPtr tower_;
  std::function<TowerElement(const VarId&)> image_fn_;
  std::optional<int> declared_shift_;
  int audit_depth_ = 0;
  struct Cache {
    std::map<VarId, TowerElement> images;
    std::mutex mu;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

struct IntegrabilityWindow {
  int max_level = 6;
  int max_power = 12;
};

// Three-valued outcome: Certified carries per-level nilpotency orders,
// Refuted carries a replayable witness family, Inconclusive reports the
// window that was exhausted.
struct IntegrabilityVerdict {
  enum class Status { Certified, Refuted, Inconclusive };

  struct Witness {
    VarId generator;       // leading variable of the escaping ideal generator
    Poly formula;          // the generator of a_j that escapes, as a formula
    long source_level;     // j
    unsigned long power;   // n with rep of derivative^n nonzero
    int observed_level;    // i where the escape is visible
    std::string escaped_to;
  };

  Status status = Status::Inconclusive;
  bool filtration_holds = false;             // shift-0 filtration on the window
  std::map<int, unsigned long> level_orders; // Certified: nilpotency order per level
  std::vector<Witness> witnesses;            // Refuted: one witness per source level j
  IntegrabilityWindow window;
  std::string detail;

  bool certified() const { return status == Status::Certified; }
  std::string status_str() const;
};

IntegrabilityVerdict check_integrable(const ContinuousDerivation& d, const IntegrabilityWindow& w);

// Replay a refutation witness from scratch; true when the claimed escape
// reproduces exactly.
bool replay_witness(const ContinuousDerivation& d, const IntegrabilityVerdict::Witness& wit);

// Derivation transforms. Each audits its precondition to `depth` and throws
// PreconditionError with a witness when it fails.
ContinuousDerivation scale_by_invariant(const ContinuousDerivation& d, const TowerElement& f, int depth);
ContinuousDerivation sum_commuting(const ContinuousDerivation& a, const ContinuousDerivation& b, int depth);
// Descends d to base/(relations); requires the relations to be mapped into
// the quotient ideal levelwise.
std::pair<TowerPtr, ContinuousDerivation> quotient_derivation(const ContinuousDerivation& d,
                                                              const std::vector<TowerElement>& relations,
                                                              int depth);
// Extends d to base[1/f] with w -> 0; requires f invariant to depth.
std::pair<TowerPtr, ContinuousDerivation> localize_derivation(const ContinuousDerivation& d,
                                                              const TowerElement& f, int depth);

// Basis of {p in A_n : deg p <= deg_bound, derivative vanishes through the
// audit window} as a k-vector space; echelonized, deterministic.
struct KernelReport {
  std::vector<Poly> basis;   // over the level-n universe
  int level;
  unsigned long deg_bound;
  int audit_level;           // single deep level where vanishing was tested
};
KernelReport kernel_basis(const ContinuousDerivation& d, int level, unsigned long deg_bound);

// Iterated higher derivation component D^(i) = derivative^i / i! applied at
// one level (exact over the rationals).
Poly higher_component(const ContinuousDerivation& d, int n, const Poly& p, unsigned long i);

// Dual-coordinate construction: from a locally nilpotent delta on k[r_vars],
// build the coordinate tower of the function space and the dual derivation
// Sym(delta*) with basis bookkeeping for point evaluation.
struct DualCoordinateData {
  TowerPtr tower;
  ContinuousDerivation derivation;
  std::vector<Poly> basis;        // echelon basis of the exhaustion, prefix per level
  std::vector<size_t> dims;       // coordinates alive at each level
  UniversePtr point_universe;     // the r_vars
};
DualCoordinateData dual_derivation(const std::vector<VarId>& r_vars, const std::map<VarId, Poly>& delta,
                                   int max_level, unsigned long nilpotency_bound = 64,
                                   const GroebnerCaps& caps = {});

// Value at a rational point of the function with the given coordinates.
Rational dual_point_value(const DualCoordinateData& dual, const std::vector<Rational>& coords,
                          const std::map<VarId, Rational>& point);

}  // namespace indiga
