#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "indiga/groebner.hpp"
#include "indiga/poly.hpp"

namespace indiga {

// One finitely presented level A_n = k[universe]/ideal.
struct LevelRing {
  UniversePtr universe;
  MonomialOrder order = MonomialOrder::grevlex();
  GroebnerBasis ideal;
  GroebnerCaps caps;

  bool zero_ring() const { return ideal.contains_one(); }
  Poly nf(const Poly& p) const { return normal_form(p, ideal, caps); }
};

using LevelPtr = std::shared_ptr<const LevelRing>;
using Assignment = std::map<VarId, Poly>;  // source variable -> image at the target level

class TowerRing;
using TowerPtr = std::shared_ptr<const TowerRing>;
class TowerElement;

// A complete linearly topologized ring presented as a tower of levels with
// surjective transition maps. Levels are built lazily and memoized.
class TowerRing : public std::enable_shared_from_this<TowerRing> {
 public:
  enum class Kind { Adic, Cutoff, Discrete, DualCoordinate, Quotient, Tensor, Localized };

  struct Spec {
    Kind kind;
    std::string describe;
    GroebnerCaps caps;
    std::function<LevelPtr(int)> make_level;                    // n >= 0
    std::function<Assignment(const TowerRing&, int, int)> make_transition;  // (m, n), m >= n
    std::function<std::vector<VarId>(int)> generators;          // families truncated by hint
    std::function<bool(const VarId&)> is_generator;
    std::function<Poly(const TowerRing&, const VarId&, int)> generator_rep;  // raw, pre-NF
    // Generators of the open ideal a_n as formulas over generator symbols;
    // families truncated at index_bound.
    std::function<std::vector<Poly>(const TowerRing&, int, long)> ideal_formulas;
  };

  explicit TowerRing(Spec spec) : spec_(std::move(spec)) {}
  TowerRing(const TowerRing&) = delete;
  TowerRing& operator=(const TowerRing&) = delete;

  Kind kind() const { return spec_.kind; }
  const std::string& describe() const { return spec_.describe; }
  const GroebnerCaps& caps() const { return spec_.caps; }

  LevelPtr level(int n) const;
  Assignment transition(int m, int n) const;          // images of level-m variables at level n
  Poly push_down(int m, int n, const Poly& rep_m) const;

  std::vector<VarId> generators(int level_hint) const { return spec_.generators(level_hint); }
  bool is_generator(const VarId& v) const { return spec_.is_generator(v); }
  Poly generator_rep(const VarId& v, int n) const;     // post-NF
  std::vector<Poly> ideal_formulas(int n, long index_bound) const {
    return spec_.ideal_formulas(*this, n, index_bound);
  }

  TowerElement generator_element(const VarId& v) const;
  TowerElement constant_element(const Rational& c) const;
  // Formula over generator symbols; evaluated by substituting level reps.
  TowerElement element_from_formula(const Poly& formula) const;

 private:
  Spec spec_;
  mutable std::map<int, LevelPtr> levels_;
  mutable std::mutex mu_;
};

// An element of the limit: one representative per level, produced lazily and
// audited for compatibility against the transition maps as levels fill in.
class TowerElement {
 public:
  TowerElement() = default;
  TowerElement(TowerPtr tower, std::function<Poly(int)> raw_promoter, std::optional<Poly> formula);

  bool valid() const { return static_cast<bool>(tower_); }
  const TowerPtr& tower() const { return tower_; }
  const Poly& rep(int n) const;
  const std::optional<Poly>& formula() const;

  TowerElement operator-() const;
  friend TowerElement operator+(const TowerElement& a, const TowerElement& b);
  friend TowerElement operator-(const TowerElement& a, const TowerElement& b);
  friend TowerElement operator*(const TowerElement& a, const TowerElement& b);
  TowerElement operator*(const Rational& c) const;
  TowerElement pow(unsigned long k) const;

  bool is_zero_to(int depth) const;

 private:
  struct State {
    std::function<Poly(int)> raw;
    std::optional<Poly> formula;  // over generator symbols
    std::map<int, Poly> cache;
    std::mutex mu;
  };
  TowerPtr tower_;
  std::shared_ptr<State> state_;
};

struct CompareResult {
  bool equal;             // to the audited depth
  int first_divergence;   // -1 when none within the window
  Rational metric;        // 0 when indistinguishable to depth
  int depth;
};

// Canonical metric: divergence first visible at level n gives distance
// 1/2^(n-1); level-0 divergence (discrete towers) gives distance 1.
CompareResult element_compare(const TowerElement& a, const TowerElement& b, int depth);

// Tower constructors. Level 0 is the zero ring for adic/cutoff kinds and the
// base ring for discrete/dual-coordinate kinds.
TowerPtr make_adic_tower(const std::vector<VarId>& vars, const std::vector<Poly>& ideal_gens,
                         const GroebnerCaps& caps = {});
// Level n = k[X_0..X_{n-1}]; variable i is cut off to centers[i] past its level.
TowerPtr make_cutoff_tower(const std::string& family, const std::vector<Rational>& centers,
                           const GroebnerCaps& caps = {});
TowerPtr make_discrete_tower(const std::vector<VarId>& vars, const std::vector<Poly>& ideal_gens,
                             const GroebnerCaps& caps = {});
// Coordinate rings Sym(W_n*) of a nested exhaustion with dims[n] coordinates
// at level n; transitions cut trailing coordinates to 0.
TowerPtr make_dual_coordinate_tower(const std::string& family, std::vector<size_t> dims,
                                    const GroebnerCaps& caps = {});
TowerPtr quotient_tower(const TowerPtr& base, const std::vector<TowerElement>& relations);
TowerPtr tensor_tower(const TowerPtr& a, const TowerPtr& b);
// Inverts f levelwise via a fresh variable w with w*f = 1, eliminated first.
TowerPtr localization_tower(const TowerPtr& base, const TowerElement& f);

struct ZeroLocalizationReport {
  bool zero;                      // every audited level collapses
  int first_nonzero_level;        // -1 if none within depth
  std::vector<bool> level_zero;   // levels 0..depth
  int depth;
};
ZeroLocalizationReport is_zero_localization(const TowerPtr& base, const TowerElement& f, int depth);

// The Danielewski-style element: at level n, the product of the family
// members alive at that level (prod_{i<n} X_i). No closed formula.
TowerElement partial_product_element(const TowerPtr& tower, const std::string& family);

// Reinterpret an element levelwise on a tower whose levels renormalize the
// same representatives (quotients and localizations of its tower).
TowerElement transport_element(const TowerPtr& target, const TowerElement& src);

}  // namespace indiga
