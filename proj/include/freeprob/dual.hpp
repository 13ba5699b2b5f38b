#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "freeprob/brown.hpp"
#include "freeprob/cumulants.hpp"

namespace freeprob {

struct Violation {
  Word word;
  std::string expected;
  std::string got;
  std::string witness;  // representation that separated the sides, if any
};

// Verdicts hold at the checked degree only.
struct InvarianceReport {
  bool pass = true;
  std::optional<Violation> violation;
  int degree = 0;
  int n = 0;
};

enum class ActionMode { alpha, beta };

// t_i -> Σ_j u_{ij} t_j and t_i* -> Σ_j t_j* u_{ij}* on every arity-1 letter.
// alpha: all indices must be <= n. beta: letters with index > n are fixed.
// Letters of the context's own alphabet are rejected; other arity-2 letters
// (say a copy alphabet) pass through.
NCPolynomial alpha_expand(const BrownContext& ctx, const NCPolynomial& p);
NCPolynomial beta_expand(const BrownContext& ctx, const NCPolynomial& p);

// φ_x(w) = (h_n * φ_x)(α_n(w)) for all words of length 1..D over the first
// n letters (alpha) or over every declared letter (beta). Words are checked
// concurrently; the reported violation is the first one in term order.
InvarianceReport check_dual_invariance(const MomentFunctional& phi, int n, int degree,
                                       ActionMode mode = ActionMode::alpha);

struct CumulantPatternSpec {
  std::vector<Rational> alpha;  // star-leading κ_{2r}(x*_{i1}, x_{i1}, x*_{i2}, x_{i2}, ...), r = 1..
  std::vector<Rational> beta;   // plain-leading κ_{2r}(x_{i1}, x*_{i2}, x_{i2}, ..., x*_{i1})
};

struct PatternReport {
  bool pass = true;
  CumulantPatternSpec spec;  // meaningful when pass
  std::optional<Word> violation;
  Rational value;      // κ at the violation
  std::string reason;  // "non-pattern cumulant", "depends on indices", "alpha differs from beta"
  int degree = 0;
};

// 1 for the star-leading pattern, 2 for plain-leading, 0 otherwise; the
// argument holds (index, starred) per position.
int cyclic_pattern(std::span<const std::pair<int, bool>> letters);

PatternReport check_cumulant_pattern(const MomentFunctional& phi, int degree);

struct RDiagonalReport {
  bool pass = true;
  std::optional<Word> violation;
  Rational value;
};
// cumulants over {x_i, x_i*} vanish off the alternating star patterns
RDiagonalReport check_rdiagonal(const MomentFunctional& phi, const Letter& letter, int degree);

struct RecoveredAlpha {
  std::vector<Rational> alpha;  // α_1 .. α_{r_max}
  std::vector<Rational> s_cumulants;
};
// Solves κ_m(s) = n^m α_m + Σ_{π ≠ 1, π∨σ = 1} (pattern value of κ_π) for
// s = Σ_i x_i* x_i, assuming the tracial pattern α = β. moments[k] = φ(s^k),
// k = 0..r_max, moments[0] must be 1.
RecoveredAlpha recover_alpha_sequence(const std::vector<Rational>& s_moments, int n, int r_max);

struct FixedPointReport {
  bool rewrite_fixed = false;
  NCPolynomial residual;  // α(p) - p after collapsing relation sums
  bool rep_fixed = false;
  RepVerdict rep;
  bool fixed() const { return rewrite_fixed && rep_fixed; }
};

// Collapses every complete sum Σ_a u*_{ak} u_{al} or Σ_a u_{ka} u*_{la}
// (adjacent letters, equal coefficients across a) to δ_{kl}.
NCPolynomial collapse_relations(const BrownContext& ctx, const NCPolynomial& p);

FixedPointReport fixed_point_check(const BrownContext& ctx, const NCPolynomial& p, int trials, std::uint64_t seed);

// δ applied to the u letters only; other letters stay.
NCPolynomial counit_collapse(const BrownContext& ctx, const NCPolynomial& p);

// (Δ ⊔ id)∘α and (id ⊔ α)∘α, both over the copy alphabets u(1), u(2).
std::pair<NCPolynomial, NCPolynomial> coassociativity_sides(const BrownContext& ctx, const NCPolynomial& p);

// E[α_n(w)] for every t-word w of length <= degree, projected onto the t
// letters with the Haar state integrated out; reports the first word whose
// image is not a polynomial in Σ_j t_j* t_j (powers <= degree / 2).
struct ExpectationImageReport {
  bool pass = true;
  std::optional<Word> violation;
  NCPolynomial image;
};
ExpectationImageReport expectation_image_check(const MomentFunctional& phi, int n, int degree);

}  // namespace freeprob
