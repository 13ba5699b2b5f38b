#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "freeprob/brown.hpp"
#include "freeprob/dual.hpp"

namespace freeprob {

// u_part ⊗ t_part with a coefficient; u letters never cross the tensor sign
struct TensorTerm {
  Word u_part;
  Word t_part;
  Rational coefficient;
  friend bool operator==(const TensorTerm&, const TensorTerm&) = default;
};

// t_i -> Σ_j u_{ij} ⊗ t_j, t_i* -> Σ_j u*_{ij} ⊗ t_j*; n^|w| terms in
// odometer order of the summed indices (first position slowest)
std::vector<TensorTerm> gamma_expand(const BrownContext& ctx, const Word& w);
// (δ ⊗ id) of the terms
NCPolynomial gamma_counit(const BrownContext& ctx, const std::vector<TensorTerm>& terms);

// (id ⊗ φ)(γ(w)) - φ(w)·1 as a polynomial in the u letters
NCPolynomial bialgebra_defect(const BrownContext& ctx, const MomentFunctional& phi, const Word& w);
// its π_n image, computed without building the polynomial
RationalMatrix bialgebra_defect_pi(const BrownContext& ctx, const MomentFunctional& phi, const Word& w);

struct RepSelection {
  bool pi = true;
  int trials = 10;
  std::uint64_t seed = 0;
};

// Every word over the first n letters up to `degree`: the defect must vanish
// under π_n and under `trials` seeded unitaries (1e-9). A pass means
// consistent under the requested representations, not proven in the Brown
// algebra.
InvarianceReport check_bialgebra_invariance(const MomentFunctional& phi, int n, int degree, const RepSelection& reps);

// Σ over ordered noncrossing pairings π of the star pattern of w with
// π ⪯ ker(indices) of c^{|w|/2}
Rational eta_zero_circular_moment(int count, const Rational& c, const Word& w);
MomentFunctional build_eta_zero_circular(int count, const Rational& c, int degree, const std::string& alphabet = "x");

enum class LemmaMode { symbolic, reps };

struct LemmaVerdict {
  Rational predicted;  // 1 if π ⪯ ker j else 0
  Rational value;      // symbolic result, or the predicted value when reps agree
  bool agree = false;
  std::string detail;  // where a representation disagreed
};

// Σ_{i ∈ [n]^{2k}, π ⪯ ker i} u^{e_1}_{j_1 i_1} ⋯ u^{e_2k}_{j_2k i_2k} against [π ⪯ ker j].
// symbolic: collapse interval pairs of π one at a time in the polynomial;
// reps: evaluate under π_n and seeded unitaries.
LemmaVerdict check_interval_sum_lemma(int n, const std::vector<int>& j, const StarPattern& e, const NCPartition& pi,
                                      LemmaMode mode, const RepSelection& reps = {});

struct LemmaSweep {
  std::uint64_t cases = 0;
  std::uint64_t disagreements = 0;
  std::string first_disagreement;
};
// both modes on every (π, j) with π ordered for its forced star pattern
LemmaSweep sweep_interval_sum_lemma(int n, int k, const RepSelection& reps);

struct HalfDefinettiReport {
  InvarianceReport invariance;
  bool tables_agree = true;
  std::optional<Word> table_mismatch;
};

// η = 0 circular family on n letters: bialgebraic invariance plus the
// partition-level term tables (lemma side vs kernel side) for every word.
HalfDefinettiReport halfdefinetti_demo(int n, int degree, const Rational& c, const RepSelection& reps);

}  // namespace freeprob
