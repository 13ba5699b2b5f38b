#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "freeprob/functional.hpp"
#include "freeprob/partitions.hpp"

namespace freeprob {

using MomentOracle = std::function<Rational(const Word&)>;
MomentOracle oracle_of(const MomentFunctional& phi);

// Two independent ways to fill a cumulant table:
//   mobius:      κ_m(w) = Σ_{σ∈NC(m)} φ_σ[w] μ(σ, 1_m), the definition
//   first_block: κ_m(w) = φ(w) - Σ over proper blocks V ∋ 1 of κ(w_V) times
//                the moments of the gaps, filled by increasing length
enum class CumulantMethod { first_block, mobius };

CumulantTable cumulants_from_moments(const MomentFunctional& phi,
                                     CumulantMethod method = CumulantMethod::first_block);
// φ(w) = Σ_{π∈NC(m)} κ_π[w]; validated like any functional
MomentFunctional moments_from_cumulants(const CumulantTable& kappa, bool tracial = false);

// product over blocks of φ(w restricted to the block)
Rational phi_sigma(const MomentFunctional& phi, const NCPartition& sigma, const Word& w);
// Σ_{σ ≤ π} φ_σ[w] μ(σ, π)
Rational kappa_pi(const MomentFunctional& phi, const NCPartition& pi, const Word& w);
// product over blocks of table entries
Rational kappa_pi(const CumulantTable& kappa, const NCPartition& pi, const Word& w);

// κ_s(A_1, ..., A_s) for word-valued arguments, by Möbius inversion over
// NC(s) of the moments of concatenations. Empty words act as the unit.
Rational cumulant_of_entries(const MomentOracle& phi, std::span<const Word> entries);

// κ_s(A_1, ..., A_s) where A_j are consecutive groups of w (group_sizes sum
// to |w|), computed as Σ_{π ∈ NC(|w|), π ∨ σ = 1} κ_π[w] with σ the interval
// partition of the groups.
Rational cumulant_of_products(const MomentFunctional& phi, const Word& w, std::span<const int> group_sizes);
// same sum from a precomputed table
Rational cumulant_of_products(const CumulantTable& kappa, const Word& w, std::span<const int> group_sizes);
// groups of two letters; odd length is an error
Rational cumulant_of_pairs(const MomentFunctional& phi, const Word& w);
// the interval partition {1..g1}{g1+1..}...
NCPartition interval_partition(std::span<const int> group_sizes);

// Cumulants of one free factor, addressed by symbol.
class CumulantSource {
 public:
  virtual ~CumulantSource() = default;
  virtual std::optional<int> symbol(const Letter& l) const = 0;
  // κ of the symbol sequence; a reference into storage owned by the source
  virtual const Rational& cumulant(std::span<const int> symbols) const = 0;
};

class TableCumulants final : public CumulantSource {
 public:
  explicit TableCumulants(CumulantTable kappa) : kappa_(std::move(kappa)) {}
  std::optional<int> symbol(const Letter& l) const override { return kappa_.letters().symbol(l); }
  const Rational& cumulant(std::span<const int> symbols) const override;
  const CumulantTable& table() const { return kappa_; }

 private:
  CumulantTable kappa_;
};

struct SidedSymbol {
  int side;
  int symbol;
};

// Evaluates the free product of the given factors on words: a sum over
// noncrossing partitions whose blocks each stay inside one factor, organised
// by the block of the first letter and memoized on subintervals.
class FreeProductEvaluator {
 public:
  explicit FreeProductEvaluator(std::vector<std::shared_ptr<const CumulantSource>> factors);

  std::vector<SidedSymbol> encode(const Word& w) const;  // DomainError for foreign letters
  Rational evaluate(const Word& w) const;
  Rational evaluate(const NCPolynomial& p) const;
  Rational evaluate(std::span<const SidedSymbol> word) const;

 private:
  std::vector<std::shared_ptr<const CumulantSource>> factors_;
};

// The free product state on the union alphabet, up to the smaller degree.
MomentFunctional free_product_state(const MomentFunctional& phi1, const MomentFunctional& phi2);

struct FreenessReport {
  bool free = true;
  std::optional<Word> violation;
  Rational value;  // the offending mixed cumulant
};

// All mixed cumulants between `left` and the remaining letters vanish.
FreenessReport check_freeness(const MomentFunctional& phi, const LetterSet& left);

using LetterPredicate = std::function<bool(const Letter&)>;

// Conditional expectation of w onto the algebra of the "kept" letters, for
// the free product of the integrated factor and the kept factor.
NCPolynomial conditional_expectation(const MomentOracle& integrated, const MomentOracle& kept,
                                     const LetterPredicate& is_integrated, const LetterPredicate& is_kept,
                                     const Word& w);
// target B: onto phi2's letters; target A: onto phi1's letters
NCPolynomial conditional_expectation(const MomentFunctional& phi1, const MomentFunctional& phi2, const Word& w,
                                     Side target = Side::B);
NCPolynomial conditional_expectation(const MomentFunctional& phi1, const MomentFunctional& phi2,
                                     const NCPolynomial& p, Side target = Side::B);

// An argument a·b of an operator-valued cumulant, a from the integrated
// factor, b a polynomial in the kept factor.
struct OpvalArgument {
  Word a;
  NCPolynomial b;
};

// κ^E_m(b_0 a_1 b_1, a_2 b_2, ..., a_m b_m)
//   = κ_m(a_1, ..., a_m) φ2(b_1) ... φ2(b_{m-1}) b_0 b_m
NCPolynomial opval_cumulant_factorized(const MomentOracle& integrated, const MomentOracle& kept,
                                       const NCPolynomial& b0, std::span<const OpvalArgument> args);
// word form: m a-words, m+1 b-words (b_0 ... b_m)
NCPolynomial opval_cumulant_factorized(const MomentFunctional& phi1, const MomentFunctional& phi2, int m,
                                       std::span<const Word> a, std::span<const Word> b);

// Nested κ^E_π: inner blocks are evaluated first and multiplied into the
// argument that precedes them inside the enclosing block.
NCPolynomial opval_cumulant_nested(const MomentOracle& integrated, const MomentOracle& kept,
                                   const NCPartition& pi, const NCPolynomial& b0,
                                   std::span<const OpvalArgument> args);

}  // namespace freeprob
