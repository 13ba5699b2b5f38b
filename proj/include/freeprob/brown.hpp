#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "freeprob/cumulants.hpp"

namespace freeprob {

// Dense n×n matrix over the rationals; only what π_n needs.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}
  static RationalMatrix identity(int n);
  // e_{jk}, 1-based
  static RationalMatrix unit(int n, int j, int k);

  int size() const { return n_; }
  const Rational& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }
  Rational& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }
  bool is_zero() const;
  RationalMatrix transpose() const;
  // rows separated by ';'
  std::string to_string() const;

  RationalMatrix& operator+=(const RationalMatrix& o);
  RationalMatrix& operator-=(const RationalMatrix& o);
  RationalMatrix& operator*=(const Rational& c);
  friend RationalMatrix operator+(RationalMatrix a, const RationalMatrix& b) { return a += b; }
  friend RationalMatrix operator-(RationalMatrix a, const RationalMatrix& b) { return a -= b; }
  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalMatrix operator*(RationalMatrix a, const Rational& c) { return a *= c; }
  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<Rational> a_;
};

using ComplexMatrix = Eigen::MatrixXcd;

// Image of a polynomial under a representation of the u-letters, with every
// other letter kept formal: formal word -> coefficient.
using MatrixImage = std::map<Word, RationalMatrix>;
using ScalarImage = std::map<Word, std::complex<double>>;

enum class StructureMap { coproduct, counit, coinverse };

// Haar-uniform sample from U(n): QR of a complex Gaussian matrix with the
// phases of R's diagonal pushed into Q.
ComplexMatrix haar_unitary(int n, std::mt19937_64& rng);

class BrownContext;

// Closed-form Haar cumulants addressed by the symbols of the generator set.
class HaarCumulants final : public CumulantSource {
 public:
  explicit HaarCumulants(const BrownContext& ctx);
  std::optional<int> symbol(const Letter& l) const override { return letters_.symbol(l); }
  const Rational& cumulant(std::span<const int> symbols) const override;

 private:
  int n_;
  LetterSet letters_;
  std::vector<Rational> value_;  // by length
};

struct RepVerdict {
  bool distinguished = false;
  std::string witness;  // which representation separated p and q
  std::string detail;   // printed image of p - q there
};

class BrownContext {
 public:
  explicit BrownContext(int n, std::string alphabet = "u");

  int n() const { return n_; }
  const std::string& alphabet() const { return alphabet_; }
  const LetterSet& generators() const { return generators_; }
  Letter generator(int j, int k, bool starred = false) const { return Letter::make(alphabet_, j, k, starred); }
  bool is_generator(const Letter& l) const { return generators_.contains(l); }

  // Σ_l u_{jl} u*_{kl}  and  Σ_l u*_{lj} u_{lk}; both equal δ_{jk} 1
  NCPolynomial row_relation(int j, int k) const;
  NCPolynomial column_relation(int j, int k) const;
  // every relation as (left side) - δ_{jk}
  std::vector<NCPolynomial> relations() const;

  // free cumulant of a generator word under h_n; stars read as (u*)_{ij} = u*_{ji}
  Rational haar_cumulant(const Word& w) const;
  Rational haar_moment(const Word& w) const;
  MomentFunctional as_moment_functional(int degree) const;
  std::shared_ptr<const HaarCumulants> cumulant_source() const;

  // coproduct lands in the copy alphabets u(1), u(2)
  NCPolynomial structure_map(StructureMap which, const Letter& l) const;
  NCPolynomial apply(StructureMap which, const NCPolynomial& p) const;
  std::string copy_alphabet(int copy) const { return alphabet_ + "(" + std::to_string(copy) + ")"; }

  // π_n(u_{jk}) = e_{kj}; throws DomainError if p has non-generator letters
  RationalMatrix pi_rep(const NCPolynomial& p) const;
  // same with non-generator letters kept formal
  MatrixImage pi_rep_formal(const NCPolynomial& p) const;

  // u_{jk} -> U_{jk}; U must be unitary to 1e-12
  std::complex<double> unitary_eval(const NCPolynomial& p, const ComplexMatrix& U) const;
  // one unitary per alphabet (generator alphabet and/or copies); others formal
  ScalarImage unitary_eval_formal(const NCPolynomial& p, const std::map<std::string, ComplexMatrix>& unitaries) const;

  // Refutation oracle: π_n exactly, then `trials` seeded random unitaries.
  RepVerdict rep_equality(const NCPolynomial& p, const NCPolynomial& q, int trials, std::uint64_t seed) const;

 private:
  int n_;
  std::string alphabet_;
  LetterSet generators_;
};

}  // namespace freeprob
