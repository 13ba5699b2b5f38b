#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freeprob/rational.hpp"
#include "freeprob/words.hpp"

namespace freeprob {

// Sorted set of base letters. Symbol 2p is letter p, symbol 2p+1 its adjoint,
// so symbol order agrees with the term order on letters.
class LetterSet {
 public:
  LetterSet() = default;
  explicit LetterSet(std::vector<Letter> letters);
  // name1, ..., name<count>
  static LetterSet family(const std::string& alphabet, int count);
  // name<j>,<k> for j, k in 1..n
  static LetterSet matrix(const std::string& alphabet, int n);

  std::size_t size() const { return letters_.size(); }
  int symbol_count() const { return 2 * static_cast<int>(letters_.size()); }
  const std::vector<Letter>& letters() const { return letters_; }
  bool contains(const Letter& l) const { return symbol(l).has_value(); }
  std::optional<int> symbol(const Letter& l) const;
  Letter letter_of(int symbol) const;
  std::vector<std::string> alphabets() const;
  LetterSet merged(const LetterSet& other) const;

  friend bool operator==(const LetterSet&, const LetterSet&) = default;

 private:
  std::vector<Letter> letters_;
};

// Dense table over all words of length 0..degree. The word with symbols
// s_0 ... s_{m-1} sits at code Σ s_i S^{m-1-i} in the length-m slice.
class WordTable {
 public:
  WordTable() = default;
  WordTable(LetterSet letters, int degree);

  const LetterSet& letters() const { return letters_; }
  int degree() const { return degree_; }
  int base() const { return letters_.symbol_count(); }
  std::uint64_t count(int length) const { return slices_[length].size(); }

  const Rational& at(int length, std::uint64_t code) const { return slices_[length][code]; }
  Rational& at(int length, std::uint64_t code) { return slices_[length][code]; }
  const Rational& at(std::span<const int> symbols) const { return slices_[symbols.size()][encode(symbols)]; }

  std::uint64_t encode(std::span<const int> symbols) const;
  void decode(int length, std::uint64_t code, std::vector<int>& symbols) const;
  // nullopt when a letter is foreign; throws CapError past the degree
  std::optional<std::vector<int>> symbols_of(const Word& w) const;
  Word word(int length, std::uint64_t code) const;
  Word word(std::span<const int> symbols) const;

  // throws DomainError for foreign letters, CapError past the degree
  const Rational& value(const Word& w) const;
  void set(const Word& w, const Rational& v);

  friend bool operator==(const WordTable&, const WordTable&) = default;

 private:
  LetterSet letters_;
  int degree_ = 0;
  std::vector<std::vector<Rational>> slices_;
};

// Code of the adjoint word (reverse, flip stars).
std::uint64_t adjoint_code(int base, int length, std::uint64_t code);

// A joint *-distribution truncated at degree D.
class MomentFunctional {
 public:
  MomentFunctional() = default;
  // validates φ(1) = 1, hermitian symmetry and, if flagged, traciality
  explicit MomentFunctional(WordTable moments, bool tracial = false);

  const LetterSet& letters() const { return table_.letters(); }
  int degree() const { return table_.degree(); }
  bool tracial() const { return tracial_; }
  const WordTable& table() const { return table_; }

  const Rational& operator()(const Word& w) const { return table_.value(w); }
  Rational operator()(const NCPolynomial& p) const;

  // true iff φ(vw) = φ(wv) whenever |v| + |w| <= degree
  bool is_tracial() const;

  friend bool operator==(const MomentFunctional&, const MomentFunctional&) = default;

 private:
  WordTable table_;
  bool tracial_ = false;
};

// Free cumulants κ_m(w) of a functional, same indexing; the empty word holds 1.
class CumulantTable {
 public:
  CumulantTable() = default;
  explicit CumulantTable(WordTable kappa);

  const LetterSet& letters() const { return table_.letters(); }
  int degree() const { return table_.degree(); }
  const WordTable& table() const { return table_; }
  WordTable& mutable_table() { return table_; }

  const Rational& operator()(const Word& w) const { return table_.value(w); }

  friend bool operator==(const CumulantTable&, const CumulantTable&) = default;

 private:
  WordTable table_;
};

// Calls visit(length, code, symbols) for every word of length 1..degree in
// term order.
template <class Visit>
void for_each_word(const WordTable& t, Visit&& visit, int min_length = 1) {
  std::vector<int> symbols;
  for (int m = min_length; m <= t.degree(); ++m)
    for (std::uint64_t c = 0; c < t.count(m); ++c) {
      t.decode(m, c, symbols);
      visit(m, c, static_cast<const std::vector<int>&>(symbols));
    }
}

}  // namespace freeprob
