#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freeprob/rational.hpp"

namespace freeprob {

// A generator or its adjoint. Arity is 1 for t_i-style letters and 2 for
// matrix entries u_{jk}; unused index slots are zero.
struct Letter {
  std::string alphabet;
  std::array<int, 2> index{0, 0};
  std::uint8_t arity = 1;
  bool starred = false;

  static Letter make(std::string alphabet, int i, bool starred = false);
  static Letter make(std::string alphabet, int j, int k, bool starred = false);
  // one token of the word grammar: t3, t3*, u2,1, u2,1*, u(1)1,2
  static Letter parse(std::string_view token);

  Letter adjoint() const;
  Letter base() const;
  std::string to_string() const;

  friend bool operator==(const Letter&, const Letter&) = default;
  friend std::strong_ordering operator<=>(const Letter& a, const Letter& b);
};

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}
  // whitespace-separated tokens; "1" or "" is the empty word
  static Word parse(std::string_view text);

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<Letter>& letters() const { return letters_; }
  auto begin() const { return letters_.begin(); }
  auto end() const { return letters_.end(); }

  void push_back(Letter l) { letters_.push_back(std::move(l)); }
  Word adjoint() const;
  Word subword(std::size_t from, std::size_t count) const;
  std::string to_string() const;

  friend Word operator*(const Word& a, const Word& b);
  friend bool operator==(const Word&, const Word&) = default;
  // length first, then lexicographic
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  std::vector<Letter> letters_;
};

Word adjoint(const Word& w);

class NCPolynomial {
 public:
  using Terms = std::map<Word, Rational>;

  NCPolynomial() = default;
  NCPolynomial(const Rational& scalar);  // NOLINT: scalars embed as multiples of 1
  NCPolynomial(int scalar) : NCPolynomial(Rational(scalar)) {}  // NOLINT
  explicit NCPolynomial(const Word& w, const Rational& c = 1);
  static NCPolynomial letter(const Letter& l) { return NCPolynomial(Word({l})); }
  // "1/2 t1 t1* - t2 + 3", terms separated by + or -
  static NCPolynomial parse(std::string_view text);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  Rational coefficient(const Word& w) const;
  // scalar part, i.e. coefficient of the empty word
  Rational constant() const { return coefficient(Word{}); }
  int degree() const;

  void add_term(const Word& w, const Rational& c);
  NCPolynomial adjoint() const;
  std::string to_string() const;

  NCPolynomial& operator+=(const NCPolynomial& other);
  NCPolynomial& operator-=(const NCPolynomial& other);
  NCPolynomial& operator*=(const Rational& c);
  friend NCPolynomial operator+(NCPolynomial a, const NCPolynomial& b) { return a += b; }
  friend NCPolynomial operator-(NCPolynomial a, const NCPolynomial& b) { return a -= b; }
  friend NCPolynomial operator-(NCPolynomial a) { return a *= Rational(-1); }
  friend NCPolynomial operator*(const NCPolynomial& a, const NCPolynomial& b);
  friend NCPolynomial operator*(NCPolynomial a, const Rational& c) { return a *= c; }
  friend NCPolynomial operator*(const Rational& c, NCPolynomial a) { return a *= c; }
  friend bool operator==(const NCPolynomial&, const NCPolynomial&) = default;

 private:
  Terms terms_;
};

NCPolynomial power(const NCPolynomial& p, int exponent);

// Image of a base (unstarred) letter, or nullopt when unmapped. Starred
// letters map to the adjoint of the base image.
using LetterMap = std::function<std::optional<NCPolynomial>(const Letter&)>;

// Unital *-homomorphic extension of the letter map; throws DomainError on
// unmapped letters.
NCPolynomial substitute(const NCPolynomial& p, const LetterMap& map);
// explicit table; a starred entry, if present, must equal the adjoint image
NCPolynomial substitute(const NCPolynomial& p, const std::map<Letter, NCPolynomial>& table);

enum class Side { A, B };

struct Segment {
  Side side;
  Word word;
  friend bool operator==(const Segment&, const Segment&) = default;
};

// Maximal same-side runs of w, starting on side A (a unit A segment is
// inserted if w starts on B). With pad_end the result also ends on B.
std::vector<Segment> split_alternating(const Word& w, const std::set<std::string>& left_alphabets,
                                       const std::set<std::string>& right_alphabets, bool pad_end = false);
std::vector<Segment> split_alternating(const Word& w, const std::function<bool(const Letter&)>& is_left,
                                       const std::function<bool(const Letter&)>& is_right, bool pad_end = false);

}  // namespace freeprob
