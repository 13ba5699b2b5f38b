#include "freeprob/functional.hpp"

#include <algorithm>
#include <set>

#include "freeprob/errors.hpp"
#include "freeprob/limits.hpp"

namespace freeprob {

LetterSet::LetterSet(std::vector<Letter> letters) {
  for (auto& l : letters) l = l.base();
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
  for (std::size_t i = 1; i < letters.size(); ++i)
    if (letters[i].alphabet == letters[i - 1].alphabet && letters[i].arity != letters[i - 1].arity)
      throw ValidationError("alphabet " + letters[i].alphabet + " used with two arities");
  letters_ = std::move(letters);
}

LetterSet LetterSet::family(const std::string& alphabet, int count) {
  std::vector<Letter> ls;
  for (int i = 1; i <= count; ++i) ls.push_back(Letter::make(alphabet, i));
  return LetterSet(std::move(ls));
}

LetterSet LetterSet::matrix(const std::string& alphabet, int n) {
  std::vector<Letter> ls;
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= n; ++k) ls.push_back(Letter::make(alphabet, j, k));
  return LetterSet(std::move(ls));
}

std::optional<int> LetterSet::symbol(const Letter& l) const {
  Letter b = l.base();
  auto it = std::lower_bound(letters_.begin(), letters_.end(), b);
  if (it == letters_.end() || *it != b) return std::nullopt;
  return 2 * static_cast<int>(it - letters_.begin()) + (l.starred ? 1 : 0);
}

Letter LetterSet::letter_of(int symbol) const {
  Letter l = letters_.at(symbol / 2);
  l.starred = (symbol % 2) == 1;
  return l;
}

std::vector<std::string> LetterSet::alphabets() const {
  std::vector<std::string> out;
  for (const auto& l : letters_)
    if (out.empty() || out.back() != l.alphabet) out.push_back(l.alphabet);
  return out;
}

LetterSet LetterSet::merged(const LetterSet& other) const {
  std::vector<Letter> all = letters_;
  all.insert(all.end(), other.letters_.begin(), other.letters_.end());
  return LetterSet(std::move(all));
}

WordTable::WordTable(LetterSet letters, int degree) : letters_(std::move(letters)), degree_(degree) {
  if (degree < 0) throw DomainError("negative degree");
  const std::uint64_t s = static_cast<std::uint64_t>(base());
  const std::uint64_t limit = engine_limits().max_table_entries;
  std::uint64_t total = 0;
  std::uint64_t slice = 1;
  for (int m = 0; m <= degree; ++m) {
    total += slice;
    if (total > limit)
      throw CapError("word table with " + std::to_string(s) + " symbols up to degree " + std::to_string(degree) +
                     " exceeds the table-size cap");
    if (m < degree) slice *= s;
  }
  slices_.resize(degree + 1);
  slice = 1;
  for (int m = 0; m <= degree; ++m) {
    slices_[m].resize(slice);
    slice *= s;
  }
}

std::uint64_t WordTable::encode(std::span<const int> symbols) const {
  std::uint64_t code = 0;
  const std::uint64_t s = static_cast<std::uint64_t>(base());
  for (int x : symbols) code = code * s + static_cast<std::uint64_t>(x);
  return code;
}

void WordTable::decode(int length, std::uint64_t code, std::vector<int>& symbols) const {
  const std::uint64_t s = static_cast<std::uint64_t>(base());
  symbols.resize(length);
  for (int i = length - 1; i >= 0; --i) {
    symbols[i] = static_cast<int>(code % s);
    code /= s;
  }
}

std::optional<std::vector<int>> WordTable::symbols_of(const Word& w) const {
  if (static_cast<int>(w.size()) > degree_)
    throw CapError("word '" + w.to_string() + "' is longer than the degree cap " + std::to_string(degree_));
  std::vector<int> out;
  out.reserve(w.size());
  for (const auto& l : w) {
    auto s = letters_.symbol(l);
    if (!s) return std::nullopt;
    out.push_back(*s);
  }
  return out;
}

Word WordTable::word(int length, std::uint64_t code) const {
  std::vector<int> symbols;
  decode(length, code, symbols);
  return word(symbols);
}

Word WordTable::word(std::span<const int> symbols) const {
  std::vector<Letter> ls;
  ls.reserve(symbols.size());
  for (int s : symbols) ls.push_back(letters_.letter_of(s));
  return Word(std::move(ls));
}

const Rational& WordTable::value(const Word& w) const {
  auto symbols = symbols_of(w);
  if (!symbols) throw DomainError("word '" + w.to_string() + "' uses letters outside the table alphabet");
  return at(*symbols);
}

void WordTable::set(const Word& w, const Rational& v) {
  auto symbols = symbols_of(w);
  if (!symbols) throw DomainError("word '" + w.to_string() + "' uses letters outside the table alphabet");
  slices_[symbols->size()][encode(*symbols)] = v;
}

std::uint64_t adjoint_code(int base, int length, std::uint64_t code) {
  const std::uint64_t s = static_cast<std::uint64_t>(base);
  std::uint64_t out = 0;
  for (int i = 0; i < length; ++i) {
    out = out * s + ((code % s) ^ 1u);
    code /= s;
  }
  return out;
}

MomentFunctional::MomentFunctional(WordTable moments, bool tracial) : table_(std::move(moments)), tracial_(tracial) {
  if (table_.at(0, 0) != 1) throw ValidationError("moment of the empty word must be 1");
  for (int m = 1; m <= table_.degree(); ++m)
    for (std::uint64_t c = 0; c < table_.count(m); ++c) {
      const auto a = adjoint_code(table_.base(), m, c);
      if (a > c) continue;
      if (table_.at(m, c) != table_.at(m, a))
        throw ValidationError("not hermitian: phi(" + table_.word(m, c).to_string() + ") = " +
                              table_.at(m, c).get_str() + " but phi(" + table_.word(m, a).to_string() +
                              ") = " + table_.at(m, a).get_str());
    }
  if (tracial_ && !is_tracial()) throw ValidationError("functional flagged tracial is not tracial");
}

Rational MomentFunctional::operator()(const NCPolynomial& p) const {
  Rational sum = 0;
  for (const auto& [w, c] : p.terms()) sum += c * table_.value(w);
  return sum;
}

bool MomentFunctional::is_tracial() const {
  const std::uint64_t s = static_cast<std::uint64_t>(table_.base());
  std::uint64_t high = 1;
  for (int m = 1; m <= table_.degree(); ++m) {
    // rotating the first symbol to the back generates all cyclic shifts
    for (std::uint64_t c = 0; c < table_.count(m); ++c) {
      const std::uint64_t first = c / high;
      const std::uint64_t rotated = (c % high) * s + first;
      if (table_.at(m, c) != table_.at(m, rotated)) return false;
    }
    high *= s;
  }
  return true;
}

CumulantTable::CumulantTable(WordTable kappa) : table_(std::move(kappa)) { table_.at(0, 0) = 1; }

}  // namespace freeprob
