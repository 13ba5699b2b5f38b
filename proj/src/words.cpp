#include "freeprob/words.hpp"

#include <cctype>

#include "freeprob/errors.hpp"

namespace freeprob {

Letter Letter::make(std::string alphabet, int i, bool starred) {
  Letter l;
  l.alphabet = std::move(alphabet);
  l.index = {i, 0};
  l.arity = 1;
  l.starred = starred;
  return l;
}

Letter Letter::make(std::string alphabet, int j, int k, bool starred) {
  Letter l;
  l.alphabet = std::move(alphabet);
  l.index = {j, k};
  l.arity = 2;
  l.starred = starred;
  return l;
}

Letter Letter::parse(std::string_view token) {
  auto fail = [&](const char* why) { return ParseError(std::string(why) + ": '" + std::string(token) + "'"); };
  std::size_t i = 0;
  while (i < token.size() && std::isalpha(static_cast<unsigned char>(token[i]))) ++i;
  if (i == 0) throw fail("letter must start with an alphabet name");
  if (i < token.size() && token[i] == '(') {
    std::size_t close = token.find(')', i);
    if (close == std::string_view::npos || close == i + 1) throw fail("bad copy tag");
    for (std::size_t c = i + 1; c < close; ++c)
      if (!std::isdigit(static_cast<unsigned char>(token[c]))) throw fail("bad copy tag");
    i = close + 1;
  }
  Letter l;
  l.alphabet = std::string(token.substr(0, i));
  std::vector<int> idx;
  while (true) {
    std::size_t start = i;
    long v = 0;
    while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i]))) {
      v = 10 * v + (token[i] - '0');
      if (v > 1000000) throw fail("index too large");
      ++i;
    }
    if (i == start) throw fail("missing index");
    if (v < 1) throw fail("indices are positive");
    idx.push_back(static_cast<int>(v));
    if (i < token.size() && token[i] == ',') {
      ++i;
      continue;
    }
    break;
  }
  if (idx.size() > 2) throw fail("at most two index components");
  if (i < token.size() && token[i] == '*') {
    l.starred = true;
    ++i;
  }
  if (i != token.size()) throw fail("trailing characters in letter");
  l.arity = static_cast<std::uint8_t>(idx.size());
  l.index = {idx[0], idx.size() > 1 ? idx[1] : 0};
  return l;
}

Letter Letter::adjoint() const {
  Letter l = *this;
  l.starred = !starred;
  return l;
}

Letter Letter::base() const {
  Letter l = *this;
  l.starred = false;
  return l;
}

std::string Letter::to_string() const {
  std::string s = alphabet + std::to_string(index[0]);
  if (arity == 2) s += "," + std::to_string(index[1]);
  if (starred) s += "*";
  return s;
}

std::strong_ordering operator<=>(const Letter& a, const Letter& b) {
  if (auto c = a.alphabet <=> b.alphabet; c != 0) return c;
  if (auto c = a.arity <=> b.arity; c != 0) return c;
  if (auto c = a.index <=> b.index; c != 0) return c;
  return a.starred <=> b.starred;
}

Word Word::parse(std::string_view text) {
  std::vector<Letter> letters;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) break;
    std::string_view token = text.substr(start, i - start);
    if (token == "1") continue;
    letters.push_back(Letter::parse(token));
  }
  return Word(std::move(letters));
}

Word Word::adjoint() const {
  std::vector<Letter> out;
  out.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.push_back(it->adjoint());
  return Word(std::move(out));
}

Word adjoint(const Word& w) { return w.adjoint(); }

Word Word::subword(std::size_t from, std::size_t count) const {
  return Word(std::vector<Letter>(letters_.begin() + from, letters_.begin() + from + count));
}

std::string Word::to_string() const {
  if (letters_.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) s += ' ';
    s += letters_[i].to_string();
  }
  return s;
}

Word operator*(const Word& a, const Word& b) {
  std::vector<Letter> out = a.letters_;
  out.insert(out.end(), b.letters_.begin(), b.letters_.end());
  return Word(std::move(out));
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(), b.letters_.begin(),
                                                b.letters_.end());
}

NCPolynomial::NCPolynomial(const Rational& scalar) {
  if (scalar != 0) terms_.emplace(Word{}, scalar);
}

NCPolynomial::NCPolynomial(const Word& w, const Rational& c) {
  if (c != 0) terms_.emplace(w, c);
}

namespace {

bool is_rational_token(std::string_view t) {
  if (t.empty()) return false;
  for (char c : t)
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '/') return false;
  return std::isdigit(static_cast<unsigned char>(t.front())) != 0;
}

}  // namespace

NCPolynomial NCPolynomial::parse(std::string_view text) {
  // split into tokens, detaching leading signs
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (text[i] == '+' || text[i] == '-') {
      tokens.emplace_back(1, text[i]);
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '+' &&
           !(text[i] == '-' && i > start))
      ++i;
    tokens.emplace_back(text.substr(start, i - start));
  }
  if (tokens.empty()) throw ParseError("empty polynomial");
  NCPolynomial result;
  Rational sign = 1;
  bool sign_pending = false;
  std::vector<std::string> term;
  auto flush = [&] {
    Rational c = sign;
    std::size_t first = 0;
    if (is_rational_token(term[0])) {
      c *= parse_rational(term[0]);
      first = 1;
    }
    std::vector<Letter> letters;
    for (std::size_t t = first; t < term.size(); ++t) {
      if (term[t] == "1") continue;
      letters.push_back(Letter::parse(term[t]));
    }
    result.add_term(Word(std::move(letters)), c);
    term.clear();
  };
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto& tok = tokens[t];
    if (tok == "+" || tok == "-") {
      if (!term.empty())
        flush();
      else if (t != 0)
        throw ParseError("dangling sign in polynomial '" + std::string(text) + "'");
      sign = tok == "-" ? Rational(-1) : Rational(1);
      sign_pending = true;
      continue;
    }
    sign_pending = false;
    term.push_back(tok);
  }
  if (sign_pending || term.empty()) throw ParseError("trailing sign in polynomial '" + std::string(text) + "'");
  flush();
  return result;
}

Rational NCPolynomial::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Rational(0) : it->second;
}

int NCPolynomial::degree() const {
  int d = -1;
  for (const auto& [w, c] : terms_) d = std::max(d, static_cast<int>(w.size()));
  return d;
}

void NCPolynomial::add_term(const Word& w, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

NCPolynomial NCPolynomial::adjoint() const {
  NCPolynomial out;
  for (const auto& [w, c] : terms_) out.add_term(w.adjoint(), c);
  return out;
}

std::string NCPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    Rational mag = abs(c);
    if (first)
      s += c < 0 ? "-" : "";
    else
      s += c < 0 ? " - " : " + ";
    first = false;
    if (w.empty()) {
      s += mag.get_str();
    } else {
      if (mag != 1) s += mag.get_str() + " ";
      s += w.to_string();
    }
  }
  return s;
}

NCPolynomial& NCPolynomial::operator+=(const NCPolynomial& other) {
  for (const auto& [w, c] : other.terms_) add_term(w, c);
  return *this;
}

NCPolynomial& NCPolynomial::operator-=(const NCPolynomial& other) {
  for (const auto& [w, c] : other.terms_) add_term(w, -c);
  return *this;
}

NCPolynomial& NCPolynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, v] : terms_) v *= c;
  return *this;
}

NCPolynomial operator*(const NCPolynomial& a, const NCPolynomial& b) {
  NCPolynomial out;
  for (const auto& [wa, ca] : a.terms_)
    for (const auto& [wb, cb] : b.terms_) out.add_term(wa * wb, ca * cb);
  return out;
}

NCPolynomial power(const NCPolynomial& p, int exponent) {
  if (exponent < 0) throw DomainError("negative power");
  NCPolynomial out(1);
  for (int i = 0; i < exponent; ++i) out = out * p;
  return out;
}

NCPolynomial substitute(const NCPolynomial& p, const LetterMap& map) {
  std::map<Letter, NCPolynomial> cache;
  auto image = [&](const Letter& l) -> const NCPolynomial& {
    auto it = cache.find(l);
    if (it != cache.end()) return it->second;
    auto img = map(l.base());
    if (!img) throw DomainError("no image for letter " + l.to_string());
    return cache.emplace(l, l.starred ? img->adjoint() : *img).first->second;
  };
  NCPolynomial out;
  for (const auto& [w, c] : p.terms()) {
    NCPolynomial term(c);
    for (const auto& l : w) term = term * image(l);
    out += term;
  }
  return out;
}

NCPolynomial substitute(const NCPolynomial& p, const std::map<Letter, NCPolynomial>& table) {
  for (const auto& [l, img] : table) {
    if (!l.starred) continue;
    auto base = table.find(l.base());
    if (base != table.end() && base->second.adjoint() != img)
      throw DomainError("image of " + l.to_string() + " is not the adjoint of the image of " + l.base().to_string());
  }
  return substitute(p, [&](const Letter& l) -> std::optional<NCPolynomial> {
    auto it = table.find(l);
    if (it != table.end()) return it->second;
    auto st = table.find(l.adjoint());
    if (st != table.end()) return st->second.adjoint();
    return std::nullopt;
  });
}

std::vector<Segment> split_alternating(const Word& w, const std::function<bool(const Letter&)>& is_left,
                                       const std::function<bool(const Letter&)>& is_right, bool pad_end) {
  std::vector<Segment> out;
  for (const auto& l : w) {
    Side side;
    if (is_left(l))
      side = Side::A;
    else if (is_right(l))
      side = Side::B;
    else
      throw DomainError("letter " + l.to_string() + " belongs to neither side");
    if (out.empty() && side == Side::B) out.push_back({Side::A, Word{}});
    if (out.empty() || out.back().side != side) out.push_back({side, Word{}});
    out.back().word.push_back(l);
  }
  if (out.empty()) out.push_back({Side::A, Word{}});
  if (pad_end && out.back().side == Side::A) out.push_back({Side::B, Word{}});
  return out;
}

std::vector<Segment> split_alternating(const Word& w, const std::set<std::string>& left_alphabets,
                                       const std::set<std::string>& right_alphabets, bool pad_end) {
  return split_alternating(
      w, [&](const Letter& l) { return left_alphabets.count(l.alphabet) > 0; },
      [&](const Letter& l) { return right_alphabets.count(l.alphabet) > 0; }, pad_end);
}

}  // namespace freeprob
