#include "freeprob/models.hpp"

#include <algorithm>

#include "freeprob/errors.hpp"

namespace freeprob {

namespace {

template <class Rule>
MomentFunctional from_cumulant_rule(const LetterSet& letters, int degree, bool tracial, Rule&& rule) {
  WordTable kappa(letters, degree);
  for_each_word(kappa, [&](int m, std::uint64_t code, const std::vector<int>& symbols) {
    kappa.at(m, code) = rule(symbols);
  });
  return moments_from_cumulants(CumulantTable(std::move(kappa)), tracial);
}

void require_count(int count) {
  if (count < 1) throw DomainError("family needs at least one letter");
}

}  // namespace

MomentFunctional build_circular_family(int count, const Rational& variance, int degree, const std::string& alphabet) {
  require_count(count);
  return from_cumulant_rule(LetterSet::family(alphabet, count), degree, true, [&](const std::vector<int>& s) {
    return (s.size() == 2 && s[0] / 2 == s[1] / 2 && s[0] != s[1]) ? variance : Rational(0);
  });
}

MomentFunctional build_semicircular_family(int count, int degree, const std::string& alphabet) {
  require_count(count);
  return from_cumulant_rule(LetterSet::family(alphabet, count), degree, true, [&](const std::vector<int>& s) {
    return (s.size() == 2 && s[0] / 2 == s[1] / 2) ? Rational(1) : Rational(0);
  });
}

MomentFunctional build_haar_unitary_family(int count, int degree, const std::string& alphabet) {
  require_count(count);
  return from_cumulant_rule(LetterSet::family(alphabet, count), degree, true, [&](const std::vector<int>& s) {
    const std::size_t m = s.size();
    if (m % 2 == 1) return Rational(0);
    for (std::size_t i = 0; i < m; ++i) {
      if (s[i] / 2 != s[0] / 2) return Rational(0);
      if (i + 1 < m && s[i] == s[i + 1]) return Rational(0);
    }
    return Rational(signed_catalan(static_cast<int>(m / 2)));
  });
}

MomentFunctional build_freely_uniform(int n, int degree, const std::string& alphabet) {
  const BrownContext ctx(n);
  const LetterSet letters = LetterSet::family(alphabet, n);
  auto source = ctx.cumulant_source();
  std::vector<int> column;  // symbol of x_i -> symbol of u_{i1}
  for (int s = 0; s < letters.symbol_count(); ++s) {
    const Letter l = letters.letter_of(s);
    column.push_back(*ctx.generators().symbol(ctx.generator(l.index[0], 1, l.starred)));
  }
  std::vector<int> mapped;
  return from_cumulant_rule(letters, degree, true, [&](const std::vector<int>& s) {
    mapped.clear();
    for (int x : s) mapped.push_back(column[x]);
    return source->cumulant(mapped);
  });
}

MomentFunctional build_bernoulli(int degree, const std::string& alphabet) {
  WordTable t(LetterSet::family(alphabet, 1), degree);
  for (int m = 0; m <= degree; m += 2)
    for (std::uint64_t c = 0; c < t.count(m); ++c) t.at(m, c) = 1;
  return MomentFunctional(std::move(t), true);
}

MomentFunctional build_product_family(const MomentFunctional& phi_u, const MomentFunctional& phi_single, int degree,
                                      const std::string& alphabet) {
  if (phi_single.letters().size() != 1) throw DomainError("product family needs a single letter on the right");
  if (phi_u.letters().alphabets().size() != 1) throw DomainError("product family needs a single left alphabet");
  if (degree > phi_u.degree() || degree > phi_single.degree())
    throw CapError("product family degree exceeds an input degree");
  // self-adjoint: moments ignore the star flags
  const WordTable& st = phi_single.table();
  for_each_word(st, [&](int m, std::uint64_t code, const std::vector<int>& s) {
    std::vector<int> plain(s.size(), 0);
    if (st.at(m, code) != st.at(plain)) throw ValidationError("right factor is not self-adjoint");
  });
  const auto left_alpha = phi_u.letters().alphabets();
  if (std::find(left_alpha.begin(), left_alpha.end(), phi_single.letters().letters()[0].alphabet) != left_alpha.end() ||
      std::find(left_alpha.begin(), left_alpha.end(), alphabet) != left_alpha.end() ||
      alphabet == phi_single.letters().letters()[0].alphabet)
    throw DomainError("product family alphabets must be distinct");

  auto su = std::make_shared<TableCumulants>(cumulants_from_moments(phi_u));
  auto ss = std::make_shared<TableCumulants>(cumulants_from_moments(phi_single));
  FreeProductEvaluator eval({su, ss});

  std::vector<Letter> out_letters;
  for (const auto& l : phi_u.letters().letters()) {
    Letter y = l;
    y.alphabet = alphabet;
    out_letters.push_back(y);
  }
  WordTable t(LetterSet(out_letters), degree);
  t.at(0, 0) = 1;
  std::vector<SidedSymbol> word;
  for_each_word(t, [&](int m, std::uint64_t code, const std::vector<int>& s) {
    // y = u s, y* = s u*; the single letter has symbol 0 (s* = s)
    word.clear();
    for (int x : s) {
      if (x % 2 == 0) {
        word.push_back({0, x});
        word.push_back({1, 0});
      } else {
        word.push_back({1, 0});
        word.push_back({0, x});
      }
    }
    t.at(m, code) = eval.evaluate(word);
  });
  return MomentFunctional(std::move(t), phi_u.tracial() && phi_single.tracial());
}

MomentFunctional perturb_cumulant(const MomentFunctional& phi, const Word& w, const Rational& value) {
  if (w.empty()) throw DomainError("the empty word has no cumulant to perturb");
  CumulantTable kappa = cumulants_from_moments(phi);
  kappa.mutable_table().set(w, value);
  kappa.mutable_table().set(w.adjoint(), value);
  MomentFunctional out = moments_from_cumulants(kappa, false);
  if (phi.tracial() && out.is_tracial()) return MomentFunctional(out.table(), true);
  return out;
}

MomentFunctional rename_alphabet(const MomentFunctional& phi, const std::string& alphabet) {
  if (phi.letters().alphabets().size() != 1) throw DomainError("renaming needs a single alphabet");
  std::vector<Letter> letters;
  for (auto l : phi.letters().letters()) {
    l.alphabet = alphabet;
    letters.push_back(l);
  }
  LetterSet renamed(letters);
  if (renamed.size() != phi.letters().size()) throw DomainError("renaming merges letters");
  // symbol order is preserved: letters keep their relative order
  WordTable t(renamed, phi.degree());
  for (int m = 0; m <= phi.degree(); ++m)
    for (std::uint64_t c = 0; c < t.count(m); ++c) t.at(m, c) = phi.table().at(m, c);
  return MomentFunctional(std::move(t), phi.tracial());
}

}  // namespace freeprob
