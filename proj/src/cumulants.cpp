#include "freeprob/cumulants.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "freeprob/errors.hpp"
#include "freeprob/limits.hpp"

namespace freeprob {

namespace {

const Rational& one_rational() {
  static const Rational o = 1;
  return o;
}

void check_cumulant_cap(int degree) {
  const int cap = engine_limits().max_cumulant_degree;
  if (degree > cap)
    throw CapError("degree " + std::to_string(degree) + " exceeds the cumulant cap " + std::to_string(cap));
}

const std::vector<NCPartition>& partitions_of(int k, std::vector<NCPartition>& scratch) {
  if (k <= 12) return nc_partitions(k);
  scratch = enumerate_nc(k);
  return scratch;
}

// code of the subsequence of `symbols` at the given positions
std::uint64_t sub_code(const std::vector<int>& symbols, std::uint64_t base, const int* pos, int count) {
  std::uint64_t code = 0;
  for (int i = 0; i < count; ++i) code = code * base + static_cast<std::uint64_t>(symbols[pos[i]]);
  return code;
}

std::uint64_t range_code(const std::vector<int>& symbols, std::uint64_t base, int from, int to) {
  std::uint64_t code = 0;
  for (int i = from; i < to; ++i) code = code * base + static_cast<std::uint64_t>(symbols[i]);
  return code;
}

// Σ over blocks V ∋ 0 of first(V) * Π moments of the gaps. With include_full
// false the block V = {0..m-1} is skipped.
Rational first_block_sum(const WordTable& first, const WordTable& gaps, const std::vector<int>& symbols,
                         bool include_full) {
  const int m = static_cast<int>(symbols.size());
  const std::uint64_t base = static_cast<std::uint64_t>(first.base());
  const std::uint32_t full = (m > 1) ? ((1u << (m - 1)) - 1) : 0;
  Rational sum = 0;
  Rational term;
  int pos[32];
  for (std::uint32_t mask = 0; mask <= full; ++mask) {
    if (!include_full && mask == full) break;
    int count = 0;
    pos[count++] = 0;
    for (int b = 0; b < m - 1; ++b)
      if (mask & (1u << b)) pos[count++] = b + 1;
    const Rational& k = first.at(count, sub_code(symbols, base, pos, count));
    if (sgn(k) == 0) continue;
    term = k;
    for (int i = 0; i < count; ++i) {
      const int from = pos[i] + 1;
      const int to = (i + 1 < count) ? pos[i + 1] : m;
      if (from >= to) continue;
      const Rational& g = gaps.at(to - from, range_code(symbols, base, from, to));
      if (sgn(g) == 0) {
        term = 0;
        break;
      }
      term *= g;
    }
    sum += term;
  }
  return sum;
}

}  // namespace

MomentOracle oracle_of(const MomentFunctional& phi) {
  return [&phi](const Word& w) { return phi(w); };
}

CumulantTable cumulants_from_moments(const MomentFunctional& phi, CumulantMethod method) {
  const int degree = phi.degree();
  check_cumulant_cap(degree);
  const WordTable& moments = phi.table();
  WordTable kappa(phi.letters(), degree);
  kappa.at(0, 0) = 1;
  if (method == CumulantMethod::first_block) {
    for_each_word(moments, [&](int m, std::uint64_t code, const std::vector<int>& symbols) {
      kappa.at(m, code) = moments.at(m, code) - first_block_sum(kappa, moments, symbols, false);
    });
    return CumulantTable(std::move(kappa));
  }
  // Möbius route: tabulate (blocks, μ(σ, 1_m)) once per length
  struct Term {
    std::vector<std::vector<int>> blocks;
    Integer mu;
  };
  std::vector<std::vector<Term>> terms(degree + 1);
  for (int m = 1; m <= degree; ++m) {
    const auto one = NCPartition::one(m);
    std::vector<NCPartition> scratch;
    for (const auto& sigma : partitions_of(m, scratch)) terms[m].push_back({sigma.blocks(), mobius(sigma, one)});
  }
  const std::uint64_t base = static_cast<std::uint64_t>(moments.base());
  Rational product;
  for_each_word(moments, [&](int m, std::uint64_t code, const std::vector<int>& symbols) {
    Rational sum = 0;
    for (const auto& t : terms[m]) {
      product = t.mu;
      for (const auto& blk : t.blocks) {
        const Rational& v = moments.at(static_cast<int>(blk.size()),
                                       sub_code(symbols, base, blk.data(), static_cast<int>(blk.size())));
        if (sgn(v) == 0) {
          product = 0;
          break;
        }
        product *= v;
      }
      sum += product;
    }
    kappa.at(m, code) = sum;
  });
  return CumulantTable(std::move(kappa));
}

MomentFunctional moments_from_cumulants(const CumulantTable& kappa, bool tracial) {
  const WordTable& k = kappa.table();
  WordTable moments(k.letters(), k.degree());
  moments.at(0, 0) = 1;
  for_each_word(k, [&](int m, std::uint64_t code, const std::vector<int>& symbols) {
    moments.at(m, code) = first_block_sum(k, moments, symbols, true);
  });
  return MomentFunctional(std::move(moments), tracial);
}

namespace {

Word restrict_word(const Word& w, std::span<const std::uint8_t> positions) {
  std::vector<Letter> ls;
  ls.reserve(positions.size());
  for (auto p : positions) ls.push_back(w[p]);
  return Word(std::move(ls));
}

void check_length(const Word& w, const NCPartition& p) {
  if (static_cast<int>(w.size()) != p.size())
    throw DomainError("word of length " + std::to_string(w.size()) + " against a partition of " +
                      std::to_string(p.size()));
}

}  // namespace

Rational phi_sigma(const MomentFunctional& phi, const NCPartition& sigma, const Word& w) {
  check_length(w, sigma);
  Rational product = 1;
  for (int b = 0; b < sigma.block_count(); ++b) product *= phi(restrict_word(w, sigma.block(b)));
  return product;
}

Rational kappa_pi(const MomentFunctional& phi, const NCPartition& pi, const Word& w) {
  check_length(w, pi);
  std::vector<NCPartition> scratch;
  Rational sum = 0;
  for (const auto& sigma : partitions_of(pi.size(), scratch)) {
    if (!leq(sigma, pi)) continue;
    Rational v = phi_sigma(phi, sigma, w);
    if (v != 0) sum += v * Rational(mobius(sigma, pi));
  }
  return sum;
}

Rational kappa_pi(const CumulantTable& kappa, const NCPartition& pi, const Word& w) {
  check_length(w, pi);
  Rational product = 1;
  for (int b = 0; b < pi.block_count(); ++b) product *= kappa(restrict_word(w, pi.block(b)));
  return product;
}

Rational cumulant_of_entries(const MomentOracle& phi, std::span<const Word> entries) {
  const int s = static_cast<int>(entries.size());
  if (s == 0) throw DomainError("cumulant of no arguments");
  std::vector<NCPartition> scratch;
  std::unordered_map<std::uint32_t, Rational> block_moment;
  auto moment_of = [&](std::span<const std::uint8_t> blk) -> const Rational& {
    std::uint32_t mask = 0;
    for (auto p : blk) mask |= 1u << p;
    auto it = block_moment.find(mask);
    if (it != block_moment.end()) return it->second;
    Word concat;
    for (auto p : blk) concat = concat * entries[p];
    return block_moment.emplace(mask, phi(concat)).first->second;
  };
  const auto one = NCPartition::one(s);
  const auto& all = partitions_of(s, scratch);
  const std::vector<Integer>* mu = s <= 12 ? &mobius_to_top(s) : nullptr;
  Rational sum = 0;
  for (std::size_t t = 0; t < all.size(); ++t) {
    const auto& tau = all[t];
    Rational product = 1;
    for (int b = 0; b < tau.block_count() && product != 0; ++b) product *= moment_of(tau.block(b));
    if (product != 0) sum += product * Rational(mu ? (*mu)[t] : mobius(tau, one));
  }
  return sum;
}

NCPartition interval_partition(std::span<const int> group_sizes) {
  std::vector<int> labels;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    if (group_sizes[g] < 1) throw DomainError("empty group");
    labels.insert(labels.end(), group_sizes[g], static_cast<int>(g));
  }
  return NCPartition(SetPartition::from_labels(labels));
}

Rational cumulant_of_products(const CumulantTable& kappa, const Word& w, std::span<const int> group_sizes) {
  int total = 0;
  for (int g : group_sizes) total += g;
  if (total != static_cast<int>(w.size())) throw DomainError("group sizes do not cover the word");
  const NCPartition sigma = interval_partition(group_sizes);
  const NCPartition one = NCPartition::one(total);
  std::vector<NCPartition> scratch;
  Rational sum = 0;
  for (const auto& pi : partitions_of(total, scratch)) {
    if (join(pi, sigma) != one) continue;
    sum += kappa_pi(kappa, pi, w);
  }
  return sum;
}

Rational cumulant_of_products(const MomentFunctional& phi, const Word& w, std::span<const int> group_sizes) {
  if (static_cast<int>(w.size()) > phi.degree()) throw CapError("word longer than the degree cap");
  return cumulant_of_products(cumulants_from_moments(phi), w, group_sizes);
}

Rational cumulant_of_pairs(const MomentFunctional& phi, const Word& w) {
  if (w.size() % 2 == 1) throw DomainError("odd grouping: word of length " + std::to_string(w.size()));
  std::vector<int> groups(w.size() / 2, 2);
  return cumulant_of_products(phi, w, groups);
}

const Rational& TableCumulants::cumulant(std::span<const int> symbols) const {
  if (static_cast<int>(symbols.size()) > kappa_.degree())
    throw CapError("cumulant of order " + std::to_string(symbols.size()) + " beyond the table degree " +
                   std::to_string(kappa_.degree()));
  return kappa_.table().at(symbols);
}

FreeProductEvaluator::FreeProductEvaluator(std::vector<std::shared_ptr<const CumulantSource>> factors)
    : factors_(std::move(factors)) {}

std::vector<SidedSymbol> FreeProductEvaluator::encode(const Word& w) const {
  std::vector<SidedSymbol> out;
  out.reserve(w.size());
  for (const auto& l : w) {
    bool found = false;
    for (std::size_t f = 0; f < factors_.size() && !found; ++f)
      if (auto s = factors_[f]->symbol(l)) {
        out.push_back({static_cast<int>(f), *s});
        found = true;
      }
    if (!found) throw DomainError("letter " + l.to_string() + " belongs to no free factor");
  }
  return out;
}

Rational FreeProductEvaluator::evaluate(const Word& w) const { return evaluate(encode(w)); }

Rational FreeProductEvaluator::evaluate(const NCPolynomial& p) const {
  Rational sum = 0;
  for (const auto& [w, c] : p.terms()) sum += c * evaluate(w);
  return sum;
}

namespace {

class IntervalMoments {
 public:
  IntervalMoments(std::span<const SidedSymbol> word, const std::vector<std::shared_ptr<const CumulantSource>>& f)
      : word_(word), factors_(f), n_(static_cast<int>(word.size())), memo_((n_ + 1) * (n_ + 1)),
        done_((n_ + 1) * (n_ + 1), 0) {}

  // moment of word[a, b)
  const Rational& moment(int a, int b) {
    if (a >= b) return one_rational();
    const int slot = a * (n_ + 1) + b;
    if (done_[slot]) return memo_[slot];
    const int side = word_[a].side;
    std::vector<int> same;
    for (int p = a + 1; p < b; ++p)
      if (word_[p].side == side) same.push_back(p);
    Rational sum = 0;
    Rational term;
    std::vector<int> block;
    std::vector<int> symbols;
    const std::uint32_t subsets = 1u << same.size();
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
      block.assign(1, a);
      for (std::size_t i = 0; i < same.size(); ++i)
        if (mask & (1u << i)) block.push_back(same[i]);
      symbols.clear();
      for (int p : block) symbols.push_back(word_[p].symbol);
      const Rational& k = factors_[side]->cumulant(symbols);
      if (sgn(k) == 0) continue;
      term = k;
      for (std::size_t i = 0; i < block.size(); ++i) {
        const int from = block[i] + 1;
        const int to = (i + 1 < block.size()) ? block[i + 1] : b;
        if (from >= to) continue;
        const Rational& g = moment(from, to);
        if (sgn(g) == 0) {
          term = 0;
          break;
        }
        term *= g;
      }
      sum += term;
    }
    done_[slot] = 1;
    memo_[slot] = std::move(sum);
    return memo_[slot];
  }

 private:
  std::span<const SidedSymbol> word_;
  const std::vector<std::shared_ptr<const CumulantSource>>& factors_;
  int n_;
  std::vector<Rational> memo_;
  std::vector<char> done_;
};

}  // namespace

Rational FreeProductEvaluator::evaluate(std::span<const SidedSymbol> word) const {
  if (word.size() > 31) throw CapError("word too long for free product evaluation");
  IntervalMoments im(word, factors_);
  return im.moment(0, static_cast<int>(word.size()));
}

MomentFunctional free_product_state(const MomentFunctional& phi1, const MomentFunctional& phi2) {
  const auto a1 = phi1.letters().alphabets();
  const auto a2 = phi2.letters().alphabets();
  for (const auto& a : a1)
    if (std::find(a2.begin(), a2.end(), a) != a2.end()) throw DomainError("alphabet collision: " + a);
  const int degree = std::min(phi1.degree(), phi2.degree());
  auto s1 = std::make_shared<TableCumulants>(cumulants_from_moments(phi1));
  auto s2 = std::make_shared<TableCumulants>(cumulants_from_moments(phi2));
  FreeProductEvaluator eval({s1, s2});
  LetterSet letters = phi1.letters().merged(phi2.letters());
  WordTable moments(letters, degree);
  moments.at(0, 0) = 1;
  std::vector<SidedSymbol> sided(letters.symbol_count());
  for (int s = 0; s < letters.symbol_count(); ++s) sided[s] = eval.encode(Word({letters.letter_of(s)}))[0];
  std::vector<SidedSymbol> word;
  for_each_word(moments, [&](int m, std::uint64_t code, const std::vector<int>& symbols) {
    word.resize(m);
    for (int i = 0; i < m; ++i) word[i] = sided[symbols[i]];
    moments.at(m, code) = eval.evaluate(word);
  });
  return MomentFunctional(std::move(moments), phi1.tracial() && phi2.tracial());
}

FreenessReport check_freeness(const MomentFunctional& phi, const LetterSet& left) {
  const CumulantTable kappa = cumulants_from_moments(phi);
  const LetterSet& letters = phi.letters();
  std::vector<char> in_left(letters.symbol_count());
  for (int s = 0; s < letters.symbol_count(); ++s) in_left[s] = left.contains(letters.letter_of(s)) ? 1 : 0;
  FreenessReport report;
  for_each_word(kappa.table(), [&](int m, std::uint64_t code, const std::vector<int>& symbols) {
    if (!report.free) return;
    bool has_left = false;
    bool has_right = false;
    for (int s : symbols) (in_left[s] ? has_left : has_right) = true;
    if (!(has_left && has_right)) return;
    const Rational& k = kappa.table().at(m, code);
    if (k != 0) {
      report.free = false;
      report.violation = kappa.table().word(symbols);
      report.value = k;
    }
  });
  return report;
}

NCPolynomial conditional_expectation(const MomentOracle& integrated, const MomentOracle& kept,
                                     const LetterPredicate& is_integrated, const LetterPredicate& is_kept,
                                     const Word& w) {
  const auto segments = split_alternating(w, is_integrated, is_kept, true);
  const int p = static_cast<int>(segments.size()) / 2;
  std::vector<Word> a(p);
  std::vector<Word> b(p);
  for (int i = 0; i < p; ++i) {
    a[i] = segments[2 * i].word;
    b[i] = segments[2 * i + 1].word;
  }
  std::unordered_map<std::uint32_t, Rational> block_cumulant;
  auto kappa_block = [&](std::span<const std::uint8_t> blk) -> const Rational& {
    std::uint32_t mask = 0;
    for (auto q : blk) mask |= 1u << q;
    auto it = block_cumulant.find(mask);
    if (it != block_cumulant.end()) return it->second;
    std::vector<Word> entries;
    for (auto q : blk) entries.push_back(a[q]);
    return block_cumulant.emplace(mask, cumulant_of_entries(integrated, entries)).first->second;
  };
  std::vector<NCPartition> scratch;
  NCPolynomial result;
  for (const auto& pi : partitions_of(p, scratch)) {
    Rational coefficient = 1;
    for (int v = 0; v < pi.block_count() && coefficient != 0; ++v) coefficient *= kappa_block(pi.block(v));
    if (coefficient == 0) continue;
    const NCPartition comp = kreweras(pi);
    const int last = comp.label(p - 1);
    Word tail;
    for (int v = 0; v < comp.block_count(); ++v) {
      Word concat;
      for (auto q : comp.block(v)) concat = concat * b[q];
      if (v == last)
        tail = std::move(concat);
      else
        coefficient *= kept(concat);
      if (coefficient == 0) break;
    }
    result.add_term(tail, coefficient);
  }
  return result;
}

NCPolynomial conditional_expectation(const MomentFunctional& phi1, const MomentFunctional& phi2, const Word& w,
                                     Side target) {
  const MomentFunctional& integrated = target == Side::B ? phi1 : phi2;
  const MomentFunctional& kept = target == Side::B ? phi2 : phi1;
  return conditional_expectation(
      oracle_of(integrated), oracle_of(kept), [&](const Letter& l) { return integrated.letters().contains(l); },
      [&](const Letter& l) { return kept.letters().contains(l); }, w);
}

NCPolynomial conditional_expectation(const MomentFunctional& phi1, const MomentFunctional& phi2,
                                     const NCPolynomial& p, Side target) {
  NCPolynomial out;
  for (const auto& [w, c] : p.terms()) out += c * conditional_expectation(phi1, phi2, w, target);
  return out;
}

namespace {

Rational apply(const MomentOracle& phi, const NCPolynomial& p) {
  Rational sum = 0;
  for (const auto& [w, c] : p.terms()) sum += c * phi(w);
  return sum;
}

}  // namespace

NCPolynomial opval_cumulant_factorized(const MomentOracle& integrated, const MomentOracle& kept,
                                       const NCPolynomial& b0, std::span<const OpvalArgument> args) {
  const std::size_t m = args.size();
  if (m == 0) throw DomainError("operator-valued cumulant of no arguments");
  std::vector<Word> a;
  for (const auto& arg : args) a.push_back(arg.a);
  Rational scalar = cumulant_of_entries(integrated, a);
  for (std::size_t j = 0; j + 1 < m && scalar != 0; ++j) scalar *= apply(kept, args[j].b);
  if (scalar == 0) return {};
  return scalar * (b0 * args[m - 1].b);
}

NCPolynomial opval_cumulant_factorized(const MomentFunctional& phi1, const MomentFunctional& phi2, int m,
                                       std::span<const Word> a, std::span<const Word> b) {
  if (m < 1 || static_cast<int>(a.size()) != m || static_cast<int>(b.size()) != m + 1)
    throw DomainError("arity mismatch: m = " + std::to_string(m) + " with " + std::to_string(a.size()) +
                      " a-words and " + std::to_string(b.size()) + " b-words");
  std::vector<OpvalArgument> args;
  for (int j = 0; j < m; ++j) args.push_back({a[j], NCPolynomial(b[j + 1])});
  return opval_cumulant_factorized(oracle_of(phi1), oracle_of(phi2), NCPolynomial(b[0]), args);
}

NCPolynomial opval_cumulant_nested(const MomentOracle& integrated, const MomentOracle& kept,
                                   const NCPartition& pi, const NCPolynomial& b0,
                                   std::span<const OpvalArgument> args) {
  const int m = static_cast<int>(args.size());
  if (pi.size() != m) throw DomainError("partition size does not match the argument count");
  // value of the run of outer blocks filling positions [l, r)
  std::function<NCPolynomial(int, int)> run = [&](int l, int r) -> NCPolynomial {
    if (l >= r) return NCPolynomial(1);
    auto blk = pi.block(pi.label(l));
    std::vector<OpvalArgument> inner;
    for (std::size_t i = 0; i < blk.size(); ++i) {
      OpvalArgument arg = args[blk[i]];
      if (i + 1 < blk.size()) arg.b = arg.b * run(blk[i] + 1, blk[i + 1]);
      inner.push_back(std::move(arg));
    }
    NCPolynomial value = opval_cumulant_factorized(integrated, kept, NCPolynomial(1), inner);
    if (value.is_zero()) return value;
    return value * run(blk.back() + 1, r);
  };
  return b0 * run(0, m);
}

}  // namespace freeprob
