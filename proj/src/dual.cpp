#include "freeprob/dual.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <thread>

#include "freeprob/errors.hpp"
#include "freeprob/limits.hpp"

namespace freeprob {

namespace {

NCPolynomial expand(const BrownContext& ctx, const NCPolynomial& p, ActionMode mode) {
  return substitute(p, [&](const Letter& l) -> std::optional<NCPolynomial> {
    if (l.alphabet == ctx.alphabet())
      throw DomainError("letter " + l.to_string() + " collides with the action alphabet " + ctx.alphabet());
    if (l.arity != 1) return NCPolynomial::letter(l);
    const int i = l.index[0];
    if (i > ctx.n()) {
      if (mode == ActionMode::beta) return NCPolynomial::letter(l);
      throw DomainError("index of " + l.to_string() + " exceeds n = " + std::to_string(ctx.n()));
    }
    NCPolynomial image;
    for (int j = 1; j <= ctx.n(); ++j)
      image.add_term(Word({ctx.generator(i, j), Letter::make(l.alphabet, j)}), 1);
    return image;
  });
}

std::string single_alphabet(const MomentFunctional& phi) {
  const auto alphabets = phi.letters().alphabets();
  if (alphabets.size() != 1) throw DomainError("expected a family over one alphabet");
  for (const auto& l : phi.letters().letters())
    if (l.arity != 1) throw DomainError("family letters must carry a single index");
  return alphabets[0];
}

// Runs check(i) for i in [0, total) on all cores and returns the smallest i
// for which it returned true, or total.
template <class Check>
std::uint64_t first_failure(std::uint64_t total, Check&& check) {
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> best{total};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= total || i >= best.load() || failed.load()) return;
        if (check(i)) {
          std::uint64_t b = best.load();
          while (i < b && !best.compare_exchange_weak(b, i)) {
          }
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      failed = true;
    }
  };
  const unsigned threads = std::max(1u, std::min(16u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return best.load();
}

// word index in term order across lengths 1..degree
struct WordIndex {
  const WordTable* table;
  std::vector<std::uint64_t> offset;  // first global index of each length
  explicit WordIndex(const WordTable& t) : table(&t), offset(t.degree() + 2, 0) {
    for (int m = 1; m <= t.degree(); ++m) offset[m + 1] = offset[m] + t.count(m);
  }
  std::uint64_t total() const { return offset.back(); }
  std::pair<int, std::uint64_t> locate(std::uint64_t i) const {
    int m = 1;
    while (offset[m + 1] <= i) ++m;
    return {m, i - offset[m]};
  }
};

bool odd_or_non_alternating(std::span<const int> symbols) {
  if (symbols.size() % 2 == 1) return true;
  for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
    if (symbols[i] % 2 == symbols[i + 1] % 2) return true;
  return false;
}

}  // namespace

NCPolynomial alpha_expand(const BrownContext& ctx, const NCPolynomial& p) { return expand(ctx, p, ActionMode::alpha); }

NCPolynomial beta_expand(const BrownContext& ctx, const NCPolynomial& p) { return expand(ctx, p, ActionMode::beta); }

InvarianceReport check_dual_invariance(const MomentFunctional& phi, int n, int degree, ActionMode mode) {
  const std::string alphabet = single_alphabet(phi);
  const BrownContext ctx(n);
  if (alphabet == ctx.alphabet()) throw DomainError("family alphabet collides with the action alphabet");
  if (degree > phi.degree()) throw CapError("degree " + std::to_string(degree) + " exceeds the functional's degree");
  for (int i = 1; i <= n; ++i)
    if (!phi.letters().contains(Letter::make(alphabet, i)))
      throw DomainError("family lacks " + Letter::make(alphabet, i).to_string());

  const LetterSet words_over = mode == ActionMode::alpha ? LetterSet::family(alphabet, n) : phi.letters();
  const WordTable shape(words_over, degree);
  const WordIndex index(shape);

  // symbol tables: family symbol -> (phi symbol, index, starred)
  struct Sym {
    int phi_symbol;
    int index;
    bool starred;
  };
  std::vector<Sym> sym;
  for (int s = 0; s < words_over.symbol_count(); ++s) {
    const Letter l = words_over.letter_of(s);
    sym.push_back({*phi.letters().symbol(l), l.index[0], l.starred});
  }
  std::vector<int> haar_symbol(2 * (n + 1) * (n + 1), -1);  // (i, j, star)
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      for (int star = 0; star < 2; ++star)
        haar_symbol[(i * (n + 1) + j) * 2 + star] = *ctx.generators().symbol(ctx.generator(i, j, star == 1));
  std::vector<int> phi_of_index(n + 1);
  for (int j = 1; j <= n; ++j) phi_of_index[j] = *phi.letters().symbol(Letter::make(alphabet, j));

  const FreeProductEvaluator eval(
      {ctx.cumulant_source(), std::make_shared<TableCumulants>(cumulants_from_moments(phi))});

  auto computed = [&](const std::vector<int>& symbols) {
    std::vector<int> expandable;
    for (std::size_t q = 0; q < symbols.size(); ++q)
      if (sym[symbols[q]].index <= n) expandable.push_back(static_cast<int>(q));
    std::vector<int> j(symbols.size(), 1);
    std::vector<SidedSymbol> word;
    Rational total = 0;
    for (;;) {
      word.clear();
      for (std::size_t q = 0; q < symbols.size(); ++q) {
        const Sym& s = sym[symbols[q]];
        if (s.index > n) {
          word.push_back({1, s.phi_symbol});
          continue;
        }
        const int u = haar_symbol[(s.index * (n + 1) + j[q]) * 2 + (s.starred ? 1 : 0)];
        const int t = phi_of_index[j[q]] + (s.starred ? 1 : 0);
        if (s.starred) {
          word.push_back({1, t});
          word.push_back({0, u});
        } else {
          word.push_back({0, u});
          word.push_back({1, t});
        }
      }
      total += eval.evaluate(word);
      std::size_t k = 0;
      while (k < expandable.size() && j[expandable[k]] == n) j[expandable[k++]] = 1;
      if (k == expandable.size()) break;
      ++j[expandable[k]];
    }
    return total;
  };
  auto expected = [&](const std::vector<int>& symbols) {
    std::vector<int> ps;
    for (int s : symbols) ps.push_back(sym[s].phi_symbol);
    return phi.table().at(ps);
  };

  const std::uint64_t bad = first_failure(index.total(), [&](std::uint64_t i) {
    const auto [m, code] = index.locate(i);
    std::vector<int> symbols;
    shape.decode(m, code, symbols);
    return computed(symbols) != expected(symbols);
  });

  InvarianceReport report;
  report.degree = degree;
  report.n = n;
  if (bad < index.total()) {
    const auto [m, code] = index.locate(bad);
    std::vector<int> symbols;
    shape.decode(m, code, symbols);
    report.pass = false;
    report.violation = Violation{shape.word(symbols), to_string(expected(symbols)), to_string(computed(symbols)), ""};
  }
  return report;
}

int cyclic_pattern(std::span<const std::pair<int, bool>> v) {
  const std::size_t m = v.size();
  if (m == 0 || m % 2 == 1) return 0;
  auto pair_ok = [&](std::size_t a, std::size_t b) {
    return v[a].second && !v[b].second && v[a].first == v[b].first;  // (x*_i, x_i)
  };
  if (v[0].second) {
    for (std::size_t q = 0; q < m; q += 2)
      if (!pair_ok(q, q + 1)) return 0;
    return 1;
  }
  if (!v[m - 1].second || v[0].first != v[m - 1].first) return 0;
  for (std::size_t q = 1; q + 1 < m; q += 2)
    if (!pair_ok(q, q + 1)) return 0;
  return 2;
}

PatternReport check_cumulant_pattern(const MomentFunctional& phi, int degree) {
  single_alphabet(phi);
  if (degree > phi.degree()) throw CapError("degree " + std::to_string(degree) + " exceeds the functional's degree");
  const CumulantTable kappa = cumulants_from_moments(phi);
  const WordTable& t = kappa.table();
  const int rmax = degree / 2;
  std::vector<std::optional<Rational>> alpha(rmax + 1);
  std::vector<std::optional<Rational>> beta(rmax + 1);

  PatternReport report;
  report.degree = degree;
  std::vector<std::pair<int, bool>> letters;
  std::vector<int> symbols;
  for (int m = 1; m <= degree && report.pass; ++m)
    for (std::uint64_t code = 0; code < t.count(m); ++code) {
      const Rational& value = t.at(m, code);
      t.decode(m, code, symbols);
      letters.clear();
      for (int s : symbols) {
        const Letter l = t.letters().letter_of(s);
        letters.emplace_back(l.index[0], l.starred);
      }
      const int kind = cyclic_pattern(letters);
      std::string reason;
      if (kind == 0) {
        if (value != 0) reason = "non-pattern cumulant";
      } else {
        auto& slot = (kind == 1 ? alpha : beta)[m / 2];
        if (!slot)
          slot = value;
        else if (*slot != value)
          reason = "depends on indices";
      }
      if (!reason.empty()) {
        report.pass = false;
        report.violation = t.word(m, code);
        report.value = value;
        report.reason = reason;
        break;
      }
    }
  if (!report.pass) return report;
  for (int r = 1; r <= rmax; ++r) {
    report.spec.alpha.push_back(alpha[r].value_or(0));
    report.spec.beta.push_back(beta[r].value_or(0));
  }
  if (phi.tracial())
    for (int r = 1; r <= rmax; ++r)
      if (report.spec.alpha[r - 1] != report.spec.beta[r - 1]) {
        report.pass = false;
        std::vector<Letter> w{Letter::make(t.letters().letters()[0].alphabet, 1)};
        for (int q = 1; q < r; ++q) {
          w.push_back(w[0].adjoint());
          w.push_back(w[0]);
        }
        w.push_back(w[0].adjoint());
        report.violation = Word(w);
        report.value = report.spec.beta[r - 1];
        report.reason = "alpha differs from beta";
        break;
      }
  return report;
}

RDiagonalReport check_rdiagonal(const MomentFunctional& phi, const Letter& letter, int degree) {
  if (degree > phi.degree()) throw CapError("degree " + std::to_string(degree) + " exceeds the functional's degree");
  if (!phi.letters().contains(letter)) throw DomainError("letter " + letter.to_string() + " is not declared");
  const CumulantTable kappa = cumulants_from_moments(phi);
  const int plain = *phi.letters().symbol(letter.base());
  RDiagonalReport report;
  std::vector<int> stars;
  std::vector<int> symbols;
  for (int m = 1; m <= degree; ++m)
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
      stars.assign(m, 0);
      symbols.assign(m, plain);
      for (int q = 0; q < m; ++q)
        if (mask >> (m - 1 - q) & 1) {
          stars[q] = 1;
          symbols[q] = plain + 1;
        }
      if (!odd_or_non_alternating(stars)) continue;
      const Rational& value = kappa.table().at(symbols);
      if (value != 0) {
        report.pass = false;
        report.violation = kappa.table().word(symbols);
        report.value = value;
        return report;
      }
    }
  return report;
}

RecoveredAlpha recover_alpha_sequence(const std::vector<Rational>& s_moments, int n, int r_max) {
  if (n < 1) throw DomainError("n must be positive");
  if (r_max < 1) throw DomainError("r_max must be positive");
  if (2 * r_max > 12 || 2 * r_max > engine_limits().max_partition_size)
    throw CapError("r_max " + std::to_string(r_max) + " needs partitions beyond the cap");
  if (static_cast<int>(s_moments.size()) < r_max + 1)
    throw ValidationError("need moments of s up to order " + std::to_string(r_max));
  if (s_moments[0] != 1) throw ValidationError("the zeroth moment of s must be 1");

  RecoveredAlpha out;
  for (int m = 1; m <= r_max; ++m) {
    const auto& parts = nc_partitions(m);
    const auto& mu = mobius_to_top(m);
    Rational k = 0;
    for (std::size_t q = 0; q < parts.size(); ++q) {
      Rational term = Rational(mu[q]);
      for (int v = 0; v < parts[q].block_count(); ++v) term *= s_moments[parts[q].block(v).size()];
      k += term;
    }
    out.s_cumulants.push_back(k);
  }

  std::vector<std::pair<int, bool>> block_letters;
  for (int m = 1; m <= r_max; ++m) {
    const int len = 2 * m;
    std::vector<int> groups(m, 2);
    const NCPartition sigma = interval_partition(groups);
    Rational rest = 0;
    std::vector<int> idx(m, 1);
    const auto& parts = nc_partitions(len);
    for (const auto& pi : parts) {
      if (pi.block_count() == 1) continue;
      if (join(pi, sigma).block_count() != 1) continue;
      bool even = true;
      for (int v = 0; v < pi.block_count(); ++v) even = even && pi.block(v).size() % 2 == 0;
      if (!even) continue;
      // sum over index tuples; position 2q is x*_{i_q}, 2q+1 is x_{i_q}
      std::fill(idx.begin(), idx.end(), 1);
      for (;;) {
        Rational term = 1;
        for (int v = 0; v < pi.block_count() && term != 0; ++v) {
          block_letters.clear();
          for (auto p : pi.block(v)) block_letters.emplace_back(idx[p / 2], p % 2 == 0);
          if (cyclic_pattern(block_letters) == 0)
            term = 0;
          else
            term *= out.alpha[block_letters.size() / 2 - 1];
        }
        rest += term;
        int q = 0;
        while (q < m && idx[q] == n) idx[q++] = 1;
        if (q == m) break;
        ++idx[q];
      }
    }
    Rational nm = 1;
    for (int q = 0; q < m; ++q) nm *= n;
    out.alpha.push_back(Rational((out.s_cumulants[m - 1] - rest) / nm));
  }
  return out;
}

NCPolynomial collapse_relations(const BrownContext& ctx, const NCPolynomial& p) {
  NCPolynomial::Terms terms = p.terms();
  const int n = ctx.n();
  auto find_collapse = [&](const Word& w, const Rational& c, std::vector<Word>& siblings, Word& reduced,
                           bool& delta) {
    for (std::size_t pos = 0; pos + 1 < w.size(); ++pos) {
      const Letter& a = w[pos];
      const Letter& b = w[pos + 1];
      if (!ctx.is_generator(a) || !ctx.is_generator(b)) continue;
      int vary;  // which index runs over the sum
      if (a.starred && !b.starred && a.index[0] == b.index[0])
        vary = 0;  // Σ_x u*_{xk} u_{xl}
      else if (!a.starred && b.starred && a.index[1] == b.index[1])
        vary = 1;  // Σ_x u_{kx} u*_{lx}
      else
        continue;
      siblings.clear();
      bool complete = true;
      for (int x = 1; x <= n && complete; ++x) {
        std::vector<Letter> ls = w.letters();
        ls[pos].index[vary] = x;
        ls[pos + 1].index[vary] = x;
        Word s(std::move(ls));
        auto it = terms.find(s);
        complete = it != terms.end() && it->second == c;
        siblings.push_back(std::move(s));
      }
      if (!complete) continue;
      std::vector<Letter> rest;
      for (std::size_t q = 0; q < w.size(); ++q)
        if (q != pos && q != pos + 1) rest.push_back(w[q]);
      reduced = Word(std::move(rest));
      delta = a.index[1 - vary] == b.index[1 - vary];
      return true;
    }
    return false;
  };
  std::vector<Word> siblings;
  Word reduced;
  bool delta = false;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [w, c] : terms) {
      if (!find_collapse(w, c, siblings, reduced, delta)) continue;
      const Rational coefficient = c;
      for (const auto& s : siblings) terms.erase(s);
      if (delta) {
        Rational& slot = terms[reduced];
        slot += coefficient;
        if (slot == 0) terms.erase(reduced);
      }
      changed = true;
      break;
    }
  }
  NCPolynomial out;
  for (const auto& [w, c] : terms) out.add_term(w, c);
  return out;
}

FixedPointReport fixed_point_check(const BrownContext& ctx, const NCPolynomial& p, int trials, std::uint64_t seed) {
  const NCPolynomial image = alpha_expand(ctx, p);
  FixedPointReport report;
  report.residual = collapse_relations(ctx, image - p);
  report.rewrite_fixed = report.residual.is_zero();
  report.rep = ctx.rep_equality(image, p, trials, seed);
  report.rep_fixed = !report.rep.distinguished;
  return report;
}

NCPolynomial counit_collapse(const BrownContext& ctx, const NCPolynomial& p) {
  return substitute(p, [&](const Letter& l) -> std::optional<NCPolynomial> {
    if (ctx.is_generator(l)) return ctx.structure_map(StructureMap::counit, l);
    return NCPolynomial::letter(l);
  });
}

std::pair<NCPolynomial, NCPolynomial> coassociativity_sides(const BrownContext& ctx, const NCPolynomial& p) {
  const NCPolynomial once = alpha_expand(ctx, p);
  NCPolynomial left = substitute(once, [&](const Letter& l) -> std::optional<NCPolynomial> {
    if (ctx.is_generator(l)) return ctx.structure_map(StructureMap::coproduct, l);
    return NCPolynomial::letter(l);
  });
  const BrownContext first(ctx.n(), ctx.copy_alphabet(1));
  const BrownContext second(ctx.n(), ctx.copy_alphabet(2));
  NCPolynomial right = alpha_expand(second, alpha_expand(first, p));
  return {std::move(left), std::move(right)};
}

ExpectationImageReport expectation_image_check(const MomentFunctional& phi, int n, int degree) {
  const std::string alphabet = single_alphabet(phi);
  if (degree > phi.degree()) throw CapError("degree " + std::to_string(degree) + " exceeds the functional's degree");
  const BrownContext ctx(n);
  const MomentOracle haar = [&](const Word& w) { return ctx.haar_moment(w); };
  const MomentOracle kept = oracle_of(phi);
  const LetterPredicate is_u = [&](const Letter& l) { return ctx.is_generator(l); };
  const LetterPredicate is_t = [&](const Letter& l) { return phi.letters().contains(l); };

  NCPolynomial s;
  for (int j = 1; j <= n; ++j) s.add_term(Word({Letter::make(alphabet, j, true), Letter::make(alphabet, j)}), 1);
  std::vector<NCPolynomial> powers{NCPolynomial(1)};
  for (int k = 1; 2 * k <= degree; ++k) powers.push_back(powers.back() * s);
  const Letter t1 = Letter::make(alphabet, 1);

  ExpectationImageReport report;
  const WordTable shape(LetterSet::family(alphabet, n), degree);
  for_each_word(shape, [&](int, std::uint64_t, const std::vector<int>& symbols) {
    if (!report.pass) return;
    const Word w = shape.word(symbols);
    NCPolynomial image;
    const NCPolynomial expanded = alpha_expand(ctx, NCPolynomial(w));
    for (const auto& [term, c] : expanded.terms())
      image += c * conditional_expectation(haar, kept, is_u, is_t, term);
    // peel off powers of s from the top; (t1* t1)^k fixes the coefficient
    NCPolynomial rest = image;
    for (int k = static_cast<int>(powers.size()) - 1; k >= 0; --k) {
      std::vector<Letter> probe;
      for (int q = 0; q < k; ++q) {
        probe.push_back(t1.adjoint());
        probe.push_back(t1);
      }
      const Rational c = rest.coefficient(Word(probe));
      if (c != 0) rest -= c * powers[k];
    }
    if (!rest.is_zero()) {
      report.pass = false;
      report.violation = w;
      report.image = image;
    }
  });
  return report;
}

}  // namespace freeprob
