#include "freeprob/bialgebra.hpp"

#include <cstdio>
#include <map>

#include "freeprob/errors.hpp"

namespace freeprob {

namespace {

void check_family_letter(const BrownContext& ctx, const Letter& l) {
  if (l.arity != 1 || l.alphabet == ctx.alphabet())
    throw DomainError("letter " + l.to_string() + " is not a family letter");
  if (l.index[0] < 1 || l.index[0] > ctx.n())
    throw DomainError("index of " + l.to_string() + " exceeds n = " + std::to_string(ctx.n()));
}

std::uint32_t star_mask(const Word& w) {
  std::uint32_t mask = 0;
  for (std::size_t q = 0; q < w.size(); ++q)
    if (w[q].starred) mask |= 1u << q;
  return mask;
}

// Nonzero moments of words over the first n letters, by (length, star mask).
struct NonzeroMoments {
  struct Entry {
    std::vector<int> index;
    Rational value;
    double approx;
  };
  std::vector<std::map<std::uint32_t, std::vector<Entry>>> by_length;

  NonzeroMoments(const MomentFunctional& phi, int n, int degree) : by_length(degree + 1) {
    const WordTable& t = phi.table();
    std::vector<int> symbols;
    for (int m = 1; m <= degree; ++m)
      for (std::uint64_t code = 0; code < t.count(m); ++code) {
        const Rational& v = t.at(m, code);
        if (v == 0) continue;
        t.decode(m, code, symbols);
        Entry e{{}, v, v.get_d()};
        std::uint32_t mask = 0;
        bool inside = true;
        for (int q = 0; q < m; ++q) {
          const Letter l = t.letters().letter_of(symbols[q]);
          inside = inside && l.index[0] <= n;
          e.index.push_back(l.index[0]);
          if (l.starred) mask |= 1u << q;
        }
        if (inside) by_length[m][mask].push_back(std::move(e));
      }
  }
  const std::vector<Entry>& at(int m, std::uint32_t mask) const {
    static const std::vector<Entry> none;
    auto it = by_length[m].find(mask);
    return it == by_length[m].end() ? none : it->second;
  }
};

// π_n image of Σ_i u^{e}_{j i}-words weighted by the entries
RationalMatrix pi_image(int n, const Word& w, const std::vector<NonzeroMoments::Entry>& entries) {
  RationalMatrix m(n);
  for (const auto& e : entries) {
    // u_{ji} -> e_{ij}, u*_{ji} -> e_{ji}
    int first = -1, last = -1;
    bool zero = false;
    for (std::size_t q = 0; q < w.size() && !zero; ++q) {
      const int j = w[q].index[0];
      const int i = e.index[q];
      const int row = w[q].starred ? j : i;
      const int col = w[q].starred ? i : j;
      if (q == 0)
        first = row;
      else if (row != last)
        zero = true;
      last = col;
    }
    if (!zero) m(first - 1, last - 1) += e.value;
  }
  return m;
}

std::complex<double> unitary_image(const ComplexMatrix& u, const Word& w,
                                   const std::vector<NonzeroMoments::Entry>& entries) {
  std::complex<double> total = 0;
  for (const auto& e : entries) {
    std::complex<double> prod = e.approx;
    for (std::size_t q = 0; q < w.size(); ++q) {
      const std::complex<double> x = u(w[q].index[0] - 1, e.index[q] - 1);
      prod *= w[q].starred ? std::conj(x) : x;
    }
    total += prod;
  }
  return total;
}

std::string format_complex(std::complex<double> z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
  return buf;
}

bool refines_kernel(const NCPartition& pi, std::span<const int> indices) {
  return pi.partition().refines(kernel(indices));
}

Rational power_of(const Rational& c, int k) {
  Rational v = 1;
  for (int q = 0; q < k; ++q) v *= c;
  return v;
}

bool is_ordered_pairing(const NCPartition& pi, const StarPattern& e) {
  if (pi.size() != e.size()) return false;
  for (int b = 0; b < pi.block_count(); ++b) {
    const auto blk = pi.block(b);
    if (blk.size() != 2 || e.starred(blk[0]) || !e.starred(blk[1])) return false;
  }
  return true;
}

// Collapses Σ_i u_{x i} u*_{y i} at word positions (pos, pos+1) in every
// term; throws if some group is not the complete sum.
NCPolynomial collapse_row_sum(const BrownContext& ctx, const NCPolynomial& s, std::size_t pos) {
  struct Group {
    int x = 0, y = 0;
    std::map<int, Rational> by_i;
  };
  std::map<Word, Group> groups;
  for (const auto& [w, c] : s.terms()) {
    if (w.size() < pos + 2) throw Error("interval pair outside the word");
    const Letter& a = w[pos];
    const Letter& b = w[pos + 1];
    if (!ctx.is_generator(a) || !ctx.is_generator(b) || a.starred || !b.starred || a.index[1] != b.index[1])
      throw Error("term " + w.to_string() + " has no row-relation pair at the interval");
    std::vector<Letter> rest;
    for (std::size_t q = 0; q < w.size(); ++q)
      if (q != pos && q != pos + 1) rest.push_back(w[q]);
    Group& g = groups[Word(std::move(rest))];
    if (!g.by_i.empty() && (g.x != a.index[0] || g.y != b.index[0]))
      throw Error("mixed relation sums at one interval");
    g.x = a.index[0];
    g.y = b.index[0];
    g.by_i[a.index[1]] = c;
  }
  NCPolynomial out;
  for (const auto& [rest, g] : groups) {
    if (static_cast<int>(g.by_i.size()) != ctx.n()) throw Error("incomplete relation sum at " + rest.to_string());
    const Rational c = g.by_i.begin()->second;
    for (const auto& [i, ci] : g.by_i)
      if (ci != c) throw Error("unequal coefficients in a relation sum at " + rest.to_string());
    if (g.x == g.y) out.add_term(rest, c);
  }
  return out;
}

// Σ_{i constant on blocks of π} u^{e_1}_{j_1 i_1} ⋯
NCPolynomial lemma_sum(const BrownContext& ctx, const std::vector<int>& j, const StarPattern& e,
                       const NCPartition& pi) {
  const int k = pi.block_count();
  std::vector<int> block_index(k, 1);
  NCPolynomial s;
  for (;;) {
    std::vector<Letter> ls;
    for (int q = 0; q < pi.size(); ++q) ls.push_back(ctx.generator(j[q], block_index[pi.label(q)], e.starred(q)));
    s.add_term(Word(std::move(ls)), 1);
    int b = k - 1;
    while (b >= 0 && block_index[b] == ctx.n()) block_index[b--] = 1;
    if (b < 0) break;
    ++block_index[b];
  }
  return s;
}

Rational moment_from_pairings(const std::vector<NCPartition>& pairings, const Rational& c, const Word& w) {
  std::vector<int> idx;
  for (const auto& l : w) idx.push_back(l.index[0]);
  int count = 0;
  for (const auto& pi : pairings)
    if (refines_kernel(pi, idx)) ++count;
  return count == 0 ? Rational(0) : Rational(count * power_of(c, static_cast<int>(w.size()) / 2));
}

StarPattern pattern_of(const Word& w) {
  std::vector<bool> s;
  for (const auto& l : w) s.push_back(l.starred);
  return StarPattern(std::move(s));
}

}  // namespace

std::vector<TensorTerm> gamma_expand(const BrownContext& ctx, const Word& w) {
  for (const auto& l : w) check_family_letter(ctx, l);
  const int n = ctx.n();
  std::vector<int> i(w.size(), 1);
  std::vector<TensorTerm> out;
  for (;;) {
    TensorTerm t{{}, {}, 1};
    for (std::size_t q = 0; q < w.size(); ++q) {
      t.u_part.push_back(ctx.generator(w[q].index[0], i[q], w[q].starred));
      t.t_part.push_back(Letter::make(w[q].alphabet, i[q], w[q].starred));
    }
    out.push_back(std::move(t));
    int q = static_cast<int>(w.size()) - 1;
    while (q >= 0 && i[q] == n) i[q--] = 1;
    if (q < 0) break;
    ++i[q];
  }
  return out;
}

NCPolynomial gamma_counit(const BrownContext& ctx, const std::vector<TensorTerm>& terms) {
  NCPolynomial out;
  for (const auto& t : terms) {
    const NCPolynomial scalar = ctx.apply(StructureMap::counit, NCPolynomial(t.u_part));
    out += scalar.constant() * t.coefficient * NCPolynomial(t.t_part);
  }
  return out;
}

NCPolynomial bialgebra_defect(const BrownContext& ctx, const MomentFunctional& phi, const Word& w) {
  NCPolynomial out;
  for (const auto& t : gamma_expand(ctx, w)) out.add_term(t.u_part, t.coefficient * phi(t.t_part));
  out -= NCPolynomial(phi(w));
  return out;
}

RationalMatrix bialgebra_defect_pi(const BrownContext& ctx, const MomentFunctional& phi, const Word& w) {
  for (const auto& l : w) check_family_letter(ctx, l);
  const NonzeroMoments nz(phi, ctx.n(), static_cast<int>(w.size()));
  RationalMatrix m = w.empty() ? RationalMatrix::identity(ctx.n())
                               : pi_image(ctx.n(), w, nz.at(static_cast<int>(w.size()), star_mask(w)));
  return m - RationalMatrix::identity(ctx.n()) * phi(w);
}

InvarianceReport check_bialgebra_invariance(const MomentFunctional& phi, int n, int degree, const RepSelection& reps) {
  const auto alphabets = phi.letters().alphabets();
  if (alphabets.size() != 1) throw DomainError("expected a family over one alphabet");
  const std::string alphabet = alphabets[0];
  if (degree > phi.degree()) throw CapError("degree " + std::to_string(degree) + " exceeds the functional's degree");
  if (degree > 31) throw CapError("degree beyond 31");
  if (reps.trials < 0) throw DomainError("negative trial count");
  const BrownContext ctx(n);
  for (int i = 1; i <= n; ++i) check_family_letter(ctx, Letter::make(alphabet, i));
  for (int i = 1; i <= n; ++i)
    if (!phi.letters().contains(Letter::make(alphabet, i)))
      throw DomainError("family lacks " + Letter::make(alphabet, i).to_string());

  const NonzeroMoments nz(phi, n, degree);
  std::mt19937_64 rng(reps.seed);
  std::vector<ComplexMatrix> unitaries;
  for (int t = 0; t < reps.trials; ++t) unitaries.push_back(haar_unitary(n, rng));
  const RationalMatrix identity = RationalMatrix::identity(n);

  InvarianceReport report;
  report.degree = degree;
  report.n = n;
  const WordTable shape(LetterSet::family(alphabet, n), degree);
  std::vector<int> symbols;
  for (int m = 1; m <= degree; ++m)
    for (std::uint64_t code = 0; code < shape.count(m); ++code) {
      const Word w = shape.word(m, code);
      const Rational& expected = phi(w);
      const auto& entries = nz.at(m, star_mask(w));
      if (reps.pi) {
        const RationalMatrix image = pi_image(n, w, entries);
        const RationalMatrix target = identity * expected;
        if (!(image == target)) {
          report.pass = false;
          report.violation = Violation{w, target.to_string(), image.to_string(), "pi_" + std::to_string(n)};
          return report;
        }
      }
      for (int t = 0; t < reps.trials; ++t) {
        const auto z = unitary_image(unitaries[t], w, entries);
        if (std::abs(z - expected.get_d()) > 1e-9) {
          report.pass = false;
          report.violation = Violation{w, to_string(expected), format_complex(z), "unitary trial " + std::to_string(t + 1)};
          return report;
        }
      }
    }
  return report;
}

Rational eta_zero_circular_moment(int count, const Rational& c, const Word& w) {
  for (const auto& l : w)
    if (l.arity != 1 || l.index[0] < 1 || l.index[0] > count)
      throw DomainError("letter " + l.to_string() + " is outside the family");
  if (w.size() % 2 == 1) return 0;
  return moment_from_pairings(pair_partitions(static_cast<int>(w.size()), PairConstraint::ordered, pattern_of(w)), c,
                              w);
}

MomentFunctional build_eta_zero_circular(int count, const Rational& c, int degree, const std::string& alphabet) {
  if (count < 1) throw DomainError("family needs at least one letter");
  WordTable t(LetterSet::family(alphabet, count), degree);
  t.at(0, 0) = 1;
  std::map<std::pair<int, std::uint32_t>, std::vector<NCPartition>> by_pattern;
  for (int m = 2; m <= degree; m += 2)
    for (std::uint64_t code = 0; code < t.count(m); ++code) {
      const Word w = t.word(m, code);
      auto key = std::make_pair(m, star_mask(w));
      auto it = by_pattern.find(key);
      if (it == by_pattern.end())
        it = by_pattern.emplace(key, pair_partitions(m, PairConstraint::ordered, pattern_of(w))).first;
      t.at(m, code) = moment_from_pairings(it->second, c, w);
    }
  return MomentFunctional(std::move(t), false);
}

LemmaVerdict check_interval_sum_lemma(int n, const std::vector<int>& j, const StarPattern& e, const NCPartition& pi,
                                      LemmaMode mode, const RepSelection& reps) {
  if (static_cast<int>(j.size()) != pi.size() || e.size() != pi.size())
    throw SizeError("index tuple, star pattern and partition sizes differ");
  if (!is_ordered_pairing(pi, e))
    throw DomainError(pi.to_string() + " is not an ordered pairing for " + e.to_string());
  for (int x : j)
    if (x < 1 || x > n) throw DomainError("index " + std::to_string(x) + " outside 1.." + std::to_string(n));
  const BrownContext ctx(n);
  LemmaVerdict v;
  v.predicted = refines_kernel(pi, j) ? 1 : 0;
  NCPolynomial s = lemma_sum(ctx, j, e, pi);

  if (mode == LemmaMode::symbolic) {
    // remaining original positions; repeatedly take an interval pair
    std::vector<int> alive(pi.size());
    for (int q = 0; q < pi.size(); ++q) alive[q] = q;
    while (!alive.empty()) {
      std::size_t a = 0;
      while (pi.label(alive[a]) != pi.label(alive[a + 1])) ++a;
      s = collapse_row_sum(ctx, s, a);
      alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(a), alive.begin() + static_cast<std::ptrdiff_t>(a) + 2);
      if (s.is_zero()) break;
    }
    v.value = s.constant();
    v.agree = s.degree() <= 0 && v.value == v.predicted;
    if (!v.agree) v.detail = "symbolic collapse gave " + s.to_string();
    return v;
  }

  const RationalMatrix image = ctx.pi_rep(s);
  if (!(image == RationalMatrix::identity(n) * v.predicted)) {
    v.detail = "pi_" + std::to_string(n) + " gives " + image.to_string();
    v.value = image(0, 0);
    return v;
  }
  std::mt19937_64 rng(reps.seed);
  for (int t = 0; t < reps.trials; ++t) {
    const auto z = ctx.unitary_eval(s, haar_unitary(n, rng));
    if (std::abs(z - v.predicted.get_d()) > 1e-9) {
      v.detail = "unitary trial " + std::to_string(t + 1) + " gives " + format_complex(z);
      return v;
    }
  }
  v.value = v.predicted;
  v.agree = true;
  return v;
}

LemmaSweep sweep_interval_sum_lemma(int n, int k, const RepSelection& reps) {
  if (k < 1) throw DomainError("k must be positive");
  LemmaSweep sweep;
  for (const auto& pi : pair_partitions(2 * k)) {
    std::vector<bool> stars(2 * k);
    for (int b = 0; b < pi.block_count(); ++b) stars[pi.block(b)[1]] = true;
    const StarPattern e(stars);
    std::vector<int> j(2 * k, 1);
    for (;;) {
      ++sweep.cases;
      const auto sym = check_interval_sum_lemma(n, j, e, pi, LemmaMode::symbolic, reps);
      const auto rep = check_interval_sum_lemma(n, j, e, pi, LemmaMode::reps, reps);
      if (!sym.agree || !rep.agree || sym.value != rep.value) {
        if (sweep.disagreements++ == 0) {
          std::string js;
          for (int x : j) js += std::to_string(x);
          sweep.first_disagreement = pi.to_string() + " j=" + js + ": " + sym.detail + rep.detail;
        }
      }
      int q = 2 * k - 1;
      while (q >= 0 && j[q] == n) j[q--] = 1;
      if (q < 0) break;
      ++j[q];
    }
  }
  return sweep;
}

HalfDefinettiReport halfdefinetti_demo(int n, int degree, const Rational& c, const RepSelection& reps) {
  const MomentFunctional phi = build_eta_zero_circular(n, c, degree);
  HalfDefinettiReport report;
  report.invariance = check_bialgebra_invariance(phi, n, degree, reps);
  const WordTable shape(LetterSet::family("x", n), degree);
  for (int m = 2; m <= degree && report.tables_agree; m += 2)
    for (std::uint64_t code = 0; code < shape.count(m); ++code) {
      const Word w = shape.word(m, code);
      const StarPattern e = pattern_of(w);
      std::vector<int> j;
      for (const auto& l : w) j.push_back(l.index[0]);
      const Rational weight = power_of(c, m / 2);
      // per π: the lemma's collapse of Σ_i u-words vs the kernel indicator
      Rational rhs = 0;
      bool same = true;
      for (const auto& pi : pair_partitions(m, PairConstraint::ordered, e)) {
        const Rational lemma_side = check_interval_sum_lemma(n, j, e, pi, LemmaMode::symbolic).value * weight;
        const Rational kernel_side = refines_kernel(pi, j) ? weight : Rational(0);
        same = same && lemma_side == kernel_side;
        rhs += kernel_side;
      }
      if (!same || rhs != phi(w)) {
        report.tables_agree = false;
        report.table_mismatch = w;
        break;
      }
    }
  return report;
}

}  // namespace freeprob
