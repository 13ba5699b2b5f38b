#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "freeprob/bialgebra.hpp"
#include "freeprob/errors.hpp"
#include "freeprob/models.hpp"
#include "oracles.hpp"

using namespace freeprob;

namespace freeprob {
inline void PrintTo(const RationalMatrix& m, std::ostream* os) { *os << m.to_string(); }
}  // namespace freeprob

namespace {

Word W(const char* s) { return Word::parse(s); }

std::vector<Word> words_over(const std::string& a, int count, int d) {
  std::vector<Word> out;
  WordTable t(LetterSet::family(a, count), d);
  for_each_word(t, [&](int m, std::uint64_t c, const std::vector<int>&) { out.push_back(t.word(m, c)); });
  return out;
}

// Σ over all noncrossing pairings (brute force) that join a plain point to a
// later starred point with equal indices
Rational eta_zero_oracle(const Word& w, const Rational& c) {
  const int m = static_cast<int>(w.size());
  if (m % 2) return 0;
  Rational total = 0;
  for (const auto& l : oracle::noncrossing_partitions(m)) {
    bool ok = true;
    const int blocks = m == 0 ? 0 : *std::max_element(l.begin(), l.end()) + 1;
    for (int b = 0; b < blocks && ok; ++b) {
      std::vector<int> pos;
      for (int i = 0; i < m; ++i)
        if (l[i] == b) pos.push_back(i);
      ok = pos.size() == 2 && !w[pos[0]].starred && w[pos[1]].starred && w[pos[0]].index[0] == w[pos[1]].index[0];
    }
    if (ok) {
      Rational v = 1;
      for (int q = 0; q < m / 2; ++q) v *= c;
      total += v;
    }
  }
  return total;
}

RationalMatrix unit_times(int n, int j, int k, const Rational& c) { return RationalMatrix::unit(n, j, k) * c; }

}  // namespace

TEST(GammaExpand, Examples) {
  const BrownContext ctx(2);
  const auto g = gamma_expand(ctx, W("t1"));
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0], (TensorTerm{W("u1,1"), W("t1"), 1}));
  EXPECT_EQ(g[1], (TensorTerm{W("u1,2"), W("t2"), 1}));
  const auto one = gamma_expand(ctx, Word{});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], (TensorTerm{Word{}, Word{}, 1}));
  const auto star = gamma_expand(ctx, W("t2*"));
  EXPECT_EQ(star[1], (TensorTerm{W("u2,2*"), W("t2*"), 1}));
  EXPECT_THROW(gamma_expand(ctx, W("t3")), DomainError);
  EXPECT_EQ(gamma_expand(BrownContext(3), W("t1 t2* t3")).size(), 27u);
}

TEST(GammaExpand, CounitCollapseReturnsTheWord) {
  for (int n : {2, 3}) {
    const BrownContext ctx(n);
    for (const auto& w : words_over("t", n, n == 2 ? 4 : 3))
      ASSERT_EQ(gamma_counit(ctx, gamma_expand(ctx, w)), NCPolynomial(w)) << w.to_string();
  }
}

TEST(BialgebraDefect, FastPiImageMatchesPolynomialRoute) {
  std::mt19937_64 rng(3);
  const BrownContext ctx(2);
  const std::vector<MomentFunctional> phis{build_circular_family(2, 1, 3), build_eta_zero_circular(2, 2, 3),
                                           oracle::random_functional(LetterSet::family("x", 2), 3, rng)};
  for (const auto& phi : phis)
    for (const auto& w : words_over("x", 2, 3))
      ASSERT_EQ(bialgebra_defect_pi(ctx, phi, w), ctx.pi_rep(bialgebra_defect(ctx, phi, w))) << w.to_string();
}

TEST(BialgebraInvariance, ZeroFamilyPasses) {
  const auto zero = build_circular_family(2, 0, 4);
  EXPECT_TRUE(check_bialgebra_invariance(zero, 2, 4, {}).pass);
}

TEST(BialgebraInvariance, CircularFailsWithMatrixWitness) {
  const auto r = check_bialgebra_invariance(build_circular_family(2, 1, 4), 2, 4, {});
  ASSERT_FALSE(r.pass);
  ASSERT_TRUE(r.violation.has_value());
  EXPECT_EQ(r.violation->word, W("x1* x1"));
  EXPECT_EQ(r.violation->witness, "pi_2");
  EXPECT_EQ(r.violation->expected, RationalMatrix::identity(2).to_string());
  EXPECT_EQ(r.violation->got, unit_times(2, 1, 1, 2).to_string());
}

// u_{jk} -> U_{jk} is one-dimensional, and Σ_i conj(U_{ji}) U_{ki} = δ_{jk}
// holds for any unitary, so scalar evaluations cannot see the no-go; only
// the matrix representation separates the sides.
TEST(BialgebraInvariance, UnitaryCharactersCannotWitnessTheNoGo) {
  RepSelection reps;
  reps.pi = false;
  reps.trials = 5;
  EXPECT_TRUE(check_bialgebra_invariance(build_circular_family(2, 1, 4), 2, 4, reps).pass);
  reps.pi = true;
  EXPECT_FALSE(check_bialgebra_invariance(build_circular_family(2, 1, 4), 2, 4, reps).pass);
  // a word the characters do see: x1 x1 against semicircular data
  reps.pi = false;
  const auto semi = check_bialgebra_invariance(build_semicircular_family(2, 4), 2, 4, reps);
  ASSERT_FALSE(semi.pass);
  EXPECT_EQ(semi.violation->word, W("x1 x1"));
  EXPECT_EQ(semi.violation->witness, "unitary trial 1");
}

TEST(BialgebraInvariance, NoGoOnBattery) {
  const int n = 2, d = 4;
  std::vector<std::pair<std::string, MomentFunctional>> battery;
  battery.emplace_back("circular", build_circular_family(2, 1, d));
  battery.emplace_back("freely uniform", build_freely_uniform(2, d));
  battery.emplace_back("product",
                       rename_alphabet(build_product_family(build_freely_uniform(2, d), build_bernoulli(d), d), "x"));
  battery.emplace_back("semicircular", build_semicircular_family(2, d));
  battery.emplace_back("perturbed circular", perturb_cumulant(build_circular_family(2, 1, d), W("x1 x1*"), 2));
  const BrownContext ctx(n);
  for (const auto& [name, phi] : battery) {
    Rational trace = 0;
    for (int i = 1; i <= n; ++i) trace += phi(Word({Letter::make("x", i, true), Letter::make("x", i)}));
    ASSERT_NE(trace, 0) << name;
    const auto r = check_bialgebra_invariance(phi, n, d, {});
    EXPECT_FALSE(r.pass) << name;
    // at x_j* x_k the π_n image of the γ side is e_{jk} Σ_i φ(x_i* x_i)
    for (int j = 1; j <= n; ++j)
      for (int k = 1; k <= n; ++k) {
        const Word w({Letter::make("x", j, true), Letter::make("x", k)});
        const RationalMatrix gamma_side = bialgebra_defect_pi(ctx, phi, w) + RationalMatrix::identity(n) * phi(w);
        EXPECT_EQ(gamma_side, unit_times(n, j, k, trace)) << name << " " << w.to_string();
        if (j == k) EXPECT_FALSE(bialgebra_defect_pi(ctx, phi, w).is_zero()) << name;
      }
    if (r.violation->word.size() == 2 && r.violation->word[0].starred && !r.violation->word[1].starred) {
      const auto& v = r.violation->word;
      EXPECT_EQ(r.violation->got, unit_times(n, v[0].index[0], v[1].index[0], trace).to_string()) << name;
    }
  }
}

TEST(EtaZero, Examples) {
  const Rational c(3);
  EXPECT_EQ(eta_zero_circular_moment(1, c, W("x1 x1*")), c);
  EXPECT_EQ(eta_zero_circular_moment(1, c, W("x1* x1")), 0);
  EXPECT_EQ(eta_zero_circular_moment(1, c, W("x1 x1* x1 x1*")), c * c);
  EXPECT_EQ(eta_zero_circular_moment(1, c, W("x1 x1 x1* x1*")), c * c);
  EXPECT_EQ(eta_zero_circular_moment(2, c, W("x1 x2*")), 0);
  EXPECT_THROW(eta_zero_circular_moment(1, c, W("x2")), DomainError);
}

TEST(EtaZero, MatchesBruteForceAndIsNotTracial) {
  const Rational c(2, 5);
  const auto phi = build_eta_zero_circular(2, c, 6);
  EXPECT_FALSE(phi.tracial());
  EXPECT_FALSE(phi.is_tracial());
  EXPECT_NE(phi(W("x1 x1*")), phi(W("x1* x1")));
  for (const auto& w : words_over("x", 2, 6)) ASSERT_EQ(phi(w), eta_zero_oracle(w, c)) << w.to_string();
}

TEST(EtaZero, CumulantsAreOneOrderedPairing) {
  const Rational c(7, 3);
  const auto kappa = cumulants_from_moments(build_eta_zero_circular(2, c, 6));
  for (const auto& w : words_over("x", 2, 6)) {
    const bool ordered_pair = w.size() == 2 && !w[0].starred && w[1].starred && w[0].index[0] == w[1].index[0];
    ASSERT_EQ(kappa(w), ordered_pair ? c : Rational(0)) << w.to_string();
  }
}

TEST(EtaZero, PassesBialgebraicInvarianceAtDegreeSix) {
  const auto start = std::chrono::steady_clock::now();
  for (int n : {2, 3}) {
    const auto phi = build_eta_zero_circular(n, 1, 6);
    RepSelection reps;
    reps.trials = 10;
    reps.seed = 20240611;
    const auto r = check_bialgebra_invariance(phi, n, 6, reps);
    EXPECT_TRUE(r.pass) << "n=" << n << " " << (r.violation ? r.violation->word.to_string() : "");
  }
  std::cout << "eta0 invariance took "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
}

TEST(IntervalSumLemma, Examples) {
  const auto pi1 = NCPartition::parse("{{1,2}}");
  const auto e1 = StarPattern::parse(".*");
  for (auto mode : {LemmaMode::symbolic, LemmaMode::reps}) {
    auto a = check_interval_sum_lemma(2, {1, 1}, e1, pi1, mode);
    EXPECT_TRUE(a.agree);
    EXPECT_EQ(a.value, 1);
    auto b = check_interval_sum_lemma(2, {1, 2}, e1, pi1, mode);
    EXPECT_TRUE(b.agree);
    EXPECT_EQ(b.value, 0);
    auto c = check_interval_sum_lemma(8, {5, 7, 7, 5}, StarPattern::parse("..**"),
                                      NCPartition::parse("{{1,4},{2,3}}"), mode);
    EXPECT_TRUE(c.agree) << c.detail;
    EXPECT_EQ(c.value, 1);
  }
  EXPECT_THROW(check_interval_sum_lemma(2, {1, 1}, StarPattern::parse("*."), pi1, LemmaMode::symbolic), DomainError);
  EXPECT_THROW(check_interval_sum_lemma(2, {1, 3}, e1, pi1, LemmaMode::symbolic), DomainError);
}

TEST(IntervalSumLemma, ModesAgreeExhaustively) {
  RepSelection reps;
  reps.trials = 3;
  reps.seed = 5;
  for (int n = 1; n <= 3; ++n)
    for (int k = 1; k <= 3; ++k) {
      const auto s = sweep_interval_sum_lemma(n, k, reps);
      std::uint64_t pairings = oracle::catalan_by_recurrence(k)[k].get_ui();
      std::uint64_t tuples = 1;
      for (int q = 0; q < 2 * k; ++q) tuples *= n;
      EXPECT_EQ(s.cases, pairings * tuples);
      EXPECT_EQ(s.disagreements, 0u) << "n=" << n << " k=" << k << ": " << s.first_disagreement;
    }
}

TEST(HalfDefinetti, Demo) {
  const auto r = halfdefinetti_demo(2, 4, 1, {});
  EXPECT_TRUE(r.invariance.pass);
  EXPECT_TRUE(r.tables_agree);
  const auto zero = halfdefinetti_demo(2, 4, 0, {});
  EXPECT_TRUE(zero.invariance.pass);
  EXPECT_TRUE(zero.tables_agree);
  const BrownContext ctx(2);
  const auto phi = build_eta_zero_circular(2, 1, 2);
  EXPECT_EQ(phi(W("x1 x2*")), 0);
  EXPECT_TRUE(bialgebra_defect_pi(ctx, phi, W("x1 x2*")).is_zero());
  EXPECT_TRUE(ctx.pi_rep(bialgebra_defect(ctx, phi, W("x2 x1*"))).is_zero());
}
