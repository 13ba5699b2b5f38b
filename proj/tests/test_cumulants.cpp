#include <gtest/gtest.h>

#include <random>

#include "freeprob/cumulants.hpp"
#include "freeprob/errors.hpp"
#include "freeprob/limits.hpp"
#include "oracles.hpp"

using namespace freeprob;

namespace {

Word W(const char* s) { return Word::parse(s); }

MomentFunctional circular(const std::string& alphabet, int count, int degree, const Rational& c = 1) {
  auto kappa = [&](const Word& w) { return oracle::circular_cumulant(w, c); };
  return oracle::functional_from(LetterSet::family(alphabet, count), degree,
                                 [&](const Word& w) { return oracle::moment_by_nc_sum(kappa, w); }, true);
}

MomentFunctional haar_unitary(const std::string& alphabet, int degree) {
  return oracle::functional_from(LetterSet::family(alphabet, 1), degree, oracle::haar_unitary_moment, true);
}

// all compositions of m into positive parts
std::vector<std::vector<int>> compositions(int m) {
  std::vector<std::vector<int>> out;
  for (std::uint32_t cuts = 0; cuts < (1u << (m - 1)); ++cuts) {
    std::vector<int> parts;
    int len = 1;
    for (int i = 0; i < m - 1; ++i) {
      if (cuts & (1u << i)) {
        parts.push_back(len);
        len = 1;
      } else {
        ++len;
      }
    }
    parts.push_back(len);
    out.push_back(parts);
  }
  return out;
}

std::vector<Word> regroup(const Word& w, const std::vector<int>& parts) {
  std::vector<Word> out;
  std::size_t at = 0;
  for (int p : parts) {
    out.push_back(w.subword(at, p));
    at += p;
  }
  return out;
}

}  // namespace

TEST(PhiSigma, Examples) {
  auto phi = circular("c", 1, 4);
  auto w = W("c1 c1* c1 c1*");
  EXPECT_EQ(phi_sigma(phi, NCPartition::one(4), w), phi(w));
  EXPECT_EQ(phi_sigma(phi, NCPartition::zero(4), w), 0);
  EXPECT_EQ(phi_sigma(phi, NCPartition::parse("{{1,4},{2,3}}"), w), 1);
  EXPECT_THROW(phi_sigma(phi, NCPartition::one(3), w), DomainError);
}

TEST(Cumulants, CircularOnlyVariancePairs) {
  auto phi = circular("c", 1, 6);
  auto kappa = cumulants_from_moments(phi);
  EXPECT_EQ(kappa(W("c1 c1*")), 1);
  EXPECT_EQ(kappa(W("c1* c1")), 1);
  for_each_word(kappa.table(), [&](int m, std::uint64_t code, const std::vector<int>&) {
    const Word w = kappa.table().word(m, code);
    EXPECT_EQ(kappa.table().at(m, code), oracle::circular_cumulant(w)) << w.to_string();
  });
}

TEST(Cumulants, HaarUnitarySignedCatalanThroughEight) {
  auto phi = haar_unitary("v", 8);
  for (auto method : {CumulantMethod::first_block, CumulantMethod::mobius}) {
    auto kappa = cumulants_from_moments(phi, method);
    for (int r = 1; r <= 4; ++r) {
      Word alt, alt_star;
      for (int i = 0; i < r; ++i) {
        alt = alt * W("v1 v1*");
        alt_star = alt_star * W("v1* v1");
      }
      EXPECT_EQ(kappa(alt), Rational(signed_catalan(r))) << r;
      EXPECT_EQ(kappa(alt_star), Rational(signed_catalan(r))) << r;
    }
    EXPECT_EQ(kappa(W("v1 v1* v1 v1*")), -1);
    EXPECT_EQ(kappa(W("v1 v1* v1 v1* v1 v1*")), 2);
    EXPECT_EQ(kappa(W("v1 v1 v1* v1*")), 0);
    EXPECT_EQ(kappa(W("v1")), 0);
  }
}

TEST(Cumulants, FirstOrderIsMean) {
  std::mt19937_64 rng(5);
  auto phi = oracle::random_functional(LetterSet::family("x", 2), 3, rng);
  auto kappa = cumulants_from_moments(phi);
  for (auto& l : phi.letters().letters()) {
    EXPECT_EQ(kappa(Word({l})), phi(Word({l})));
    EXPECT_EQ(kappa(Word({l.adjoint()})), phi(Word({l.adjoint()})));
  }
}

TEST(Cumulants, RoundTripTwentyRandomFunctionals) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    auto phi = oracle::random_functional(LetterSet::family("x", 3), 6, rng);
    auto kappa = cumulants_from_moments(phi);
    EXPECT_EQ(moments_from_cumulants(kappa), phi) << trial;
  }
}

TEST(Cumulants, TwoRoutesAgree) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 3; ++trial) {
    auto phi = oracle::random_functional(LetterSet::family("x", 2), 6, rng, 0.1);
    EXPECT_EQ(cumulants_from_moments(phi, CumulantMethod::first_block),
              cumulants_from_moments(phi, CumulantMethod::mobius));
  }
}

TEST(Cumulants, PointwiseKappaPiMatchesTableProduct) {
  std::mt19937_64 rng(17);
  auto phi = oracle::random_functional(LetterSet::family("x", 2), 5, rng, 0.1);
  auto kappa = cumulants_from_moments(phi);
  std::uniform_int_distribution<int> sym(0, 3);
  for (int m = 1; m <= 5; ++m)
    for (auto& pi : enumerate_nc(m)) {
      std::vector<int> s(m);
      for (auto& x : s) x = sym(rng);
      Word w = phi.table().word(s);
      EXPECT_EQ(kappa_pi(phi, pi, w), kappa_pi(kappa, pi, w)) << pi.to_string() << " " << w.to_string();
    }
}

TEST(Cumulants, CapEnforced) {
  std::mt19937_64 rng(1);
  auto phi = oracle::random_functional(LetterSet::family("x", 1), engine_limits().max_cumulant_degree + 1, rng);
  EXPECT_THROW(cumulants_from_moments(phi), CapError);
}

TEST(Moments, Examples) {
  auto phi = circular("c", 1, 4);
  EXPECT_EQ(phi(W("c1 c1* c1 c1*")), 2);
  std::mt19937_64 rng(3);
  auto r = oracle::random_functional(LetterSet::family("x", 2), 1, rng);
  auto kappa = cumulants_from_moments(r);
  EXPECT_EQ(moments_from_cumulants(kappa)(W("x2*")), kappa(W("x2*")));
}

TEST(Moments, MatchBruteForceNCSum) {
  std::mt19937_64 rng(8);
  auto phi = oracle::random_functional(LetterSet::family("x", 2), 5, rng);
  // treat the random table as cumulants
  CumulantTable kappa(phi.table());
  auto mom = moments_from_cumulants(kappa);
  for_each_word(mom.table(), [&](int m, std::uint64_t code, const std::vector<int>&) {
    Word w = mom.table().word(m, code);
    EXPECT_EQ(mom(w), oracle::moment_by_nc_sum([&](const Word& b) { return kappa(b); }, w)) << w.to_string();
  });
}

TEST(Products, Examples) {
  auto phi = circular("c", 1, 4);
  EXPECT_EQ(cumulant_of_pairs(phi, W("c1 c1*")), phi(W("c1 c1*")));
  EXPECT_EQ(cumulant_of_pairs(phi, W("c1 c1* c1 c1*")), 1);
  EXPECT_THROW(cumulant_of_pairs(phi, W("c1 c1* c1")), DomainError);
}

TEST(Products, ContributingPairPartitionsContainTheShiftedPairing) {
  for (int n = 1; n <= 5; ++n) {
    std::vector<int> pairs(n, 2);
    auto sigma = interval_partition(pairs);
    // {1,2n},{2,3},{4,5},...
    std::vector<std::vector<int>> shifted{{0, 2 * n - 1}};
    for (int i = 1; i + 1 < 2 * n; i += 2) shifted.push_back({i, i + 1});
    auto rho = NCPartition::from_blocks(2 * n, shifted);
    int contributing = 0;
    for (auto& pi : pair_partitions(2 * n))
      if (join(pi, sigma) == NCPartition::one(2 * n)) {
        ++contributing;
        EXPECT_TRUE(leq(rho, pi)) << pi.to_string();
      }
    EXPECT_EQ(contributing, 1);
  }
}

// Read for arbitrary blocks the containment fails; this pins the smallest case.
TEST(Products, ShiftedPairingNotBelowEveryContributingPartition) {
  auto sigma = NCPartition::parse("{{1,2},{3,4}}");
  auto pi = NCPartition::parse("{{1,3},{2},{4}}");
  EXPECT_EQ(join(pi, sigma), NCPartition::one(4));
  EXPECT_FALSE(leq(NCPartition::parse("{{1,4},{2,3}}"), pi));
}

TEST(Products, AllPairingsMatchDirectCumulantThroughSix) {
  std::mt19937_64 rng(31);
  auto phi = oracle::random_functional(LetterSet::family("x", 2), 6, rng, 0.2);
  auto kappa = cumulants_from_moments(phi);
  auto direct = oracle_of(phi);
  for (int m = 2; m <= 6; m += 2)
    for (std::uint64_t c = 0; c < phi.table().count(m); ++c) {
      Word w = phi.table().word(m, c);
      std::vector<int> pairs(m / 2, 2);
      auto entries = regroup(w, pairs);
      ASSERT_EQ(cumulant_of_products(kappa, w, pairs), cumulant_of_entries(direct, entries)) << w.to_string();
    }
}

TEST(Products, RandomGroupingsMatchDirectCumulant) {
  std::mt19937_64 rng(32);
  auto phi = oracle::random_functional(LetterSet::family("x", 2), 6, rng, 0.2);
  auto kappa = cumulants_from_moments(phi);
  auto direct = oracle_of(phi);
  std::uniform_int_distribution<std::uint64_t> pick(0, phi.table().count(6) - 1);
  for (int m = 1; m <= 6; ++m)
    for (auto& parts : compositions(m))
      for (int trial = 0; trial < 4; ++trial) {
        std::uniform_int_distribution<std::uint64_t> pw(0, phi.table().count(m) - 1);
        Word w = phi.table().word(m, pw(rng));
        EXPECT_EQ(cumulant_of_products(kappa, w, parts), cumulant_of_entries(direct, regroup(w, parts)));
      }
  (void)pick;
}

TEST(FreeProduct, Examples) {
  auto u = haar_unitary("v", 4);
  auto c = circular("c", 1, 4);
  auto fp = free_product_state(u, c);
  EXPECT_EQ(fp(W("v1 c1 c1* v1*")), 1);
  std::mt19937_64 rng(2);
  auto a = oracle::random_functional(LetterSet::family("a", 1), 4, rng, 0.0);
  auto b = oracle::random_functional(LetterSet::family("b", 1), 4, rng, 0.0);
  auto ab = free_product_state(a, b);
  EXPECT_EQ(ab(W("a1 b1")), a(W("a1")) * b(W("b1")));
  EXPECT_THROW(free_product_state(a, a), DomainError);
  EXPECT_TRUE(fp.tracial());
}

TEST(FreeProduct, CenteredAlternatingVanishes) {
  auto kappa_a = [](const Word& w) -> Rational { return w.size() == 2 ? 1 : 0; };
  auto a = oracle::functional_from(LetterSet::family("a", 2), 4,
                                   [&](const Word& w) { return oracle::moment_by_nc_sum(kappa_a, w); });
  auto b = circular("b", 1, 4);
  auto fp = free_product_state(a, b);
  EXPECT_EQ(fp(W("a1 b1 a2")), 0);
}

TEST(FreeProduct, MatchesHomogeneousBlockSum) {
  std::mt19937_64 rng(77);
  auto a = oracle::random_functional(LetterSet::family("a", 1), 5, rng, 0.1);
  auto b = oracle::random_functional(LetterSet::family("b", 1), 5, rng, 0.1);
  auto ka = cumulants_from_moments(a), kb = cumulants_from_moments(b);
  auto fp = free_product_state(a, b);
  auto kappa = [&](const Word& w) { return w[0].alphabet == "a" ? ka(w) : kb(w); };
  auto homogeneous = [](const Word& w) {
    for (auto& l : w)
      if (l.alphabet != w[0].alphabet) return false;
    return true;
  };
  for_each_word(fp.table(), [&](int m, std::uint64_t code, const std::vector<int>&) {
    Word w = fp.table().word(m, code);
    EXPECT_EQ(fp(w), oracle::moment_by_nc_sum(kappa, w, homogeneous)) << w.to_string();
  });
  EXPECT_TRUE(check_freeness(fp, a.letters()).free);
}

TEST(Freeness, Examples) {
  std::mt19937_64 rng(12);
  auto a = oracle::random_functional(LetterSet::family("a", 2), 6, rng, 0.2);
  auto b = oracle::random_functional(LetterSet::family("b", 1), 6, rng, 0.2);
  EXPECT_TRUE(check_freeness(free_product_state(a, b), a.letters()).free);
  EXPECT_TRUE(check_freeness(a, a.letters()).free);

  // commuting symmetric Bernoulli pair: moments factorize
  auto even = [](int k) -> Rational { return k % 2 == 0 ? 1 : 0; };
  auto classical = oracle::functional_from(LetterSet(std::vector<Letter>{Letter::make("a", 1), Letter::make("b", 1)}),
                                           4, [&](const Word& w) {
                                             int na = 0, nb = 0;
                                             for (auto& l : w) (l.alphabet == "a" ? na : nb)++;
                                             return Rational(even(na) * even(nb));
                                           });
  auto rep = check_freeness(classical, LetterSet::family("a", 1));
  EXPECT_FALSE(rep.free);
  ASSERT_TRUE(rep.violation.has_value());
  EXPECT_EQ(rep.violation->size(), 4u);
  EXPECT_NE(rep.value, 0);
  auto kappa = cumulants_from_moments(classical);
  EXPECT_EQ(kappa(W("a1 b1 a1 b1")), 1);
}

TEST(Freeness, ProductsWithHaarUnitaryAreRDiagonal) {
  const int deg = 12;
  auto ku = cumulants_from_moments(haar_unitary("v", 8));
  // Haar unitary cumulants to order 12 from the closed form
  WordTable hu(LetterSet::family("v", 1), deg);
  for_each_word(hu, [&](int m, std::uint64_t code, const std::vector<int>& s) {
    bool alt = m % 2 == 0;
    for (int i = 0; i + 1 < m && alt; ++i) alt = s[i] != s[i + 1];
    hu.at(m, code) = alt ? Rational(signed_catalan(m / 2)) : Rational(0);
  });
  for_each_word(ku.table(), [&](int m, std::uint64_t code, const std::vector<int>&) {
    EXPECT_EQ(ku.table().at(m, code), hu.at(m, code));
  });
  std::mt19937_64 rng(41);
  auto b = oracle::random_functional(LetterSet::family("b", 1), 8, rng, 0.1);
  // b cumulants to order 12: reuse the random degree-8 data and pad with random values
  WordTable kb(LetterSet::family("b", 1), deg);
  auto kb8 = cumulants_from_moments(b);
  for_each_word(kb, [&](int m, std::uint64_t code, const std::vector<int>&) {
    if (m <= 8) {
      kb.at(m, code) = kb8.table().at(m, code);
    } else {
      auto adj = adjoint_code(kb.base(), m, code);
      kb.at(m, code) = adj < code ? kb.at(m, adj) : oracle::random_rational(rng);
    }
  });
  FreeProductEvaluator eval({std::make_shared<TableCumulants>(CumulantTable(hu)),
                             std::make_shared<TableCumulants>(CumulantTable(kb))});
  MomentOracle phi = [&](const Word& w) { return eval.evaluate(w); };
  const Word y = W("v1 b1"), ys = y.adjoint();
  for (int m = 1; m <= 6; ++m)
    for (int mask = 0; mask < (1 << m); ++mask) {
      bool alternating = m % 2 == 0;
      for (int i = 0; i + 1 < m && alternating; ++i) alternating = ((mask >> i) & 1) != ((mask >> (i + 1)) & 1);
      std::vector<Word> entries;
      for (int i = 0; i < m; ++i) entries.push_back((mask >> i) & 1 ? ys : y);
      const Rational k = cumulant_of_entries(phi, entries);
      if (!alternating) EXPECT_EQ(k, 0) << "m=" << m << " mask=" << mask;
    }
}

class ConditionalExpectation : public ::testing::Test {
 protected:
  MomentFunctional u = haar_unitary("v", 6);
  MomentFunctional c = circular("c", 1, 6);
  MomentFunctional fp = free_product_state(u, c);
};

TEST_F(ConditionalExpectation, Examples) {
  EXPECT_EQ(conditional_expectation(u, c, W("c1 c1* c1")), NCPolynomial(W("c1 c1* c1")));
  EXPECT_EQ(conditional_expectation(u, c, W("v1")), NCPolynomial(u(W("v1"))));
  EXPECT_EQ(conditional_expectation(u, c, W("v1 v1*")), NCPolynomial(1));
  EXPECT_EQ(conditional_expectation(u, c, Word{}), NCPolynomial(1));
  // onto the unitary side
  EXPECT_TRUE(conditional_expectation(u, c, W("c1 v1 c1*"), Side::A).is_zero());
  EXPECT_EQ(conditional_expectation(u, c, W("v1 c1 c1* v1*"), Side::A), NCPolynomial(W("v1 v1*")));
}

TEST_F(ConditionalExpectation, PreservesStateOnAllMixedWordsThroughSix) {
  for_each_word(fp.table(), [&](int m, std::uint64_t code, const std::vector<int>&) {
    Word w = fp.table().word(m, code);
    ASSERT_EQ(c(conditional_expectation(u, c, w)), fp(w)) << w.to_string();
  });
}

TEST_F(ConditionalExpectation, BimoduleProperty) {
  std::vector<Word> bs{Word{}, W("c1"), W("c1*"), W("c1 c1*"), W("c1* c1*")};
  for (int m = 0; m <= 4; ++m)
    for (std::uint64_t code = 0; code < fp.table().count(m); ++code) {
      Word w = fp.table().word(m, code);
      auto ew = conditional_expectation(u, c, w);
      for (auto& b : bs)
        for (auto& b2 : bs) {
          if (w.size() + b.size() + b2.size() > 6) continue;
          EXPECT_EQ(conditional_expectation(u, c, b * w * b2), NCPolynomial(b) * ew * NCPolynomial(b2))
              << b.to_string() << " | " << w.to_string() << " | " << b2.to_string();
        }
    }
}

TEST(OperatorValued, FactorizedExamples) {
  auto u = haar_unitary("v", 4);
  auto c = circular("c", 1, 4);
  auto d = circular("d", 1, 4);
  std::vector<Word> a1{W("v1")}, b1{Word{}, Word{}};
  EXPECT_EQ(opval_cumulant_factorized(u, c, 1, a1, b1), NCPolynomial(u(W("v1"))));
  std::vector<Word> a2{W("c1"), W("c1*")}, b2{Word{}, W("d1 d1*"), Word{}};
  EXPECT_EQ(opval_cumulant_factorized(c, d, 2, a2, b2), NCPolynomial(1));
  std::vector<Word> a3{W("c1"), W("c1")};
  EXPECT_TRUE(opval_cumulant_factorized(c, d, 2, a3, b2).is_zero());
  EXPECT_THROW(opval_cumulant_factorized(c, d, 2, a2, b1), DomainError);
}

TEST(OperatorValued, MomentCumulantRelationAgainstKreweras) {
  auto u = haar_unitary("v", 8);
  auto c = circular("c", 1, 8);
  auto iu = oracle_of(u), ic = oracle_of(c);
  auto is_u = [](const Letter& l) { return l.alphabet == "v"; };
  auto is_c = [](const Letter& l) { return l.alphabet == "c"; };
  const std::vector<Word> as{W("v1"), W("v1*")};
  const std::vector<Word> bs{Word{}, W("c1"), W("c1*")};
  for (int m = 1; m <= 4; ++m) {
    int combos = 1;
    for (int i = 0; i < m; ++i) combos *= 6;
    for (int code = 0; code < combos; ++code) {
      int x = code;
      std::vector<OpvalArgument> args;
      Word w;
      for (int i = 0; i < m; ++i) {
        const Word& a = as[x % 2];
        const Word& b = bs[(x / 2) % 3];
        x /= 6;
        args.push_back({a, NCPolynomial(b)});
        w = w * a * b;
      }
      if (static_cast<int>(w.size()) > 4 + m) continue;
      NCPolynomial sum;
      for (auto& pi : enumerate_nc(m)) sum += opval_cumulant_nested(iu, ic, pi, NCPolynomial(1), args);
      EXPECT_EQ(sum, conditional_expectation(iu, ic, is_u, is_c, w)) << w.to_string();
    }
  }
}

TEST(OperatorValued, NestedOneBlockIsFactorized) {
  auto u = haar_unitary("v", 6);
  auto c = circular("c", 1, 6);
  std::vector<OpvalArgument> args{{W("v1"), NCPolynomial(W("c1"))}, {W("v1*"), NCPolynomial(W("c1*"))}};
  EXPECT_EQ(opval_cumulant_nested(oracle_of(u), oracle_of(c), NCPartition::one(2), NCPolynomial(W("c1")), args),
            opval_cumulant_factorized(oracle_of(u), oracle_of(c), NCPolynomial(W("c1")), args));
}
