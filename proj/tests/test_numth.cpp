#include <gtest/gtest.h>

#include <vector>

#include "oracles.hpp"
#include "picket/numth.hpp"
#include "picket/rng.hpp"

using namespace picket;

namespace {

std::vector<std::uint64_t> as_vector(const PrimeTable& t) { return {t.values().begin(), t.values().end()}; }

}  // namespace

TEST(PrimeTable, SmallTables) {
  EXPECT_EQ(as_vector(primes_up_to(10)), (std::vector<std::uint64_t>{1, 2, 3, 5, 7}));
  EXPECT_EQ(as_vector(primes_up_to(2)), (std::vector<std::uint64_t>{1, 2}));
  EXPECT_THROW(primes_up_to(1), ArgumentError);
  EXPECT_THROW(primes_up_to(0), ArgumentError);
}

TEST(PrimeTable, MatchesTrialDivision) {
  auto t = primes_up_to(100);
  EXPECT_EQ(t.size(), 26u);
  EXPECT_EQ(as_vector(t), oracle::primes_trial(100));
  EXPECT_EQ(as_vector(primes_up_to(5000)), oracle::primes_trial(5000));
}

TEST(PrimeTable, GrowsOnDemandWithoutGaps) {
  PrimeTable t(2);
  t.ensure_index(1000);
  ASSERT_GT(t.size(), 1000u);
  EXPECT_EQ(t[0], 1u);
  EXPECT_EQ(t[1], 2u);
  const auto ref = oracle::primes_trial(t[t.max_index()]);
  EXPECT_EQ(as_vector(t), ref);
  t.ensure_value(20011);
  EXPECT_TRUE(t.is_prime(20011));
  EXPECT_FALSE(t.is_prime(20013));
  EXPECT_TRUE(t.is_prime(1000003));  // beyond the table: trial division
  EXPECT_FALSE(t.is_prime(1000001));
}

TEST(PrimeTable, Factorization) {
  PrimeTable t(50);
  EXPECT_EQ(t.prime_factors(360), (std::vector<std::uint64_t>{2, 3, 5}));
  EXPECT_EQ(t.prime_factors(97), (std::vector<std::uint64_t>{97}));
  EXPECT_EQ(t.prime_factors(4 * 10007), (std::vector<std::uint64_t>{2, 10007}));
}

TEST(PairwiseCoprime, Examples) {
  EXPECT_TRUE(pairwise_coprime(std::vector<std::uint64_t>{2, 3, 5}));
  EXPECT_TRUE(pairwise_coprime(std::vector<std::uint64_t>{4, 9, 25, 7}));
  EXPECT_FALSE(pairwise_coprime(std::vector<std::uint64_t>{6, 10}));
  EXPECT_THROW(pairwise_coprime(std::vector<std::uint64_t>{1, 3}), ArgumentError);
}

TEST(PairwiseCoprime, AgreesWithGcdOracleOnRandomTuples) {
  CounterRng rng(20240611);
  int agree_true = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t len = 2 + rng.below(5);
    std::vector<std::uint64_t> v(len);
    for (auto& x : v) x = 2 + rng.below(60);
    const bool expect = oracle::coprime_all_pairs(v);
    agree_true += expect;
    ASSERT_EQ(pairwise_coprime(v), expect) << "trial " << trial;
  }
  EXPECT_GT(agree_true, 10);  // both outcomes exercised
}

TEST(Primorial, Values) {
  PrimeTable t(2);
  auto p1 = primorial_info(1, t);
  EXPECT_EQ(p1.L, 2);
  EXPECT_EQ(p1.phiL, 1);
  auto p3 = primorial_info(3, t);
  EXPECT_EQ(p3.L, 30);
  EXPECT_EQ(p3.phiL, 8);
  auto p4 = primorial_info(4, t);
  EXPECT_EQ(p4.L, 210);
  EXPECT_EQ(p4.phiL, 48);
  auto p20 = primorial_info(20, t);  // exceeds 64 bits
  EXPECT_GT(p20.L, BigInt(std::numeric_limits<std::uint64_t>::max()));
  EXPECT_THROW(primorial_info(0, t), ArgumentError);
}

TEST(Primorial, ExtraTermSignsAndClamp) {
  PrimeTable t(2);
  // L - 2 phi(L) - 2v is -2 for v = 1 and v = 2, so the raw term is nonpositive.
  for (unsigned v : {1u, 2u})
    for (unsigned K = 3; K < 40; ++K) {
      EXPECT_LE(primorial_extra_raw(K, 1, primorial_info(v, t)), 0.0);
      EXPECT_EQ(primorial_extra(K, 1, Refinement::primorial(v), t), 0.0);
    }
  // v = 3: coefficient 30 - 16 - 6 = 8 and q = floor((K - alpha - 2) / 11).
  EXPECT_EQ(primorial_extra_raw(13, 1, primorial_info(3, t)), 0.0);  // q = 0, K - alpha = 12
  // K - alpha = 13: q = 1, T = 12, term = 0 + 8 * 1 * (12 - 11) = 8.
  EXPECT_EQ(primorial_extra_raw(14, 1, primorial_info(3, t)), 8.0);
  // K - alpha = 14: q = 1, T = 13, term = 8 * (13 - 11) = 16.
  EXPECT_EQ(primorial_extra_raw(15, 1, primorial_info(3, t)), 16.0);
  // K - alpha = 30: q = 2, T = 29, term = 8*11*2*1/2 + 8*2*(29 - 22) = 88 + 112.
  EXPECT_EQ(primorial_extra_raw(31, 1, primorial_info(3, t)), 200.0);
}

TEST(PrimeBound, InequalityAndMinimality) {
  PrimeTable t(2);
  struct Case {
    std::uint64_t N;
    unsigned K, alpha;
    double m_tilde;
  };
  const std::vector<Case> cases{{30, 3, 1, 18}, {1024, 5, 2, 80}, {16384, 7, 2, 250}, {16384, 12, 3, 400},
                                {1 << 20, 20, 3, 1200}};
  for (const auto& c : cases)
    for (auto ref : {Refinement::basic(), Refinement::primorial(3), Refinement::primorial(4)}) {
      const auto b = prime_bound_t(c.N, c.K, c.alpha, c.m_tilde, ref, t);
      const double extra = primorial_extra(c.K, c.alpha, ref, t);
      ASSERT_GE(b.t, 2u);
      EXPECT_GT(prime_bound_lhs(t[b.t], c.N, c.K, c.alpha, extra), c.m_tilde);
      if (b.t > 2) {
        EXPECT_LE(prime_bound_lhs(t[b.t - 1], c.N, c.K, c.alpha, extra), c.m_tilde);
      }
      EXPECT_EQ(b.B, t[b.t + c.K - c.alpha - 1]);
    }
}

TEST(PrimeBound, TrivialStartAtThree) {
  PrimeTable t(2);
  // With m_tilde below the left side at p = 3 the scan stops immediately.
  const auto b = prime_bound_t(100, 4, 1, 5.0, Refinement::basic(), t);
  EXPECT_EQ(b.t, 2u);
  EXPECT_EQ(b.B, t[2 + 4 - 1 - 1]);
}

TEST(PrimeBound, PrimorialNeverLooser) {
  PrimeTable t(2);
  CounterRng rng(7);
  int strictly_tighter = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const unsigned alpha = 1 + static_cast<unsigned>(rng.below(3));
    const unsigned K = alpha + 2 + static_cast<unsigned>(rng.below(40));
    const std::uint64_t N = 16 + rng.below(1u << 20);
    const double m_tilde = 50 + static_cast<double>(rng.below(20000));
    const auto basic = prime_bound_t(N, K, alpha, m_tilde, Refinement::basic(), t);
    for (unsigned v : {1u, 2u, 3u, 4u}) {
      const auto ref = prime_bound_t(N, K, alpha, m_tilde, Refinement::primorial(v), t);
      EXPECT_LE(ref.t, basic.t);
      EXPECT_LE(ref.B, basic.B);
      strictly_tighter += ref.B < basic.B;
    }
  }
  EXPECT_GT(strictly_tighter, 0);
}

TEST(PrimeBound, DegenerateDesign) {
  PrimeTable t(2);
  EXPECT_THROW(prime_bound_t(30, 2, 1, 12, Refinement::basic(), t), DegenerateError);
  EXPECT_THROW(prime_bound_t(30, 1, 1, 12, Refinement::basic(), t), DegenerateError);
}

TEST(MulSat, SaturatesOnlyAboveCap) {
  EXPECT_EQ(mul_sat(6, 7, 100), 42u);
  EXPECT_EQ(mul_sat(60, 7, 100), 100u);
  EXPECT_EQ(mul_sat(std::uint64_t{1} << 40, std::uint64_t{1} << 40, ~std::uint64_t{0}), ~std::uint64_t{0});
  EXPECT_EQ(root_down(1u << 20, 2) <= 1024.0, true);
  EXPECT_GT(root_down(1u << 20, 2), 1023.999);
}
