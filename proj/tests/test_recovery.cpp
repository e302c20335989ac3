#include <gtest/gtest.h>

#include <chrono>
#include <map>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "picket/recovery.hpp"

using namespace picket;

namespace {

using u64 = std::uint64_t;

CoherentMatrix make(std::vector<u64> s, u64 N) { return build_matrix(ModulusSet(std::move(s), N)); }

std::vector<std::vector<double>> dense_rows(const std::vector<u64>& s, u64 N) {
  std::vector<std::vector<double>> out;
  for (const auto& row : oracle::dense_matrix(s, N)) out.emplace_back(row.begin(), row.end());
  return out;
}

/// Algorithm 1 written directly against dense matrices: dense measurements,
/// std::map multiplicities, full sorts for medians and the final selection.
std::vector<std::pair<u64, Complex>> dense_algorithm(const std::vector<std::vector<double>>& A, std::size_t K,
                                                     const CVector& x, std::size_t k) {
  const u64 N = x.size();
  const auto B = oracle::bit_test_dense(N);
  const auto y = oracle::matvec(oracle::row_tensor(A, B), x);
  const std::size_t m = A.size();
  std::map<u64, std::size_t> mult;
  for (std::size_t j = 0; j < m; ++j) {
    u64 n = 0;
    for (std::size_t i = 1; i < B.size(); ++i) {
      const Complex b = y[i * m + j], base = y[j];
      if (std::abs(b) > std::abs(base - b)) n += u64{1} << (i - 1);
    }
    if (n < N) ++mult[n];
  }
  std::vector<std::pair<u64, Complex>> est;
  for (auto [n, c] : mult) {
    if (2 * c <= K) continue;
    std::vector<std::pair<double, std::size_t>> col;
    for (std::size_t r = 0; r < m; ++r)
      if (A[r][n] > 0) col.emplace_back(-A[r][n], r);
    std::sort(col.begin(), col.end());
    std::vector<double> re, im;
    for (std::size_t i = 0; i < K; ++i) {
      const Complex e = y[col[i].second] / A[col[i].second][n];
      re.push_back(e.real());
      im.push_back(e.imag());
    }
    const Complex z{oracle::median_sorted(re), oracle::median_sorted(im)};
    if (z != Complex{0.0}) est.emplace_back(n, z);
  }
  std::sort(est.begin(), est.end(), [](auto a, auto b) {
    return std::abs(a.second) != std::abs(b.second) ? std::abs(a.second) > std::abs(b.second) : a.first < b.first;
  });
  if (est.size() > 2 * k) est.resize(2 * k);
  return est;
}

CVector random_sparse(CounterRng& rng, u64 N, std::size_t k) {
  CVector x(N, Complex{0.0});
  std::size_t placed = 0;
  while (placed < k) {
    const u64 n = rng.below(N);
    if (x[n] != Complex{0.0}) continue;
    x[n] = Complex{rng.normal(), rng.normal()};
    ++placed;
  }
  return x;
}

/// |x_n| ~ n^-decay on a random permutation with random phases.
CVector power_law(CounterRng& rng, u64 N, double decay) {
  std::vector<u64> perm(N);
  std::iota(perm.begin(), perm.end(), u64{0});
  for (u64 i = N - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  CVector x(N);
  for (u64 i = 0; i < N; ++i) x[perm[i]] = std::pow(double(i + 1), -decay) * rng.unit_phase();
  return x;
}

const std::vector<u64> kPrimes9{11, 13, 17, 19, 23, 29, 31, 37, 41};

}  // namespace

TEST(BitTest, Rows) {
  auto B = bit_test(8);
  ASSERT_EQ(B.rows(), 4u);
  const int expect[4][8] = {{1, 1, 1, 1, 1, 1, 1, 1}, {0, 1, 0, 1, 0, 1, 0, 1}, {0, 0, 1, 1, 0, 0, 1, 1},
                            {0, 0, 0, 0, 1, 1, 1, 1}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 8; ++j) EXPECT_EQ(B.entry(i, j), expect[i][j] == 1);
  auto B2 = bit_test(2);
  EXPECT_EQ(B2.rows(), 2u);
  EXPECT_TRUE(B2.entry(0, 0));
  EXPECT_FALSE(B2.entry(1, 0));
  EXPECT_TRUE(B2.entry(1, 1));
  const std::vector<bool> col5{B.entry(0, 5), B.entry(1, 5), B.entry(2, 5), B.entry(3, 5)};
  EXPECT_EQ(col5, (std::vector<bool>{true, true, false, true}));
  EXPECT_EQ(bit_test(9).rows(), 5u);
  EXPECT_THROW(bit_test(1), ArgumentError);
}

TEST(Measure, ZeroAndSingleCoordinate) {
  auto M = make({2, 3, 5}, 8);
  CVector zero(8);
  auto y0 = measure(M, zero);
  EXPECT_EQ(y0.channels.size(), 4u);
  EXPECT_EQ(y0.scalar_count(), 10u * 3 + 10);
  for (const auto& ch : y0.channels)
    for (auto v : ch) EXPECT_EQ(v, Complex{0.0});

  CVector e5(8);
  e5[5] = 1.0;
  auto y = measure(M, e5);
  const std::vector<std::size_t> rows{M.row_index(0, 1), M.row_index(1, 2), M.row_index(2, 0)};
  for (std::size_t r = 0; r < M.rows(); ++r) {
    const bool on = std::find(rows.begin(), rows.end(), r) != rows.end();
    EXPECT_EQ(y.base()[r], Complex(on ? 1.0 : 0.0));
    EXPECT_EQ(y.bit(0)[r], Complex(on ? 1.0 : 0.0));
    EXPECT_EQ(y.bit(1)[r], Complex(0.0));
    EXPECT_EQ(y.bit(2)[r], Complex(on ? 1.0 : 0.0));
  }
}

TEST(Measure, MatchesDenseRowTensorProduct) {
  CounterRng rng(3);
  for (const auto& [s, N] : std::vector<std::pair<std::vector<u64>, u64>>{
           {{2, 3, 5}, 30}, {{5, 7, 9, 11, 13}, 16}, {{3, 4, 5, 7}, 50}, {{7, 8, 9}, 63}}) {
    auto M = make(s, N);
    CVector x(N);
    for (auto& v : x) v = {rng.normal(), rng.normal()};
    auto y = measure(M, x);
    auto ref = oracle::matvec(oracle::row_tensor(dense_rows(s, N), oracle::bit_test_dense(N)), x);
    ASSERT_EQ(ref.size(), y.scalar_count());
    for (std::size_t c = 0; c < y.channels.size(); ++c)
      for (std::size_t r = 0; r < y.m; ++r) ASSERT_LT(std::abs(y.channels[c][r] - ref[c * y.m + r]), 1e-12);
  }
}

TEST(Median, OddAndEven) {
  std::vector<double> a{1, 2, 100};
  EXPECT_EQ(median_of(a), 2.0);
  std::vector<double> b{100, 3, 1, 2};
  EXPECT_EQ(median_of(b), 2.5);
  std::vector<double> c{};
  EXPECT_THROW(median_of(c), ArgumentError);
}

TEST(Median, SingleCoordinateIsExact) {
  auto M = make({5, 7, 9, 11, 13}, 16);
  for (u64 n = 0; n < 16; ++n) {
    CVector x(16);
    x[n] = {1.25, -3.5};
    auto y = measure(M, x);
    EXPECT_EQ(median_estimate(M, y.base(), n), x[n]);
  }
}

TEST(Approximate, ZeroSignalGivesEmptyOutput) {
  auto M = make({5, 7, 9, 11, 13}, 16);
  CVector x(16);
  auto r = approximate(M, measure(M, x), 1);
  EXPECT_TRUE(r.approx.entries.empty());
}

TEST(Approximate, OneSparseIsExact) {
  auto M = make({5, 7, 9, 11, 13}, 16);
  CVector x(16);
  x[5] = {0.75, 2.0};
  auto r = approximate(M, measure(M, x), 1, Guarantee{1, 1, 1});
  EXPECT_FALSE(r.precondition_warning);
  ASSERT_EQ(r.approx.entries.size(), 1u);
  EXPECT_EQ(r.approx.entries[0].index, 5u);
  EXPECT_EQ(r.approx.entries[0].value, x[5]);
}

TEST(Approximate, DecodesEverySingleCoordinate) {
  auto M = make({5, 7, 9, 11, 13}, 16);
  for (u64 n = 0; n < 16; ++n) {
    CVector x(16);
    x[n] = -4.0;
    auto y = measure(M, x);
    for (std::size_t j = 0; j < y.m; ++j) {
      if (y.base()[j] == Complex{0.0}) continue;
      u64 dec = 0;
      for (unsigned i = 0; i < y.bit_channels(); ++i)
        if (std::abs(y.bit(i)[j]) > std::abs(y.base()[j] - y.bit(i)[j])) dec |= u64{1} << i;
      EXPECT_EQ(dec, n);
    }
    auto r = approximate(M, y, 1);
    ASSERT_EQ(r.approx.entries.size(), 1u);
    EXPECT_EQ(r.approx.entries[0].index, n);
  }
}

TEST(Approximate, MatchesDenseStepByStepOracle) {
  CounterRng rng(17);
  const u64 N = 64;
  auto M = make(kPrimes9, N);
  const auto A = dense_rows(kPrimes9, N);
  for (int trial = 0; trial < 40; ++trial) {
    CVector x = random_sparse(rng, N, 1 + rng.below(3));
    const double noise = trial % 2 ? 0.02 : 0.3;
    for (auto& v : x) v += noise * Complex{rng.normal(), rng.normal()} / double(N);
    const std::size_t k = 1 + rng.below(3);
    auto got = approximate(M, measure(M, x), k).approx.entries;
    auto ref = dense_algorithm(A, kPrimes9.size(), x, k);
    ASSERT_EQ(got.size(), ref.size()) << "trial " << trial;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].index, ref[i].first);
      EXPECT_LT(std::abs(got[i].value - ref[i].second), 1e-12);
    }
  }
}

TEST(Approximate, TwoSpikesAboveNoiseAreFound) {
  CounterRng rng(23);
  const u64 N = 64;
  auto M = make(kPrimes9, N);
  for (int trial = 0; trial < 20; ++trial) {
    CVector x(N);
    for (auto& v : x) v = 1e-3 * Complex{rng.normal(), rng.normal()};
    const u64 a = rng.below(N);
    u64 b = rng.below(N);
    while (b == a) b = rng.below(N);
    x[a] = 5.0;
    x[b] = Complex{0, -4.0};
    auto r = approximate(M, measure(M, x), 2);
    std::vector<u64> idx;
    for (const auto& e : r.approx.entries) idx.push_back(e.index);
    EXPECT_NE(std::find(idx.begin(), idx.end(), a), idx.end());
    EXPECT_NE(std::find(idx.begin(), idx.end(), b), idx.end());
  }
}

TEST(Approximate, OutputOrderingAndShape) {
  CounterRng rng(29);
  auto M = make(kPrimes9, 64);
  CVector x = random_sparse(rng, 64, 4);
  auto r = approximate(M, measure(M, x), 2);
  ASSERT_LE(r.approx.entries.size(), 4u);
  for (std::size_t i = 1; i < r.approx.entries.size(); ++i) {
    const auto& p = r.approx.entries[i - 1];
    const auto& q = r.approx.entries[i];
    EXPECT_TRUE(std::abs(p.value) > std::abs(q.value) ||
                (std::abs(p.value) == std::abs(q.value) && p.index < q.index));
  }
  auto y = measure(M, x);
  y.channels.pop_back();
  EXPECT_THROW(approximate(M, y, 2), ArgumentError);
  EXPECT_THROW(approximate(M, measure(M, x), 0), ArgumentError);
  // k above K eps / (4 alpha) is flagged but still computed.
  auto w = approximate(M, measure(M, x), 3, Guarantee{1, 1, 1});
  EXPECT_TRUE(w.precondition_warning);
}

TEST(Approximate, EqualMagnitudesBreakTiesByIndex) {
  auto M = make(kPrimes9, 64);
  CVector x(64);
  x[40] = 1.0;
  x[7] = -1.0;
  x[20] = Complex{0, 1};
  auto r = approximate(M, measure(M, x), 1);
  ASSERT_EQ(r.approx.entries.size(), 2u);
  EXPECT_EQ(r.approx.entries[0].index, 7u);
  EXPECT_EQ(r.approx.entries[1].index, 20u);
}

TEST(Approximate, InstanceOptimalBoundOnCompressibleSignals) {
  CounterRng rng(31);
  const u64 N = 64;
  auto M = make(kPrimes9, N);
  const unsigned alpha = binary_coherence(M, N);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 1 + trial % 2;
    const double eps = 1.0;
    ASSERT_GT(kPrimes9.size(), 4 * k * alpha / eps);
    CVector x = power_law(rng, N, 0.8 + 0.1 * (trial % 10));
    auto z = approximate(M, measure(M, x), k).approx.dense(N);
    const double lhs = l2_distance(x, z);
    const double rhs = oracle::tail_norm(x, k, 2) + 22 * eps * oracle::tail_norm(x, std::size_t(k / eps), 1) /
                                                         std::sqrt(double(k));
    EXPECT_LE(lhs, rhs) << "trial " << trial;
  }
}

TEST(Lemmas, FewLargeInterferenceEntries) {
  // At most k alpha / c_min^2 of the K entries of M'(K, n) x reach c_min ||x||_1 / k.
  CounterRng rng(37);
  const u64 N = 64;
  auto M = make(kPrimes9, N);
  const unsigned alpha = binary_coherence(M, N);
  for (int trial = 0; trial < 300; ++trial) {
    const u64 n = rng.below(N);
    const std::size_t k = 1 + rng.below(kPrimes9.size() / alpha);
    CVector x(N);
    for (auto& v : x) v = trial % 3 ? Complex{rng.normal(), rng.normal()} : Complex{0.0};
    if (trial % 3 == 0)
      for (int i = 0; i < 3; ++i) x[rng.below(N)] = 10.0 * rng.unit_phase();
    x[n] = 0;  // M' omits column n
    double l1 = 0;
    for (auto v : x) l1 += std::abs(v);
    auto y = measure(M, x).base();
    std::size_t big = 0;
    for (auto r : M.support(n)) big += std::abs(y[r]) >= l1 / double(k);
    EXPECT_LE(big, k * alpha);
  }
}

TEST(Lemmas, MajorityOfScaledEntriesAreAccurate) {
  // c = 4: more than K/2 of the K scaled entries lie within eps ||x - x_{k/eps}||_1 / k.
  CounterRng rng(41);
  const u64 N = 64;
  auto M = make(kPrimes9, N);
  const unsigned alpha = binary_coherence(M, N);
  const std::size_t K = kPrimes9.size();
  for (int trial = 0; trial < 300; ++trial) {
    const double eps = trial % 2 ? 1.0 : 0.5;
    const std::size_t k = 1;
    ASSERT_GT(double(K), 4.0 * k * alpha / eps);
    CVector x = power_law(rng, N, 0.5 + 0.01 * (trial % 50));
    const double tol = eps * oracle::tail_norm(x, std::size_t(k / eps), 1) / double(k);
    auto y = measure(M, x).base();
    for (u64 n = 0; n < N; ++n) {
      std::size_t good = 0;
      for (auto r : M.support(n)) good += std::abs(y[r] - x[n]) <= tol * (1 + 1e-12);
      ASSERT_GT(2 * good, K) << "trial " << trial << " n " << n;
    }
  }
}

TEST(Generalized, ValidationAndWeightedRecovery) {
  EXPECT_THROW(GeneralizedCoherent({{1, 0}, {0.2, 1}}, 1, 0.5, 1.0), ArgumentError);  // below c_min
  EXPECT_THROW(GeneralizedCoherent({{1, 0}, {1, 0}}, 1, 0.5, 0.5), ArgumentError);    // inner product
  EXPECT_THROW(GeneralizedCoherent({{1, 0}, {0, 1}}, 2, 0.5, 1.0), ArgumentError);    // too few nonzeros
  EXPECT_THROW(GeneralizedCoherent({{-1, 0}, {0, 1}}, 1, 0.5, 1.0), ArgumentError);

  // Row-weighted picket fence: weights in [0.6, 1], so c_min = 0.6 and alpha stays <= binary alpha.
  CounterRng rng(43);
  const u64 N = 64;
  const auto A = dense_rows(kPrimes9, N);
  std::vector<double> w(A.size());
  for (auto& v : w) v = 0.6 + 0.4 * rng.uniform();
  std::vector<std::vector<double>> cols(N, std::vector<double>(A.size()));
  std::vector<std::vector<double>> weighted = A;
  for (std::size_t r = 0; r < A.size(); ++r)
    for (u64 n = 0; n < N; ++n) {
      weighted[r][n] = A[r][n] * w[r];
      cols[n][r] = weighted[r][n];
    }
  GeneralizedCoherent G(cols, kPrimes9.size(), 0.6, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    CVector x = random_sparse(rng, N, 1 + trial % 2);
    if (trial >= 10)
      for (auto& v : x) v += 0.01 * Complex{rng.normal(), rng.normal()};
    const std::size_t k = 1 + trial % 2;
    auto got = approximate(G, measure(G, x), k).approx.entries;
    auto ref = dense_algorithm(weighted, kPrimes9.size(), x, k);
    ASSERT_EQ(got.size(), ref.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].index, ref[i].first);
      EXPECT_LT(std::abs(got[i].value - ref[i].second), 1e-12);
    }
    if (trial < 10) {
      ASSERT_FALSE(got.empty());
      auto z = approximate(G, measure(G, x), k).approx.dense(N);
      EXPECT_LT(l2_distance(x, z), 1e-12);
    }
  }
}

TEST(Subsample, SizeFormula) {
  EXPECT_EQ(subsample_size(30, 5, 64, 2.0 / 3.0), 1020u);
  EXPECT_EQ(subsample_size(5, 5, 64, 2.0 / 3.0), u64(std::ceil(28.56 * std::log(384.0))));
  EXPECT_LT(subsample_size(30, 5, 64, 0.9), subsample_size(30, 5, 64, 0.99));
  EXPECT_LT(subsample_size(30, 5, 64, 0.99), subsample_size(30, 5, 64, 0.999));
  EXPECT_THROW(subsample_size(30, 5, 64, 0.5), ArgumentError);
  EXPECT_THROW(subsample_size(30, 5, 64, 1.0), ArgumentError);
  auto rows = subsample_rows(30, 5, 64, 2.0 / 3.0, 9);
  EXPECT_EQ(rows.size(), 1020u);
  for (auto r : rows) EXPECT_LT(r, 30u);
  EXPECT_EQ(rows, subsample_rows(30, 5, 64, 2.0 / 3.0, 9));
  EXPECT_NE(rows, subsample_rows(30, 5, 64, 2.0 / 3.0, 10));
}

TEST(Serialization, RoundTripAndTruncation) {
  CounterRng rng(47);
  auto M = make({5, 7, 9, 11, 13}, 16);
  CVector x(16);
  for (auto& v : x) v = {rng.normal(), rng.normal()};
  auto y = measure(M, x);
  std::stringstream buf;
  write_measurements(y, buf);
  EXPECT_EQ(buf.str().size(), 4 * 8 + y.scalar_count() * 16);
  auto back = read_measurements(buf);
  EXPECT_EQ(back.N, y.N);
  EXPECT_EQ(back.m, y.m);
  EXPECT_EQ(back.K, y.K);
  EXPECT_EQ(back.channels, y.channels);
  // First header word is N = 16 in little-endian order.
  EXPECT_EQ(static_cast<unsigned char>(buf.str()[0]), 16);
  std::stringstream cut(buf.str().substr(0, 100));
  EXPECT_THROW(read_measurements(cut), ArgumentError);
}
