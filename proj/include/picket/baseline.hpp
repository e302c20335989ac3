#pragma once

// Random comparison: rows of the N x N inverse DFT drawn without replacement
// until the coherence of the column-normalized row subset certifies RIP_2 of
// order k, i.e. (k - 1) mu <= epsilon.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <future>
#include <vector>

#include "picket/errors.hpp"
#include "picket/fft.hpp"
#include "picket/rng.hpp"

namespace picket {

struct BaselineTrial {
  std::uint64_t N = 0;
  unsigned k = 0;
  double epsilon = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> rows_selected;  // draw order
  std::uint64_t m_stop = 0;
  double mu_at_stop = 0;
};

/// Normalized inner product of columns j and l of the row subset depends only
/// on d = j - l: |sum_{r in rows} e^{2 pi i r d / N}| / |rows|. One transform of
/// the row indicator yields all differences at once.
class DifferenceCoherence {
 public:
  explicit DifferenceCoherence(std::uint64_t N) : N_(N), plan_(N, Direction::inverse), indicator_(N), sums_(N) {}

  void add_row(std::uint64_t r) {
    if (r >= N_) throw ArgumentError("DifferenceCoherence: row out of range");
    if (indicator_[r] != Complex{}) throw ArgumentError("DifferenceCoherence: row already selected");
    indicator_[r] = 1.0;
    ++count_;
  }

  std::uint64_t rows() const { return count_; }

  /// max over d != 0; 0 for the full matrix.
  double mu() {
    if (count_ == 0) throw ArgumentError("DifferenceCoherence: no rows selected");
    plan_.execute_raw(indicator_, sums_);
    double best = 0;
    for (std::uint64_t d = 1; d < N_; ++d) best = std::max(best, std::abs(sums_[d]));
    return best / static_cast<double>(count_);
  }

 private:
  std::uint64_t N_;
  DftPlan plan_;
  CVector indicator_, sums_;
  std::uint64_t count_ = 0;
};

/// N / ((N - 1) mu^2 + 1) with mu = epsilon / (k - 1).
inline double welch_row_floor(std::uint64_t N, unsigned k, double epsilon) {
  const double mu = epsilon / (k - 1.0);
  return static_cast<double>(N) / ((static_cast<double>(N) - 1.0) * mu * mu + 1.0);
}

/// Transform roundoff (~1e-16) must not decide boundary cases such as a
/// single row, whose coherence is exactly 1.
inline constexpr double kCertifySlack = 1e-12;

inline BaselineTrial run_trial(std::uint64_t N, unsigned k, double epsilon, std::uint64_t seed) {
  if (N < 2 || !std::has_single_bit(N)) throw ArgumentError("run_trial: N must be a power of two >= 2");
  if (k < 2) throw ArgumentError("run_trial: k must be >= 2");
  if (!(epsilon > 0)) throw ArgumentError("run_trial: epsilon must be positive");
  BaselineTrial t{N, k, epsilon, seed, {}, 0, 0};
  std::vector<std::uint64_t> perm(N);
  for (std::uint64_t i = 0; i < N; ++i) perm[i] = i;
  CounterRng rng(seed);
  DifferenceCoherence coh(N);
  for (std::uint64_t m = 0; m < N; ++m) {
    // Lazy Fisher-Yates: position m receives a uniform pick from the rest.
    std::swap(perm[m], perm[m + rng.below(N - m)]);
    coh.add_row(perm[m]);
    t.rows_selected.push_back(perm[m]);
    const double mu = m + 1 == N ? 0.0 : coh.mu();
    if ((k - 1) * mu <= epsilon + kCertifySlack) {
      t.m_stop = m + 1;
      t.mu_at_stop = mu;
      return t;
    }
  }
  return t;  // unreachable: the full unitary matrix has mu = 0
}

/// Seed of trial `i`; independent of k so sweeps over k share row orders.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t i) { return CounterRng(base_seed, i).next_u64(); }

struct BaselineResult {
  std::vector<BaselineTrial> trials;  // in trial order
  std::uint64_t min_m_stop = 0;
  double median_m_stop = 0;
};

inline BaselineResult run_baseline(std::uint64_t N, unsigned k, double epsilon, unsigned trials, std::uint64_t base_seed,
                                   unsigned threads = 1) {
  if (trials < 1) throw ArgumentError("run_baseline: trials must be >= 1");
  BaselineResult res;
  res.trials.resize(trials);
  if (threads <= 1) {
    for (unsigned i = 0; i < trials; ++i) res.trials[i] = run_trial(N, k, epsilon, trial_seed(base_seed, i));
  } else {
    for (unsigned lo = 0; lo < trials; lo += threads) {
      std::vector<std::future<BaselineTrial>> batch;
      for (unsigned i = lo; i < std::min(trials, lo + threads); ++i)
        batch.push_back(std::async(std::launch::async, run_trial, N, k, epsilon, trial_seed(base_seed, i)));
      for (unsigned i = 0; i < batch.size(); ++i) res.trials[lo + i] = batch[i].get();
    }
  }
  std::vector<std::uint64_t> ms;
  for (const auto& t : res.trials) ms.push_back(t.m_stop);
  std::sort(ms.begin(), ms.end());
  res.min_m_stop = ms.front();
  const std::size_t h = ms.size() / 2;
  res.median_m_stop = ms.size() % 2 ? static_cast<double>(ms[h]) : 0.5 * static_cast<double>(ms[h - 1] + ms[h]);
  return res;
}

}  // namespace picket
