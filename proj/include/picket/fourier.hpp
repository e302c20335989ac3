#pragma once

// Fourier-side measurement: the base channel M f_hat is obtained from
// m - K + 1 time samples of f by one short transform per modulus.
//
// Convention: f_hat = F f with (F y)_w = sum_t y_t e^{-2 pi i w t / L} / sqrt(L),
// L = N_tilde. A spectrum of bandwidth N occupies [0, N) and is zero on
// [N, N_tilde).

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "picket/errors.hpp"
#include "picket/fft.hpp"
#include "picket/matrix.hpp"
#include "picket/norms.hpp"
#include "picket/recovery.hpp"
#include "picket/rng.hpp"

namespace picket {

namespace detail {
__extension__ typedef unsigned __int128 u128;
inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}
}  // namespace detail

/// Time point t = (num / den) N_tilde, i.e. angle 2 pi num / den; always reduced.
struct SamplePoint {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double angle() const { return 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den); }
  auto operator<=>(const SamplePoint&) const = default;
};

struct SamplingSchedule {
  std::vector<std::vector<SamplePoint>> grids;  // grids[j][l] = l / s_j, l in [0, s_j)
  std::size_t distinct = 0;

  /// Time index l N_tilde / s_j, available when N_tilde fits in 64 bits.
  static std::uint64_t time_index(const SamplePoint& p, std::uint64_t n_tilde) { return p.num * (n_tilde / p.den); }
};

inline SamplingSchedule sampling_schedule(const CoherentMatrix& M) {
  SamplingSchedule out;
  std::vector<SamplePoint> all;
  for (std::size_t j = 0; j < M.K(); ++j) {
    const std::uint64_t s = M.modulus(j);
    std::vector<SamplePoint> grid(s);
    for (std::uint64_t l = 0; l < s; ++l) {
      const std::uint64_t g = std::gcd(l, s);
      grid[l] = l == 0 ? SamplePoint{0, 1} : SamplePoint{l / g, s / g};
    }
    all.insert(all.end(), grid.begin(), grid.end());
    out.grids.push_back(std::move(grid));
  }
  std::sort(all.begin(), all.end());
  out.distinct = static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
  return out;
}

/// f on every grid of the schedule, one vector per modulus.
using GridSamples = std::vector<CVector>;

struct SampledSignal {
  GridSamples samples;
  std::size_t evaluations = 0;  // distinct time points evaluated
};

/// Evaluate f = F^{-1} f_hat at the schedule points directly from the
/// spectrum, one evaluation per distinct point: O(N) each.
inline SampledSignal sample_from_spectrum(const CoherentMatrix& M, const SamplingSchedule& sched,
                                          std::span<const Complex> spectrum) {
  if (spectrum.size() > M.N())
    throw ArgumentError("sample_from_spectrum: spectrum longer than the bandwidth N");
  const double scale = 1.0 / std::sqrt(static_cast<double>(M.moduli().N_tilde()));
  std::map<SamplePoint, Complex> cache;
  SampledSignal out;
  for (const auto& grid : sched.grids) {
    CVector vals(grid.size());
    for (std::size_t l = 0; l < grid.size(); ++l) {
      const SamplePoint p = grid[l];
      auto it = cache.find(p);
      if (it == cache.end()) {
        Complex acc{0.0};
        for (std::uint64_t w = 0; w < spectrum.size(); ++w) {
          if (spectrum[w] == Complex{0.0}) continue;
          const std::uint64_t r = detail::mulmod(w, p.num, p.den);
          acc += spectrum[w] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(p.den));
        }
        it = cache.emplace(p, acc * scale).first;
      }
      vals[l] = it->second;
    }
    out.samples.push_back(std::move(vals));
  }
  out.evaluations = cache.size();
  return out;
}

/// Read the schedule points out of a full time-domain vector of length N_tilde.
inline SampledSignal sample_from_time(const CoherentMatrix& M, const SamplingSchedule& sched,
                                      std::span<const Complex> f) {
  auto nt = M.n_tilde_u64();
  if (!nt || f.size() != *nt) throw ArgumentError("sample_from_time: signal length must equal N_tilde");
  SampledSignal out;
  std::vector<SamplePoint> seen;
  for (const auto& grid : sched.grids) {
    CVector vals(grid.size());
    for (std::size_t l = 0; l < grid.size(); ++l) {
      vals[l] = f[SamplingSchedule::time_index(grid[l], *nt)];
      seen.push_back(grid[l]);
    }
    out.samples.push_back(std::move(vals));
  }
  std::sort(seen.begin(), seen.end());
  out.evaluations = static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
  return out;
}

/// Base channel M f_hat from time samples. For modulus s_j, row (j, h) is the
/// aliased sum over w = h mod s_j, which equals
///   (sqrt(N_tilde) / s_j) sum_l f(l N_tilde / s_j) e^{-2 pi i h l / s_j}.
inline CVector aliased_measure(const CoherentMatrix& M, const GridSamples& samples) {
  if (samples.size() != M.K()) throw ArgumentError("aliased_measure: one sample grid per modulus required");
  const double root = std::sqrt(static_cast<double>(M.moduli().N_tilde()));
  CVector base(M.rows());
  for (std::size_t j = 0; j < M.K(); ++j) {
    const std::uint64_t s = M.modulus(j);
    if (samples[j].size() != s) throw ArgumentError("aliased_measure: grid " + std::to_string(j) + " has wrong length");
    DftPlan plan(s, Direction::forward);
    CVector spec(s);
    plan.execute_raw(samples[j], spec);
    const double scale = root / static_cast<double>(s);
    for (std::uint64_t h = 0; h < s; ++h) base[M.row_index(j, h)] = spec[h] * scale;
  }
  return base;
}

/// Spectrum with planted spikes plus complex Gaussian noise of the given
/// per-entry standard deviation.
inline CVector synthesize_spectrum(std::uint64_t N, std::span<const std::pair<std::uint64_t, Complex>> spikes,
                                   double noise, std::uint64_t seed) {
  if (N < 2) throw ArgumentError("synthesize_spectrum: N must be >= 2");
  CVector f(N, Complex{0.0});
  if (noise > 0) {
    CounterRng rng(seed);
    const double sd = noise / std::sqrt(2.0);
    for (auto& v : f) v = {sd * rng.normal(), sd * rng.normal()};
  }
  for (auto [n, v] : spikes) {
    if (n >= N) throw ArgumentError("synthesize_spectrum: spike index outside [0, N)");
    f[n] += v;
  }
  return f;
}

struct SftReport {
  RecoveryResult recovery;
  std::size_t base_samples = 0;        // time samples behind the base channel only
  std::size_t predicted_samples = 0;   // m - K + 1
  double base_channel_deviation = 0;   // max |aliased - direct| over rows
  double error_l2 = 0;                 // ||f_hat - z||_2
  double best_k_l2 = 0;                // ||f_hat - f_hat_k^opt||_2
  double tail_l1 = 0;                  // ||f_hat - f_hat_{k/eps}^opt||_1
  double bound = 0;                    // best_k_l2 + 22 eps tail_l1 / sqrt(k)
  bool within_bound = false;
};

/// End-to-end run on a spectrum of bandwidth N: base channel from time
/// samples, bit channels simulated from the spectrum, then recovery.
inline SftReport sft_demo(const CoherentMatrix& M, std::span<const Complex> spectrum, std::size_t k,
                          double epsilon = 1.0) {
  if (spectrum.size() != M.N()) throw ArgumentError("sft_demo: spectrum length must equal the bandwidth N");
  if (!(epsilon > 0 && epsilon <= 1)) throw ArgumentError("sft_demo: epsilon must lie in (0, 1]");
  SftReport rep;
  const auto sched = sampling_schedule(M);
  const auto sampled = sample_from_spectrum(M, sched, spectrum);
  rep.base_samples = sampled.evaluations;
  rep.predicted_samples = M.rows() - M.K() + 1;

  MeasurementVector y = measure(M, spectrum);
  const CVector base = aliased_measure(M, sampled.samples);
  for (std::size_t r = 0; r < base.size(); ++r)
    rep.base_channel_deviation = std::max(rep.base_channel_deviation, std::abs(base[r] - y.channels[0][r]));
  y.channels[0] = base;

  const double alpha = std::max(1u, binary_coherence(M, M.N()));
  rep.recovery = approximate(M, y, k, Guarantee{alpha, epsilon, 1.0});
  const CVector z = rep.recovery.approx.dense(M.N());
  rep.error_l2 = l2_distance(spectrum, z);
  rep.best_k_l2 = optimal_k_term_error(spectrum, k, 2);
  rep.tail_l1 = optimal_k_term_error(spectrum, static_cast<std::size_t>(static_cast<double>(k) / epsilon), 1);
  rep.bound = rep.best_k_l2 + 22.0 * epsilon * rep.tail_l1 / std::sqrt(static_cast<double>(k));
  rep.within_bound = rep.error_l2 <= rep.bound * (1 + 1e-12) + 1e-12;
  return rep;
}

}  // namespace picket
