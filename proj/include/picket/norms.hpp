#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "picket/errors.hpp"

namespace picket {

/// Indices of the k largest-magnitude entries; ties go to the smaller index.
inline std::vector<std::size_t> top_k_indices(std::span<const std::complex<double>> v, std::size_t k) {
  k = std::min(k, v.size());
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto before = [&](std::size_t a, std::size_t b) {
    const double ma = std::abs(v[a]), mb = std::abs(v[b]);
    return ma != mb ? ma > mb : a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), before);
  idx.resize(k);
  return idx;
}

/// ||v - v_k^opt||_p for p in {1, 2}: the p-norm of everything outside the
/// k largest entries.
inline double optimal_k_term_error(std::span<const std::complex<double>> v, std::size_t k, int p) {
  if (p != 1 && p != 2) throw ArgumentError("optimal_k_term_error: p must be 1 or 2");
  std::vector<char> kept(v.size(), 0);
  for (auto i : top_k_indices(v, k)) kept[i] = 1;
  double acc = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (kept[i]) continue;
    const double a = std::abs(v[i]);
    acc += p == 1 ? a : a * a;
  }
  return p == 1 ? acc : std::sqrt(acc);
}

inline double l2_distance(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b) {
  if (a.size() != b.size()) throw ArgumentError("l2_distance: size mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc);
}

}  // namespace picket
