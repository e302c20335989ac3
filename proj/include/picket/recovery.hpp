#pragma once

// Sublinear-time sparse recovery from (M row-tensor B_N) x, where B_N is the
// bit-test matrix. Works with any column-access matrix: the implicit picket
// fence matrix or a dense nonnegative (K, c_min, alpha)-coherent matrix.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "picket/errors.hpp"
#include "picket/fft.hpp"
#include "picket/matrix.hpp"
#include "picket/norms.hpp"
#include "picket/rng.hpp"

namespace picket {

/// ceil(log2 N) for N >= 1.
inline unsigned ceil_log2(std::uint64_t N) {
  return N <= 1 ? 0u : static_cast<unsigned>(std::bit_width(N - 1));
}

/// Row 0 is all ones; row i >= 1 holds bit (i - 1) of the column index.
class BitTestMatrix {
 public:
  explicit BitTestMatrix(std::uint64_t N) : N_(N), bits_(ceil_log2(N)) {
    if (N < 2) throw ArgumentError("bit_test: N must be >= 2");
  }
  std::uint64_t N() const { return N_; }
  unsigned bits() const { return bits_; }
  std::size_t rows() const { return 1 + bits_; }
  bool entry(std::size_t i, std::uint64_t j) const {
    if (i == 0) return true;
    return (j >> (i - 1)) & 1u;
  }

 private:
  std::uint64_t N_;
  unsigned bits_;
};

inline BitTestMatrix bit_test(std::uint64_t N) { return BitTestMatrix(N); }

/// Dense nonnegative matrix with at least K nonzeros per column, every
/// nonzero >= c_min and pairwise column inner products <= alpha.
class GeneralizedCoherent {
 public:
  /// `columns[n]` is column n (length m).
  GeneralizedCoherent(std::vector<std::vector<double>> columns, unsigned K, double c_min, double alpha)
      : cols_(std::move(columns)), K_(K), c_min_(c_min), alpha_(alpha) {
    if (cols_.empty()) throw ArgumentError("GeneralizedCoherent: no columns");
    m_ = cols_.front().size();
    if (!(c_min > 0)) throw ArgumentError("GeneralizedCoherent: c_min must be positive");
    nonzeros_.resize(cols_.size());
    top_.resize(cols_.size());
    for (std::size_t n = 0; n < cols_.size(); ++n) {
      if (cols_[n].size() != m_) throw ArgumentError("GeneralizedCoherent: ragged columns");
      for (std::size_t r = 0; r < m_; ++r) {
        const double v = cols_[n][r];
        if (v < 0) throw ArgumentError("GeneralizedCoherent: negative entry");
        if (v > 0) {
          if (v < c_min) throw ArgumentError("GeneralizedCoherent: nonzero entry below c_min");
          nonzeros_[n].emplace_back(r, v);
        }
      }
      if (nonzeros_[n].size() < K)
        throw ArgumentError("GeneralizedCoherent: column " + std::to_string(n) + " has fewer than K nonzeros");
      auto sorted = nonzeros_[n];
      std::stable_sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a.second > b.second; });
      sorted.resize(K);
      top_[n] = std::move(sorted);
    }
    for (std::size_t a = 0; a < cols_.size(); ++a)
      for (std::size_t b = a + 1; b < cols_.size(); ++b) {
        double ip = 0;
        for (auto [r, v] : nonzeros_[a]) ip += v * cols_[b][r];
        if (ip > alpha + 1e-12) throw ArgumentError("GeneralizedCoherent: column inner product exceeds alpha");
      }
  }

  std::size_t rows() const { return m_; }
  std::size_t K() const { return K_; }
  std::size_t columns() const { return cols_.size(); }
  double c_min() const { return c_min_; }
  double alpha() const { return alpha_; }
  double entry(std::size_t r, std::size_t n) const { return cols_[n][r]; }

  template <class F>
  void for_each_nonzero(std::uint64_t n, F&& f) const {
    for (auto [r, v] : nonzeros_[n]) f(r, v);
  }
  /// The K rows with the largest entries in column n (ties by row index).
  template <class F>
  void for_each_top(std::uint64_t n, F&& f) const {
    for (auto [r, v] : top_[n]) f(r, v);
  }

 private:
  std::vector<std::vector<double>> cols_;
  std::size_t m_ = 0;
  unsigned K_;
  double c_min_;
  double alpha_;
  std::vector<std::vector<std::pair<std::size_t, double>>> nonzeros_;
  std::vector<std::vector<std::pair<std::size_t, double>>> top_;
};

/// channels[0] = M x; channels[1 + i] = (M row-tensor (B_N)_{i+1}) x.
struct MeasurementVector {
  std::uint64_t N = 0;
  std::uint64_t m = 0;
  std::uint64_t K = 0;
  std::vector<CVector> channels;

  const CVector& base() const { return channels.at(0); }
  const CVector& bit(unsigned i) const { return channels.at(1 + i); }
  unsigned bit_channels() const { return static_cast<unsigned>(channels.size()) - 1; }
  std::size_t scalar_count() const { return channels.size() * m; }
};

template <class Matrix>
MeasurementVector measure(const Matrix& M, std::span<const Complex> x) {
  if (x.size() < 2) throw ArgumentError("measure: signal must have at least 2 entries");
  MeasurementVector out;
  out.N = x.size();
  out.m = M.rows();
  out.K = M.K();
  const unsigned bits = ceil_log2(out.N);
  out.channels.assign(1 + bits, CVector(out.m, Complex{0.0}));
  for (std::uint64_t n = 0; n < x.size(); ++n) {
    const Complex xn = x[n];
    if (xn == Complex{0.0}) continue;
    M.for_each_nonzero(n, [&](std::size_t r, double v) {
      const Complex c = v * xn;
      out.channels[0][r] += c;
      for (std::uint64_t b = n, i = 0; b; b >>= 1, ++i)
        if (b & 1u) out.channels[1 + i][r] += c;
    });
  }
  return out;
}

inline MeasurementVector measure(const CoherentMatrix& M, std::span<const Complex> x) {
  if (auto nt = M.n_tilde_u64(); nt && x.size() > *nt) throw ArgumentError("measure: signal longer than N_tilde");
  return measure<CoherentMatrix>(M, x);
}

/// Median of a multiset; even sizes take the mean of the two central values.
inline double median_of(std::span<double> values) {
  if (values.empty()) throw ArgumentError("median_of: empty multiset");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

/// Median (real and imaginary parts separately) of the K scaled measurements
/// in the rows where column n is largest.
template <class Matrix>
Complex median_estimate(const Matrix& M, std::span<const Complex> base, std::uint64_t n,
                        std::vector<double>& re, std::vector<double>& im) {
  re.clear();
  im.clear();
  M.for_each_top(n, [&](std::size_t r, double v) {
    const Complex e = base[r] / v;
    re.push_back(e.real());
    im.push_back(e.imag());
  });
  if (re.size() < M.K()) throw ArgumentError("median_estimate: column has fewer than K nonzeros");
  return {median_of(re), median_of(im)};
}

template <class Matrix>
Complex median_estimate(const Matrix& M, std::span<const Complex> base, std::uint64_t n) {
  std::vector<double> re, im;
  return median_estimate(M, base, n, re, im);
}

struct SparseEntry {
  std::uint64_t index;
  Complex value;
};

/// At most 2k entries, sorted by descending magnitude then ascending index.
struct SparseApproximation {
  std::vector<SparseEntry> entries;

  CVector dense(std::uint64_t N) const {
    CVector z(N, Complex{0.0});
    for (const auto& e : entries) z.at(e.index) = e.value;
    return z;
  }
};

/// Parameters for the accuracy guarantee; used only to flag inputs outside
/// k < K eps c_min^2 / (4 alpha).
struct Guarantee {
  double alpha = 1;
  double epsilon = 1;
  double c_min = 1;
};

struct RecoveryResult {
  SparseApproximation approx;
  bool precondition_warning = false;
  std::size_t candidates = 0;           // rows decoded to an in-range index
  std::size_t out_of_range = 0;         // rows decoded to an index >= N
  std::size_t estimated = 0;            // indices whose multiplicity exceeded K/2
};

inline bool guarantee_holds(std::size_t K, std::size_t k, const Guarantee& g) {
  return static_cast<double>(k) < static_cast<double>(K) * g.epsilon * g.c_min * g.c_min / (4.0 * g.alpha);
}

/// Decode one candidate index per row from the bit channels, keep indices
/// seen in more than K/2 rows, estimate each by a median, and return the 2k
/// largest estimates.
template <class Matrix>
RecoveryResult approximate(const Matrix& M, const MeasurementVector& y, std::size_t k,
                           std::optional<Guarantee> guarantee = std::nullopt) {
  if (k < 1) throw ArgumentError("approximate: k must be >= 1");
  if (y.m != M.rows() || y.K != M.K() || y.channels.size() != 1 + static_cast<std::size_t>(ceil_log2(y.N)))
    throw ArgumentError("approximate: measurement shape does not match the matrix");
  for (const auto& c : y.channels)
    if (c.size() != y.m) throw ArgumentError("approximate: channel length mismatch");

  RecoveryResult out;
  if (guarantee) out.precondition_warning = !guarantee_holds(M.K(), k, *guarantee);

  const unsigned bits = y.bit_channels();
  const auto& base = y.base();
  std::vector<std::uint64_t> cand;
  cand.reserve(y.m);
  for (std::size_t j = 0; j < y.m; ++j) {
    std::uint64_t n = 0;
    for (unsigned i = 0; i < bits; ++i) {
      const Complex b = y.channels[1 + i][j];
      if (std::abs(b) > std::abs(base[j] - b)) n |= std::uint64_t{1} << i;
    }
    if (n < y.N)
      cand.push_back(n);
    else
      ++out.out_of_range;
  }
  out.candidates = cand.size();
  std::sort(cand.begin(), cand.end());

  std::vector<SparseEntry> found;
  std::vector<double> re, im;
  re.reserve(M.K());
  im.reserve(M.K());
  for (std::size_t i = 0; i < cand.size();) {
    std::size_t e = i;
    while (e < cand.size() && cand[e] == cand[i]) ++e;
    if (2 * (e - i) > M.K()) {
      ++out.estimated;
      const Complex z = median_estimate(M, base, cand[i], re, im);
      if (z != Complex{0.0}) found.push_back({cand[i], z});
    }
    i = e;
  }
  std::sort(found.begin(), found.end(), [](const SparseEntry& a, const SparseEntry& b) {
    const double ma = std::abs(a.value), mb = std::abs(b.value);
    return ma != mb ? ma > mb : a.index < b.index;
  });
  if (found.size() > 2 * k) found.resize(2 * k);
  out.approx.entries = std::move(found);
  return out;
}

// ---------------------------------------------------------------------------
// Randomized row selection

inline double subsample_log_term(std::uint64_t N, double sigma) {
  return std::log(2.0 * static_cast<double>(N) / (1.0 - sigma));
}

/// beta = ceil(28.56 (m / K) ln(2N / (1 - sigma))).
inline std::uint64_t subsample_size(std::uint64_t m, std::uint64_t K, std::uint64_t N, double sigma) {
  if (!(sigma >= 2.0 / 3.0 && sigma < 1.0)) throw ArgumentError("subsample_rows: sigma must lie in [2/3, 1)");
  return static_cast<std::uint64_t>(
      std::ceil(28.56 * static_cast<double>(m) / static_cast<double>(K) * subsample_log_term(N, sigma)));
}

/// beta row indices drawn uniformly with replacement; duplicates are kept.
inline std::vector<std::size_t> subsample_rows(std::uint64_t m, std::uint64_t K, std::uint64_t N, double sigma,
                                               std::uint64_t seed) {
  const std::uint64_t beta = subsample_size(m, K, N, sigma);
  CounterRng rng(seed);
  std::vector<std::size_t> rows(beta);
  for (auto& r : rows) r = static_cast<std::size_t>(rng.below(m));
  return rows;
}

template <class Matrix>
std::vector<std::size_t> subsample_rows(const Matrix& M, std::uint64_t N, double sigma, std::uint64_t seed) {
  return subsample_rows(M.rows(), M.K(), N, sigma, seed);
}

struct SubsampleCheck {
  double required = 0;               // 21 ln(2N / (1 - sigma))
  std::uint64_t min_retained = 0;    // min over columns of selected nonzero rows
  bool coverage = false;             // every column retains >= required rows
  bool majority_accurate = false;    // every column: > half of its top ceil(required) selections are accurate
};

/// Checks both properties promised for a random row multiset on one signal.
/// A selected row is accurate for n when |(Mx)_r / M_{r,n} - x_n| <=
/// eps ||x - x_{k/eps}^opt||_1 / k.
template <class Matrix>
SubsampleCheck check_subsample(const Matrix& M, std::span<const std::size_t> rows, std::span<const Complex> x,
                               std::size_t k, double epsilon, double sigma) {
  SubsampleCheck out;
  const std::uint64_t N = x.size();
  out.required = 21.0 * subsample_log_term(N, sigma);
  const auto need = static_cast<std::size_t>(std::ceil(out.required));
  const auto tail_k = static_cast<std::size_t>(std::floor(static_cast<double>(k) / epsilon));
  const double tol = epsilon * optimal_k_term_error(x, tail_k, 1) / static_cast<double>(k);
  const double slack = 1e-12 * (1.0 + tol);

  auto y = measure(M, x).channels[0];
  // count of selections per row
  std::vector<std::uint32_t> times(M.rows(), 0);
  for (auto r : rows) ++times.at(r);

  out.min_retained = ~std::uint64_t{0};
  out.majority_accurate = true;
  std::vector<std::pair<std::size_t, double>> col;
  std::vector<double> weight(M.rows(), 0.0);
  std::vector<std::size_t> picks;
  for (std::uint64_t n = 0; n < N; ++n) {
    col.clear();
    M.for_each_nonzero(n, [&](std::size_t r, double v) { col.emplace_back(r, v); });
    std::uint64_t retained = 0;
    for (auto [r, v] : col) retained += times[r];
    out.min_retained = std::min(out.min_retained, retained);
    if (retained < need) {
      out.majority_accurate = false;
      continue;
    }
    // The `need` selections with the largest entries in column n; equal
    // entries keep draw order.
    for (auto [r, v] : col) weight[r] = v;
    picks.clear();
    for (auto r : rows)
      if (weight[r] > 0.0) picks.push_back(r);
    std::stable_sort(picks.begin(), picks.end(), [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
    std::size_t good = 0;
    for (std::size_t i = 0; i < need; ++i)
      if (std::abs(y[picks[i]] / weight[picks[i]] - x[n]) <= tol + slack) ++good;
    if (2 * good <= need) out.majority_accurate = false;
    for (auto [r, v] : col) weight[r] = 0.0;
  }
  out.coverage = static_cast<double>(out.min_retained) >= out.required;
  return out;
}

// ---------------------------------------------------------------------------
// Binary serialization: four little-endian u64 header words
// (N, m, K, channel count) then each channel as interleaved re/im doubles.

namespace detail {
inline void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}
inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ArgumentError("measurement file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}
inline void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }
}  // namespace detail

inline void write_measurements(const MeasurementVector& y, std::ostream& os) {
  detail::put_u64(os, y.N);
  detail::put_u64(os, y.m);
  detail::put_u64(os, y.K);
  detail::put_u64(os, y.channels.size());
  for (const auto& ch : y.channels)
    for (auto v : ch) {
      detail::put_f64(os, v.real());
      detail::put_f64(os, v.imag());
    }
}

inline MeasurementVector read_measurements(std::istream& is) {
  MeasurementVector y;
  y.N = detail::get_u64(is);
  y.m = detail::get_u64(is);
  y.K = detail::get_u64(is);
  const std::uint64_t count = detail::get_u64(is);
  if (y.N < 2 || count != 1 + ceil_log2(y.N)) throw ArgumentError("measurement file: bad channel count");
  if (y.m > (std::uint64_t{1} << 32)) throw ArgumentError("measurement file: implausible row count");
  y.channels.assign(count, CVector(y.m));
  for (auto& ch : y.channels)
    for (auto& v : ch) {
      const double re = detail::get_f64(is);
      const double im = detail::get_f64(is);
      v = {re, im};
    }
  return y;
}

}  // namespace picket
