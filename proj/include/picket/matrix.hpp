#pragma once

// Picket-fence measurement matrices: row (j, h) has a one in column n iff
// n = h (mod s_j). The matrix is never stored; a column's support is the
// residue tuple of its index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "picket/errors.hpp"
#include "picket/fft.hpp"
#include "picket/numth.hpp"

namespace picket {

/// Pairwise-coprime increasing moduli together with the bandwidth N they
/// serve. alpha is the unique value with prod(s_1..s_alpha) < N <= prod(s_1..s_{alpha+1}).
class ModulusSet {
 public:
  ModulusSet(std::vector<std::uint64_t> s, std::uint64_t N) : s_(std::move(s)), N_(N) {
    if (s_.empty()) throw ConstructionError("modulus set is empty");
    if (N_ < 2) throw ConstructionError("bandwidth N must be >= 2");
    for (std::size_t j = 0; j < s_.size(); ++j) {
      if (s_[j] < 2) throw ConstructionError("modulus below 2 at position " + std::to_string(j + 1));
      if (j > 0 && s_[j] <= s_[j - 1])
        throw ConstructionError("constraint I violated: moduli must be strictly increasing");
    }
    if (!pairwise_coprime(s_))
      throw ConstructionError("constraint III violated: moduli are not pairwise relatively prime");
    N_tilde_ = 1;
    BigInt prefix = 1;
    bool found = false;
    for (std::size_t a = 0; a < s_.size(); ++a) {
      BigInt next = prefix * s_[a];
      if (!found && prefix < N_ && N_ <= next) {
        alpha_ = static_cast<unsigned>(a);
        found = true;
      }
      prefix = next;
    }
    N_tilde_ = prefix;
    // N_tilde = N is admitted: the design constraints only require N <= prod.
    if (!found)
      throw ConstructionError("constraint II violated: product of all moduli is below N");
  }

  /// Construct and require a specific alpha.
  ModulusSet(std::vector<std::uint64_t> s, std::uint64_t N, unsigned alpha) : ModulusSet(std::move(s), N) {
    if (alpha != alpha_)
      throw ConstructionError("constraint II violated: prod(s_1..s_" + std::to_string(alpha) +
                              ") < N <= prod(s_1..s_" + std::to_string(alpha + 1) + ") does not hold");
  }

  std::span<const std::uint64_t> s() const { return s_; }
  std::uint64_t operator[](std::size_t j) const { return s_[j]; }
  std::size_t K() const { return s_.size(); }
  std::uint64_t N() const { return N_; }
  unsigned alpha() const { return alpha_; }
  const BigInt& N_tilde() const { return N_tilde_; }
  std::uint64_t m() const {
    std::uint64_t total = 0;
    for (auto v : s_) total += v;
    return total;
  }

 private:
  std::vector<std::uint64_t> s_;
  std::uint64_t N_;
  unsigned alpha_ = 0;
  BigInt N_tilde_;
};

struct RowCoord {
  std::size_t j;  // modulus position, 0-based
  std::uint64_t h;
  bool operator==(const RowCoord&) const = default;
};

class CoherentMatrix {
 public:
  explicit CoherentMatrix(ModulusSet moduli) : moduli_(std::move(moduli)) {
    offsets_.reserve(moduli_.K() + 1);
    std::size_t acc = 0;
    for (auto s : moduli_.s()) {
      offsets_.push_back(acc);
      acc += s;
    }
    offsets_.push_back(acc);
  }

  const ModulusSet& moduli() const { return moduli_; }
  std::size_t rows() const { return offsets_.back(); }
  std::size_t K() const { return moduli_.K(); }
  std::uint64_t N() const { return moduli_.N(); }
  std::uint64_t modulus(std::size_t j) const { return moduli_[j]; }

  std::size_t row_index(std::size_t j, std::uint64_t h) const { return offsets_[j] + h; }
  std::size_t row_index(RowCoord c) const { return row_index(c.j, c.h); }

  RowCoord row_coord(std::size_t row) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), row);
    std::size_t j = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    return {j, row - offsets_[j]};
  }

  bool entry(std::size_t row, std::uint64_t n) const {
    auto [j, h] = row_coord(row);
    return n % moduli_[j] == h;
  }

  /// Row indices of the K ones in column n, ordered by modulus.
  void support(std::uint64_t n, std::span<std::size_t> out) const {
    for (std::size_t j = 0; j < K(); ++j) out[j] = offsets_[j] + n % moduli_[j];
  }
  std::vector<std::size_t> support(std::uint64_t n) const {
    std::vector<std::size_t> out(K());
    support(n, out);
    return out;
  }

  // Column access used by the recovery routines. Every column has exactly K
  // unit entries, so the K largest are the whole support.
  template <class F>
  void for_each_nonzero(std::uint64_t n, F&& f) const {
    for (std::size_t j = 0; j < K(); ++j) f(offsets_[j] + n % moduli_[j], 1.0);
  }
  template <class F>
  void for_each_top(std::uint64_t n, F&& f) const {
    for_each_nonzero(n, std::forward<F>(f));
  }

  /// N_tilde as a machine integer, or nullopt when it does not fit.
  std::optional<std::uint64_t> n_tilde_u64() const {
    if (moduli_.N_tilde() > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    return static_cast<std::uint64_t>(moduli_.N_tilde());
  }

 private:
  ModulusSet moduli_;
  std::vector<std::size_t> offsets_;
};

inline CoherentMatrix build_matrix(ModulusSet moduli) { return CoherentMatrix(std::move(moduli)); }

/// Dense 0/1 rows over the first `columns` columns. Test and export use only.
inline std::vector<std::vector<std::uint8_t>> materialize(const CoherentMatrix& M, std::uint64_t columns) {
  std::vector<std::vector<std::uint8_t>> dense(M.rows(), std::vector<std::uint8_t>(columns, 0));
  for (std::size_t r = 0; r < M.rows(); ++r) {
    auto [j, h] = M.row_coord(r);
    for (std::uint64_t n = h; n < columns; n += M.modulus(j)) dense[r][n] = 1;
  }
  return dense;
}

// ---------------------------------------------------------------------------
// Coherence

/// Largest inner product between distinct columns in [0, over_columns).
/// Columns n and l share row (j, .) iff s_j divides |n - l|, so it is enough
/// to scan the differences.
inline unsigned binary_coherence(const CoherentMatrix& M, std::uint64_t over_columns) {
  std::uint64_t limit = over_columns;
  if (auto nt = M.n_tilde_u64(); nt && limit > *nt) throw ArgumentError("binary_coherence: N exceeds N_tilde");
  unsigned best = 0;
  for (std::uint64_t d = 1; d < limit; ++d) {
    unsigned count = 0;
    for (std::size_t j = 0; j < M.K(); ++j) count += (d % M.modulus(j) == 0);
    best = std::max(best, count);
    if (best == M.K()) break;
  }
  return best;
}

/// floor(log_{s_1} N) in exact integer arithmetic.
inline unsigned alpha_log_bound(std::uint64_t s1, std::uint64_t N) {
  unsigned a = 0;
  std::uint64_t p = 1;
  while (p <= N / s1) {
    p *= s1;
    ++a;
  }
  return a;
}

/// Maximum |<c_i, c_j>| over distinct unit-norm columns.
inline double mu_coherence(std::span<const CVector> columns, double norm_tol = 1e-12) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    double nrm = 0;
    for (auto v : columns[i]) nrm += std::norm(v);
    if (std::abs(std::sqrt(nrm) - 1.0) > norm_tol)
      throw ArgumentError("mu_coherence: column " + std::to_string(i) + " is not unit norm");
  }
  double mu = 0;
  for (std::size_t i = 0; i < columns.size(); ++i)
    for (std::size_t l = i + 1; l < columns.size(); ++l) {
      if (columns[i].size() != columns[l].size()) throw ArgumentError("mu_coherence: ragged columns");
      Complex acc = 0;
      for (std::size_t r = 0; r < columns[i].size(); ++r) acc += std::conj(columns[i][r]) * columns[l][r];
      mu = std::max(mu, std::abs(acc));
    }
  return mu;
}

/// Column n scaled to unit norm (entries 1/sqrt(K) on its support).
inline CVector normalized_column(const CoherentMatrix& M, std::uint64_t n) {
  CVector col(M.rows(), 0.0);
  const double w = 1.0 / std::sqrt(static_cast<double>(M.K()));
  for (auto r : M.support(n)) col[r] = w;
  return col;
}

// ---------------------------------------------------------------------------
// Exhaustive structural verifiers. These are oracles: they refuse to run
// outside their guards instead of sampling.

inline constexpr std::uint64_t kSubsetGuardColumns = 30;
inline constexpr unsigned kSubsetGuardSize = 5;
inline constexpr std::uint64_t kRipGuardColumns = 20;
inline constexpr std::uint64_t kDenseTransformGuard = std::uint64_t{1} << 16;

using ColumnSupports = std::vector<std::vector<std::size_t>>;

inline ColumnSupports column_supports(const CoherentMatrix& M, std::uint64_t columns) {
  ColumnSupports out;
  out.reserve(columns);
  for (std::uint64_t n = 0; n < columns; ++n) {
    auto s = M.support(n);
    std::sort(s.begin(), s.end());
    out.push_back(std::move(s));
  }
  return out;
}

namespace detail {
/// Calls fn(subset) for every size-`size` subset of [0, n) in lexicographic order.
/// Stops early when fn returns false; returns false in that case.
inline bool for_each_subset(std::size_t n, std::size_t size, const std::function<bool(std::span<const std::size_t>)>& fn) {
  if (size > n) return true;
  std::vector<std::size_t> idx(size);
  for (std::size_t i = 0; i < size; ++i) idx[i] = i;
  while (true) {
    if (!fn(idx)) return false;
    std::size_t i = size;
    while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t k = i; k < size; ++k) idx[k] = idx[k - 1] + 1;
  }
}

inline bool contains(const std::vector<std::size_t>& sorted, std::size_t v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}
}  // namespace detail

/// d-disjunctness in the identity-submatrix form: every (d+1)-subset of
/// columns has, for each member, a row that is 1 there and 0 on the rest.
/// Supports must be sorted.
inline bool disjunct_check(const ColumnSupports& cols, unsigned d) {
  if (cols.size() > kSubsetGuardColumns || d > kSubsetGuardSize - 1)
    throw FeasibilityError("disjunct_check: enumeration guard exceeded (N <= 30, d <= 4); use a sampling check instead");
  if (d == 0) {
    return std::all_of(cols.begin(), cols.end(), [](const auto& c) { return !c.empty(); });
  }
  return detail::for_each_subset(cols.size(), d + 1, [&](std::span<const std::size_t> subset) {
    for (auto c : subset) {
      bool private_row = false;
      for (auto r : cols[c]) {
        bool shared = false;
        for (auto o : subset)
          if (o != c && detail::contains(cols[o], r)) {
            shared = true;
            break;
          }
        if (!shared) {
          private_row = true;
          break;
        }
      }
      if (!private_row) return false;
    }
    return true;
  });
}

inline bool disjunct_check(const CoherentMatrix& M, unsigned d, std::uint64_t over_columns) {
  if (over_columns > kSubsetGuardColumns)
    throw FeasibilityError("disjunct_check: enumeration guard exceeded (N <= 30, d <= 4); use a sampling check instead");
  return disjunct_check(column_supports(M, over_columns), d);
}

enum class CheckStatus { holds, fails, indeterminate };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::holds: return "holds";
    case CheckStatus::fails: return "fails";
    default: return "indeterminate";
  }
}

/// Neighbourhood expansion: every column set X with |X| <= k touches at least
/// sum_{j < |X|} (K - j alpha) rows. Reports indeterminate when the bound is
/// vacuous at |X| = k (alpha (k - 1) >= 2K).
inline CheckStatus expander_check(const ColumnSupports& cols, unsigned K, unsigned alpha, unsigned k) {
  if (k < 1) throw ArgumentError("expander_check: k must be >= 1");
  if (static_cast<std::uint64_t>(alpha) * (k - 1) >= 2ull * K) return CheckStatus::indeterminate;
  if (cols.size() > kSubsetGuardColumns || k > kSubsetGuardSize)
    throw FeasibilityError("expander_check: enumeration guard exceeded (N <= 30, k <= 5)");
  std::vector<std::size_t> rows;
  for (unsigned size = 1; size <= k; ++size) {
    long long need = 0;
    for (unsigned j = 0; j < size; ++j) need += static_cast<long long>(K) - static_cast<long long>(j) * alpha;
    bool ok = detail::for_each_subset(cols.size(), size, [&](std::span<const std::size_t> subset) {
      rows.clear();
      for (auto c : subset) rows.insert(rows.end(), cols[c].begin(), cols[c].end());
      std::sort(rows.begin(), rows.end());
      auto distinct = std::unique(rows.begin(), rows.end()) - rows.begin();
      return distinct >= need;
    });
    if (!ok) return CheckStatus::fails;
  }
  return CheckStatus::holds;
}

inline CheckStatus expander_check(const CoherentMatrix& M, unsigned k, std::uint64_t over_columns) {
  if (over_columns > kSubsetGuardColumns)
    throw FeasibilityError("expander_check: enumeration guard exceeded (N <= 30, k <= 5)");
  const unsigned alpha = binary_coherence(M, over_columns);
  return expander_check(column_supports(M, over_columns), static_cast<unsigned>(M.K()), alpha, k);
}

struct RipCheck {
  bool holds = true;
  double delta = 0;          // (k - 1) alpha / K
  double min_singular = 1;   // over all k-column submatrices
  double max_singular = 1;
  std::size_t subsets = 0;
};

/// Exhaustive singular-value check of the column-normalized matrix against
/// the Gershgorin interval [sqrt(1 - delta), sqrt(1 + delta)].
inline RipCheck gershgorin_rip_verify(const CoherentMatrix& M, unsigned k, std::uint64_t over_columns) {
  if (over_columns > kRipGuardColumns) throw FeasibilityError("gershgorin_rip_verify: guard exceeded (N <= 20)");
  if (k < 1) throw ArgumentError("gershgorin_rip_verify: k must be >= 1");
  const unsigned alpha = binary_coherence(M, over_columns);
  RipCheck out;
  out.delta = static_cast<double>(k - 1) * alpha / static_cast<double>(M.K());
  if (out.delta >= 1.0) throw DegenerateError("gershgorin_rip_verify: (k-1) alpha / K >= 1, bound is vacuous");
  const double lo = std::sqrt(1.0 - out.delta), hi = std::sqrt(1.0 + out.delta);
  const double tol = 1e-12;
  out.min_singular = hi;
  out.max_singular = lo;
  auto cols = column_supports(M, over_columns);
  const double K = static_cast<double>(M.K());
  detail::for_each_subset(cols.size(), k, [&](std::span<const std::size_t> subset) {
    Eigen::MatrixXd gram(k, k);
    for (unsigned a = 0; a < k; ++a)
      for (unsigned b = 0; b < k; ++b) {
        std::size_t shared = 0;
        for (auto r : cols[subset[a]]) shared += detail::contains(cols[subset[b]], r);
        gram(a, b) = static_cast<double>(shared) / K;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double smin = std::sqrt(std::max(0.0, eig.eigenvalues().minCoeff()));
    const double smax = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
    out.min_singular = std::min(out.min_singular, smin);
    out.max_singular = std::max(out.max_singular, smax);
    ++out.subsets;
    if (smin < lo - tol || smax > hi + tol) out.holds = false;
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Fourier-side column sparsity

struct FourierSparsity {
  std::uint64_t predicted = 0;                // m - K + 1
  std::optional<std::uint64_t> verified;      // nonzero columns of M F, if computed
  std::vector<std::uint64_t> nonzero_columns;
};

/// Zero threshold for entries of M F under the unitary transform.
inline double fourier_zero_threshold(std::uint64_t n_tilde) {
  return 1e-8 * std::sqrt(static_cast<double>(n_tilde));
}

/// Each row r_{j,h} is a picket fence, so r^T F has exactly s_j nonzeros;
/// all rows together touch m - K + 1 frequencies. Verified densely when
/// N_tilde <= 2^16.
inline FourierSparsity fourier_column_sparsity(const CoherentMatrix& M, bool verify = true) {
  FourierSparsity out;
  out.predicted = M.rows() - M.K() + 1;
  auto nt = M.n_tilde_u64();
  if (!verify || !nt || *nt > kDenseTransformGuard) return out;
  const std::uint64_t L = *nt;
  const double thresh = fourier_zero_threshold(L);
  std::vector<double> colmax(L, 0.0);
  DftPlan plan(L, Direction::forward);
  CVector row(L);
  for (std::size_t r = 0; r < M.rows(); ++r) {
    auto [j, h] = M.row_coord(r);
    std::fill(row.begin(), row.end(), Complex{0.0});
    for (std::uint64_t n = h; n < L; n += M.modulus(j)) row[n] = 1.0;
    auto spec = plan.unitary(row);
    for (std::uint64_t w = 0; w < L; ++w) colmax[w] = std::max(colmax[w], std::abs(spec[w]));
  }
  for (std::uint64_t w = 0; w < L; ++w)
    if (colmax[w] > thresh) out.nonzero_columns.push_back(w);
  out.verified = out.nonzero_columns.size();
  return out;
}

// ---------------------------------------------------------------------------

struct BoundsReport {
  unsigned K = 0;
  unsigned alpha_bound = 0;                   // floor(log_{s_1} N)
  std::optional<unsigned> alpha_actual;       // exact over the first N columns
  std::optional<unsigned> disjunct_d;         // floor((K - 1) / alpha)
  unsigned k = 1;
  double rip_epsilon = 0;                     // (k - 1) alpha / K
  std::optional<double> welch_m_min;          // N / ((N - 1) mu^2 + 1)
  std::optional<double> row_lower_bound;      // min{(K/alpha)^2 log_{K/alpha} N, N}, constant 1
  std::uint64_t m = 0;
  std::uint64_t fourier_samples = 0;

  unsigned alpha_used() const { return alpha_actual.value_or(alpha_bound); }
};

inline double welch_bound(std::uint64_t N, double mu) {
  const double n = static_cast<double>(N);
  return n / ((n - 1.0) * mu * mu + 1.0);
}

/// compute_actual = false skips the O(NK) coherence scan and falls back to
/// the logarithmic bound.
inline BoundsReport bounds_report(const CoherentMatrix& M, unsigned k, std::optional<double> mu = std::nullopt,
                                  bool compute_actual = true) {
  if (k < 1) throw ArgumentError("bounds_report: k must be >= 1");
  BoundsReport rep;
  rep.K = static_cast<unsigned>(M.K());
  rep.k = k;
  rep.alpha_bound = alpha_log_bound(M.modulus(0), M.N());
  if (compute_actual) rep.alpha_actual = binary_coherence(M, M.N());
  const unsigned a = rep.alpha_used();
  if (a > 0) rep.disjunct_d = (rep.K - 1) / a;
  rep.rip_epsilon = static_cast<double>(k - 1) * a / rep.K;
  if (mu) rep.welch_m_min = welch_bound(M.N(), *mu);
  if (a > 0 && rep.K > a) {
    const double ratio = static_cast<double>(rep.K) / a;
    rep.row_lower_bound =
        std::min(ratio * ratio * std::log(static_cast<double>(M.N())) / std::log(ratio), static_cast<double>(M.N()));
  }
  rep.m = M.rows();
  rep.fourier_samples = M.rows() - M.K() + 1;
  return rep;
}

// ---------------------------------------------------------------------------
// CSV export for small instances

inline void export_dense_csv(const CoherentMatrix& M, std::uint64_t columns, std::ostream& os) {
  if (columns > kDenseTransformGuard) throw FeasibilityError("export_dense_csv: too many columns for dense export");
  for (const auto& row : materialize(M, columns)) {
    for (std::uint64_t n = 0; n < row.size(); ++n) os << (n ? "," : "") << int(row[n]);
    os << '\n';
  }
}

/// Rows of M F_{N_tilde}; each complex entry is written as two fields re,im.
inline void export_fourier_csv(const CoherentMatrix& M, std::ostream& os) {
  auto nt = M.n_tilde_u64();
  if (!nt || *nt > kDenseTransformGuard) throw FeasibilityError("export_fourier_csv: N_tilde too large for dense export");
  const std::uint64_t L = *nt;
  DftPlan plan(L, Direction::forward);
  CVector row(L);
  os.precision(17);
  for (std::size_t r = 0; r < M.rows(); ++r) {
    auto [j, h] = M.row_coord(r);
    std::fill(row.begin(), row.end(), Complex{0.0});
    for (std::uint64_t n = h; n < L; n += M.modulus(j)) row[n] = 1.0;
    auto spec = plan.unitary(row);
    for (std::uint64_t w = 0; w < L; ++w) os << (w ? "," : "") << spec[w].real() << ',' << spec[w].imag();
    os << '\n';
  }
}

}  // namespace picket
