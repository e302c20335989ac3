#pragma once

// Exact integer number theory shared by the matrix construction and the
// modulus design search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "picket/errors.hpp"

namespace picket {

using BigInt = boost::multiprecision::cpp_int;

/// Primes with a leading 1: index 0 holds 1, index l >= 1 holds the l-th prime.
class PrimeTable {
 public:
  explicit PrimeTable(std::uint64_t limit = 2) {
    if (limit < 2) throw ArgumentError("primes_up_to: limit must be >= 2");
    sieve(limit);
  }

  std::uint64_t operator[](std::size_t l) const { return values_.at(l); }
  std::size_t size() const { return values_.size(); }
  std::uint64_t limit() const { return limit_; }
  std::span<const std::uint64_t> values() const { return values_; }

  /// Largest index currently in the table.
  std::size_t max_index() const { return values_.size() - 1; }

  /// Extend until the table holds at least `index + 1` entries.
  void ensure_index(std::size_t index) {
    while (values_.size() <= index) sieve(limit_ * 2);
  }

  /// Extend until every prime <= `value` is present.
  void ensure_value(std::uint64_t value) {
    if (value > limit_) sieve(std::max(value, limit_ * 2));
  }

  /// Primality by table lookup when possible, trial division otherwise.
  bool is_prime(std::uint64_t n) const {
    if (n < 2) return false;
    if (n <= limit_) return std::binary_search(values_.begin() + 1, values_.end(), n);
    for (std::size_t l = 1; l < values_.size(); ++l) {
      std::uint64_t p = values_[l];
      if (p > n / p) return true;
      if (n % p == 0) return false;
    }
    for (std::uint64_t d = limit_ + 1; d <= n / d; ++d)
      if (n % d == 0) return false;
    return true;
  }

  /// Distinct prime factors of n in increasing order (trial division).
  std::vector<std::uint64_t> prime_factors(std::uint64_t n) const {
    std::vector<std::uint64_t> out;
    auto take = [&](std::uint64_t p) {
      if (n % p == 0) {
        out.push_back(p);
        while (n % p == 0) n /= p;
      }
    };
    for (std::size_t l = 1; l < values_.size() && values_[l] <= n / values_[l]; ++l)
      take(values_[l]);
    if (n > 1 && (values_.empty() || n > values_.back())) {
      for (std::uint64_t d = values_.back() + 1; d <= n / d; ++d) take(d);
    }
    if (n > 1) out.push_back(n);
    return out;
  }

 private:
  void sieve(std::uint64_t limit) {
    std::vector<bool> composite(limit + 1, false);
    values_.assign(1, 1);
    for (std::uint64_t i = 2; i <= limit; ++i) {
      if (composite[i]) continue;
      values_.push_back(i);
      for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    limit_ = limit;
  }

  std::vector<std::uint64_t> values_;
  std::uint64_t limit_ = 0;
};

inline PrimeTable primes_up_to(std::uint64_t limit) { return PrimeTable(limit); }

/// True iff every pair of entries has gcd 1.
inline bool pairwise_coprime(std::span<const std::uint64_t> values) {
  for (auto v : values)
    if (v < 2) throw ArgumentError("pairwise_coprime: entries must be >= 2");
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      if (std::gcd(values[i], values[j]) != 1) return false;
  return true;
}

struct PrimorialInfo {
  unsigned v = 0;
  BigInt L;     // p_1 * ... * p_v
  BigInt phiL;  // (p_1 - 1) * ... * (p_v - 1)
};

inline PrimorialInfo primorial_info(unsigned v, PrimeTable& primes) {
  if (v < 1) throw ArgumentError("primorial_info: v must be >= 1");
  primes.ensure_index(v);
  PrimorialInfo info{v, 1, 1};
  for (unsigned i = 1; i <= v; ++i) {
    info.L *= primes[i];
    info.phiL *= primes[i] - 1;
  }
  return info;
}

/// Which tail estimate a prime/row bound uses. v == 0 is the plain bound;
/// v >= 1 adds the primorial correction built from the first v primes.
struct Refinement {
  unsigned v = 0;
  static Refinement basic() { return {0}; }
  static Refinement primorial(unsigned v) { return {v}; }
  bool is_basic() const { return v == 0; }
  std::string name() const { return v == 0 ? "basic" : "primorial(" + std::to_string(v) + ")"; }
};

/// N^(1/r) rounded down by a relative slack well above pow()'s error, so that
/// bounds built from it never overshoot.
inline double root_down(std::uint64_t N, unsigned r) {
  double x = std::pow(static_cast<double>(N), 1.0 / static_cast<double>(r));
  return x * (1.0 - 1e-12);
}

/// Extra tail term of the primorial refinement, before clamping:
///   (L - 2phi - 2v)(phi + v) q (q - 1) / 2 + (L - 2phi - 2v) q (T - (phi + v) q)
/// with T = K - alpha - 1 and q = floor((K - alpha - 2) / (phi + v)).
/// Negative for v in {1, 2} since L - 2phi(L) - 2v < 0 there.
inline double primorial_extra_raw(unsigned K, unsigned alpha, const PrimorialInfo& info) {
  if (K < alpha + 2) return 0.0;
  const BigInt width = info.phiL + info.v;
  const BigInt q = BigInt(K - alpha - 2) / width;
  const BigInt coef = info.L - 2 * info.phiL - 2 * BigInt(info.v);
  const BigInt T = BigInt(K - alpha - 1);
  const BigInt twice = coef * width * q * (q - 1) + 2 * coef * q * (T - width * q);
  return static_cast<double>(twice) / 2.0;
}

/// Both tail estimates are valid lower bounds, so the refined bound keeps
/// whichever is larger.
inline double primorial_extra(unsigned K, unsigned alpha, Refinement ref, PrimeTable& primes) {
  if (ref.is_basic()) return 0.0;
  return std::max(0.0, primorial_extra_raw(K, alpha, primorial_info(ref.v, primes)));
}

/// Left side of the largest-prime inequality evaluated at candidate prime p.
inline double prime_bound_lhs(std::uint64_t p, std::uint64_t N, unsigned K, unsigned alpha,
                              double extra) {
  const double T = static_cast<double>(K - alpha - 1);
  return static_cast<double>(p) * T + T * (T - 1.0) + extra +
         static_cast<double>(alpha + 1) * root_down(N, alpha + 1);
}

struct PrimeBound {
  std::size_t t = 0;    // prime index of p_t
  std::uint64_t B = 0;  // p_{t + K - alpha - 1}; strict upper bound on every modulus
};

/// Smallest prime index t >= 2 whose prime makes the tail/head inequality
/// exceed `m_tilde`, and the modulus cap B derived from it.
inline PrimeBound prime_bound_t(std::uint64_t N, unsigned K, unsigned alpha, double m_tilde,
                                Refinement ref, PrimeTable& primes) {
  if (K <= alpha + 1)
    throw DegenerateError("prime_bound_t: requires K > alpha + 1 (got K=" + std::to_string(K) +
                          ", alpha=" + std::to_string(alpha) + ")");
  const double extra = primorial_extra(K, alpha, ref, primes);
  const double T = static_cast<double>(K - alpha - 1);
  // lhs is increasing in p; the threshold gives a starting point for the scan.
  const double rest = prime_bound_lhs(0, N, K, alpha, extra);
  const double need = (m_tilde - rest) / T;
  if (need > 9e15) throw ArgumentError("prime_bound_t: bound exceeds representable range");
  std::uint64_t start = need < 3.0 ? 3 : static_cast<std::uint64_t>(need);
  primes.ensure_value(start + 2);
  while (primes[primes.max_index()] <= start) primes.ensure_index(primes.size());
  auto it = std::lower_bound(primes.values().begin() + 2, primes.values().end(), start);
  std::size_t t = static_cast<std::size_t>(it - primes.values().begin());
  while (t > 2 && prime_bound_lhs(primes[t - 1], N, K, alpha, extra) > m_tilde) --t;
  for (;; ++t) {
    primes.ensure_index(t);
    if (prime_bound_lhs(primes[t], N, K, alpha, extra) > m_tilde) break;
  }
  const std::size_t top = t + (K - alpha - 1);
  primes.ensure_index(top);
  return {t, primes[top]};
}

/// Multiply with saturation at `cap`; exact whenever the true product <= cap.
inline std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b, std::uint64_t cap) {
  if (a == 0 || b == 0) return 0;
  if (a > cap / b) return cap;
  return std::min(a * b, cap);
}

}  // namespace picket
