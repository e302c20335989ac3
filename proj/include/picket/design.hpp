#pragma once

// Exact search for the modulus design problem: minimize m = sum s_j over
// K = ceil(D alpha) strictly increasing, pairwise coprime integers with
// prod(s_1..s_alpha) < N <= prod(s_1..s_{alpha+1}).

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "picket/errors.hpp"
#include "picket/numth.hpp"

namespace picket {

enum class Variant { relprime, prime_powers, primes };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::relprime: return "relprime";
    case Variant::prime_powers: return "prime_powers";
    default: return "primes";
  }
}

inline Variant parse_variant(const std::string& s) {
  if (s == "relprime") return Variant::relprime;
  if (s == "prime_powers") return Variant::prime_powers;
  if (s == "primes") return Variant::primes;
  throw ArgumentError("unknown variant '" + s + "' (expected relprime, prime_powers or primes)");
}

inline constexpr Variant kAllVariants[] = {Variant::relprime, Variant::prime_powers, Variant::primes};

/// 4 / (6 + sqrt 7), the default RIP constant of the sweeps.
inline const double kDefaultEpsilon = 4.0 / (6.0 + std::sqrt(7.0));

struct DesignProblem {
  std::uint64_t N = 0;
  double D = 2;
  Variant variant = Variant::relprime;
  std::optional<unsigned> alpha;

  static DesignProblem from_sparsity(std::uint64_t N, unsigned k, double epsilon, Variant variant,
                                     std::optional<unsigned> alpha = std::nullopt) {
    if (k < 2) throw ArgumentError("design: k must be >= 2 so that D = (k - 1) / eps > 0");
    if (!(epsilon > 0 && epsilon < 1)) throw ArgumentError("design: epsilon must lie in (0, 1)");
    return {N, static_cast<double>(k - 1) / epsilon, variant, alpha};
  }

  void validate() const {
    if (N < 4) throw ArgumentError("design: N must be >= 4");
    if (!(D > 1)) throw ArgumentError("design: D must exceed 1");
  }

  unsigned K_for(unsigned a) const { return static_cast<unsigned>(std::ceil(D * a)); }
  unsigned max_alpha() const { return static_cast<unsigned>(std::bit_width(N) - 1); }  // floor(log2 N)
};

enum class DesignStatus { optimal, infeasible, budget_exhausted };

inline const char* to_string(DesignStatus s) {
  switch (s) {
    case DesignStatus::optimal: return "optimal";
    case DesignStatus::infeasible: return "infeasible";
    default: return "budget_exhausted";
  }
}

struct DesignBounds {
  double lemma9 = 0;        // K N^{1/(alpha+1)} + (K - alpha)(K - alpha - 1)
  double corollary3 = 0;    // best primorial refinement of the above, v in [1, 6]
  double admissible = 0;    // bound used for pruning and alpha skipping
  std::uint64_t warm_m = 0; // consecutive-prime incumbent
  std::uint64_t B = 0;      // strict cap on every modulus
  std::string B_source;     // "prime_bound" or "incumbent"
  std::size_t t = 0;        // prime index behind B (0 when the prime bound is degenerate)
};

struct DesignSolution {
  unsigned alpha = 0;
  unsigned K = 0;
  std::vector<std::uint64_t> s;
  std::uint64_t m = 0;
  std::uint64_t fourier_samples = 0;
  DesignBounds bounds;
  DesignStatus status = DesignStatus::infeasible;
  std::uint64_t nodes_explored = 0;
  double wall_ms = 0;
  std::vector<unsigned> alphas_skipped;  // optimize only
};

struct SearchOptions {
  std::uint64_t node_budget = 100'000'000;
  unsigned threads = 1;  // alpha sweep only; each alpha is searched sequentially
  bool prime_bound = true;  // false: cap moduli by the incumbent argument alone
};

// ---------------------------------------------------------------------------
// Bounds

/// floor(N^(1/r)) computed exactly.
inline std::uint64_t iroot(std::uint64_t N, unsigned r) {
  if (r == 1) return N;
  auto x = static_cast<std::uint64_t>(std::pow(static_cast<double>(N), 1.0 / r));
  auto pow_le = [&](std::uint64_t b) {  // b^r <= N
    std::uint64_t p = 1;
    for (unsigned i = 0; i < r; ++i) {
      if (b != 0 && p > N / b) return false;
      p *= b;
    }
    return p <= N;
  };
  while (x > 0 && !pow_le(x)) --x;
  while (pow_le(x + 1)) ++x;
  return x;
}

/// Product of the first `count` primes < N, i.e. some solution can exist.
inline bool alpha_feasible(std::uint64_t N, unsigned alpha, PrimeTable& primes) {
  primes.ensure_index(alpha + 1);
  std::uint64_t prod = 1;
  for (unsigned i = 1; i <= alpha; ++i) prod = mul_sat(prod, primes[i], N);
  return prod < N;
}

/// Paper's closed-form lower bound with an optional primorial refinement.
inline double lower_bound_m(std::uint64_t N, unsigned K, unsigned alpha, Refinement ref, PrimeTable& primes) {
  if (K <= alpha) throw DegenerateError("lower_bound_m: requires K > alpha");
  const double X = std::pow(static_cast<double>(N), 1.0 / (alpha + 1));
  const double T = static_cast<double>(K - alpha);
  return K * X + T * (T - 1.0) + primorial_extra(K, alpha, ref, primes);
}

/// Best primorial refinement over v in [1, 6].
inline double corollary3_bound(std::uint64_t N, unsigned K, unsigned alpha, PrimeTable& primes) {
  double best = lower_bound_m(N, K, alpha, Refinement::basic(), primes);
  for (unsigned v = 1; v <= 6; ++v) best = std::max(best, lower_bound_m(N, K, alpha, Refinement::primorial(v), primes));
  return best;
}

/// A lower bound on m that holds for every feasible modulus set:
///   head: s_1 + ... + s_{alpha+1} >= (alpha + 1) N^{1/(alpha+1)} (AM-GM);
///   tail: the K - alpha - 1 larger moduli exceed s_{alpha+1} >= a, where a is
///         the least integer with a^{alpha+1} > N, and at most one is even;
///   whole set: distinct smallest prime factors, so m >= p_1 + ... + p_K.
inline double admissible_lower_bound(std::uint64_t N, unsigned K, unsigned alpha, PrimeTable& primes) {
  if (K <= alpha) throw DegenerateError("admissible_lower_bound: requires K > alpha");
  const unsigned T = K - alpha - 1;
  const std::uint64_t a = iroot(N, alpha + 1) + 1;
  double tail = 0;
  if (T > 0) {
    // T smallest integers > a with at most one even among them.
    std::uint64_t first_odd = (a + 1) | 1u;
    const std::uint64_t first_even = (a + 1) % 2 == 0 ? a + 1 : a + 2;
    double odds = 0;
    for (unsigned i = 0; i < T; ++i) odds += static_cast<double>(first_odd + 2 * i);
    double mixed = static_cast<double>(first_even);
    for (unsigned i = 0; i + 1 < T; ++i) mixed += static_cast<double>(first_odd + 2 * i);
    tail = std::min(odds, mixed);
  }
  const double head = (alpha + 1) * root_down(N, alpha + 1);
  primes.ensure_index(K);
  double prime_sum = 0;
  for (unsigned i = 1; i <= K; ++i) prime_sum += static_cast<double>(primes[i]);
  return std::max(head + tail, prime_sum);
}

/// Consecutive primes p_{r+1}, ..., p_{r+K} with the smallest r placing N in
/// the constraint-II window; nullopt when no modulus set can exist.
inline std::optional<std::vector<std::uint64_t>> warm_start(std::uint64_t N, unsigned K, unsigned alpha,
                                                            PrimeTable& primes) {
  if (K <= alpha || !alpha_feasible(N, alpha, primes)) return std::nullopt;
  for (std::size_t r = 0;; ++r) {
    primes.ensure_index(r + K + 1);
    std::uint64_t prod = 1;
    for (unsigned j = 1; j <= alpha + 1; ++j) prod = mul_sat(prod, primes[r + j], N);
    if (prod >= N) {
      std::vector<std::uint64_t> s(K);
      for (unsigned j = 1; j <= K; ++j) s[j - 1] = primes[r + j];
      return s;
    }
  }
}

inline double asymptotic_scale(double N, double D) {
  const double dl = D * std::log(N);
  // Positive and finite whenever D ln N > 1.
  if (!(dl > 1.0)) throw ArgumentError("asymptotic_scale: requires D ln N > 1");
  return D * D * std::log(N) * std::log(N) / std::log(dl);
}

/// Figure-2 feasibility re-check from scratch.
inline bool satisfies_constraints(std::span<const std::uint64_t> s, std::uint64_t N, unsigned alpha) {
  if (s.size() <= alpha) return false;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] < 2) return false;
    if (j > 0 && s[j] <= s[j - 1]) return false;
  }
  if (!pairwise_coprime(s)) return false;
  BigInt head = 1;
  for (unsigned j = 0; j < alpha; ++j) head *= s[j];
  return head < N && head * s[alpha] >= N;
}

/// Per-element bounds of an optimal set: s_j >= p_j, s_1^alpha < N,
/// s_{alpha+1}^{alpha+1} > N and s_K < B.
inline bool element_bounds_hold(std::span<const std::uint64_t> s, std::uint64_t N, unsigned alpha, std::uint64_t B,
                                PrimeTable& primes) {
  if (s.size() <= alpha) return false;
  primes.ensure_index(s.size());
  for (std::size_t j = 0; j < s.size(); ++j)
    if (s[j] < primes[j + 1]) return false;
  BigInt lo = 1, hi = 1;
  for (unsigned e = 0; e < alpha; ++e) lo *= s[0];
  for (unsigned e = 0; e <= alpha; ++e) hi *= s[alpha];
  return lo < N && hi > N && s.back() < B;
}

inline bool in_variant(std::uint64_t v, Variant var, const PrimeTable& primes) {
  if (var == Variant::relprime) return v >= 2;
  auto f = primes.prime_factors(v);
  if (var == Variant::primes) return f.size() == 1 && f[0] == v;
  return f.size() == 1;
}

namespace detail {

/// Candidate values below B with their prime factors as prime-table indices.
struct CandidateSet {
  std::vector<std::uint64_t> values;
  std::vector<std::vector<std::uint32_t>> factors;  // prime indices
  std::vector<std::uint32_t> spf;                    // smallest prime factor index
};

inline CandidateSet build_candidates(std::uint64_t B, Variant var, PrimeTable& primes) {
  primes.ensure_value(B);
  std::vector<std::uint32_t> spf_idx(B, 0);
  for (std::size_t l = 1; l < primes.size() && primes[l] < B; ++l)
    for (std::uint64_t m = primes[l]; m < B; m += primes[l])
      if (spf_idx[m] == 0) spf_idx[m] = static_cast<std::uint32_t>(l);
  CandidateSet c;
  for (std::uint64_t v = 2; v < B; ++v) {
    std::vector<std::uint32_t> f;
    for (std::uint64_t x = v; x > 1;) {
      const std::uint32_t l = spf_idx[x];
      f.push_back(l);
      while (x % primes[l] == 0) x /= primes[l];
    }
    const bool ok = var == Variant::relprime || (f.size() == 1 && (var == Variant::prime_powers || primes[f[0]] == v));
    if (!ok) continue;
    c.values.push_back(v);
    c.spf.push_back(f.front());
    c.factors.push_back(std::move(f));
  }
  return c;
}

class Searcher {
 public:
  Searcher(const CandidateSet& c, std::uint64_t N, unsigned K, unsigned alpha, std::uint64_t budget,
           std::size_t prime_count)
      : c_(c), N_(N), K_(K), alpha_(alpha), budget_(budget), used_(prime_count + 1, 0), class_min_(prime_count + 1) {}

  void run(std::uint64_t incumbent_m, std::vector<std::uint64_t> incumbent) {
    best_ = incumbent_m;
    best_s_ = std::move(incumbent);
    prefix_.clear();
    dfs(0, 0, 0, 1);
  }

  std::uint64_t best() const { return best_; }
  const std::vector<std::uint64_t>& best_s() const { return best_s_; }
  std::uint64_t nodes() const { return nodes_; }
  bool exhausted() const { return exhausted_; }

 private:
  bool admissible(std::size_t i) const {
    for (auto l : c_.factors[i])
      if (used_[l]) return false;
    return true;
  }

  /// Lower bound on the sum of `r` further moduli, all > v and coprime to
  /// the prefix: pairwise coprime values have distinct smallest prime
  /// factors, so take the r cheapest smallest-prime-factor classes.
  double completion(std::size_t from, unsigned r) {
    if (r == 0) return 0;
    touched_.clear();
    double total = 0;
    unsigned taken = 0;
    for (std::size_t i = from; i < c_.values.size() && taken < r; ++i) {
      const std::uint32_t p = c_.spf[i];
      if (class_min_[p] != 0 || !admissible(i)) continue;
      class_min_[p] = 1;
      touched_.push_back(p);
      total += static_cast<double>(c_.values[i]);
      ++taken;
    }
    for (auto p : touched_) class_min_[p] = 0;
    return taken < r ? std::numeric_limits<double>::infinity() : total;
  }

  void dfs(unsigned depth, std::size_t start, std::uint64_t sum, std::uint64_t prod) {
    if (exhausted_) return;
    if (depth == K_) {
      if (sum < best_) {
        best_ = sum;
        best_s_ = prefix_;
      }
      return;
    }
    const unsigned r = K_ - depth;  // positions left including this one
    std::size_t i = start;
    if (depth == alpha_) {
      // s_{alpha+1} must lift the prefix product to at least N.
      const std::uint64_t need = (N_ + prod - 1) / prod;
      i = std::max<std::size_t>(i, std::lower_bound(c_.values.begin(), c_.values.end(), need) - c_.values.begin());
    }
    for (; i < c_.values.size(); ++i) {
      const std::uint64_t v = c_.values[i];
      // r distinct values >= v: monotone in v, so stop scanning.
      if (static_cast<double>(sum) + r * static_cast<double>(v) + 0.5 * r * (r - 1.0) >= static_cast<double>(best_)) break;
      if (depth < alpha_) {
        // The first alpha moduli are increasing, so their product is at least prod * v^(alpha - depth).
        std::uint64_t p = prod;
        for (unsigned e = depth; e < alpha_ && p < N_; ++e) p = mul_sat(p, v, N_);
        if (p >= N_) break;
      }
      if (!admissible(i)) continue;
      if (++nodes_ > budget_) {
        exhausted_ = true;
        return;
      }
      for (auto l : c_.factors[i]) used_[l] = 1;
      const std::uint64_t nprod = mul_sat(prod, v, N_);
      double rest = completion(i + 1, r - 1);
      if (depth + 1 <= alpha_) {
        // Remaining head moduli multiply to >= N / nprod, so the largest is
        // >= its geometric mean g and every later modulus exceeds it too.
        const unsigned h = alpha_ - depth;
        const double g = std::pow(static_cast<double>(N_) / static_cast<double>(nprod), 1.0 / h) * (1 - 1e-12);
        rest = std::max(rest, h * g + (r - 1 - h) * g);
      }
      if (static_cast<double>(sum + v) + rest < static_cast<double>(best_)) {
        prefix_.push_back(v);
        dfs(depth + 1, i + 1, sum + v, nprod);
        prefix_.pop_back();
      }
      for (auto l : c_.factors[i]) used_[l] = 0;
      if (exhausted_) return;
    }
  }

  const CandidateSet& c_;
  std::uint64_t N_;
  unsigned K_, alpha_;
  std::uint64_t budget_;
  std::vector<std::uint8_t> used_;
  std::vector<std::uint8_t> class_min_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::uint64_t> prefix_;
  std::uint64_t best_ = 0;
  std::vector<std::uint64_t> best_s_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Cap B on every modulus of an optimal solution, from the warm-start
/// objective: the prime bound when K > alpha + 1 (smallest over refinements),
/// and in every case m_tilde - (p_1 + ... + p_{K-1}) + 1, since the other K - 1
/// moduli are pairwise coprime and sum to at least the first K - 1 primes.
inline void modulus_cap(std::uint64_t N, unsigned K, unsigned alpha, std::uint64_t m_tilde, PrimeTable& primes,
                        DesignBounds& out, bool use_prime_bound = true) {
  primes.ensure_index(K);
  std::uint64_t low = 0;
  for (unsigned i = 1; i < K; ++i) low += primes[i];
  out.B = m_tilde - low + 1;
  out.B_source = "incumbent";
  out.t = 0;
  if (use_prime_bound && K > alpha + 1) {
    for (auto ref : {Refinement::basic(), Refinement::primorial(3), Refinement::primorial(4), Refinement::primorial(5)}) {
      const auto pb = prime_bound_t(N, K, alpha, static_cast<double>(m_tilde), ref, primes);
      if (pb.B <= out.B) {
        out.B = pb.B;
        out.B_source = "prime_bound";
        out.t = pb.t;
      }
    }
  }
}

/// Exact minimization for one alpha.
inline DesignSolution solve_alpha(const DesignProblem& prob, unsigned alpha, PrimeTable& primes,
                                  const SearchOptions& opts = {}) {
  prob.validate();
  const auto t0 = std::chrono::steady_clock::now();
  DesignSolution sol;
  sol.alpha = alpha;
  sol.K = alpha >= 1 ? prob.K_for(alpha) : 0;
  if (alpha < 1 || alpha > prob.max_alpha() || !alpha_feasible(prob.N, alpha, primes)) {
    sol.status = DesignStatus::infeasible;
    sol.wall_ms = detail::elapsed_ms(t0);
    return sol;
  }
  const unsigned K = sol.K;
  auto warm = warm_start(prob.N, K, alpha, primes);
  if (!warm) {
    sol.status = DesignStatus::infeasible;
    sol.wall_ms = detail::elapsed_ms(t0);
    return sol;
  }
  std::uint64_t m_tilde = 0;
  for (auto v : *warm) m_tilde += v;
  sol.bounds.warm_m = m_tilde;
  sol.bounds.lemma9 = lower_bound_m(prob.N, K, alpha, Refinement::basic(), primes);
  sol.bounds.corollary3 = corollary3_bound(prob.N, K, alpha, primes);
  sol.bounds.admissible = admissible_lower_bound(prob.N, K, alpha, primes);
  modulus_cap(prob.N, K, alpha, m_tilde, primes, sol.bounds, opts.prime_bound);

  const auto cands = detail::build_candidates(sol.bounds.B, prob.variant, primes);
  detail::Searcher search(cands, prob.N, K, alpha, opts.node_budget, primes.size());
  search.run(m_tilde, *warm);
  sol.s = search.best_s();
  sol.m = search.best();
  sol.fourier_samples = sol.m - K + 1;
  sol.nodes_explored = search.nodes();
  sol.status = search.exhausted() ? DesignStatus::budget_exhausted : DesignStatus::optimal;
  sol.wall_ms = detail::elapsed_ms(t0);
  return sol;
}

/// Best solution over all feasible alpha by Fourier sample count m - K + 1
/// (ties to the smaller alpha). An alpha is skipped when its admissible lower
/// bound on the sample count already exceeds the incumbent.
inline DesignSolution optimize(const DesignProblem& prob, PrimeTable& primes, const SearchOptions& opts = {}) {
  prob.validate();
  if (prob.alpha) return solve_alpha(prob, *prob.alpha, primes, opts);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<unsigned> alphas;
  for (unsigned a = 1; a <= prob.max_alpha(); ++a)
    if (alpha_feasible(prob.N, a, primes)) alphas.push_back(a);
  primes.ensure_value(1u << 16);

  // Sample-count lower bound per alpha; the sweep visits alphas in order of
  // that bound so a strong incumbent appears early.
  std::vector<double> lb(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const unsigned K = prob.K_for(alphas[i]);
    lb[i] = admissible_lower_bound(prob.N, K, alphas[i], primes) - K + 1;
  }
  std::vector<std::size_t> order(alphas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return lb[x] < lb[y]; });

  DesignSolution best;
  best.status = DesignStatus::infeasible;
  bool have = false;
  bool any_exhausted = false;
  std::uint64_t total_nodes = 0;
  std::vector<unsigned> skipped;
  auto better = [&](const DesignSolution& s) {
    return !have || s.fourier_samples < best.fourier_samples ||
           (s.fourier_samples == best.fourier_samples && s.alpha < best.alpha);
  };
  auto absorb = [&](DesignSolution s) {
    total_nodes += s.nodes_explored;
    if (s.status == DesignStatus::infeasible) return;
    any_exhausted |= s.status == DesignStatus::budget_exhausted;
    if (better(s)) {
      best = std::move(s);
      have = true;
    }
  };

  if (opts.threads <= 1) {
    for (auto i : order) {
      if (have && lb[i] > static_cast<double>(best.fourier_samples)) {
        skipped.push_back(alphas[i]);
        continue;
      }
      absorb(solve_alpha(prob, alphas[i], primes, opts));
    }
  } else {
    // Each worker owns a copy of the (already grown) prime table; skipping
    // uses only finished results, so the outcome matches the serial sweep.
    std::size_t next = 0;
    while (next < order.size()) {
      std::vector<std::future<DesignSolution>> batch;
      std::vector<std::size_t> ids;
      while (next < order.size() && batch.size() < opts.threads) {
        const auto i = order[next++];
        if (have && lb[i] > static_cast<double>(best.fourier_samples)) {
          skipped.push_back(alphas[i]);
          continue;
        }
        ids.push_back(i);
        batch.push_back(std::async(std::launch::async, [&prob, a = alphas[i], table = primes, opts]() mutable {
          return solve_alpha(prob, a, table, opts);
        }));
      }
      for (auto& f : batch) absorb(f.get());
    }
  }
  std::sort(skipped.begin(), skipped.end());
  best.alphas_skipped = std::move(skipped);
  best.nodes_explored = total_nodes;
  if (have && any_exhausted) best.status = DesignStatus::budget_exhausted;
  best.wall_ms = detail::elapsed_ms(t0);
  return best;
}

// ---------------------------------------------------------------------------
// Integer program export (CPLEX LP text format)

struct IlpManifest {
  std::uint64_t N = 0;
  unsigned K = 0, alpha = 0;
  std::uint64_t B = 0;
  std::string B_source;
  std::size_t binaries = 0;
  std::size_t prime_constraints = 0;  // primes p_k <= B
  std::size_t rows_one_hot = 0, rows_order = 0, rows_window = 0, rows_lower = 0, rows_coprime = 0;
};

inline std::string var_name(unsigned j, std::uint64_t i) { return "s_" + std::to_string(j) + "_" + std::to_string(i); }

/// Writes the program for a fixed alpha. Variables s_j_i (j in [1, K],
/// i in [1, B]) select s_j = i. The strict window side is written as
/// sum ln i <= ln(N - 1) + delta and the other as >= ln N - delta with
/// delta = (ln N - ln(N - 1)) / 4; integer products make both exact.
inline IlpManifest export_ilp(const DesignProblem& prob, unsigned alpha, PrimeTable& primes, std::ostream& os) {
  prob.validate();
  if (alpha < 1 || !alpha_feasible(prob.N, alpha, primes)) throw ArgumentError("export_ilp: alpha is infeasible for N");
  const unsigned K = prob.K_for(alpha);
  auto warm = warm_start(prob.N, K, alpha, primes);
  std::uint64_t m_tilde = 0;
  for (auto v : *warm) m_tilde += v;
  DesignBounds b;
  modulus_cap(prob.N, K, alpha, m_tilde, primes, b);
  const std::uint64_t B = b.B;
  if (static_cast<double>(K) * static_cast<double>(B) > 5e7) throw ArgumentError("export_ilp: K * B exceeds the export limit");
  primes.ensure_value(B);

  IlpManifest man;
  man.N = prob.N;
  man.K = K;
  man.alpha = alpha;
  man.B = B;
  man.B_source = b.B_source;
  man.binaries = static_cast<std::size_t>(K) * B;

  const double lnN = std::log(static_cast<double>(prob.N));
  const double lnN1 = std::log(static_cast<double>(prob.N - 1));
  const double delta = (lnN - lnN1) / 4.0;
  auto ln_coef = [](std::uint64_t i) {
    std::ostringstream s;
    s << std::setprecision(17) << std::log(static_cast<double>(i));
    return s.str();
  };
  auto num = [](double x) {
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
  };

  os << "\\ modulus design program: N = " << prob.N << ", D = " << std::setprecision(17) << prob.D
     << ", alpha = " << alpha << ", K = " << K << ", B = " << B << "\n";
  os << "Minimize\n obj:";
  for (unsigned j = 1; j <= K; ++j)
    for (std::uint64_t i = 1; i <= B; ++i) os << " + " << i << ' ' << var_name(j, i);
  os << "\nSubject To\n";
  // 1: one value per position
  for (unsigned j = 1; j <= K; ++j) {
    os << " one_" << j << ":";
    for (std::uint64_t i = 1; i <= B; ++i) os << " + " << var_name(j, i);
    os << " = 1\n";
    ++man.rows_one_hot;
  }
  // 3: strictly increasing
  for (unsigned j = 1; j < K; ++j) {
    os << " order_" << j << ":";
    for (std::uint64_t i = 1; i <= B; ++i) os << " + " << i << ' ' << var_name(j + 1, i) << " - " << i << ' ' << var_name(j, i);
    os << " >= 1\n";
    ++man.rows_order;
  }
  // 4: product window in logarithms
  os << " window_lo:";
  for (unsigned j = 1; j <= alpha; ++j)
    for (std::uint64_t i = 2; i <= B; ++i) os << " + " << ln_coef(i) << ' ' << var_name(j, i);
  os << " <= " << num(lnN1 + delta) << "\n";
  os << " window_hi:";
  for (unsigned j = 1; j <= alpha + 1; ++j)
    for (std::uint64_t i = 2; i <= B; ++i) os << " + " << ln_coef(i) << ' ' << var_name(j, i);
  os << " >= " << num(lnN - delta) << "\n";
  man.rows_window = 2;
  // 5: s_j >= p_j
  primes.ensure_index(K);
  for (unsigned j = 1; j <= K; ++j) {
    const std::uint64_t pj = primes[j];
    os << " lower_" << j << ":";
    for (std::uint64_t i = 1; i < pj && i <= B; ++i) os << " + " << var_name(j, i);
    os << " = 0\n";
    ++man.rows_lower;
  }
  // 6: each prime divides at most one modulus
  for (std::size_t k = 1; k < primes.size() && primes[k] <= B; ++k) {
    const std::uint64_t p = primes[k];
    os << " coprime_" << k << ":";
    for (unsigned j = 1; j <= K; ++j)
      for (std::uint64_t i = p; i <= B; i += p) os << " + " << var_name(j, i);
    os << " <= 1\n";
    ++man.rows_coprime;
  }
  man.prime_constraints = man.rows_coprime;
  os << "Binary\n";
  for (unsigned j = 1; j <= K; ++j)
    for (std::uint64_t i = 1; i <= B; ++i) os << ' ' << var_name(j, i) << '\n';
  os << "End\n";
  return man;
}

/// delta_{k,i} = 1 iff p_k divides i.
inline bool ilp_delta(std::size_t k, std::uint64_t i, PrimeTable& primes) {
  primes.ensure_index(k);
  return i % primes[k] == 0;
}

}  // namespace picket
