// Sublinear recovery of a noisy 3-sparse spectrum of bandwidth 2^14 from
// time samples on the picket-fence grids of an optimized modulus set.

#include <cstdio>
#include <utility>
#include <vector>

#include "picket/design.hpp"
#include "picket/fourier.hpp"

using namespace picket;

int main() {
  const std::uint64_t N = 1 << 14;
  const std::size_t k = 3;
  PrimeTable primes(1 << 12);
  // K = ceil(D alpha) moduli; decoding needs K > 4 k alpha, so D = 13.
  DesignProblem prob{N, 13.0, Variant::relprime, 1u};
  auto sol = optimize(prob, primes);
  std::printf("moduli (alpha=%u, K=%u):", sol.alpha, sol.K);
  for (auto s : sol.s) std::printf(" %llu", static_cast<unsigned long long>(s));
  std::printf("\n");

  auto M = build_matrix(ModulusSet(sol.s, N));
  const std::vector<std::pair<std::uint64_t, Complex>> spikes{{123, {4.0, 1.0}}, {9000, {-2.5, 0.5}}, {16000, {0.0, 3.0}}};
  const CVector spectrum = synthesize_spectrum(N, spikes, 1e-3, 42);

  auto rep = sft_demo(M, spectrum, k);
  std::printf("time samples used: %zu of N = %llu\n", rep.base_samples, static_cast<unsigned long long>(N));
  for (const auto& e : rep.recovery.approx.entries)
    std::printf("  index %6llu  value % .4f %+.4fi\n", static_cast<unsigned long long>(e.index), e.value.real(),
                e.value.imag());
  std::printf("l2 error %.3e, best 3-term error %.3e, guaranteed bound %.3e\n", rep.error_l2, rep.best_k_l2, rep.bound);
}
