// Minimal Fourier sample counts m - K + 1 for N = 2^10 as k grows, one
// column per modulus family.

#include <cstdio>

#include "picket/design.hpp"

using namespace picket;

int main() {
  const std::uint64_t N = 1024;
  PrimeTable primes(1 << 12);
  std::printf("N = %llu, eps = %.6f\n%3s %22s %22s %22s\n", static_cast<unsigned long long>(N), kDefaultEpsilon, "k",
              "relprime", "prime_powers", "primes");
  for (unsigned k = 2; k <= 8; ++k) {
    std::printf("%3u", k);
    for (auto v : kAllVariants) {
      auto sol = optimize(DesignProblem::from_sparsity(N, k, kDefaultEpsilon, v), primes);
      char cell[64];
      std::snprintf(cell, sizeof cell, "%llu (alpha=%u, K=%u)", static_cast<unsigned long long>(sol.fourier_samples),
                    sol.alpha, sol.K);
      std::printf(" %22s", cell);
    }
    std::printf("\n");
  }
}
