// Property report for the moduli {3, 4, 5, 7} at N = 12.

#include <cstdio>

#include "picket/matrix.hpp"

using namespace picket;

int main() {
  auto M = build_matrix(ModulusSet({3, 4, 5, 7}, 12));
  const unsigned alpha = binary_coherence(M, M.N());
  std::printf("m = %zu rows, K = %zu, alpha = %u (log bound %u)\n", M.rows(), M.K(), alpha,
              alpha_log_bound(M.modulus(0), M.N()));
  const unsigned d = static_cast<unsigned>((M.K() - 1) / alpha);
  std::printf("%u-disjunct: %s\n", d, disjunct_check(M, d, M.N()) ? "yes" : "no");
  std::printf("expander (k = 2): %s\n", to_string(expander_check(M, 2, M.N())));
  auto rip = gershgorin_rip_verify(M, 2, M.N());
  std::printf("RIP over %zu column pairs: singular values in [%.4f, %.4f], delta = %.2f\n", rip.subsets,
              rip.min_singular, rip.max_singular, rip.delta);
  auto f = fourier_column_sparsity(M);
  std::printf("nonzero columns of M F: %llu (m - K + 1 = %llu)\n", static_cast<unsigned long long>(f.verified.value_or(0)),
              static_cast<unsigned long long>(f.predicted));
}
