#pragma once

#include "bosecert/lanczos.hpp"
#include "bosecert/potsplit.hpp"

#include <string>

namespace bosecert {

struct CommutatorOptions {
  bool constant_chi = false; // sample χ ≡ 1 instead of the bump
  std::size_t dense_threshold = 2000;
  LanczosOptions lanczos;
};

struct CommutatorReport {
  int N = 0;
  Vec3 k{0.0, 0.0, 0.0};
  std::size_t dim = 0;
  double lambda_min = 0.0;   // of N·1 - [b, b†]
  double f_norm2 = 0.0;      // ℓ⁻³‖f‖²
  double commutator_norm = 0.0; // max entry of [b, b†]
  double analytic_residual = 0.0; // max entry |[b,b†] - ℓ⁻³(‖f‖²n₀ - a_f†a_f)|
  std::string method;
  bool pass = false; // λ_min >= -1e-10
};

// b = ℓ^{-3/2} a₀† a(f) with f = Q(h^{3/2} χ(x/ℓ) e^{-ik·x}) on the lattice box of side ℓ and a₀
// the constant mode. Throws DimensionOverflow or NoConvergence.
CommutatorReport verify_commutator_bound(const LatticeBox& box, const BumpProfile& chi,
                                         const Vec3& k, int N, const CommutatorOptions& opts = {});

} // namespace bosecert
