#pragma once

#include "bosecert/fock_basis.hpp"
#include "bosecert/localization.hpp"

#include <array>
#include <cstdint>

namespace bosecert {

// M³ cell-centred sites in a cube of the given side, centred at the origin.
struct LatticeBox {
  double side = 1.0;
  int M = 2;
  bool periodic = false;

  double h() const { return side / M; }
  int sites() const { return M * M * M; }
  double weight() const { return h() * h() * h(); }
  Vec3 site(int i) const;
  // x - y, by minimal image when periodic.
  Vec3 separation(int i, int j) const;
  // Throws DomainError.
  void validate() const;
};

struct PotsplitOptions {
  bool zero_omega = false; // sample ω ≡ 0, so w₁ = w₂ = w
  std::size_t max_tensor_dim = 4096;
};

// Operators on the symmetric N-particle space of the lattice, compressed from the tensor space.
struct PotsplitTerms {
  LatticeBox box;
  int N = 0;
  double rho = 0.0, ell = 0.0;
  double iint_w1 = 0.0, iint_w2 = 0.0; // h⁶-weighted lattice sums
  std::size_t tensor_dim = 0;
  OccupationBasis basis;
  Eigen::MatrixXd isometry; // tensor_dim × basis.dim()
  Eigen::MatrixXd lhs;      // -ρΣ∫w₁(xᵢ,y)dy + ½Σ_{i≠j}w(xᵢ,xⱼ)
  std::array<Eigen::MatrixXd, 5> Q;
  Eigen::MatrixXd n0, nplus;
  Eigen::MatrixXd A0, A2;
  double tensor_residual = 0.0; // max |LHS - ΣQ| before compression
};

// Throws DimensionOverflow or KernelSamplingError.
PotsplitTerms build_potsplit_terms(const LatticeBox& box, const LocalizedPotentials& lp, int N,
                                   const PotsplitOptions& opts = {});

// max entry |LHS - (Q0 + ... + Q4)| on the symmetric space.
double potsplit_residual(const PotsplitTerms& t);

struct InteractionEstimate {
  double inf_ratio = 0.0;     // empirical -C after local descent from every start
  double raw_inf_ratio = 0.0; // over the unpolished random states
  double sector_inf_ratio = 0.0; // exact minimum within fixed-n₀ sectors
  double sup_ratio = 0.0;
  int samples = 0;
  int skipped = 0; // ⟨n₊⟩ = 0
  std::uint64_t seed = 0;
  double A2_asymmetry = 0.0;
};

// r(ψ) = [⟨LHS⟩ - ⟨A₀+A₂⟩] / [a(ρ + ⟨n₀⟩ℓ⁻³)⟨n₊⟩] over seeded random states. The sector
// minimizers and the eight lowest random states are refined by gradient descent on the unit
// sphere. The fully condensed state is always included and skipped.
InteractionEstimate verify_interaction_estimate(const PotsplitTerms& t, double a, int samples,
                                                std::uint64_t seed, int descent_steps = 200);

} // namespace bosecert
