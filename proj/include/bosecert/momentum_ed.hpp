#pragma once

#include "bosecert/fock_basis.hpp"
#include "bosecert/lanczos.hpp"
#include "bosecert/scattering.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bosecert {

using IntVec3 = std::array<int, 3>;

// Plane waves k = 2πn/L with |n|² <= cutoff, ordered by |n|² then lexicographically; mode 0 is k = 0.
struct MomentumModes {
  double L = 1.0;
  double cutoff = 4.0;
  std::vector<IntVec3> n;

  MomentumModes(double L, double cutoff);
  std::size_t size() const { return n.size(); }
  double k2(std::size_t i) const;
  // Index of an integer vector, or npos.
  std::size_t find(const IntVec3& v) const;
};

struct MomentumHamiltonian {
  MomentumModes modes;
  OccupationBasis basis;
  SparseOperator H;
  SparseOperator kinetic;
  std::optional<IntVec3> sector; // total momentum, or every sector
};

// ħ = 2m = 1: Σk²a_k†a_k + (2L³)⁻¹Σ v̂(q) a†_{p+q}a†_{r-q}a_r a_p on the mode set, in the given
// total-momentum sector (all sectors when empty). Throws DimensionOverflow.
MomentumHamiltonian build_hamiltonian_momentum(double L,
                                               const std::function<double(double)>& v_hat,
                                               int N, double cutoff,
                                               std::optional<IntVec3> sector = IntVec3{0, 0, 0},
                                               std::size_t max_dim = 200'000);

// Largest |H_st| between states of different total momentum (zero by construction).
double momentum_block_leakage(const MomentumHamiltonian& h);

// v̂(|q|) for a radial potential, cached per |q|.
std::function<double(double)> potential_fourier(const RadialPotential& pot);

struct Projectors {
  Eigen::MatrixXd P, Q; // one-body
  SparseOperator n0, nplus;
};

// P projects on mode 0 (the constant function).
Projectors build_projectors(const OccupationBasis& basis);

struct GroundStateOptions {
  LanczosOptions lanczos;
  std::size_t dense_threshold = 2000;
  bool dense_check = true;
};

struct GroundStateResult {
  double E0 = 0.0;
  Eigen::VectorXd vector;
  double n0 = 0.0, nplus = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::optional<double> dense_E0;
  double dense_difference = 0.0;
  std::string method;
};

// Throws NoConvergence.
GroundStateResult ground_state(const SparseOperator& op, const GroundStateOptions& opts = {},
                               const Projectors* proj = nullptr);

struct PerturbationOracle {
  double E1 = 0.0, E2 = 0.0;
  double budget = 0.0; // bound on the third-order remainder
};

// N = 2, P = 0: E1 = v̂(0)/L³, E2 = -(1/L⁶)Σ_{k≠0} v̂(k)²/(2k²), budget 4|E2|‖V‖/Δ.
PerturbationOracle pair_perturbation_oracle(const MomentumModes& modes,
                                            const std::function<double(double)>& v_hat);

struct DepletionStudyConfig {
  RadialPotential potential;
  double L = 4.0;
  int N = 3;
  double cutoff = 4.0;
  std::vector<double> couplings{0.25, 0.5, 1.0}; // scale factors on v
  double C_bound = 1.0;                           // constant C in C·ρaL²(ρa³)^(1/2-ε)
  double epsilon = 0.0;
  GroundStateOptions solver;
};

struct DepletionRow {
  double coupling = 0.0;
  double rho_a3 = 0.0;
  double L_units = 0.0; // L·(ρa)^{1/2}
  int N = 0;
  double E0_per_N = 0.0;
  double leading = 0.0; // 4πaρ
  double depletion = 0.0; // ⟨n₊⟩/N
  double bound = 0.0;     // C ρaL²(ρa³)^{1/2-ε}
  double number_residual = 0.0; // |⟨n₀⟩ + ⟨n₊⟩ - N|
  double dense_difference = 0.0;
  double residual = 0.0;
  std::size_t dim = 0;
};

struct DepletionStudy {
  std::vector<DepletionRow> rows; // in the configured coupling order
  bool depletion_monotone = true; // ⟨n₊⟩/N strictly increasing with the coupling
  bool energy_monotone = true;    // E0 non-decreasing with the coupling
};

DepletionStudy depletion_study(const DepletionStudyConfig& cfg);

// Layout: uint64 dimension, then `dimension` float64 values, little-endian. Throws IoError.
void write_eigenvector(const std::string& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_eigenvector(const std::string& path);

} // namespace bosecert
