#pragma once

#include "bosecert/localization.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace bosecert {

// τ(p) = (p² - s⁻²ℓ⁻²)₊ and the box transform θ̂.
struct KineticSymbol {
  double s = 0.02;
  double b = 1e-3;
  double ell = 1.0;

  double tau(double p) const {
    const double cut = 1.0 / (s * ell);
    return std::max(0.0, p * p - cut * cut);
  }
  // θ̂(k) = ℓ³ ∏ sinc(kᵢℓ/2) and its normalized variant ℓ⁻³θ̂.
  double theta_hat(const Vec3& k) const;
  double theta_hat_normalized(const Vec3& k) const;
};

struct KineticComponents {
  double F = 0.0, F1 = 0.0, F2 = 0.0;
  double I = 0.0, II = 0.0, III = 0.0;
  // |F(base) - F(refined)| between two quadrature resolutions.
  double residual = 0.0;
};

// Evaluates F at ℓ = 1 for fixed s. The τ-weighted integrals are split into a disk part and
// tail moments so that no large terms cancel; see kinetic.cpp.
class KineticEngine {
public:
  // `k_reach` bounds |kᵢ| for which 1D transforms are tabulated (default 1.5 s⁻¹).
  KineticEngine(const BumpProfile& chi, double s, double k_reach = 0.0);
  ~KineticEngine();
  KineticEngine(const KineticEngine&) = delete;
  KineticEngine& operator=(const KineticEngine&) = delete;

  double s() const { return s_; }
  const BumpProfile& bump() const { return chi_; }

  // F₁ parts at ℓ = 1 (no b dependence): I, II, III and the resolution residual of F₁.
  KineticComponents evaluate(const Vec3& k, double b) const;

  // φ̂(q) = ∫φ(t) cos(qt) dt from the table.
  double phi_hat(double q) const;
  // (τ ∗ χ̂²)(0)(2π)⁻³, i.e. the k-independent factor of III.
  double J0() const { return J0_; }

  struct Impl;

private:
  BumpProfile chi_;
  double s_;
  double J0_ = 0.0;
  std::unique_ptr<Impl> impl_;
};

// (F, F₁, F₂, I, II, III) at general ℓ via F_ℓ(k) = ℓ⁻² F₁(kℓ).
KineticComponents compute_F(const Vec3& k, const BumpProfile& chi, double s, double b, double ell);

struct KineticRow {
  Vec3 k{};           // canonical representative, 0 <= k₁ <= k₂ <= k₃ (ℓ = 1 units)
  int multiplicity = 0;
  double F = 0.0, F1 = 0.0, F2 = 0.0, I = 0.0, II = 0.0, III = 0.0;
  double margin = 0.0; // k² - gap_constant (ℓ/L)² - F
  double residual = 0.0;
};

struct GapCertificate {
  double steepness = 1.0;
  double chi_c = 0.0;
  double b = 0.0, s = 0.0, L_over_ell = 0.0, k_split = 0.0;
  // Subtracted gap is gap_constant·(ℓ/L)²; 2π², which also covers the weaker 2π.
  double gap_constant = 0.0;
  std::string constant_note;

  std::vector<KineticRow> rows;
  std::size_t lattice_points = 0; // nonzero lattice momenta with |k| <= k_split

  double F0 = 0.0;
  double min_margin = 0.0;
  Vec3 argmin_k{};
  std::optional<Vec3> first_violation;
  double max_residual = 0.0;

  double beta = 1.0 / 12.0;  // F₂ <= b min{βk², 1}
  double beta_observed = 0.0; // max (1-θ̂²)/k² on the lattice
  double C_taylor = 0.0;      // max F₁/(s k²) for |k| < s⁻¹/2
  double C_tail = 0.0;        // 2∫|∇χ|²
  double C23 = 0.0;           // 2·max sampled (|II| + |III|) for |k| >= k_split
  double tail_margin = 0.0;   // s⁻²/8 - C_tail - C23 - b - gap_constant (ℓ/L)²

  bool lattice_pass = false;
  bool tail_pass = false;
  bool pass = false;
};

// Lattice scan independent of b, reused across b values.
struct KineticScan {
  double s = 0.0, L_over_ell = 0.0, k_split = 0.0;
  std::size_t lattice_points = 0;
  std::vector<KineticRow> rows; // F₁ parts only
  double F1_at_zero = 0.0;
  double C_tail = 0.0;
  double C23 = 0.0;
  double C_taylor = 0.0;
  double max_residual = 0.0;
  double steepness = 1.0;
  double chi_c = 0.0;
};

// Number of nonzero momenta 2π(ℓ/L)ℤ³ with |k| <= k_split.
std::size_t count_lattice_points(double L_over_ell, double k_split);

KineticScan scan_lattice(const BumpProfile& chi, double s, double L_over_ell, double k_split = 0.0);
GapCertificate finalize_certificate(const KineticScan& scan, double b);

// Throws GeometryViolation when L/ℓ <= 2 or k_split < s⁻¹/2.
GapCertificate certify_gap(const BumpProfile& chi, double b, double s, double L_over_ell,
                           double k_split = 0.0);

struct SearchCandidate {
  double b = 0.0, s = 0.0;
  bool skipped = false; // lattice larger than the point budget
  bool pass = false;
  double min_margin = 0.0;
  double tail_margin = 0.0;
};

struct SearchResult {
  double b = 0.0, s = 0.0;
  GapCertificate certificate;
  std::vector<SearchCandidate> candidates;
};

// Admissible (b, s) maximizing the minimum margin; ties go to the larger b, then the larger s.
// Throws NoAdmissiblePair naming the least-violated candidate.
SearchResult search_admissible(const BumpProfile& chi, const std::vector<double>& b_grid,
                               const std::vector<double>& s_grid, double L_over_ell,
                               std::size_t max_lattice_points = 200000);

} // namespace bosecert
