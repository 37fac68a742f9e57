#pragma once

#include "bosecert/check.hpp"
#include "bosecert/scattering.hpp"

#include <array>
#include <cmath>
#include <utility>
#include <vector>

namespace bosecert {

using Vec3 = std::array<double, 3>;

inline double norm(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

// χ(x) = c φ(x₁)φ(x₂)φ(x₃) with φ(t) = exp(-σ/(1-4t²)) on |t| < 1/2 and c = (∫φ²)^{-3/2}.
class BumpProfile {
public:
  static constexpr double min_steepness = 0.05;
  static constexpr double max_steepness = 20.0;

  double steepness() const { return sigma_; }
  double c() const { return c_; }

  double phi(double t) const;
  double dphi(double t) const;
  double ddphi(double t) const;

  double chi(const Vec3& x) const { return c_ * phi(x[0]) * phi(x[1]) * phi(x[2]); }

  // ∫φ², ∫φ'² over [-1/2, 1/2].
  double phi_l2() const { return phi2_; }
  double dphi_l2() const { return dphi2_; }
  // ∫|∇χ|² = 3 ∫φ'² / ∫φ².
  double gradient_energy() const { return 3.0 * dphi2_ / phi2_; }

  // 1D autocorrelation A(t) = ∫φ(s)φ(s-t) ds from the table; zero for |t| >= 1.
  double autocorrelation(double t) const;
  // The same integral by direct quadrature (no table).
  double autocorrelation_direct(double t) const;
  // (χ∗χ)(t) = c² ∏ A(tᵢ); equals 1 at t = 0.
  double chi_conv_chi(const Vec3& t) const {
    return c_ * c_ * autocorrelation(t[0]) * autocorrelation(t[1]) * autocorrelation(t[2]);
  }

private:
  friend BumpProfile build_bump(double steepness);
  double sigma_ = 1.0;
  double c_ = 0.0;
  double phi2_ = 0.0;
  double dphi2_ = 0.0;
  double table_h_ = 0.0;
  std::vector<double> acf_, dacf_, ddacf_;
};

// Throws DomainError outside [min_steepness, max_steepness], NormalizationFailure when the
// normalization cannot be confirmed to 1e-10 by an independent quadrature.
BumpProfile build_bump(double steepness = 1.0);

struct BoxGeometry {
  double rho_mu = 0.0;
  double a = 0.0;
  double K = 10.0;
  double L_over_ell = 4.0;
  double s = 0.02;
  double b = 1e-3;
  double Xi = 3.0;
  double delta = 0.2;
  double epsilon = 0.0;
  double support_margin = 0.5;
  double smallness_threshold = 1e-4;

  // ρ_μ from the diluteness ρ_μ a³.
  static BoxGeometry from_diluteness(double rho_a3, double a, double K);

  double ell() const { return 1.0 / (K * std::sqrt(rho_mu * a)); }
  double L() const { return L_over_ell * ell(); }
  double rho_ell3() const { return rho_mu * std::pow(ell(), 3); }
  double diluteness() const { return rho_mu * a * a * a; }

  // Throws GeometryViolation or SupportViolation naming the violated condition.
  void validate(double R) const;
};

class LocalizedPotentials {
public:
  LocalizedPotentials(const BoxGeometry& geom, const RadialPotential& pot,
                      const ScatteringSolution& sol, const BumpProfile& chi);

  double ell() const { return ell_; }
  const BoxGeometry& geometry() const { return geom_; }
  const ScatteringSolution& scattering() const { return sol_; }
  const BumpProfile& bump() const { return chi_; }
  double support_radius() const { return sol_.support_radius(); }

  // (χ∗χ)(x/ℓ).
  double conv(const Vec3& x) const;
  double W(const Vec3& x) const;
  double W1(const Vec3& x) const;
  // χ(x/ℓ).
  double chi_box(const Vec3& x) const;

  double w(const Vec3& x, const Vec3& y) const;
  double w1(const Vec3& x, const Vec3& y) const;
  double w2(const Vec3& x, const Vec3& y) const;

  // Spherical average of W₁ over |x| = r.
  double W1_radial_average(double r) const;

  // ∬w₁ and ∬w₂ with the difference between two quadrature resolutions.
  struct Integral {
    double value = 0.0;
    double resolution_diff = 0.0;
  };
  Integral integral_w1() const;
  Integral integral_w2() const;

  // max over sampled |x| <= R of (W₁(x)/g(x) - 1) / (R/ℓ)².
  double w1_excess_constant() const;

private:
  Integral kernel_integral(bool with_omega) const;
  double kernel_integral_at(bool with_omega, int level) const;

  BoxGeometry geom_;
  ScatteringSolution sol_;
  BumpProfile chi_;
  double ell_;
};

// Relative residuals of ∬w₁ = 8πℓ³a and ∬w₂ = ℓ³(8πa + ∫gω), plus the W₁ ≤ (1+C(R/ℓ)²)g constant.
IdentityReport check_integral_identities(const LocalizedPotentials& lp, double tol);

struct SlidingOptions {
  // 0 selects adaptive Gauss refinement; otherwise a fixed composite rule with this many points.
  int gauss_points = 0;
  int panels = 1;
};

struct SlidingSample {
  Vec3 x, y;
  double lhs_v, rhs_v, lhs_g, rhs_g;
  double residual_v, residual_g;
};

// ℓ⁻³∫_Ω w_u^per(x,y) du against v^per(x-y), and the same for the w₁/g pair, on the L-torus.
std::vector<SlidingSample> sliding_samples(const LocalizedPotentials& lp,
                                           const std::vector<std::pair<Vec3, Vec3>>& pairs,
                                           const SlidingOptions& opts = {});

IdentityReport sliding_identity_check(const LocalizedPotentials& lp,
                                      const std::vector<std::pair<Vec3, Vec3>>& pairs, double tol,
                                      const SlidingOptions& opts = {});

struct GpScaling {
  double rho = 0.0;
  double L = 0.0;
  double delta = 0.0;
  double C_lambda = 0.0;
};

// ρ = N^{3κ-2}λ⁻³, L = N^{1-κ}λ, δ = κ/(4-6κ), C(λ) = (a/λ)^{1/2+3δ}. Throws DomainError.
GpScaling gp_scaling_convert(double N, double kappa, double lambda, double a);

} // namespace bosecert
