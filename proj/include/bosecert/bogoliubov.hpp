#pragma once

#include "bosecert/localization.hpp"

#include <vector>

namespace bosecert {

// Radial transform of a profile on [0, R] by a fixed Gauss rule sized for |p| <= p_max.
class RadialTransform {
public:
  RadialTransform(const std::function<double(double)>& f, double R,
                  const std::vector<double>& breakpoints, double p_max, int refine = 1);
  double operator()(double p) const;
  double at_zero() const { return (*this)(0.0); }
  // |f(R⁻)|·4πR: coefficient of the 1/p² envelope produced by the jump at the support edge.
  double edge_envelope() const { return edge_; }

private:
  std::vector<double> r_, w_;
  double edge_ = 0.0;
};

// Ŵ₁ from the spherical average of W₁, A(p) = ℓ³τ(p)/(n+1) + 2Ŵ₁(0).
class QuadraticSymbol {
public:
  QuadraticSymbol(const LocalizedPotentials& lp, double n, double s, double p_max, int refine = 1);
  // Vanishing interaction, for degenerate checks.
  static QuadraticSymbol zero(double ell, double n, double s);

  double W1_hat(double p) const { return zero_ ? 0.0 : transform_(p); }
  double W1_hat0() const { return w0_; }
  double A(double p) const;
  double tau(double p) const;
  double n() const { return n_; }
  double ell() const { return ell_; }
  double s() const { return s_; }
  double support_radius() const { return R_; }
  QuadraticSymbol with_n(double n) const {
    QuadraticSymbol c = *this;
    c.n_ = n;
    return c;
  }
  double edge_envelope() const { return zero_ ? 0.0 : transform_.edge_envelope(); }

private:
  QuadraticSymbol(double ell, double n, double s);
  RadialTransform transform_;
  double w0_ = 0.0, ell_ = 0.0, n_ = 0.0, s_ = 0.0, R_ = 1.0;
  bool zero_ = false;
};

// 16(7/8 - √3/2): A - √(A²-x²) <= x²/(2A) + c x⁴/A³ for |x| <= A/2.
double expansion_constant();

struct BogoliubovIntegrals {
  double total = 0.0;     // (2π)⁻³∫[A - √(A²-Ŵ₁²)] dp
  double I = 0.0;         // -(n(n+1)/2ℓ³)(2π)⁻³∫Ŵ₁²/(2p²) dp
  double II = 0.0;        // -(n/2)(2π)⁻³∫[Ŵ₁²/(2A) - Ŵ₁²(n+1)/(2ℓ³p²)] dp
  double remainder = 0.0; // n(2π)⁻³∫Ŵ₁(0)⁴/(2A³) dp
  double p_max = 0.0;     // cutoff at acceptance
  double tail_estimate = 0.0;
  double max_ratio = 0.0;      // max |Ŵ₁|/A over nodes
  bool expansion_holds = true; // A - √(A²-Ŵ₁²) <= Ŵ₁²/A at every node
  bool bound_holds = true;     // -(n/2)·total >= I + II - c·remainder
};

// Radial quadrature with p_max doubling until both the increment and the 1/p² envelope tail
// fall below rel_tol. Throws TailNotConverged.
BogoliubovIntegrals bogoliubov_integral(const LocalizedPotentials& lp, double n, double s,
                                        double rel_tol = 1e-8, int refine = 1);
BogoliubovIntegrals bogoliubov_integral(const QuadraticSymbol& sym, double p_max, int refine = 1);

struct MomentumCheck {
  double value = 0.0; // (2π)⁻³∫ĝ²/(2p²) dp
  double reference = 0.0; // ∫gω from position space
  double tail_estimate = 0.0;
  double p_max = 0.0;
  double relative_residual = 0.0;
};

// (2π)⁻³∫ĝ(p)²/(2p²) dp = ∫gω.
MomentumCheck g_omega_momentum_check(const ScatteringSolution& sol, double rel_tol = 1e-7);

// A₀ = n₀(n₀-1)/(2ℓ⁶)∬w₂ - (ρn₀/ℓ³ + ¼(ρ - (n₀-1)/ℓ³)²)∬w₁.
double compute_A0(double n0, double rho_mu, double ell, double iint_w1, double iint_w2);
double compute_A0(double n0, const LocalizedPotentials& lp);

struct Partition {
  std::vector<long> sizes;
  bool single_short_group = false; // M below one minimal group
};

// Groups with sizes in [Ξρℓ³, (Ξ+1)ρℓ³] except the last, which is <= (Ξ+1)ρℓ³.
Partition partition_particles(long M, double Xi, double rho_ell3);

struct BudgetConstants {
  double C_gap = 1.0;     // in bℓ⁻² - C_gap·a((n+1)/ℓ³ + ρ)
  double C_error = 1.0;   // in -C_error·a(ρ + n/ℓ³), the "+1" part of the interaction estimate
  bool strict_gap = false; // throw GapNotDominating instead of flagging
  double rel_tol = 1e-8;
  int refine = 1;
};

struct EnergyRow {
  long n = 0;
  double E_main = 0.0;
  double E_gap_coeff = 0.0;
  double E_error = 0.0;
  double bogoliubov_total = 0.0;
  double bound = 0.0; // E_main + E_error
  double C0 = 0.0;    // -(bound + 4πρ²aℓ³)/(ρ²aℓ³√(ρa³))
  bool gap_dominates = false;
};

struct EnergyBudget {
  BoxGeometry geom;
  double ell = 0.0, rho_ell3 = 0.0, integral_g_omega = 0.0;
  std::vector<EnergyRow> rows; // n = 0 .. floor((Ξ+1)ρℓ³)
  double C0_realized = 0.0;    // max over rows
  double box_bound = 0.0;      // -4πρ²aℓ³ - C0ρ²aℓ³√(ρa³)
  bool gap_dominating = true;  // every row
  bool full_groups_nonnegative = true; // bound >= 0 for n in [Ξρℓ³, (Ξ+1)ρℓ³]
};

// E_main = -4πaρ²ℓ³ + 2π(a/ℓ³)(ρℓ³-n)².
double energy_main(double n, double rho_mu, double a, double ell);

EnergyBudget assemble_box_bound(const LocalizedPotentials& lp, const BudgetConstants& constants);

struct LHYPrediction {
  double rho = 0.0, a = 0.0;
  double leading = 0.0;    // 4πaρ
  double correction = 0.0; // leading·(128/(15√π))√(ρa³)
  double e_per_particle = 0.0;
};

double lhy_constant();
// Throws DilutenessViolation unless 0 < ρa³ < 1.
LHYPrediction lhy_energy(double rho, double a);

struct DepletionInputs {
  double excess_per_particle = 0.0;      // assumed ⟨H⟩/N - 4πaρ
  double lower_bound_per_particle = 0.0; // certified lower bound on ⟨H̃⟩/N
  double L = 0.0, N = 0.0, rho = 0.0, a = 0.0;
  double epsilon = 0.0, delta = 0.0;
  double C = 1.0; // constant of the closed form
};

struct DepletionBound {
  double fraction = 0.0;    // bound on ⟨n₊⟩/N
  double closed_form = 0.0; // C ρaL²(ρa³)^{1/2-ε}
  bool complete_condensation = false; // 2δ + ε < 1/2
};

// (⟨H⟩ - lb)/(2π²L⁻²N) per particle. Throws InconsistentInputs.
DepletionBound depletion_bound(const DepletionInputs& in);

} // namespace bosecert
