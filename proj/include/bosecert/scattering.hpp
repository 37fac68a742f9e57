#pragma once

#include "bosecert/check.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace bosecert {

// Radial, non-negative, compactly supported two-body potential in units hbar = 2m = 1.
class RadialPotential {
public:
  enum class Kind { SquareWell, Tabulated, Callable };

  static RadialPotential square_well(double v0, double R);
  // Piecewise linear through (r_i, v_i); zero beyond R.
  static RadialPotential tabulated(std::vector<double> r, std::vector<double> v, double R);
  static RadialPotential from_callable(std::function<double(double)> v, double R,
                                       std::vector<double> breakpoints = {});

  double operator()(double r) const { return r > R_ ? 0.0 : profile_(r); }
  double support_radius() const { return R_; }
  Kind kind() const { return kind_; }
  std::string kind_name() const;
  // Square-well depth; zero for other kinds.
  double depth() const { return v0_; }
  // Points in (0, R) where v may be discontinuous or kinked.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  // lambda^-2 v(r / lambda): a maps to lambda * a.
  RadialPotential dilated(double lambda) const;
  // c * v.
  RadialPotential scaled(double c) const;

  // Throws InvalidPotential when the stated invariants fail on a sample grid.
  void validate() const;

private:
  RadialPotential() = default;
  Kind kind_ = Kind::Callable;
  double R_ = 0.0;
  double v0_ = 0.0;
  std::function<double(double)> profile_;
  std::vector<double> breakpoints_;
};

// Reads a two-column (r, v) table whose first line is `# R=<value>`. Throws IoError/InvalidPotential.
RadialPotential load_potential_table(const std::string& path);

// Radial function with compact support plus an optional exact c/r tail beyond the support.
struct RadialProfile {
  std::function<double(double)> f;
  double support = 0.0;
  std::vector<double> breakpoints; // interior breakpoints in (0, support)
  double coulomb_tail = 0.0;
};

// f̂(k) = 4π ∫ f(r) sin(kr)/(kr) r² dr, i.e. ∫ f(x) e^{-ik·x} dx. A c/r tail contributes
// 4πc cos(kR)/k² (oscillatory limit); at k = 0 such a tail diverges and QuadratureFailure is
// thrown.
double radial_fourier(const RadialProfile& f, double k, double rel_tol = 1e-12);

class ScatteringSolution {
public:
  double a() const { return a_; }
  double support_radius() const { return pot_.support_radius(); }
  const RadialPotential& potential() const { return pot_; }

  // ω(r); equals a/r beyond the support.
  double omega(double r) const;
  // g = v (1 - ω).
  double g(double r) const;
  // u(r)/u'(R) with u = r (1 - ω).
  double u(double r) const;

  // ∫ g dx and ∫ g ω dx over R³.
  double integral_g() const;
  double integral_g_omega() const;

  RadialProfile omega_profile() const;
  RadialProfile g_profile() const;

  // Interior integration nodes followed by a geometric extension to r_max.
  const std::vector<double>& grid() const { return grid_; }
  int steps() const { return static_cast<int>(r_.size()) - 1; }
  double solver_tolerance() const { return tol_; }
  double richardson_error() const { return richardson_error_; }
  double r_max() const { return r_max_; }

  // Integrates f over the support, cell by cell, with a 6-point Gauss rule (f radial, no r²).
  double integrate_cells(const std::function<double(double)>& f) const;

private:
  friend ScatteringSolution solve_scattering(const RadialPotential&, double, double);
  explicit ScatteringSolution(RadialPotential pot) : pot_(std::move(pot)) {}
  std::size_t cell(double r) const;

  RadialPotential pot_;
  double a_ = 0.0;
  double tol_ = 0.0;
  double richardson_error_ = 0.0;
  double r_max_ = 0.0;
  std::vector<double> r_, u_, du_, ddu_left_, ddu_right_;
  std::vector<double> grid_;
};

// Zero-energy scattering: u'' = (v/2) u, u(0) = 0, integrated by RK4 on uniform steps per
// smooth segment with step doubling until the Richardson estimate of a is below tol * a.
ScatteringSolution solve_scattering(const RadialPotential& pot, double r_max, double tol = 1e-10);

// Fourier identity 2k²ω̂(k) = ĝ(k) per k (k = 0 becomes the a-check ĝ(0) = 8πa), the a-identity
// and the finite-difference check of -Δω = g/2. Residuals are relative.
IdentityReport check_scattering_identities(const ScatteringSolution& sol,
                                           const std::vector<double>& k_grid, double tol);

} // namespace bosecert
