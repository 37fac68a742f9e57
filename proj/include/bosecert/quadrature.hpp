#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bosecert {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached and thread safe; the returned reference stays valid for the program lifetime.
const GaussRule& gauss_legendre(int n);

using RealFn = std::function<double(double)>;

// Composite Gauss-Legendre over [a, b] with `panels` equal panels of `order` points.
double integrate_composite(const RealFn& f, double a, double b, int panels, int order = 16);

struct QuadResult {
  double value = 0.0;
  double residual = 0.0; // |fine - coarse|
  int panels = 0;        // panels per segment at acceptance
};

// Panel doubling over each interval between consecutive breakpoints until
// |fine - coarse| <= max(rel_tol * |fine|, abs_tol). Throws QuadratureFailure.
QuadResult integrate_adaptive(const RealFn& f, std::span<const double> breakpoints,
                              double rel_tol, double abs_tol = 0.0, int start_panels = 2,
                              int max_doublings = 14, int order = 16);

// Quintic Hermite interpolation from values and first two derivatives at x0, x0+h.
double hermite5(double t, double h, double f0, double d0, double s0, double f1, double d1,
                double s1);

// Cubic Hermite interpolation from values and first derivatives.
double hermite3(double t, double h, double f0, double d0, double f1, double d1);

} // namespace bosecert
