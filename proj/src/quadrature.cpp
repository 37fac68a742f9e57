#include "bosecert/quadrature.hpp"

#include "bosecert/errors.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <numbers>

namespace bosecert {

namespace {

// Legendre P_n and its derivative at x.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

GaussRule make_rule(int n) {
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    rule.nodes[n / 2] = 0.0;
  return rule;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    if (n == 1)
      slot = std::make_unique<GaussRule>(GaussRule{{0.0}, {2.0}});
    else
      slot = std::make_unique<GaussRule>(make_rule(n));
  }
  return *slot;
}

double integrate_composite(const RealFn& f, double a, double b, int panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double part = 0.0;
    for (int i = 0; i < order; ++i)
      part += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    sum += 0.5 * h * part;
  }
  return sum;
}

QuadResult integrate_adaptive(const RealFn& f, std::span<const double> breakpoints,
                              double rel_tol, double abs_tol, int start_panels,
                              int max_doublings, int order) {
  QuadResult out;
  if (breakpoints.size() < 2)
    return out;
  int panels = start_panels;
  double coarse = 0.0;
  for (std::size_t s = 0; s + 1 < breakpoints.size(); ++s)
    coarse += integrate_composite(f, breakpoints[s], breakpoints[s + 1], panels, order);
  for (int level = 0; level < max_doublings; ++level) {
    panels *= 2;
    double fine = 0.0;
    for (std::size_t s = 0; s + 1 < breakpoints.size(); ++s)
      fine += integrate_composite(f, breakpoints[s], breakpoints[s + 1], panels, order);
    const double diff = std::abs(fine - coarse);
    if (diff <= std::max(rel_tol * std::abs(fine), abs_tol)) {
      out.value = fine;
      out.residual = diff;
      out.panels = panels;
      return out;
    }
    coarse = fine;
  }
  throw QuadratureFailure("panel refinement exhausted before reaching tolerance");
}

double hermite5(double t, double h, double f0, double d0, double s0, double f1, double d1,
                double s1) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h10 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h20 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double h01 = 10 * t3 - 15 * t4 + 6 * t5;
  const double h11 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h21 = 0.5 * t3 - t4 + 0.5 * t5;
  return h00 * f0 + h * h10 * d0 + h * h * h20 * s0 + h01 * f1 + h * h11 * d1 +
         h * h * h21 * s1;
}

double hermite3(double t, double h, double f0, double d0, double f1, double d1) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * f1 +
         (t3 - t2) * h * d1;
}

} // namespace bosecert
