#include "bosecert/localization.hpp"

#include "bosecert/errors.hpp"
#include "bosecert/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bosecert {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int acf_table_cells = 2048;

// ∫ f over [lo, hi] with `panels` Gauss panels of 32 points.
template <class F> double gauss_panels(F&& f, double lo, double hi, int panels, int order = 32) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (hi - lo) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    double part = 0.0;
    for (int i = 0; i < order; ++i)
      part += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    sum += 0.5 * h * part;
  }
  return sum;
}

} // namespace

// ---- BumpProfile -----------------------------------------------------------------------

double BumpProfile::phi(double t) const {
  const double q = 1.0 - 4.0 * t * t;
  return q > 0.0 ? std::exp(-sigma_ / q) : 0.0;
}

double BumpProfile::dphi(double t) const {
  const double q = 1.0 - 4.0 * t * t;
  if (q <= 0.0)
    return 0.0;
  return phi(t) * (-8.0 * sigma_ * t / (q * q));
}

double BumpProfile::ddphi(double t) const {
  const double q = 1.0 - 4.0 * t * t;
  if (q <= 0.0)
    return 0.0;
  const double s1 = 8.0 * sigma_ * t / (q * q);
  const double ds1 = sigma_ * (8.0 / (q * q) + 128.0 * t * t / (q * q * q));
  return phi(t) * (s1 * s1 - ds1);
}

double BumpProfile::autocorrelation_direct(double t) const {
  t = std::abs(t);
  if (t >= 1.0)
    return 0.0;
  return gauss_panels([&](double s) { return phi(s) * phi(s - t); }, t - 0.5, 0.5, 8);
}

double BumpProfile::autocorrelation(double t) const {
  t = std::abs(t);
  if (t >= 1.0)
    return 0.0;
  const double x = t / table_h_;
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), acf_.size() - 2);
  const double u = x - static_cast<double>(i);
  return hermite5(u, table_h_, acf_[i], dacf_[i], ddacf_[i], acf_[i + 1], dacf_[i + 1],
                  ddacf_[i + 1]);
}

BumpProfile build_bump(double steepness) {
  if (!(steepness >= BumpProfile::min_steepness && steepness <= BumpProfile::max_steepness))
    throw DomainError("bump steepness must lie in [0.05, 20]");
  BumpProfile b;
  b.sigma_ = steepness;
  b.phi2_ = gauss_panels([&](double t) { return b.phi(t) * b.phi(t); }, -0.5, 0.5, 16);
  b.dphi2_ = gauss_panels([&](double t) { return b.dphi(t) * b.dphi(t); }, -0.5, 0.5, 16);
  b.c_ = std::pow(b.phi2_, -1.5);

  // Independent check of ∫χ² = 1: adaptive panels of a different order.
  const double bps[] = {-0.5, 0.0, 0.5};
  const double phi2_check =
      integrate_adaptive([&](double t) { return b.phi(t) * b.phi(t); }, bps, 1e-14, 0.0, 2, 14, 20)
          .value;
  const double norm = b.c_ * b.c_ * std::pow(phi2_check, 3);
  if (!(std::abs(norm - 1.0) <= 1e-10))
    throw NormalizationFailure("∫χ² deviates from 1 by " + std::to_string(norm - 1.0));

  b.table_h_ = 1.0 / acf_table_cells;
  b.acf_.resize(acf_table_cells + 1);
  b.dacf_.resize(acf_table_cells + 1);
  b.ddacf_.resize(acf_table_cells + 1);
  for (int i = 0; i <= acf_table_cells; ++i) {
    const double t = i * b.table_h_;
    if (i == acf_table_cells) {
      b.acf_[i] = b.dacf_[i] = b.ddacf_[i] = 0.0;
      continue;
    }
    // A(t) = ∫φ(s)φ(s-t)ds, A' = -∫φ(s)φ'(s-t)ds, A'' = ∫φ(s)φ''(s-t)ds
    b.acf_[i] = gauss_panels([&](double s) { return b.phi(s) * b.phi(s - t); }, t - 0.5, 0.5, 4);
    b.dacf_[i] =
        -gauss_panels([&](double s) { return b.phi(s) * b.dphi(s - t); }, t - 0.5, 0.5, 4);
    b.ddacf_[i] =
        gauss_panels([&](double s) { return b.phi(s) * b.ddphi(s - t); }, t - 0.5, 0.5, 4);
  }
  return b;
}

// ---- BoxGeometry -----------------------------------------------------------------------

BoxGeometry BoxGeometry::from_diluteness(double rho_a3, double a, double K) {
  BoxGeometry g;
  g.a = a;
  g.K = K;
  g.rho_mu = rho_a3 / (a * a * a);
  return g;
}

void BoxGeometry::validate(double R) const {
  if (!(rho_mu > 0.0) || !(a > 0.0))
    throw GeometryViolation("density and scattering length must be positive");
  if (!(K > 1.0))
    throw GeometryViolation("K > 1 is required");
  const double l = ell();
  if (!(l > 0.0) || !std::isfinite(l))
    throw GeometryViolation("box side ell must be positive and finite");
  if (!(2.0 * l < L()))
    throw GeometryViolation("2*ell < L is required (L_over_ell > 2)");
  if (!(Xi >= 3.0))
    throw GeometryViolation("Xi >= 3 is required for the particle grouping");
  if (!(s > 0.0) || !(b > 0.0))
    throw GeometryViolation("kinetic parameters s and b must be positive");
  if (!(R <= support_margin * l))
    throw SupportViolation("R <= " + std::to_string(support_margin) +
                           "*ell is required so that chi*chi stays bounded below on supp v");
  if (diluteness() < smallness_threshold && rho_ell3() < 1.0 - 1e-12)
    throw GeometryViolation("rho_mu*ell^3 >= 1 is required in the dilute regime");
}

// ---- LocalizedPotentials ---------------------------------------------------------------

LocalizedPotentials::LocalizedPotentials(const BoxGeometry& geom, const RadialPotential& pot,
                                         const ScatteringSolution& sol, const BumpProfile& chi)
    : geom_(geom), sol_(sol), chi_(chi), ell_(geom.ell()) {
  const RadialPotential& ref = sol.potential();
  bool same = ref.kind() == pot.kind() && ref.support_radius() == pot.support_radius();
  for (int i = 0; same && i <= 64; ++i) {
    const double r = pot.support_radius() * i / 64.0;
    same = ref(r) == pot(r);
  }
  if (!same)
    throw MissingScattering("scattering solution was computed for a different potential");
  if (!(pot.support_radius() <= geom.support_margin * ell_))
    throw SupportViolation("R <= " + std::to_string(geom.support_margin) +
                           "*ell is required so that W is defined");
}

double LocalizedPotentials::conv(const Vec3& x) const {
  return chi_.chi_conv_chi({x[0] / ell_, x[1] / ell_, x[2] / ell_});
}

double LocalizedPotentials::chi_box(const Vec3& x) const {
  return chi_.chi({x[0] / ell_, x[1] / ell_, x[2] / ell_});
}

double LocalizedPotentials::W(const Vec3& x) const {
  const double v = sol_.potential()(norm(x));
  return v == 0.0 ? 0.0 : v / conv(x);
}

double LocalizedPotentials::W1(const Vec3& x) const {
  const double r = norm(x);
  if (r > support_radius())
    return 0.0;
  const double g = sol_.g(r);
  return g == 0.0 ? 0.0 : g / conv(x);
}

double LocalizedPotentials::w(const Vec3& x, const Vec3& y) const {
  return chi_box(x) * W({x[0] - y[0], x[1] - y[1], x[2] - y[2]}) * chi_box(y);
}

double LocalizedPotentials::w1(const Vec3& x, const Vec3& y) const {
  return chi_box(x) * W1({x[0] - y[0], x[1] - y[1], x[2] - y[2]}) * chi_box(y);
}

double LocalizedPotentials::w2(const Vec3& x, const Vec3& y) const {
  const Vec3 d{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
  return w1(x, y) * (1.0 + sol_.omega(norm(d)));
}

double LocalizedPotentials::W1_radial_average(double r) const {
  if (r > support_radius())
    return 0.0;
  const double g = sol_.g(r);
  if (g == 0.0)
    return 0.0;
  // octant average; the integrand is even in each coordinate
  const GaussRule& rule = gauss_legendre(12);
  double sum = 0.0;
  for (int i = 0; i < 12; ++i) {
    const double mu = 0.5 * (1.0 + rule.nodes[i]);
    const double st = std::sqrt(1.0 - mu * mu);
    for (int j = 0; j < 12; ++j) {
      const double ph = 0.25 * pi * (1.0 + rule.nodes[j]);
      const Vec3 x{r * st * std::cos(ph), r * st * std::sin(ph), r * mu};
      sum += rule.weights[i] * rule.weights[j] / conv(x);
    }
  }
  return g * sum / 4.0;
}

double LocalizedPotentials::kernel_integral_at(bool with_omega, int level) const {
  // ∬ χ(x/ℓ) K(x-y) χ(y/ℓ) = ∫_{|z|<R} K(z) O(z) dz, O(z) = ℓ³c²∏ ∫φ(t)φ(t - zᵢ/ℓ)dt by direct
  // quadrature; z in spherical coordinates over one octant.
  const double R = support_radius();
  const int nr = 16 * level, na = 8 * level;
  std::vector<double> seg{0.0};
  for (double b : sol_.potential().breakpoints())
    if (b > 0.0 && b < R)
      seg.push_back(b);
  seg.push_back(R);
  const GaussRule& rr = gauss_legendre(nr);
  const GaussRule& ra = gauss_legendre(na);
  const double c2 = chi_.c() * chi_.c();
  auto overlap = [&](double tau) {
    tau = std::abs(tau);
    return gauss_panels([&](double t) { return chi_.phi(t) * chi_.phi(t - tau); }, tau - 0.5,
                        0.5, 2 * level, 24);
  };
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < seg.size(); ++s) {
    const double lo = seg[s], hi = seg[s + 1];
    for (int ir = 0; ir < nr; ++ir) {
      const double r = lo + 0.5 * (hi - lo) * (1.0 + rr.nodes[ir]);
      const double wr = 0.5 * (hi - lo) * rr.weights[ir];
      const double g = sol_.g(r);
      const double radial = with_omega ? g * (1.0 + sol_.omega(r)) : g;
      if (radial == 0.0)
        continue;
      double ang = 0.0;
      for (int i = 0; i < na; ++i) {
        const double mu = 0.5 * (1.0 + ra.nodes[i]);
        const double st = std::sqrt(1.0 - mu * mu);
        for (int j = 0; j < na; ++j) {
          const double ph = 0.25 * pi * (1.0 + ra.nodes[j]);
          const Vec3 z{r * st * std::cos(ph), r * st * std::sin(ph), r * mu};
          const double o = std::pow(ell_, 3) * c2 * overlap(z[0] / ell_) * overlap(z[1] / ell_) *
                           overlap(z[2] / ell_);
          ang += 0.5 * ra.weights[i] * 0.25 * pi * ra.weights[j] * o / conv(z);
        }
      }
      total += wr * r * r * radial * ang;
    }
  }
  return 8.0 * total;
}

LocalizedPotentials::Integral LocalizedPotentials::kernel_integral(bool with_omega) const {
  const double coarse = kernel_integral_at(with_omega, 1);
  const double fine = kernel_integral_at(with_omega, 2);
  return {fine, std::abs(fine - coarse)};
}

LocalizedPotentials::Integral LocalizedPotentials::integral_w1() const {
  return kernel_integral(false);
}

LocalizedPotentials::Integral LocalizedPotentials::integral_w2() const {
  return kernel_integral(true);
}

double LocalizedPotentials::w1_excess_constant() const {
  const double R = support_radius();
  const double u2 = std::pow(R / ell_, 2);
  const GaussRule& rule = gauss_legendre(10);
  std::vector<Vec3> dirs{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const double d2 = 1.0 / std::sqrt(2.0), d3 = 1.0 / std::sqrt(3.0);
  dirs.push_back({d2, d2, 0});
  dirs.push_back({d3, d3, d3});
  for (int i = 0; i < 10; ++i) {
    const double mu = 0.5 * (1.0 + rule.nodes[i]);
    const double st = std::sqrt(1.0 - mu * mu);
    for (int j = 0; j < 10; ++j) {
      const double ph = 0.25 * pi * (1.0 + rule.nodes[j]);
      dirs.push_back({st * std::cos(ph), st * std::sin(ph), mu});
    }
  }
  double C = 0.0;
  for (int k = 1; k <= 32; ++k) {
    const double r = R * k / 32.0;
    for (const auto& d : dirs) {
      const double excess = 1.0 / conv({r * d[0], r * d[1], r * d[2]}) - 1.0;
      C = std::max(C, excess / u2);
    }
  }
  return C;
}

IdentityReport check_integral_identities(const LocalizedPotentials& lp, double tol) {
  IdentityReport rep;
  const double ell = lp.ell();
  const double a = lp.scattering().a();
  const double l3 = ell * ell * ell;
  const nlohmann::json in{{"ell", ell}, {"a", a}, {"R", lp.support_radius()},
                          {"steepness", lp.bump().steepness()}};

  const auto i1 = lp.integral_w1();
  const double ref1 = 8.0 * pi * l3 * a;
  auto& r1 = rep.add("localization.integral-w1", "integral-w1-equals-8pi-ell3-a", i1.value,
                     std::abs(i1.value - ref1) / ref1, tol, in);
  r1.inputs["resolution_diff"] = i1.resolution_diff / ref1;

  const auto i2 = lp.integral_w2();
  const double ref2 = l3 * (8.0 * pi * a + lp.scattering().integral_g_omega());
  auto& r2 = rep.add("localization.integral-w2", "integral-w2-equals-ell3-8pi-a-plus-g-omega",
                     i2.value, std::abs(i2.value - ref2) / ref2, tol, in);
  r2.inputs["resolution_diff"] = i2.resolution_diff / ref2;

  const double C = lp.w1_excess_constant();
  auto& rc = rep.add("localization.w1-excess-constant", "w1-bounded-by-1-plus-C-R-over-ell-sq-g",
                     C, 0.0, tol, in);
  rc.pass = std::isfinite(C) && C >= 0.0;
  return rep;
}

// ---- sliding identity ------------------------------------------------------------------

namespace {

double wrap(double x, double L) {
  x = std::fmod(x + 0.5 * L, L);
  if (x < 0.0)
    x += L;
  return x - 0.5 * L;
}

} // namespace

std::vector<SlidingSample> sliding_samples(const LocalizedPotentials& lp,
                                           const std::vector<std::pair<Vec3, Vec3>>& pairs,
                                           const SlidingOptions& opts) {
  const BoxGeometry& geom = lp.geometry();
  const double ell = lp.ell(), L = geom.L();
  if (!(2.0 * ell < L))
    throw GeometryViolation("2*ell < L is required for the sliding identity");
  const BumpProfile& chi = lp.bump();
  const RadialPotential& v = lp.scattering().potential();
  const ScatteringSolution& sol = lp.scattering();

  auto phi_per = [&](double t) {
    double s = 0.0;
    for (int m = -1; m <= 1; ++m)
      s += chi.phi(t + m * L / ell);
    return s;
  };

  // ∫_{-L/2}^{L/2} φper((x-u)/ℓ) φper((y-u)/ℓ) du
  auto u_integral = [&](double x, double y) {
    std::vector<double> bps{-0.5 * L, 0.5 * L};
    for (double c : {x - 0.5 * ell, x + 0.5 * ell, y - 0.5 * ell, y + 0.5 * ell})
      bps.push_back(wrap(c, L));
    std::sort(bps.begin(), bps.end());
    auto f = [&](double u) { return phi_per((x - u) / ell) * phi_per((y - u) / ell); };
    if (opts.gauss_points > 0) {
      double sum = 0.0;
      for (std::size_t s = 0; s + 1 < bps.size(); ++s)
        if (bps[s + 1] > bps[s])
          sum += integrate_composite(f, bps[s], bps[s + 1], opts.panels, opts.gauss_points);
      return sum;
    }
    return integrate_adaptive(f, bps, 1e-14, 1e-300, 1, 10, 24).value;
  };

  // Σ_{|j|∞<=1} K(d + Lj)
  auto periodize = [&](const Vec3& d, auto&& kernel) {
    double s = 0.0;
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        for (int k = -1; k <= 1; ++k)
          s += kernel(Vec3{d[0] + i * L, d[1] + j * L, d[2] + k * L});
    return s;
  };

  std::vector<SlidingSample> out;
  out.reserve(pairs.size());
  for (const auto& [x, y] : pairs) {
    const Vec3 d{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
    double prod = chi.c() * chi.c();
    for (int i = 0; i < 3; ++i)
      prod *= u_integral(x[i], y[i]);
    const double l3 = ell * ell * ell;
    SlidingSample s;
    s.x = x;
    s.y = y;
    s.lhs_v = periodize(d, [&](const Vec3& z) { return lp.W(z); }) * prod / l3;
    s.rhs_v = periodize(d, [&](const Vec3& z) { return v(norm(z)); });
    s.lhs_g = periodize(d, [&](const Vec3& z) { return lp.W1(z); }) * prod / l3;
    s.rhs_g = periodize(d, [&](const Vec3& z) {
      const double r = norm(z);
      return r > sol.support_radius() ? 0.0 : sol.g(r);
    });
    auto rel = [](double lhs, double rhs) {
      return rhs != 0.0 ? std::abs(lhs - rhs) / std::abs(rhs) : std::abs(lhs);
    };
    s.residual_v = rel(s.lhs_v, s.rhs_v);
    s.residual_g = rel(s.lhs_g, s.rhs_g);
    out.push_back(s);
  }
  return out;
}

IdentityReport sliding_identity_check(const LocalizedPotentials& lp,
                                      const std::vector<std::pair<Vec3, Vec3>>& pairs, double tol,
                                      const SlidingOptions& opts) {
  IdentityReport rep;
  const auto samples = sliding_samples(lp, pairs, opts);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    std::ostringstream id;
    id << "localization.sliding.pair" << (i < 10 ? "0" : "") << i;
    const nlohmann::json in{{"x", s.x}, {"y", s.y}};
    rep.add(id.str() + ".v", "sliding-average-of-w-equals-v-per", s.lhs_v, s.residual_v, tol, in);
    rep.add(id.str() + ".g", "sliding-average-of-w1-equals-g-per", s.lhs_g, s.residual_g, tol, in);
  }
  return rep;
}

GpScaling gp_scaling_convert(double N, double kappa, double lambda, double a) {
  if (!(kappa > 0.0 && kappa < 2.0 / 3.0))
    throw DomainError("kappa must lie in (0, 2/3)");
  if (!(N >= 1.0))
    throw DomainError("N >= 1 is required");
  if (!(lambda > 0.0) || !(a > 0.0))
    throw DomainError("lambda and a must be positive");
  GpScaling out;
  out.rho = std::pow(N, 3.0 * kappa - 2.0) / (lambda * lambda * lambda);
  out.L = std::pow(N, 1.0 - kappa) * lambda;
  out.delta = 1.0 / (4.0 / kappa - 6.0); // kappa = 2/5 lands on 1/4 exactly
  out.C_lambda = std::pow(a / lambda, 0.5 + 3.0 * out.delta);
  return out;
}

} // namespace bosecert
