#include "bosecert/scattering.hpp"

#include "bosecert/errors.hpp"
#include "bosecert/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace bosecert {

namespace {

constexpr double pi = std::numbers::pi;

double sinc(double x) { return std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 + x * x * x * x / 120.0 : std::sin(x) / x; }

// Segment endpoints 0 = b_0 < b_1 < ... < b_m = R.
std::vector<double> segments_of(const RadialPotential& pot) {
  std::vector<double> s{0.0};
  for (double b : pot.breakpoints())
    if (b > 0.0 && b < pot.support_radius())
      s.push_back(b);
  s.push_back(pot.support_radius());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

struct Trajectory {
  std::vector<double> r, u, du;
  std::vector<double> ddu_left, ddu_right; // one-sided u'' at the cell ends
};

// RK4 for (u, u')' = (u', v u / 2) with `total` steps spread over the segments by length.
Trajectory integrate(const RadialPotential& pot, const std::vector<double>& seg, int total) {
  Trajectory t;
  const double R = pot.support_radius();
  double u = 0.0, du = 1.0;
  t.r.push_back(0.0);
  t.u.push_back(u);
  t.du.push_back(du);
  for (std::size_t s = 0; s + 1 < seg.size(); ++s) {
    const double lo = seg[s], hi = seg[s + 1];
    const int n = std::max(8, static_cast<int>(std::ceil(total * (hi - lo) / R)));
    const double h = (hi - lo) / n;
    const double eta = 1e-13 * (hi - lo);
    auto v = [&](double r) { return pot(std::clamp(r, lo + eta, hi - eta)); };
    for (int i = 0; i < n; ++i) {
      const double r0 = lo + i * h;
      const double v0 = v(r0), vm = v(r0 + 0.5 * h), v1 = v(r0 + h);
      const double k1u = du, k1d = 0.5 * v0 * u;
      const double k2u = du + 0.5 * h * k1d, k2d = 0.5 * vm * (u + 0.5 * h * k1u);
      const double k3u = du + 0.5 * h * k2d, k3d = 0.5 * vm * (u + 0.5 * h * k2u);
      const double k4u = du + h * k3d, k4d = 0.5 * v1 * (u + h * k3u);
      t.ddu_left.push_back(0.5 * v0 * u);
      u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
      du += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
      t.ddu_right.push_back(0.5 * v1 * u);
      t.r.push_back(i + 1 == n ? hi : lo + (i + 1) * h);
      t.u.push_back(u);
      t.du.push_back(du);
    }
  }
  return t;
}

double read_a(const Trajectory& t, double R) { return R - t.u.back() / t.du.back(); }

} // namespace

// ---- RadialPotential -------------------------------------------------------------------

RadialPotential RadialPotential::square_well(double v0, double R) {
  RadialPotential p;
  p.kind_ = Kind::SquareWell;
  p.R_ = R;
  p.v0_ = v0;
  p.profile_ = [v0](double) { return v0; };
  return p;
}

RadialPotential RadialPotential::tabulated(std::vector<double> r, std::vector<double> v, double R) {
  if (r.size() != v.size() || r.size() < 2)
    throw InvalidPotential("table needs at least two (r, v) rows of equal length");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1]))
      throw InvalidPotential("table radii must be strictly increasing");
  RadialPotential p;
  p.kind_ = Kind::Tabulated;
  p.R_ = R;
  for (double ri : r)
    if (ri > 0.0 && ri < R)
      p.breakpoints_.push_back(ri);
  p.profile_ = [r = std::move(r), v = std::move(v)](double x) {
    if (x <= r.front())
      return v.front();
    if (x >= r.back())
      return v.back();
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
    const double t = (x - r[i]) / (r[i + 1] - r[i]);
    return (1.0 - t) * v[i] + t * v[i + 1];
  };
  return p;
}

RadialPotential RadialPotential::from_callable(std::function<double(double)> v, double R,
                                               std::vector<double> breakpoints) {
  RadialPotential p;
  p.kind_ = Kind::Callable;
  p.R_ = R;
  p.profile_ = std::move(v);
  p.breakpoints_ = std::move(breakpoints);
  return p;
}

std::string RadialPotential::kind_name() const {
  switch (kind_) {
  case Kind::SquareWell:
    return "square-well";
  case Kind::Tabulated:
    return "tabulated";
  case Kind::Callable:
    return "callable";
  }
  return "unknown";
}

RadialPotential RadialPotential::dilated(double lambda) const {
  RadialPotential p = *this;
  p.R_ = R_ * lambda;
  p.v0_ = v0_ / (lambda * lambda);
  for (double& b : p.breakpoints_)
    b *= lambda;
  p.profile_ = [f = profile_, lambda](double r) { return f(r / lambda) / (lambda * lambda); };
  return p;
}

RadialPotential RadialPotential::scaled(double c) const {
  RadialPotential p = *this;
  p.v0_ = v0_ * c;
  p.profile_ = [f = profile_, c](double r) { return c * f(r); };
  return p;
}

void RadialPotential::validate() const {
  if (!(R_ > 0.0) || !std::isfinite(R_))
    throw InvalidPotential("support radius must be positive and finite");
  if (!profile_)
    throw InvalidPotential("missing profile");
  bool nonzero = false;
  constexpr int samples = 4096;
  for (int i = 0; i <= samples; ++i) {
    const double r = R_ * i / samples;
    const double v = profile_(r);
    if (!std::isfinite(v))
      throw InvalidPotential("profile is not finite at r = " + std::to_string(r));
    if (v < 0.0)
      throw InvalidPotential("profile is negative at r = " + std::to_string(r));
    nonzero = nonzero || v > 0.0;
  }
  if (!nonzero)
    throw InvalidPotential("profile vanishes identically on its support");
}

RadialPotential load_potential_table(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open potential table " + path);
  std::string line;
  if (!std::getline(in, line))
    throw InvalidPotential("empty potential table " + path);
  const auto pos = line.find("R=");
  if (line.rfind('#', 0) != 0 || pos == std::string::npos)
    throw InvalidPotential("first line of " + path + " must be '# R=<value>'");
  double R = 0.0;
  try {
    R = std::stod(line.substr(pos + 2));
  } catch (const std::exception&) {
    throw InvalidPotential("unreadable support radius in " + path);
  }
  std::vector<double> r, v;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream row(line);
    double ri = 0.0, vi = 0.0;
    if (!(row >> ri >> vi))
      throw InvalidPotential("malformed row in " + path + ": " + line);
    r.push_back(ri);
    v.push_back(vi);
  }
  return RadialPotential::tabulated(std::move(r), std::move(v), R);
}

// ---- Fourier transform -----------------------------------------------------------------

double radial_fourier(const RadialProfile& prof, double k, double rel_tol) {
  if (k < 0.0)
    throw QuadratureFailure("negative wavenumber");
  std::vector<double> bps{0.0};
  for (double b : prof.breakpoints)
    if (b > 0.0 && b < prof.support)
      bps.push_back(b);
  bps.push_back(prof.support);
  std::sort(bps.begin(), bps.end());
  const int start = std::max(2, static_cast<int>(std::ceil(k * prof.support / pi)));
  auto integrand = [&](double r) { return 4.0 * pi * prof.f(r) * sinc(k * r) * r * r; };
  double value = integrate_adaptive(integrand, bps, rel_tol, 1e-300, start).value;
  if (prof.coulomb_tail != 0.0) {
    if (k == 0.0)
      throw QuadratureFailure("c/r tail has no transform at k = 0");
    value += 4.0 * pi * prof.coulomb_tail * std::cos(k * prof.support) / (k * k);
  }
  return value;
}

// ---- ScatteringSolution ----------------------------------------------------------------

std::size_t ScatteringSolution::cell(double r) const {
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t i = it == r_.begin() ? 0 : static_cast<std::size_t>(it - r_.begin()) - 1;
  return std::min(i, r_.size() - 2);
}

double ScatteringSolution::u(double r) const {
  const double R = support_radius();
  if (r >= R)
    return r - a_; // affine continuation, u'(R) = 1 after normalization
  const std::size_t i = cell(r);
  const double h = r_[i + 1] - r_[i];
  return hermite5((r - r_[i]) / h, h, u_[i], du_[i], ddu_left_[i], u_[i + 1], du_[i + 1],
                  ddu_right_[i]);
}

double ScatteringSolution::omega(double r) const {
  if (r >= support_radius())
    return a_ / r;
  if (r < 1e-300)
    return 1.0 - du_.front();
  return 1.0 - u(r) / r;
}

double ScatteringSolution::g(double r) const {
  if (r > support_radius())
    return 0.0;
  if (r < 1e-300)
    return pot_(0.0) * du_.front();
  return pot_(r) * u(r) / r;
}

double ScatteringSolution::integrate_cells(const std::function<double(double)>& f) const {
  const GaussRule& rule = gauss_legendre(6);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < r_.size(); ++i) {
    const double lo = r_[i], h = r_[i + 1] - r_[i];
    double part = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      part += rule.weights[q] * f(lo + 0.5 * h * (1.0 + rule.nodes[q]));
    sum += 0.5 * h * part;
  }
  return sum;
}

double ScatteringSolution::integral_g() const {
  return 4.0 * pi * integrate_cells([this](double r) { return g(r) * r * r; });
}

double ScatteringSolution::integral_g_omega() const {
  return 4.0 * pi * integrate_cells([this](double r) { return g(r) * omega(r) * r * r; });
}

RadialProfile ScatteringSolution::omega_profile() const {
  return {[this](double r) { return omega(r); }, support_radius(), pot_.breakpoints(), a_};
}

RadialProfile ScatteringSolution::g_profile() const {
  return {[this](double r) { return g(r); }, support_radius(), pot_.breakpoints(), 0.0};
}

ScatteringSolution solve_scattering(const RadialPotential& pot, double r_max, double tol) {
  pot.validate();
  const double R = pot.support_radius();
  if (!(r_max > R))
    throw InvalidPotential("r_max must exceed the support radius");
  if (!(tol > 0.0))
    throw InvalidPotential("tolerance must be positive");

  const auto seg = segments_of(pot);
  int n = 4096;
  Trajectory coarse = integrate(pot, seg, n);
  double a_coarse = read_a(coarse, R);
  for (;;) {
    if (n > (1 << 22))
      throw NonConvergence("step doubling exhausted without meeting the Richardson estimate");
    n *= 2;
    Trajectory fine = integrate(pot, seg, n);
    const double a_fine = read_a(fine, R);
    const double err = std::abs(a_fine - a_coarse) / 15.0;
    if (std::isfinite(a_fine) && err <= tol * std::abs(a_fine)) {
      ScatteringSolution sol(pot);
      const double c = fine.du.back();
      sol.a_ = a_fine;
      sol.tol_ = tol;
      sol.richardson_error_ = err;
      sol.r_max_ = r_max;
      sol.r_ = std::move(fine.r);
      sol.u_ = std::move(fine.u);
      sol.du_ = std::move(fine.du);
      sol.ddu_left_ = std::move(fine.ddu_left);
      sol.ddu_right_ = std::move(fine.ddu_right);
      for (auto* vec : {&sol.u_, &sol.du_, &sol.ddu_left_, &sol.ddu_right_})
        for (double& x : *vec)
          x /= c;
      sol.grid_ = sol.r_;
      constexpr int outer = 64;
      for (int j = 1; j <= outer; ++j)
        sol.grid_.push_back(R * std::pow(r_max / R, static_cast<double>(j) / outer));

      if (!(sol.a_ > 0.0))
        throw GridTooCoarse("non-positive scattering length");
      double prev = sol.omega(0.0);
      for (double r : sol.grid_) {
        const double w = sol.omega(r);
        if (w < -1e-12 || w > 1.0 + 1e-12 || w > prev + 1e-12)
          throw GridTooCoarse("omega leaves [0,1] or increases at r = " + std::to_string(r));
        prev = w;
      }
      const double a_check = sol.integral_g() / (8.0 * pi);
      if (std::abs(a_check - sol.a_) > std::max(tol, 1e-12) * sol.a_)
        throw GridTooCoarse("a differs from (8π)^-1 ∫g beyond tolerance");
      return sol;
    }
    coarse = std::move(fine);
    a_coarse = a_fine;
  }
}

// ---- identities ------------------------------------------------------------------------

IdentityReport check_scattering_identities(const ScatteringSolution& sol,
                                           const std::vector<double>& k_grid, double tol) {
  IdentityReport rep;
  const double a = sol.a();
  const double g0 = 8.0 * pi * a;
  const auto gp = sol.g_profile();
  const auto wp = sol.omega_profile();

  for (double k : k_grid) {
    nlohmann::json in{{"k", k}};
    if (k == 0.0) {
      const double ghat0 = radial_fourier(gp, 0.0);
      rep.add("scattering.fourier.k0-a-check", "g-hat-at-zero-equals-8pi-a", ghat0,
              std::abs(ghat0 - g0) / g0, tol, in);
      continue;
    }
    const double ghat = radial_fourier(gp, k);
    const double what = radial_fourier(wp, k);
    const double lhs = 2.0 * k * k * what;
    std::ostringstream id;
    id << "scattering.fourier.k=" << k;
    rep.add(id.str(), "fourier-identity-2k2-omega-hat-equals-g-hat", lhs,
            std::abs(lhs - ghat) / g0, tol, in);
  }

  const double a_from_g = sol.integral_g() / (8.0 * pi);
  rep.add("scattering.a-from-integral-g", "a-equals-integral-g-over-8pi", a_from_g,
          std::abs(a_from_g - a) / a, tol);

  // -Δω = u''/r against g/2 = v u / (2r), central differences at two spacings.
  const double R = sol.support_radius();
  auto fd_residual = [&](double h) {
    double worst = 0.0, scale = 0.0;
    const auto& bps = sol.potential().breakpoints();
    for (int i = 1; i < 200; ++i) {
      const double r = R * i / 200.0;
      if (r - h <= 0.0 || r + h >= R)
        continue;
      bool near_break = false;
      for (double b : bps)
        near_break = near_break || std::abs(r - b) <= h;
      if (near_break)
        continue;
      const double lap = (sol.u(r + h) - 2.0 * sol.u(r) + sol.u(r - h)) / (h * h * r);
      const double half_g = 0.5 * sol.g(r);
      worst = std::max(worst, std::abs(lap - half_g));
      scale = std::max(scale, std::abs(half_g));
    }
    return scale > 0.0 ? worst / scale : worst;
  };
  const double h1 = 2e-3 * R, h2 = 1e-3 * R;
  const double e1 = fd_residual(h1), e2 = fd_residual(h2);
  const double order = (e1 > 0.0 && e2 > 0.0) ? std::log2(e1 / e2) : 2.0;
  rep.add("scattering.fd-laplacian", "minus-laplacian-omega-equals-half-g", e2, e2,
          std::max(tol, 1e-4), {{"h", h2}});
  auto& ord = rep.add("scattering.fd-laplacian-order", "minus-laplacian-omega-equals-half-g",
                      order, 0.0, 0.0, {{"h", {h1, h2}}});
  ord.pass = order >= 1.8 || e2 < 1e-12;
  return rep;
}

} // namespace bosecert
