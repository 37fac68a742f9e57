#include "bosecert/bogoliubov.hpp"

#include "bosecert/errors.hpp"
#include "bosecert/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <limits>
#include <numbers>
#include <sstream>

namespace bosecert {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int order = 16;

double sinc(double x) { return std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

struct Rule {
  std::vector<double> x, w;
};

// Gauss nodes over consecutive pieces, each split into `splits` panels.
Rule piecewise_rule(const std::vector<double>& cuts, const std::vector<int>& splits) {
  const GaussRule& g = gauss_legendre(order);
  Rule out;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s], hi = cuts[s + 1];
    if (!(hi > lo))
      continue;
    const int m = splits[s];
    const double h = (hi - lo) / m;
    for (int p = 0; p < m; ++p) {
      const double mid = lo + (p + 0.5) * h;
      for (int i = 0; i < order; ++i) {
        out.x.push_back(mid + 0.5 * h * g.nodes[i]);
        out.w.push_back(0.5 * h * g.weights[i]);
      }
    }
  }
  return out;
}

// Momentum pieces: constant region, geometric grading after the τ cut, then uniform panels.
Rule momentum_rule(double cut, double scale, double p_max, double R, int refine) {
  std::vector<double> cuts{0.0};
  if (cut > 0.0 && cut < p_max) {
    cuts.push_back(cut);
    double d = std::max(scale, 1e-9 * std::max(cut, 1.0));
    while (cut + d < std::min(cut + 1.0, p_max)) {
      cuts.push_back(cut + d);
      d *= 2.0;
    }
  }
  const double h = std::min(1.0, pi / (2.0 * R));
  double p = cuts.back();
  while (p + h < p_max) {
    p += h;
    cuts.push_back(p);
  }
  cuts.push_back(p_max);
  return piecewise_rule(cuts, std::vector<int>(cuts.size(), refine));
}

} // namespace

// ---- RadialTransform ------------------------------------------------------------------

RadialTransform::RadialTransform(const std::function<double(double)>& f, double R,
                                 const std::vector<double>& breakpoints, double p_max,
                                 int refine) {
  std::vector<double> cuts{0.0};
  for (double b : breakpoints)
    if (b > 0.0 && b < R)
      cuts.push_back(b);
  cuts.push_back(R);
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> splits;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
    splits.push_back(refine * (static_cast<int>(std::ceil(p_max * (cuts[s + 1] - cuts[s]) / 6.0)) + 2));
  const Rule rule = piecewise_rule(cuts, splits);
  r_ = rule.x;
  w_.resize(r_.size());
  for (std::size_t i = 0; i < r_.size(); ++i)
    w_[i] = 4.0 * pi * rule.w[i] * r_[i] * r_[i] * f(r_[i]);
  edge_ = 4.0 * pi * R * std::abs(f(R * (1.0 - 1e-12)));
}

double RadialTransform::operator()(double p) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < r_.size(); ++i)
    sum += w_[i] * sinc(p * r_[i]);
  return sum;
}

// ---- QuadraticSymbol ------------------------------------------------------------------

namespace {
RadialTransform w1_transform(const LocalizedPotentials& lp, double p_max, int refine) {
  return RadialTransform([&lp](double r) { return lp.W1_radial_average(r); },
                         lp.support_radius(), lp.scattering().potential().breakpoints(), p_max,
                         refine);
}
} // namespace

QuadraticSymbol::QuadraticSymbol(const LocalizedPotentials& lp, double n, double s, double p_max,
                                 int refine)
    : transform_(w1_transform(lp, p_max, refine)), ell_(lp.ell()), n_(n), s_(s),
      R_(lp.support_radius()) {
  if (n < 0.0 || s <= 0.0)
    throw DomainError("quadratic symbol needs n >= 0 and s > 0");
  w0_ = transform_.at_zero();
}

QuadraticSymbol::QuadraticSymbol(double ell, double n, double s)
    : transform_([](double) { return 0.0; }, 1.0, {}, 1.0), ell_(ell), n_(n), s_(s),
      zero_(true) {}

QuadraticSymbol QuadraticSymbol::zero(double ell, double n, double s) {
  return QuadraticSymbol(ell, n, s);
}

double QuadraticSymbol::tau(double p) const {
  const double cut = 1.0 / (s_ * ell_);
  return std::max(0.0, p * p - cut * cut);
}

double QuadraticSymbol::A(double p) const {
  return ell_ * ell_ * ell_ * tau(p) / (n_ + 1.0) + 2.0 * w0_;
}

double expansion_constant() { return 16.0 * (7.0 / 8.0 - std::sqrt(3.0) / 2.0); }

// ---- Bogoliubov integrals ---------------------------------------------------------------

namespace {

struct Sums {
  BogoliubovIntegrals out;
  double envelope = 0.0; // max |Ŵ₁(p)|p² over the upper half of the range
};

// Momentum nodes for a symbol; the grading after the cut uses the n = 0 width, the finest one.
Rule symbol_rule(const QuadraticSymbol& sym, double p_max, int refine) {
  const double ell3 = std::pow(sym.ell(), 3);
  const double cut = 1.0 / (sym.s() * sym.ell());
  const double scale = sym.W1_hat0() > 0.0 ? sym.W1_hat0() / (ell3 * std::max(cut, 1e-12))
                                           : 1e-3 * std::max(cut, 1.0);
  return momentum_rule(cut, scale, p_max, sym.support_radius(), refine);
}

std::vector<double> symbol_values(const QuadraticSymbol& sym, const Rule& rule) {
  std::vector<double> W(rule.x.size());
  for (std::size_t i = 0; i < W.size(); ++i)
    W[i] = sym.W1_hat(rule.x[i]);
  return W;
}

Sums integrate_symbol(const QuadraticSymbol& sym, const Rule& rule, const std::vector<double>& Wv,
                      double p_max) {
  const double ell3 = std::pow(sym.ell(), 3);
  const double n = sym.n();
  const double w0 = sym.W1_hat0();
  const double norm = 1.0 / (2.0 * pi * pi);
  Sums s;
  auto& o = s.out;
  double total = 0.0, split = 0.0, half = 0.0, rem = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double p = rule.x[i], w = rule.w[i];
    const double W = Wv[i];
    const double A = sym.A(p);
    const double W2 = W * W;
    if (A <= 0.0) // only the zero symbol, where W vanishes too
      continue;
    const double disc = std::sqrt(std::max(0.0, A * A - W2));
    const double gap = W2 / (A + disc); // A - √(A²-W²) without cancellation
    if (A > 0.0)
      o.max_ratio = std::max(o.max_ratio, std::abs(W) / A);
    if (A * A < W2 || gap > W2 / A * (1.0 + 1e-14))
      o.expansion_holds = false;
    total += w * p * p * gap;
    split += w * 0.5 * W2 * (p * p / A - (n + 1.0) / ell3);
    half += w * p * p * W2 / (2.0 * A);
    rem += w * p * p * std::pow(w0, 4) / (2.0 * A * A * A);
    if (p >= 0.5 * p_max)
      s.envelope = std::max(s.envelope, std::abs(W) * p * p);
  }
  o.total = norm * total;
  // II decays like p⁻⁶ and is summed directly; I follows from I + II = -(n/2)(2π)⁻³∫Ŵ²/(2A).
  o.II = -0.5 * n * norm * split;
  o.I = -0.5 * n * norm * half - o.II;
  o.remainder = n * norm * rem;
  o.p_max = p_max;
  return s;
}

// Relative size of the 1/p² envelope tails beyond P, worst over total and the remainder.
double tail_bound(const QuadraticSymbol& sym, const BogoliubovIntegrals& o, double D, double P) {
  const double n = sym.n();
  const double ell3 = std::pow(sym.ell(), 3);
  const double cut = 1.0 / (sym.s() * sym.ell());
  const double grow = P > cut ? P * P / (P * P - cut * cut) : 1e300;
  const double norm = 1.0 / (2.0 * pi * pi);
  const double P3 = P * P * P;
  const double tT = norm * (n + 1.0) * D * D / (3.0 * ell3 * P3) * grow;
  const double tR = n * norm * std::pow(sym.W1_hat0(), 4) * std::pow(n + 1.0, 3) /
                    (2.0 * ell3 * ell3 * ell3) / (3.0 * P3) * grow * grow * grow;
  auto rel = [](double t, double v) { return v != 0.0 ? t / std::abs(v) : t; };
  return std::max(rel(tT, o.total), rel(tR, o.remainder));
}

BogoliubovIntegrals evaluate(const QuadraticSymbol& sym, const Rule& rule,
                             const std::vector<double>& Wv, double p_max) {
  auto s = integrate_symbol(sym, rule, Wv, p_max);
  auto& o = s.out;
  const double lhs = -0.5 * sym.n() * o.total;
  const double rhs = o.I + o.II - expansion_constant() * o.remainder;
  o.bound_holds = lhs >= rhs - 1e-12 * (std::abs(lhs) + std::abs(rhs));
  o.tail_estimate = tail_bound(sym, o, std::max(sym.edge_envelope(), s.envelope), p_max);
  return o;
}

bool close(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y)) + 1e-300;
}

// Transforms cached per cutoff so that several n reuse the same Ŵ₁.
class BogoliubovSolver {
public:
  BogoliubovSolver(const LocalizedPotentials& lp, double s, double rel_tol, int refine)
      : lp_(lp), s_(s), tol_(rel_tol), refine_(refine) {
    const double cut = 1.0 / (s * lp.ell());
    p0_ = std::max(4.0 * cut, 16.0 / lp.support_radius());
  }

  BogoliubovIntegrals run(double n) {
    constexpr int max_doublings = 10;
    double P = p0_;
    BogoliubovIntegrals prev = at(P, n);
    for (int d = 0; d < max_doublings; ++d) {
      P *= 2.0;
      BogoliubovIntegrals cur = at(P, n);
      if (close(cur.total, prev.total, tol_) && close(cur.remainder, prev.remainder, tol_) && cur.tail_estimate <= tol_)
        return cur;
      prev = cur;
    }
    std::ostringstream msg;
    msg << "Bogoliubov integral for n = " << n << " not converged at p_max = " << P
        << " (tail " << prev.tail_estimate << ")";
    throw TailNotConverged(msg.str());
  }

private:
  struct Level {
    std::unique_ptr<QuadraticSymbol> sym;
    Rule rule;
    std::vector<double> W;
  };

  BogoliubovIntegrals at(double P, double n) {
    auto it = cache_.find(P);
    if (it == cache_.end()) {
      Level lv;
      lv.sym = std::make_unique<QuadraticSymbol>(lp_, 0.0, s_, P, refine_);
      lv.rule = symbol_rule(*lv.sym, P, refine_);
      lv.W = symbol_values(*lv.sym, lv.rule);
      it = cache_.emplace(P, std::move(lv)).first;
    }
    const Level& lv = it->second;
    return evaluate(lv.sym->with_n(n), lv.rule, lv.W, P);
  }

  const LocalizedPotentials& lp_;
  double s_, tol_;
  int refine_;
  double p0_ = 1.0;
  std::map<double, Level> cache_;
};

} // namespace

BogoliubovIntegrals bogoliubov_integral(const QuadraticSymbol& sym, double p_max, int refine) {
  const Rule rule = symbol_rule(sym, p_max, refine);
  return evaluate(sym, rule, symbol_values(sym, rule), p_max);
}

BogoliubovIntegrals bogoliubov_integral(const LocalizedPotentials& lp, double n, double s,
                                        double rel_tol, int refine) {
  if (n < 0.0)
    throw DomainError("particle number must be non-negative");
  BogoliubovSolver solver(lp, s, rel_tol, refine);
  return solver.run(n);
}

// ---- momentum-space ∫gω -----------------------------------------------------------------

MomentumCheck g_omega_momentum_check(const ScatteringSolution& sol, double rel_tol) {
  const RadialProfile prof = sol.g_profile();
  const double R = sol.support_radius();
  MomentumCheck out;
  out.reference = sol.integral_g_omega();
  double P = 32.0 / R;
  for (int d = 0; d < 12; ++d, P *= 2.0) {
    const RadialTransform gh(prof.f, R, prof.breakpoints, P);
    const double h = std::min(1.0, pi / (2.0 * R));
    std::vector<double> cuts{0.0};
    while (cuts.back() + h < P)
      cuts.push_back(cuts.back() + h);
    cuts.push_back(P);
    const Rule rule = piecewise_rule(cuts, std::vector<int>(cuts.size(), 1));
    double sum = 0.0, env = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double v = gh(rule.x[i]);
      sum += rule.w[i] * v * v;
      if (rule.x[i] >= 0.5 * P)
        env = std::max(env, std::abs(v) * rule.x[i] * rule.x[i]);
    }
    const double norm = 1.0 / (4.0 * pi * pi);
    const double edge = gh.edge_envelope();
    // the jump at R gives ĝ ≈ -edge·cos(pR)/p², whose square averages to edge²/(2p⁴)
    out.value = norm * (sum + edge * edge / (6.0 * P * P * P));
    const double D = std::max(edge, env);
    out.tail_estimate = norm * D * D / (3.0 * P * P * P);
    out.p_max = P;
    if (out.tail_estimate <= rel_tol * std::abs(out.value))
      break;
  }
  out.relative_residual = std::abs(out.value - out.reference) / std::abs(out.reference);
  if (out.tail_estimate > rel_tol * std::abs(out.value))
    throw TailNotConverged("momentum-space ∫gω tail did not reach tolerance");
  return out;
}

// ---- energy bookkeeping -----------------------------------------------------------------

double compute_A0(double n0, double rho_mu, double ell, double iint_w1, double iint_w2) {
  const double ell3 = ell * ell * ell;
  const double d = rho_mu - (n0 - 1.0) / ell3;
  return n0 * (n0 - 1.0) / (2.0 * ell3 * ell3) * iint_w2 -
         (rho_mu * n0 / ell3 + 0.25 * d * d) * iint_w1;
}

double compute_A0(double n0, const LocalizedPotentials& lp) {
  return compute_A0(n0, lp.geometry().rho_mu, lp.ell(), lp.integral_w1().value,
                    lp.integral_w2().value);
}

Partition partition_particles(long M, double Xi, double rho_ell3) {
  if (M < 0 || Xi < 3.0 || rho_ell3 < 1.0 - 1e-12)
    throw InfeasiblePartition("partition needs M >= 0, Ξ >= 3 and ρℓ³ >= 1");
  const long lo = static_cast<long>(std::ceil(Xi * rho_ell3 - 1e-9));
  const long hi = static_cast<long>(std::floor((Xi + 1.0) * rho_ell3 + 1e-9));
  if (lo > hi)
    throw InfeasiblePartition("empty admissible group size range");
  Partition out;
  if (M == 0)
    return out;
  if (M < lo) {
    out.sizes = {M};
    out.single_short_group = true;
    return out;
  }
  const long groups = (M + hi - 1) / hi;
  if (groups * lo <= M) {
    const long base = M / groups, extra = M % groups;
    for (long g = 0; g < groups; ++g)
      out.sizes.push_back(base + (g < extra ? 1 : 0));
  } else {
    for (long g = 0; g + 1 < groups; ++g)
      out.sizes.push_back(hi);
    out.sizes.push_back(M - (groups - 1) * hi);
  }
  return out;
}

double energy_main(double n, double rho_mu, double a, double ell) {
  const double ell3 = ell * ell * ell;
  const double d = rho_mu * ell3 - n;
  return -4.0 * pi * a * rho_mu * rho_mu * ell3 + 2.0 * pi * a / ell3 * d * d;
}

EnergyBudget assemble_box_bound(const LocalizedPotentials& lp, const BudgetConstants& k) {
  const BoxGeometry& geom = lp.geometry();
  EnergyBudget out;
  out.geom = geom;
  out.ell = lp.ell();
  out.rho_ell3 = geom.rho_ell3();
  out.integral_g_omega = lp.scattering().integral_g_omega();
  const double a = lp.scattering().a();
  const double rho = geom.rho_mu;
  const double ell3 = out.ell * out.ell * out.ell;
  const double scale = rho * rho * a * ell3 * std::sqrt(geom.diluteness());
  const double main0 = -4.0 * pi * rho * rho * a * ell3;
  const long n_max = static_cast<long>(std::floor((geom.Xi + 1.0) * out.rho_ell3 + 1e-9));
  const double lo = geom.Xi * out.rho_ell3;
  BogoliubovSolver solver(lp, geom.s, k.rel_tol, k.refine);
  out.C0_realized = -std::numeric_limits<double>::infinity();
  for (long n = 0; n <= n_max; ++n) {
    EnergyRow row;
    row.n = n;
    const double nn = static_cast<double>(n);
    row.E_main = energy_main(nn, rho, a, out.ell);
    row.E_gap_coeff =
        geom.b / (out.ell * out.ell) - k.C_gap * a * ((nn + 1.0) / ell3 + rho);
    row.gap_dominates = row.E_gap_coeff >= 0.0;
    row.bogoliubov_total = n > 0 ? solver.run(nn).total : 0.0;
    row.E_error = nn * nn / (2.0 * ell3) * out.integral_g_omega - 0.5 * nn * row.bogoliubov_total -
                  k.C_error * a * (rho + nn / ell3);
    row.bound = row.E_main + row.E_error;
    row.C0 = -(row.bound - main0) / scale;
    out.C0_realized = std::max(out.C0_realized, row.C0);
    out.gap_dominating = out.gap_dominating && row.gap_dominates;
    if (nn >= lo - 1e-9 && row.bound < 0.0)
      out.full_groups_nonnegative = false;
    out.rows.push_back(row);
  }
  out.box_bound = main0 - out.C0_realized * scale;
  if (k.strict_gap && !out.gap_dominating) {
    std::ostringstream msg;
    for (const auto& r : out.rows)
      if (!r.gap_dominates) {
        msg << "gap coefficient " << r.E_gap_coeff << " < 0 at n = " << r.n;
        break;
      }
    throw GapNotDominating(msg.str());
  }
  return out;
}

// ---- LHY and depletion --------------------------------------------------------------------

double lhy_constant() { return 128.0 / (15.0 * std::sqrt(pi)); }

LHYPrediction lhy_energy(double rho, double a) {
  if (!(rho > 0.0 && a > 0.0))
    throw DomainError("density and scattering length must be positive");
  const double y = rho * a * a * a;
  if (!(y < 1.0))
    throw DilutenessViolation("ρa³ must be below 1 for the dilute expansion");
  LHYPrediction out;
  out.rho = rho;
  out.a = a;
  out.leading = 4.0 * pi * a * rho;
  out.correction = out.leading * lhy_constant() * std::sqrt(y);
  out.e_per_particle = out.leading + out.correction;
  return out;
}

DepletionBound depletion_bound(const DepletionInputs& in) {
  if (!(in.L > 0.0 && in.N > 0.0 && in.rho > 0.0 && in.a > 0.0))
    throw InconsistentInputs("L, N, ρ and a must be positive");
  if (in.epsilon < 0.0 || in.delta < 0.0)
    throw InconsistentInputs("ε and δ must be non-negative");
  const double assumed = 4.0 * pi * in.a * in.rho + in.excess_per_particle;
  const double diff = assumed - in.lower_bound_per_particle;
  if (diff < -1e-12 * std::abs(assumed))
    throw InconsistentInputs("certified lower bound exceeds the assumed energy");
  DepletionBound out;
  out.fraction = std::max(0.0, diff) * in.L * in.L / (2.0 * pi * pi);
  const double y = in.rho * in.a * in.a * in.a;
  out.closed_form = in.C * in.rho * in.a * in.L * in.L * std::pow(y, 0.5 - in.epsilon);
  out.complete_condensation = 2.0 * in.delta + in.epsilon < 0.5;
  return out;
}

} // namespace bosecert
