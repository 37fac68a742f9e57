#include "bosecert/kinetic.hpp"

#include "bosecert/errors.hpp"
#include "bosecert/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>

// The τ-weighted integrals T = ∫(|q|² - S²)₊ g₁(q₁)g₂(q₂)g₃(q₃) dq (ℓ = 1, S = 1/s) are
// evaluated as
//
//   T = ∬_{ρ<S} g₁g₂ Ψ₃(S² - ρ²) + M2₃·Out₁₂ + M0₃·Ψ₁₂(S²),
//
// with the 1D tail functions G0(x) = ∫_{|q|>x} g, G2(x) = ∫_{|q|>x} q²g, Ψ(x²) = G2 - x²G0,
// Out₁₂ = ∬_{ρ>S} g₁g₂ and Ψ₁₂ the 2D analogue of Ψ. Moments M0, M2 come from exact position
// space integrals (Parseval), so no term is formed as a difference of large quantities.

namespace bosecert {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double table_step = 1.0 / 16.0; // φ̂ table spacing
constexpr double tail_step = 1.0 / 32.0;  // G0/G2 table spacing

double sinc(double x) { return std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

double theta_normalized(const Vec3& k) {
  return sinc(0.5 * k[0]) * sinc(0.5 * k[1]) * sinc(0.5 * k[2]);
}

enum class Weight { I, II, III };

struct QuadNodes {
  // disk rows
  std::vector<double> row_x, row_w;
  std::vector<double> q1, q2, p1, p2; // row-major, n_alpha per row
  int n_alpha = 0;
  // line nodes over |q| < S
  std::vector<double> line_q, line_x, line_w, line_p;
};

} // namespace

struct TailTable {
  double M0 = 0.0, M2 = 0.0;
  double h = tail_step;
  std::vector<double> G0, G2, gs, dgs, x;

  double at_G0(double xv) const {
    const auto [j, t] = locate(xv);
    return hermite5(t, h, G0[j], -gs[j], -dgs[j], G0[j + 1], -gs[j + 1], -dgs[j + 1]);
  }
  double at_G2(double xv) const {
    const auto [j, t] = locate(xv);
    auto d1 = [&](std::size_t i) { return -x[i] * x[i] * gs[i]; };
    auto d2 = [&](std::size_t i) { return -(2.0 * x[i] * gs[i] + x[i] * x[i] * dgs[i]); };
    return hermite5(t, h, G2[j], d1(j), d2(j), G2[j + 1], d1(j + 1), d2(j + 1));
  }
  // Ψ(x²) = ∫_{|q|>x}(q² - x²) g
  double psi(double xv) const { return at_G2(xv) - xv * xv * at_G0(xv); }

  std::pair<std::size_t, double> locate(double xv) const {
    const double u = xv / h;
    std::size_t j = static_cast<std::size_t>(std::max(0.0, u));
    if (j + 1 >= G0.size()) {
      if (xv > x.back() * (1.0 + 1e-12))
        throw QuadratureFailure("tail table queried beyond its range");
      j = G0.size() - 2;
    }
    return {j, u - static_cast<double>(j)};
  }
};

struct KineticEngine::Impl {
  const BumpProfile* chi = nullptr;
  double S = 0.0;
  double p_max = 0.0;
  std::vector<double> f0, f1, f2, f3; // φ̂ and derivatives on the table grid
  QuadNodes nodes[2];                 // base and refined resolution
  mutable std::mutex mutex;
  mutable std::map<std::pair<int, std::uint64_t>, std::unique_ptr<TailTable>> tables;
  double pos_n2 = 0.0; // ∫φ² at κ = 0 by the same routine as the moments

  double phi_hat(double q) const {
    q = std::abs(q);
    if (q > p_max)
      throw QuadratureFailure("phi-hat table range exceeded");
    const double u = q / table_step;
    std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(u), f0.size() - 2);
    return hermite5(u - j, table_step, f0[j], f1[j], f2[j], f0[j + 1], f1[j + 1], f2[j + 1]);
  }
  double dphi_hat(double q) const {
    const double sign = q < 0.0 ? -1.0 : 1.0;
    q = std::abs(q);
    if (q > p_max)
      throw QuadratureFailure("phi-hat table range exceeded");
    const double u = q / table_step;
    std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(u), f0.size() - 2);
    return sign *
           hermite5(u - j, table_step, f1[j], f2[j], f3[j], f1[j + 1], f2[j + 1], f3[j + 1]);
  }

  // ∫φ² cos(κt), ∫φ'² cos(κt)
  std::pair<double, double> cos_moments(double kappa) const {
    const int panels = 8 + static_cast<int>(std::ceil(std::abs(kappa) / 4.0));
    const GaussRule& rule = gauss_legendre(24);
    const double h = 0.5 / panels;
    double c0 = 0.0, c1 = 0.0;
    for (int p = 0; p < panels; ++p)
      for (int i = 0; i < 24; ++i) {
        const double t = (p + 0.5) * h + 0.5 * h * rule.nodes[i];
        const double w = 0.5 * h * rule.weights[i];
        const double c = std::cos(kappa * t);
        const double ph = chi->phi(t), dph = chi->dphi(t);
        c0 += w * ph * ph * c;
        c1 += w * dph * dph * c;
      }
    return {2.0 * c0, 2.0 * c1};
  }

  double g(Weight type, double kappa, double q) const {
    switch (type) {
    case Weight::I: {
      const double f = phi_hat(q - kappa);
      return f * f;
    }
    case Weight::II:
      return phi_hat(q) * phi_hat(q - kappa);
    case Weight::III: {
      const double f = phi_hat(q);
      return f * f;
    }
    }
    return 0.0;
  }
  double dg(Weight type, double kappa, double q) const {
    switch (type) {
    case Weight::I:
      return 2.0 * phi_hat(q - kappa) * dphi_hat(q - kappa);
    case Weight::II:
      return dphi_hat(q) * phi_hat(q - kappa) + phi_hat(q) * dphi_hat(q - kappa);
    case Weight::III:
      return 2.0 * phi_hat(q) * dphi_hat(q);
    }
    return 0.0;
  }

  const TailTable& table(Weight type, double kappa) const {
    if (type == Weight::III)
      kappa = 0.0;
    std::uint64_t bits = 0;
    std::memcpy(&bits, &kappa, sizeof bits);
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = tables[{static_cast<int>(type), bits}];
    if (!slot)
      slot = build_table(type, kappa);
    return *slot;
  }

  std::unique_ptr<TailTable> build_table(Weight type, double kappa) const {
    auto t = std::make_unique<TailTable>();
    const auto [c0k, c1k] = cos_moments(kappa);
    const auto [c00, c10] = cos_moments(0.0);
    switch (type) {
    case Weight::I:
      t->M0 = 2.0 * pi * c00;
      t->M2 = 2.0 * pi * (c10 + kappa * kappa * c00);
      break;
    case Weight::II:
      t->M0 = 2.0 * pi * c0k;
      t->M2 = 2.0 * pi * (c1k + 0.5 * kappa * kappa * c0k);
      break;
    case Weight::III:
      t->M0 = 2.0 * pi * c00;
      t->M2 = 2.0 * pi * c10;
      break;
    }
    const std::size_t n = static_cast<std::size_t>(std::ceil(S / tail_step)) + 1;
    t->x.resize(n + 1);
    t->G0.resize(n + 1);
    t->G2.resize(n + 1);
    t->gs.resize(n + 1);
    t->dgs.resize(n + 1);
    const GaussRule& rule = gauss_legendre(10);
    double cum0 = 0.0, cum2 = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      const double x = j * tail_step;
      t->x[j] = x;
      t->gs[j] = g(type, kappa, x) + g(type, kappa, -x);
      t->dgs[j] = dg(type, kappa, x) - dg(type, kappa, -x);
      t->G0[j] = t->M0 - cum0;
      t->G2[j] = t->M2 - cum2;
      if (j == n)
        break;
      for (int i = 0; i < 10; ++i) {
        const double q = x + 0.5 * tail_step * (1.0 + rule.nodes[i]);
        const double w = 0.5 * tail_step * rule.weights[i];
        const double gsq = g(type, kappa, q) + g(type, kappa, -q);
        cum0 += w * gsq;
        cum2 += w * q * q * gsq;
      }
    }
    return t;
  }

  void build_phi_table(double reach) {
    p_max = reach;
    const std::size_t n = static_cast<std::size_t>(std::ceil(reach / table_step)) + 1;
    p_max = (n - 1) * table_step;
    const int panels = 8 + static_cast<int>(std::ceil(p_max / 6.0));
    const GaussRule& rule = gauss_legendre(16);
    const double h = 0.5 / panels;
    std::vector<double> t, w;
    for (int p = 0; p < panels; ++p)
      for (int i = 0; i < 16; ++i) {
        const double ti = (p + 0.5) * h + 0.5 * h * rule.nodes[i];
        t.push_back(ti);
        w.push_back(h * rule.weights[i] * chi->phi(ti)); // factor 2 for the even extension
      }
    f0.assign(n, 0.0);
    f1.assign(n, 0.0);
    f2.assign(n, 0.0);
    f3.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double q = j * table_step;
      double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double c = std::cos(q * t[i]), s = std::sin(q * t[i]);
        const double ti = t[i];
        a0 += w[i] * c;
        a1 -= w[i] * ti * s;
        a2 -= w[i] * ti * ti * c;
        a3 += w[i] * ti * ti * ti * s;
      }
      f0[j] = a0;
      f1[j] = a1;
      f2[j] = a2;
      f3[j] = a3;
    }
  }

  void build_nodes(int level, double factor) {
    QuadNodes& nd = nodes[level];
    const int n_alpha = static_cast<int>(std::ceil(factor * (3.0 * S + 48.0)));
    const int n_beta = static_cast<int>(std::ceil(factor * (1.2 * S + 32.0)));
    const int n_line = static_cast<int>(std::ceil(factor * (2.0 * S + 48.0)));
    nd.n_alpha = n_alpha;
    const GaussRule& rb = gauss_legendre(n_beta);
    for (int i = 0; i < n_beta; ++i) {
      const double beta = 0.25 * pi * (1.0 + rb.nodes[i]);
      const double wb = 0.25 * pi * rb.weights[i];
      const double rho = S * std::sin(beta);
      nd.row_x.push_back(S * std::cos(beta));
      nd.row_w.push_back(S * S * std::sin(beta) * std::cos(beta) * wb * 2.0 * pi / n_alpha);
      for (int j = 0; j < n_alpha; ++j) {
        const double alpha = 2.0 * pi * j / n_alpha;
        const double q1 = rho * std::cos(alpha), q2 = rho * std::sin(alpha);
        nd.q1.push_back(q1);
        nd.q2.push_back(q2);
        nd.p1.push_back(phi_hat(q1));
        nd.p2.push_back(phi_hat(q2));
      }
    }
    const GaussRule& rl = gauss_legendre(n_line);
    for (int i = 0; i < n_line; ++i) {
      const double beta = 0.5 * pi * rl.nodes[i];
      const double wb = 0.5 * pi * rl.weights[i];
      const double q = S * std::sin(beta);
      nd.line_q.push_back(q);
      nd.line_x.push_back(S * std::cos(beta));
      nd.line_w.push_back(S * std::cos(beta) * wb);
      nd.line_p.push_back(phi_hat(q));
    }
  }

  // T for the I-type and II-type weights at once, plus the III-type (k-independent) when
  // requested. Returns {T_I, T_II, T_III}.
  std::array<double, 3> tau_integrals(const Vec3& k, int level, bool with_iii) const {
    const QuadNodes& nd = nodes[level];
    const TailTable* tI[3];
    const TailTable* tII[3];
    for (int c = 0; c < 3; ++c) {
      tI[c] = &table(Weight::I, k[c]);
      tII[c] = &table(Weight::II, k[c]);
    }
    const TailTable& t3 = table(Weight::III, 0.0);

    double dI = 0.0, dII = 0.0, dIII = 0.0;
    const int na = nd.n_alpha;
    for (std::size_t r = 0; r < nd.row_x.size(); ++r) {
      double sI = 0.0, sII = 0.0, sIII = 0.0;
      const std::size_t base = r * na;
      for (int j = 0; j < na; ++j) {
        const std::size_t idx = base + j;
        const double f1 = phi_hat(nd.q1[idx] - k[0]);
        const double f2 = phi_hat(nd.q2[idx] - k[1]);
        const double p1 = nd.p1[idx], p2 = nd.p2[idx];
        sI += (f1 * f1) * (f2 * f2);
        sII += (f1 * p1) * (f2 * p2);
        if (with_iii)
          sIII += (p1 * p1) * (p2 * p2);
      }
      const double x = nd.row_x[r], w = nd.row_w[r];
      dI += w * sI * tI[2]->psi(x);
      dII += w * sII * tII[2]->psi(x);
      if (with_iii)
        dIII += w * sIII * t3.psi(x);
    }

    // line parts: Out₁₂ and Ψ₁₂
    auto line = [&](const TailTable& a, const TailTable& b, auto&& g1) {
      double out = 0.0, psi = 0.0;
      for (std::size_t i = 0; i < nd.line_q.size(); ++i) {
        const double gv = g1(i);
        out += nd.line_w[i] * gv * b.at_G0(nd.line_x[i]);
        psi += nd.line_w[i] * gv * b.psi(nd.line_x[i]);
      }
      const double aS = a.at_G0(S);
      out += b.M0 * aS;
      psi += b.M2 * aS + b.M0 * a.psi(S);
      return std::pair<double, double>{out, psi};
    };
    const auto [outI, psiI] = line(*tI[0], *tI[1], [&](std::size_t i) {
      const double f = phi_hat(nd.line_q[i] - k[0]);
      return f * f;
    });
    const auto [outII, psiII] = line(*tII[0], *tII[1], [&](std::size_t i) {
      return nd.line_p[i] * phi_hat(nd.line_q[i] - k[0]);
    });
    std::array<double, 3> T{};
    T[0] = dI + tI[2]->M2 * outI + tI[2]->M0 * psiI;
    T[1] = dII + tII[2]->M2 * outII + tII[2]->M0 * psiII;
    if (with_iii) {
      const auto [outIII, psiIII] =
          line(t3, t3, [&](std::size_t i) { return nd.line_p[i] * nd.line_p[i]; });
      T[2] = dIII + t3.M2 * outIII + t3.M0 * psiIII;
    }
    return T;
  }
};

// ---- KineticSymbol ---------------------------------------------------------------------

double KineticSymbol::theta_hat(const Vec3& k) const {
  return ell * ell * ell * theta_hat_normalized(k);
}

double KineticSymbol::theta_hat_normalized(const Vec3& k) const {
  return theta_normalized({k[0] * ell, k[1] * ell, k[2] * ell});
}

// ---- KineticEngine ---------------------------------------------------------------------

KineticEngine::KineticEngine(const BumpProfile& chi, double s, double k_reach)
    : chi_(chi), s_(s), impl_(std::make_unique<Impl>()) {
  if (!(s > 0.0))
    throw DomainError("s must be positive");
  impl_->chi = &chi_;
  impl_->S = 1.0 / s;
  if (k_reach <= 0.0)
    k_reach = 1.5 * impl_->S;
  impl_->build_phi_table(impl_->S + k_reach + 4.0);
  impl_->build_nodes(0, 1.0);
  impl_->build_nodes(1, 1.5);
  const double norm = chi_.c() * chi_.c() / std::pow(2.0 * pi, 3);
  J0_ = norm * impl_->tau_integrals({0.0, 0.0, 0.0}, 1, true)[2];
}

KineticEngine::~KineticEngine() = default;

double KineticEngine::phi_hat(double q) const { return impl_->phi_hat(q); }

KineticComponents KineticEngine::evaluate(const Vec3& k_in, double b) const {
  // F is even in each component and symmetric under permutations
  Vec3 k{std::abs(k_in[0]), std::abs(k_in[1]), std::abs(k_in[2])};
  std::sort(k.begin(), k.end());
  const double norm = chi_.c() * chi_.c() / std::pow(2.0 * pi, 3);
  const double theta = theta_normalized(k);

  auto parts = [&](int level) {
    const auto T = impl_->tau_integrals(k, level, true);
    KineticComponents c;
    c.I = norm * T[0];
    c.II = -2.0 * theta * norm * T[1];
    c.III = theta * theta * norm * T[2];
    c.F1 = c.I + c.II + c.III;
    return c;
  };
  const KineticComponents coarse = parts(0);
  KineticComponents out = parts(1);
  out.F2 = b * (1.0 - theta * theta);
  out.F = out.F1 + out.F2;
  out.residual = std::abs(out.F1 - coarse.F1);
  return out;
}

KineticComponents compute_F(const Vec3& k, const BumpProfile& chi, double s, double b,
                            double ell) {
  if (!(ell > 0.0) || !(b >= 0.0))
    throw DomainError("ell must be positive and b non-negative");
  const Vec3 kl{k[0] * ell, k[1] * ell, k[2] * ell};
  const double reach = std::max({std::abs(kl[0]), std::abs(kl[1]), std::abs(kl[2])});
  KineticEngine engine(chi, s, std::max(reach + 1.0, 0.5 / s));
  KineticComponents c = engine.evaluate(kl, b);
  const double f = 1.0 / (ell * ell);
  c.F *= f;
  c.F1 *= f;
  c.F2 *= f;
  c.I *= f;
  c.II *= f;
  c.III *= f;
  c.residual *= f;
  return c;
}

// ---- lattice scan and certificate ------------------------------------------------------

namespace {

struct LatticeRep {
  int n[3];
  int multiplicity;
  long norm2;
};

std::vector<LatticeRep> canonical_lattice(double L_over_ell, double k_split) {
  const double dk = 2.0 * pi / L_over_ell;
  const double lim = k_split / dk;
  const int nmax = static_cast<int>(std::floor(lim + 1e-12));
  const double lim2 = lim * lim * (1.0 + 1e-12);
  std::vector<LatticeRep> reps;
  for (int a = 0; a <= nmax; ++a)
    for (int b = a; b <= nmax; ++b)
      for (int c = b; c <= nmax; ++c) {
        const long n2 = static_cast<long>(a) * a + static_cast<long>(b) * b + static_cast<long>(c) * c;
        if (n2 == 0 || n2 > lim2)
          continue;
        const int nonzero = (a != 0) + (b != 0) + (c != 0);
        int perms = 6;
        if (a == b && b == c)
          perms = 1;
        else if (a == b || b == c)
          perms = 3;
        reps.push_back({{a, b, c}, perms * (1 << nonzero), n2});
      }
  std::sort(reps.begin(), reps.end(), [](const LatticeRep& x, const LatticeRep& y) {
    if (x.norm2 != y.norm2)
      return x.norm2 < y.norm2;
    return std::lexicographical_compare(x.n, x.n + 3, y.n, y.n + 3);
  });
  return reps;
}

constexpr double gap_constant = 2.0 * pi * pi;

} // namespace

std::size_t count_lattice_points(double L_over_ell, double k_split) {
  std::size_t total = 0;
  for (const auto& r : canonical_lattice(L_over_ell, k_split))
    total += static_cast<std::size_t>(r.multiplicity);
  return total;
}

KineticScan scan_lattice(const BumpProfile& chi, double s, double L_over_ell, double k_split) {
  if (!(L_over_ell > 2.0))
    throw GeometryViolation("2*ell < L is required (L_over_ell > 2)");
  if (!(s > 0.0))
    throw DomainError("s must be positive");
  const double S = 1.0 / s;
  if (k_split <= 0.0)
    k_split = 0.5 * S;
  if (k_split < 0.5 * S * (1.0 - 1e-12))
    throw GeometryViolation("k_split >= 1/(2s) is required");

  KineticEngine engine(chi, s, 3.0 * k_split);
  KineticScan scan;
  scan.s = s;
  scan.L_over_ell = L_over_ell;
  scan.k_split = k_split;
  scan.steepness = chi.steepness();
  scan.chi_c = chi.c();
  scan.C_tail = 2.0 * chi.gradient_energy();
  scan.F1_at_zero = engine.evaluate({0.0, 0.0, 0.0}, 0.0).F1;

  const double dk = 2.0 * pi / L_over_ell;
  for (const auto& rep : canonical_lattice(L_over_ell, k_split)) {
    const Vec3 k{rep.n[0] * dk, rep.n[1] * dk, rep.n[2] * dk};
    const KineticComponents c = engine.evaluate(k, 0.0);
    KineticRow row;
    row.k = k;
    row.multiplicity = rep.multiplicity;
    row.F1 = c.F1;
    row.I = c.I;
    row.II = c.II;
    row.III = c.III;
    row.residual = c.residual;
    scan.rows.push_back(row);
    scan.lattice_points += static_cast<std::size_t>(rep.multiplicity);
    scan.max_residual = std::max(scan.max_residual, c.residual);
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (std::sqrt(k2) < 0.5 * S)
      scan.C_taylor = std::max(scan.C_taylor, c.F1 / (s * k2));
  }

  // |II| + |III| over tail samples |k| >= k_split
  std::vector<Vec3> dirs{{0, 0, 1}, {0, 1, 1}, {1, 1, 1}, {0.3, 0.5, 0.81}, {0.1, 0.2, 0.97},
                         {0.05, 0.6, 0.8}};
  double sup = 0.0;
  for (auto d : dirs) {
    const double n = norm(d);
    for (double f : {1.0, 1.1, 1.25, 1.5, 2.0, 2.5, 3.0}) {
      const double r = k_split * f;
      const Vec3 k{d[0] / n * r, d[1] / n * r, d[2] / n * r};
      const KineticComponents c = engine.evaluate(k, 0.0);
      sup = std::max(sup, std::abs(c.II) + std::abs(c.III));
    }
  }
  scan.C23 = 2.0 * sup;
  return scan;
}

GapCertificate finalize_certificate(const KineticScan& scan, double b) {
  GapCertificate cert;
  cert.steepness = scan.steepness;
  cert.chi_c = scan.chi_c;
  cert.b = b;
  cert.s = scan.s;
  cert.L_over_ell = scan.L_over_ell;
  cert.k_split = scan.k_split;
  cert.gap_constant = gap_constant;
  cert.constant_note = "margins use k^2 - 2*pi^2*(ell/L)^2 - F(k); this also implies the weaker "
                       "gap 2*pi*(ell/L)^2";
  cert.lattice_points = scan.lattice_points;
  cert.F0 = scan.F1_at_zero;
  cert.C_tail = scan.C_tail;
  cert.C23 = scan.C23;
  cert.C_taylor = scan.C_taylor;
  cert.max_residual = scan.max_residual;

  const double gap = gap_constant / (scan.L_over_ell * scan.L_over_ell);
  cert.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& r0 : scan.rows) {
    KineticRow r = r0;
    const double theta = theta_normalized(r.k);
    const double k2 = r.k[0] * r.k[0] + r.k[1] * r.k[1] + r.k[2] * r.k[2];
    r.F2 = b * (1.0 - theta * theta);
    r.F = r.F1 + r.F2;
    r.margin = k2 - gap - r.F;
    cert.beta_observed = std::max(cert.beta_observed, (1.0 - theta * theta) / k2);
    if (r.margin < cert.min_margin) {
      cert.min_margin = r.margin;
      cert.argmin_k = r.k;
    }
    if (!cert.first_violation && !(r.margin > r.residual))
      cert.first_violation = r.k;
    cert.rows.push_back(r);
  }
  if (cert.rows.empty())
    cert.min_margin = 0.0;
  const double S = 1.0 / scan.s;
  cert.tail_margin = S * S / 8.0 - scan.C_tail - scan.C23 - b - gap;
  cert.lattice_pass = !cert.rows.empty() && !cert.first_violation && std::abs(cert.F0) <= 1e-10;
  cert.tail_pass = cert.tail_margin > 0.0;
  cert.pass = cert.lattice_pass && cert.tail_pass;
  return cert;
}

GapCertificate certify_gap(const BumpProfile& chi, double b, double s, double L_over_ell,
                           double k_split) {
  return finalize_certificate(scan_lattice(chi, s, L_over_ell, k_split), b);
}

SearchResult search_admissible(const BumpProfile& chi, const std::vector<double>& b_grid,
                               const std::vector<double>& s_grid, double L_over_ell,
                               std::size_t max_lattice_points) {
  if (b_grid.empty() || s_grid.empty())
    throw DomainError("search grids must be non-empty");
  SearchResult result;
  std::optional<GapCertificate> best;
  std::optional<SearchCandidate> least_violated;
  auto violation = [](const SearchCandidate& c) { return std::min(c.min_margin, c.tail_margin); };

  std::vector<double> ss = s_grid;
  std::sort(ss.begin(), ss.end());
  std::vector<double> bs = b_grid;
  std::sort(bs.begin(), bs.end());
  for (double s : ss) {
    const std::size_t pts = count_lattice_points(L_over_ell, 0.5 / s);
    if (pts > max_lattice_points) {
      for (double b : bs) {
        SearchCandidate c;
        c.b = b;
        c.s = s;
        c.skipped = true;
        result.candidates.push_back(c);
      }
      continue;
    }
    const KineticScan scan = scan_lattice(chi, s, L_over_ell);
    for (double b : bs) {
      GapCertificate cert = finalize_certificate(scan, b);
      SearchCandidate c{b, s, false, cert.pass, cert.min_margin, cert.tail_margin};
      result.candidates.push_back(c);
      if (cert.pass) {
        const bool better =
            !best || cert.min_margin > best->min_margin + 1e-12 ||
            (std::abs(cert.min_margin - best->min_margin) <= 1e-12 &&
             (b > best->b || (b == best->b && s > best->s)));
        if (better)
          best = std::move(cert);
      } else if (!least_violated || violation(c) > violation(*least_violated)) {
        least_violated = c;
      }
    }
  }
  if (!best) {
    std::ostringstream msg;
    msg << "no admissible (b, s) on the grid";
    if (least_violated)
      msg << "; least violated candidate b=" << least_violated->b << " s=" << least_violated->s
          << " min_margin=" << least_violated->min_margin
          << " tail_margin=" << least_violated->tail_margin;
    else
      msg << "; every candidate exceeded the lattice point budget";
    throw NoAdmissiblePair(msg.str());
  }
  result.b = best->b;
  result.s = best->s;
  result.certificate = std::move(*best);
  return result;
}

} // namespace bosecert
