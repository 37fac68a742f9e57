#include "bosecert/suites.hpp"

#include "bosecert/bogoliubov.hpp"
#include "bosecert/commutator.hpp"
#include "bosecert/errors.hpp"
#include "bosecert/kinetic.hpp"
#include "bosecert/localization.hpp"
#include "bosecert/momentum_ed.hpp"
#include "bosecert/potsplit.hpp"
#include "bosecert/scattering.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace bosecert {

using nlohmann::json;
constexpr double pi = std::numbers::pi;

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"scatter",        "localize", "kinetic-cert",
                                              "bogoliubov",     "potsplit-check", "ed"};
  return names;
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

CheckRecord record(std::string id, std::string anchor, double value, double residual, double tol,
                   json inputs = json::object()) {
  return {std::move(id), std::move(anchor), std::move(inputs), value, residual, tol,
          residual <= tol};
}

// Pass/fail statement with no numeric residual of its own.
CheckRecord flag(std::string id, std::string anchor, double value, bool ok,
                 json inputs = json::object()) {
  return {std::move(id), std::move(anchor), std::move(inputs), value, ok ? 0.0 : 1.0, 0.0, ok};
}

// Renames `module.rest` to `prefix.rest`.
void absorb(SuiteReport& rep, const IdentityReport& ir, const std::string& prefix) {
  for (auto rec : ir.records) {
    const auto dot = rec.check_id.find('.');
    rec.check_id = prefix + (dot == std::string::npos ? "." + rec.check_id
                                                      : rec.check_id.substr(dot));
    rep.records.push_back(std::move(rec));
  }
}

template <class F>
void section(SuiteReport& rep, const std::string& id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    rep.records.push_back({id + ".error", "section-completed", {{"error", e.what()}}, 0.0,
                           std::numeric_limits<double>::infinity(), 0.0, false});
  }
}

struct Context {
  RadialPotential pot;
  ScatteringSolution sol;
  BumpProfile chi;
};

Context make_context(const RunConfig& cfg) {
  auto pot = cfg.potential.build();
  pot.validate();
  auto sol = solve_scattering(pot, 2.0 * pot.support_radius());
  return {pot, std::move(sol), build_bump(cfg.steepness)};
}

BoxGeometry box_geometry(const RunConfig& cfg, const Context& ctx, double rho_a3, double K) {
  const auto r = resolve_geometry(cfg, ctx.sol.a(), ctx.pot.support_radius(), rho_a3, K);
  BoxGeometry g;
  g.a = r.a;
  g.rho_mu = r.rho_mu;
  g.K = K;
  g.L_over_ell = cfg.L_over_ell;
  g.s = cfg.s;
  g.b = cfg.b;
  g.Xi = cfg.Xi;
  g.delta = cfg.delta;
  g.epsilon = cfg.epsilon;
  g.validate(ctx.pot.support_radius());
  return g;
}

SuiteReport start(const std::string& name, const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = name;
  rep.seed = cfg.seed;
  rep.config = cfg.to_json();
  rep.started = utc_timestamp();
  return rep;
}

// ---- scatter ---------------------------------------------------------------------------

void run_scatter(SuiteReport& rep, const RunConfig& cfg) {
  std::optional<Context> ctx;
  section(rep, "scatter.solve", [&] { ctx.emplace(make_context(cfg)); });
  if (!ctx)
    return;
  const double a = ctx->sol.a();
  const double R = ctx->pot.support_radius();
  rep.summary["a"] = a;
  rep.summary["richardson_error"] = ctx->sol.richardson_error();
  rep.summary["integral_g_omega"] = ctx->sol.integral_g_omega();

  if (cfg.potential.kind == "square-well") {
    section(rep, "scatter.square-well", [&] {
      const double k = std::sqrt(cfg.potential.v0 / 2.0);
      const double exact = R - std::tanh(k * R) / k;
      rep.records.push_back(record("scatter.square-well-closed-form",
                                   "square-well-a-equals-R-minus-tanh-kR-over-k", a,
                                   std::abs(a - exact) / exact, cfg.tol.scatter,
                                   {{"v0", cfg.potential.v0}, {"R", R}, {"exact", exact}}));
    });
  }
  section(rep, "scatter.born", [&] {
    const double v0 = 1e-3;
    const auto weak = solve_scattering(RadialPotential::square_well(v0, R), 2.0 * R);
    const double born = v0 * R * R * R / 6.0;
    rep.records.push_back(record("scatter.born-limit", "a-tends-to-integral-v-over-8pi",
                                 weak.a(), std::abs(weak.a() - born) / weak.a(), cfg.tol.born,
                                 {{"v0", v0}, {"R", R}, {"born", born}}));
  });
  section(rep, "scatter.dilation", [&] {
    const double lambda = 2.0;
    const auto big = solve_scattering(ctx->pot.dilated(lambda), 2.0 * lambda * R);
    rep.records.push_back(record("scatter.dilation", "a-scales-linearly-under-dilation",
                                 big.a(), std::abs(big.a() - lambda * a) / (lambda * a),
                                 cfg.tol.scatter, {{"lambda", lambda}}));
  });
  section(rep, "scatter.identities", [&] {
    absorb(rep, check_scattering_identities(ctx->sol, cfg.fourier_k, cfg.tol.fourier),
           "scatter");
  });

  ReportTable prof{"profile", {"r", "omega", "g"}, {}};
  for (int i = 0; i <= 40; ++i) {
    const double r = 2.0 * R * i / 40.0;
    prof.rows.push_back({r, ctx->sol.omega(r), r > R ? 0.0 : ctx->sol.g(r)});
  }
  rep.tables.push_back(std::move(prof));
}

// ---- localize --------------------------------------------------------------------------

void run_localize(SuiteReport& rep, const RunConfig& cfg) {
  std::optional<Context> ctx;
  section(rep, "localize.setup", [&] { ctx.emplace(make_context(cfg)); });
  if (!ctx)
    return;

  ReportTable tab{"integrals", {"K", "ell", "rho_ell3", "w1_residual", "w2_residual"}, {}};
  for (double K : cfg.K_list) {
    const std::string prefix = "localize.K=" + fmt(K);
    section(rep, prefix, [&] {
      const auto g = box_geometry(cfg, *ctx, cfg.rho_a3, K);
      LocalizedPotentials lp(g, ctx->pot, ctx->sol, ctx->chi);
      const auto ir = check_integral_identities(lp, cfg.tol.integrals);
      absorb(rep, ir, prefix);
      const auto* r1 = ir.find("localization.integral-w1");
      const auto* r2 = ir.find("localization.integral-w2");
      tab.rows.push_back({K, lp.ell(), g.rho_ell3(), r1 ? r1->residual : NAN,
                          r2 ? r2->residual : NAN});
    });
  }
  rep.tables.push_back(std::move(tab));

  section(rep, "localize.sliding", [&] {
    const auto g = box_geometry(cfg, *ctx, cfg.rho_a3, cfg.K);
    LocalizedPotentials lp(g, ctx->pot, ctx->sol, ctx->chi);
    const double L = g.L();
    const double R = ctx->pot.support_radius();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<std::pair<Vec3, Vec3>> pairs;
    // Separations inside the support, where both sides of the identity are nonzero.
    for (int i = 0; i < cfg.sliding_pairs; ++i) {
      const Vec3 x{U(rng) * L, U(rng) * L, U(rng) * L};
      Vec3 d;
      do
        d = {(2 * U(rng) - 1) * R, (2 * U(rng) - 1) * R, (2 * U(rng) - 1) * R};
      while (norm(d) >= R);
      pairs.push_back({x, {x[0] - d[0], x[1] - d[1], x[2] - d[2]}});
    }
    absorb(rep, sliding_identity_check(lp, pairs, cfg.tol.sliding), "localize");
  });

  section(rep, "localize.gp-scaling", [&] {
    const double a = ctx->sol.a();
    const double N = 1e6;
    const auto gp = gp_scaling_convert(N, cfg.kappa, 1.0, a);
    const auto fixed = gp_scaling_convert(N, 0.4, 1.0, a);
    rep.records.push_back(record("localize.gp-scaling.kappa-two-fifths",
                                 "kappa-two-fifths-gives-delta-one-quarter", fixed.delta,
                                 std::abs(fixed.delta - 0.25), 0.0, {{"kappa", 0.4}}));
    rep.records.push_back(record("localize.gp-scaling.particle-count",
                                 "rho-times-L-cubed-equals-N", gp.rho * std::pow(gp.L, 3),
                                 std::abs(gp.rho * std::pow(gp.L, 3) - N) / N, 1e-12,
                                 {{"kappa", cfg.kappa}, {"N", N}}));
    double prev = -1.0;
    bool increasing = true;
    for (int i = 1; i < 64; ++i) {
      const double d = gp_scaling_convert(N, (2.0 / 3.0) * i / 64.0, 1.0, a).delta;
      increasing = increasing && d > prev;
      prev = d;
    }
    rep.records.push_back(flag("localize.gp-scaling.delta-increasing",
                               "delta-strictly-increasing-in-kappa", gp.delta, increasing,
                               {{"kappa", cfg.kappa}}));
  });
}

// ---- kinetic-cert ----------------------------------------------------------------------

void run_kinetic(SuiteReport& rep, const RunConfig& cfg) {
  section(rep, "kinetic.search", [&] {
    const auto chi = build_bump(cfg.steepness);
    const auto res =
        search_admissible(chi, cfg.kinetic_b, cfg.kinetic_s, cfg.L_over_ell, cfg.kinetic_max_points);
    const auto& c = res.certificate;
    const json in{{"b", res.b}, {"s", res.s}, {"L_over_ell", cfg.L_over_ell}};
    rep.records.push_back(record("kinetic.F-at-zero", "F-vanishes-at-zero-momentum", c.F0,
                                 std::abs(c.F0), cfg.tol.kinetic_F0, in));
    rep.records.push_back(flag("kinetic.lattice-margin",
                               "F-below-k2-minus-gap-on-lattice", c.min_margin, c.lattice_pass,
                               {{"b", res.b},
                                {"s", res.s},
                                {"lattice_points", c.lattice_points},
                                {"argmin_k", c.argmin_k}}));
    rep.records.push_back(flag("kinetic.tail-closure", "analytic-tail-beyond-half-inverse-s",
                               c.tail_margin, c.tail_pass,
                               {{"C_tail", c.C_tail}, {"C23", c.C23}, {"k_split", c.k_split}}));
    rep.records.push_back(record("kinetic.F2-quadratic-bound", "F2-at-most-b-beta-k2",
                                 c.beta_observed, std::max(0.0, c.beta_observed - c.beta), 0.0,
                                 {{"beta", c.beta}}));
    rep.records.push_back(flag("kinetic.evaluation-residual", "lattice-values-resolved",
                               c.max_residual, c.max_residual < c.min_margin));

    json cands = json::array();
    for (const auto& k : res.candidates)
      cands.push_back({{"b", k.b},
                       {"s", k.s},
                       {"skipped", k.skipped},
                       {"pass", k.pass},
                       {"min_margin", k.min_margin},
                       {"tail_margin", k.tail_margin}});
    rep.summary = {{"b", res.b},
                   {"s", res.s},
                   {"gap_constant", c.gap_constant},
                   {"constant_note", c.constant_note},
                   {"lattice_points", c.lattice_points},
                   {"C_taylor", c.C_taylor},
                   {"candidates", cands}};

    ReportTable tab{"certificate", {"kx", "ky", "kz", "F", "margin"}, {}};
    for (const auto& r : c.rows)
      tab.rows.push_back({r.k[0], r.k[1], r.k[2], r.F, r.margin});
    rep.tables.push_back(std::move(tab));
  });
}

// ---- bogoliubov ------------------------------------------------------------------------

void run_bogoliubov(SuiteReport& rep, const RunConfig& cfg, bool sweep) {
  std::optional<Context> ctx;
  section(rep, "bogoliubov.setup", [&] { ctx.emplace(make_context(cfg)); });
  if (!ctx)
    return;
  const double a = ctx->sol.a();

  section(rep, "bogoliubov.momentum", [&] {
    const auto m = g_omega_momentum_check(ctx->sol);
    rep.records.push_back(record("bogoliubov.momentum-g-omega",
                                 "momentum-integral-g-hat-sq-over-2p2-equals-integral-g-omega",
                                 m.value, m.relative_residual, cfg.tol.momentum,
                                 {{"reference", m.reference}, {"p_max", m.p_max}}));
  });
  section(rep, "bogoliubov.lhy", [&] {
    const double c = lhy_constant();
    rep.records.push_back(record("bogoliubov.lhy-constant", "lhy-constant-128-over-15-sqrt-pi",
                                 c, std::abs(c - 4.814418), cfg.tol.lhy));
  });

  const std::vector<double> values = sweep ? cfg.sweep_rho_a3 : std::vector{cfg.rho_a3};
  ReportTable tab{"budget", {"rho_a3", "n", "E_Main", "E_gap_coeff", "E_error", "total",
                             "C0_realized"}, {}};
  json per = json::array();
  for (double x : values) {
    const std::string prefix = "bogoliubov.rho_a3=" + fmt(x);
    section(rep, prefix, [&] {
      const auto g = box_geometry(cfg, *ctx, x, cfg.K);
      LocalizedPotentials lp(g, ctx->pot, ctx->sol, ctx->chi);
      const double ell = lp.ell();
      const double rho = g.rho_mu;
      const double n_star = g.rho_ell3();

      const double e_star = energy_main(n_star, rho, a, ell);
      const double e_ref = -4.0 * pi * a * rho * rho * ell * ell * ell;
      rep.records.push_back(record(prefix + ".main-vertex", "main-energy-minimum-value",
                                   e_star, std::abs(e_star - e_ref) / std::abs(e_ref),
                                   cfg.tol.vertex, {{"n", n_star}}));
      const double h = 0.25;
      const bool is_min = energy_main(n_star - h, rho, a, ell) > e_star &&
                          energy_main(n_star + h, rho, a, ell) > e_star;
      rep.records.push_back(flag(prefix + ".main-vertex-location",
                                 "main-energy-minimized-at-rho-ell3", n_star, is_min));

      BudgetConstants bc;
      bc.C_gap = cfg.C_gap;
      bc.C_error = cfg.C_error;
      bc.strict_gap = cfg.strict_gap;
      const auto b1 = assemble_box_bound(lp, bc);
      bc.refine = cfg.bogoliubov_refine;
      const auto b2 = assemble_box_bound(lp, bc);
      rep.records.push_back(record(prefix + ".C0-refinement", "C0-stable-under-refinement",
                                   b2.C0_realized,
                                   std::abs(b2.C0_realized - b1.C0_realized) /
                                       std::abs(b1.C0_realized),
                                   cfg.tol.c0_stability,
                                   {{"C0_coarse", b1.C0_realized},
                                    {"refine", cfg.bogoliubov_refine}}));

      const double scale = rho * rho * a * ell * ell * ell;
      const double form = -4.0 * pi * scale - b1.C0_realized * scale * std::sqrt(x);
      double worst = std::abs(b1.box_bound - form) / std::abs(form);
      for (const auto& r : b1.rows)
        worst = std::max(worst, (b1.box_bound - r.bound) / std::abs(form));
      rep.records.push_back(record(prefix + ".bound-form", "box-bound-leading-plus-C0-form",
                                   b1.box_bound, std::max(0.0, worst), 1e-12));

      const double n_test = std::max(1.0, std::round(n_star));
      const auto bi = bogoliubov_integral(lp, n_test, g.s);
      rep.records.push_back(flag(prefix + ".expansion-bound",
                                 "bogoliubov-integrand-at-most-W-sq-over-A", bi.max_ratio,
                                 bi.expansion_holds, {{"n", n_test}, {"p_max", bi.p_max}}));
      rep.records.push_back(flag(prefix + ".second-order-bound",
                                 "bogoliubov-integral-above-I-plus-II-minus-remainder",
                                 -0.5 * n_test * bi.total, bi.bound_holds,
                                 {{"I", bi.I}, {"II", bi.II}, {"remainder", bi.remainder}}));

      bool tiles = true;
      if (n_star >= 1.0 - 1e-12) {
        for (long M = 0; M <= 200; ++M) {
          // Every group but the last lies in [Ξρℓ³, (Ξ+1)ρℓ³]; the last only has the upper bound.
          const auto p = partition_particles(M, cfg.Xi, n_star);
          const double lo = cfg.Xi * n_star - 1e-9, hi = (cfg.Xi + 1) * n_star + 1e-9;
          long sum = 0;
          for (std::size_t j = 0; j < p.sizes.size(); ++j) {
            const long s = p.sizes[j];
            sum += s;
            const bool last = j + 1 == p.sizes.size();
            if (s > hi || (!last && s < lo) || s <= 0)
              tiles = false;
          }
          tiles = tiles && sum == M;
        }
        rep.records.push_back(flag(prefix + ".partition", "groups-between-Xi-and-Xi-plus-1-except-last",
                                   n_star, tiles, {{"Xi", cfg.Xi}, {"M_max", 200}}));
      }

      const auto lhy = lhy_energy(rho, a);
      const auto dep = depletion_bound({0.0, 0.0, g.L(), rho * std::pow(g.L(), 3), rho, a,
                                        cfg.epsilon, cfg.delta, 1.0});
      per.push_back({{"rho_a3", x},
                     {"ell", ell},
                     {"rho_ell3", n_star},
                     {"C0_realized", b1.C0_realized},
                     {"C0_refined", b2.C0_realized},
                     {"box_bound", b1.box_bound},
                     {"gap_dominating", b1.gap_dominating},
                     {"full_groups_nonnegative", b1.full_groups_nonnegative},
                     {"lhy_e_per_particle", lhy.e_per_particle},
                     {"depletion_closed_form", dep.closed_form},
                     {"complete_condensation", dep.complete_condensation}});
      for (const auto& r : b1.rows)
        tab.rows.push_back({x, static_cast<double>(r.n), r.E_main, r.E_gap_coeff, r.E_error,
                            r.bound, b1.C0_realized});
    });
  }
  rep.summary["a"] = a;
  rep.summary["diluteness"] = per;
  rep.tables.push_back(std::move(tab));
}

// ---- potsplit-check --------------------------------------------------------------------

void run_potsplit(SuiteReport& rep, const RunConfig& cfg) {
  std::optional<Context> ctx;
  section(rep, "potsplit-check.setup", [&] { ctx.emplace(make_context(cfg)); });
  if (!ctx)
    return;
  const double a = ctx->sol.a();
  const double ell = cfg.potsplit_ell;
  BoxGeometry g;
  g.a = a;
  g.K = 2.0;
  g.rho_mu = 1.0 / (g.K * g.K * ell * ell * a);
  std::optional<LocalizedPotentials> lp;
  section(rep, "potsplit-check.geometry", [&] {
    if (!(ctx->pot.support_radius() <= 0.5 * ell))
      throw SupportViolation("R <= ell/2 is required for the lattice box");
    lp.emplace(g, ctx->pot, ctx->sol, ctx->chi);
  });
  if (!lp)
    return;

  ReportTable est_tab{"interaction", {"N", "M", "inf_ratio", "sector_inf_ratio",
                                      "raw_inf_ratio", "sup_ratio"}, {}};
  for (const auto& [N, M] : cfg.potsplit_cases) {
    const std::string prefix = "potsplit-check.N=" + std::to_string(N) + ".M=" + std::to_string(M);
    section(rep, prefix, [&] {
      const LatticeBox box{lp->ell(), M};
      const auto t = build_potsplit_terms(box, *lp, N);
      const json in{{"N", N}, {"M", M}, {"dim", t.basis.dim()}};
      rep.records.push_back(record(prefix + ".identity", "interaction-equals-sum-of-Q-terms",
                                   potsplit_residual(t), potsplit_residual(t), cfg.tol.potsplit,
                                   in));
      rep.records.push_back(record(prefix + ".identity-tensor",
                                   "interaction-equals-sum-of-Q-terms", t.tensor_residual,
                                   t.tensor_residual, cfg.tol.potsplit, in));
      PotsplitOptions z;
      z.zero_omega = true;
      const double rz = potsplit_residual(build_potsplit_terms(box, *lp, N, z));
      rep.records.push_back(record(prefix + ".identity-zero-omega",
                                   "interaction-equals-sum-of-Q-terms", rz, rz, cfg.tol.potsplit,
                                   in));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq4(t.Q[4], Eigen::EigenvaluesOnly);
      const double q4 = eq4.eigenvalues()[0];
      const double q4_scale = std::max(1.0, eq4.eigenvalues().cwiseAbs().maxCoeff());
      rep.records.push_back(record(prefix + ".Q4-nonnegative", "Q4-is-nonnegative", q4,
                                   std::max(0.0, -q4) / q4_scale, cfg.tol.potsplit, in));
      const Eigen::MatrixXd total = t.n0 + t.nplus;
      const double nres =
          (total - N * Eigen::MatrixXd::Identity(total.rows(), total.cols())).cwiseAbs().maxCoeff();
      rep.records.push_back(record(prefix + ".number-conservation", "n0-plus-nplus-equals-N",
                                   N, nres, cfg.tol.number, in));

      const auto e1 = verify_interaction_estimate(t, a, cfg.interaction_samples, cfg.seed);
      const auto e2 = verify_interaction_estimate(t, a, cfg.interaction_samples, cfg.seed + 1);
      rep.records.push_back(record(prefix + ".interaction-estimate-stable",
                                   "interaction-estimate-constant-seed-independent", e1.inf_ratio,
                                   std::abs(e1.inf_ratio - e2.inf_ratio) /
                                       std::max(1.0, std::abs(e1.inf_ratio)),
                                   0.05, {{"seeds", {cfg.seed, cfg.seed + 1}}}));
      est_tab.rows.push_back({double(N), double(M), e1.inf_ratio, e1.sector_inf_ratio,
                              e1.raw_inf_ratio, e1.sup_ratio});
    });
  }
  rep.tables.push_back(std::move(est_tab));

  ReportTable com_tab{"commutator", {"N", "kx", "ky", "kz", "dim", "lambda_min", "f_norm2"}, {}};
  const std::vector<Vec3> ks{{2 * pi / ell, 0, 0}, {pi / ell, pi / ell, 0}};
  for (int N : cfg.commutator_N)
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      const std::string prefix =
          "potsplit-check.commutator.N=" + std::to_string(N) + ".k" + std::to_string(ki);
      section(rep, prefix, [&] {
        const auto r =
            verify_commutator_bound(LatticeBox{ell, cfg.commutator_M}, ctx->chi, ks[ki], N);
        const json in{{"N", N}, {"k", ks[ki]}, {"M", cfg.commutator_M}, {"method", r.method}};
        rep.records.push_back(record(prefix + ".lower-bound", "N-minus-commutator-nonnegative",
                                     r.lambda_min, std::max(0.0, -r.lambda_min),
                                     cfg.tol.commutator, in));
        rep.records.push_back(record(prefix + ".closed-form", "commutator-closed-form",
                                     r.commutator_norm, r.analytic_residual, cfg.tol.commutator,
                                     in));
        com_tab.rows.push_back({double(N), ks[ki][0], ks[ki][1], ks[ki][2], double(r.dim),
                                r.lambda_min, r.f_norm2});
      });
    }
  rep.tables.push_back(std::move(com_tab));
}

// ---- ed --------------------------------------------------------------------------------

void run_ed(SuiteReport& rep, const RunConfig& cfg) {
  std::optional<Context> ctx;
  section(rep, "ed.setup", [&] { ctx.emplace(make_context(cfg)); });
  if (!ctx)
    return;
  const double L = cfg.ed_L;
  const double cutoff = cfg.ed_cutoff;
  GroundStateOptions opts;
  opts.lanczos.seed = cfg.seed;
  const auto vh = potential_fourier(ctx->pot);

  section(rep, "ed.free", [&] {
    const auto h = build_hamiltonian_momentum(L, [](double) { return 0.0; }, cfg.ed_N, cutoff);
    const auto proj = build_projectors(h.basis);
    const auto gs = ground_state(h.H, opts, &proj);
    const json in{{"N", cfg.ed_N}, {"L", L}, {"dim", h.basis.dim()}};
    rep.records.push_back(record("ed.free.energy", "free-gas-ground-energy-zero", gs.E0,
                                 std::abs(gs.E0), cfg.tol.ed, in));
    rep.records.push_back(record("ed.free.depletion", "free-gas-fully-condensed", gs.nplus,
                                 std::abs(gs.nplus), cfg.tol.ed, in));
  });

  section(rep, "ed.one-body", [&] {
    const auto h = build_hamiltonian_momentum(L, vh, 1, cutoff, std::nullopt);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.H.dense(), Eigen::EigenvaluesOnly);
    std::vector<double> k2;
    for (std::size_t i = 0; i < h.modes.size(); ++i)
      k2.push_back(h.modes.k2(i));
    std::sort(k2.begin(), k2.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < k2.size(); ++i)
      worst = std::max(worst, std::abs(eig.eigenvalues()[Eigen::Index(i)] - k2[i]));
    rep.records.push_back(record("ed.one-body-spectrum", "single-particle-spectrum-is-k2",
                                 double(k2.size()), worst, cfg.tol.ed, {{"L", L}}));
  });

  section(rep, "ed.dense", [&] {
    for (int N = 2; N <= std::max(2, cfg.ed_N + 1); ++N) {
      const auto h = build_hamiltonian_momentum(L, vh, N, cutoff);
      if (h.basis.dim() > opts.dense_threshold)
        break;
      const auto gs = ground_state(h.H, opts);
      rep.records.push_back(record("ed.lanczos-vs-dense.N=" + std::to_string(N),
                                   "iterative-matches-dense-ground-energy", gs.E0,
                                   gs.dense_difference, cfg.tol.ed,
                                   {{"dim", h.basis.dim()}, {"residual", gs.residual}}));
    }
  });

  section(rep, "ed.perturbation", [&] {
    const auto weak = RadialPotential::square_well(cfg.ed_weak_v0, ctx->pot.support_radius());
    const auto wv = potential_fourier(weak);
    const auto h = build_hamiltonian_momentum(L, wv, 2, cutoff);
    const auto gs = ground_state(h.H, opts);
    const auto o = pair_perturbation_oracle(h.modes, wv);
    rep.records.push_back(record("ed.pair-perturbation", "weak-coupling-second-order-energy",
                                 gs.E0, std::abs(gs.E0 - o.E1 - o.E2), o.budget,
                                 {{"v0", cfg.ed_weak_v0}, {"E1", o.E1}, {"E2", o.E2}}));
  });

  section(rep, "ed.momentum-conservation", [&] {
    const auto h = build_hamiltonian_momentum(L, vh, 2, cutoff, std::nullopt);
    const double leak = momentum_block_leakage(h);
    rep.records.push_back(record("ed.momentum-conservation", "interaction-conserves-momentum",
                                 leak, leak, cfg.tol.ed, {{"dim", h.basis.dim()}}));
  });

  section(rep, "ed.depletion", [&] {
    DepletionStudyConfig dc{ctx->pot, L, cfg.ed_N, cutoff, cfg.ed_couplings, 1.0, cfg.epsilon, opts};
    const auto st = depletion_study(dc);
    ReportTable tab{"depletion", {"coupling", "rho_a3", "L_units", "N", "E0_per_N", "leading",
                                  "depletion", "bound", "number_residual", "dim"}, {}};
    for (const auto& r : st.rows) {
      const std::string id = "ed.depletion.coupling=" + fmt(r.coupling);
      rep.records.push_back(record(id + ".number", "n0-plus-nplus-equals-N", r.depletion,
                                   r.number_residual, cfg.tol.number, {{"dim", r.dim}}));
      rep.records.push_back(record(id + ".lanczos-vs-dense",
                                   "iterative-matches-dense-ground-energy", r.E0_per_N,
                                   r.dense_difference, cfg.tol.ed, {{"dim", r.dim}}));
      tab.rows.push_back({r.coupling, r.rho_a3, r.L_units, double(r.N), r.E0_per_N, r.leading,
                          r.depletion, r.bound, r.number_residual, double(r.dim)});
    }
    rep.records.push_back(flag("ed.depletion.monotone", "depletion-decreases-with-coupling",
                               st.rows.back().depletion, st.depletion_monotone,
                               {{"couplings", cfg.ed_couplings}}));
    rep.records.push_back(flag("ed.depletion.energy-monotone", "energy-increases-with-coupling",
                               st.rows.back().E0_per_N, st.energy_monotone));
    rep.tables.push_back(std::move(tab));

    if (!cfg.eigenvector_dump.empty()) {
      const double c = *std::max_element(cfg.ed_couplings.begin(), cfg.ed_couplings.end());
      const auto h =
          build_hamiltonian_momentum(L, potential_fourier(ctx->pot.scaled(c)), cfg.ed_N, cutoff);
      const auto gs = ground_state(h.H, opts);
      write_eigenvector(cfg.eigenvector_dump, gs.vector);
      const auto back = read_eigenvector(cfg.eigenvector_dump);
      const double diff = back.size() == gs.vector.size()
                              ? (back - gs.vector).cwiseAbs().maxCoeff()
                              : std::numeric_limits<double>::infinity();
      rep.records.push_back(record("ed.eigenvector-dump", "eigenvector-file-round-trip",
                                   double(back.size()), diff, 0.0, {{"coupling", c}}));
    }
  });
}

SuiteReport run_one(const std::string& name, const RunConfig& cfg, const SuiteOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport rep = start(name, cfg);
  if (name == "scatter")
    run_scatter(rep, cfg);
  else if (name == "localize")
    run_localize(rep, cfg);
  else if (name == "kinetic-cert")
    run_kinetic(rep, cfg);
  else if (name == "bogoliubov")
    run_bogoliubov(rep, cfg, opts.sweep);
  else if (name == "potsplit-check")
    run_potsplit(rep, cfg);
  else if (name == "ed")
    run_ed(rep, cfg);
  else
    throw ConfigError("unknown suite '" + name + "'");
  rep.sort_records();
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

} // namespace

void prepare_config(const RunConfig& cfg) {
  validate_config(cfg);
  RadialPotential pot = [&] {
    try {
      auto p = cfg.potential.build();
      p.validate();
      return p;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("potential: ") + e.what());
    }
  }();
  const auto sol = solve_scattering(pot, 2.0 * pot.support_radius());
  const double R = pot.support_radius();
  std::vector<double> diluteness = cfg.sweep_rho_a3;
  diluteness.push_back(cfg.rho_a3);
  std::vector<double> Ks = cfg.K_list;
  Ks.push_back(cfg.K);
  for (double x : diluteness)
    for (double K : Ks)
      resolve_geometry(cfg, sol.a(), R, x, K);
}

SuiteReport run_suite(const std::string& name, const RunConfig& cfg, const SuiteOptions& opts) {
  const auto& names = suite_names();
  if (name != "all" && std::find(names.begin(), names.end(), name) == names.end())
    throw ConfigError("unknown suite '" + name + "'");
  prepare_config(cfg);
  if (name != "all")
    return run_one(name, cfg, opts);
  const auto t0 = std::chrono::steady_clock::now();
  auto all = combine_reports(run_all(cfg, opts), cfg);
  all.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return all;
}

std::vector<SuiteReport> run_all(const RunConfig& cfg, const SuiteOptions& opts) {
  prepare_config(cfg);
  std::vector<SuiteReport> out;
  if (!opts.parallel) {
    for (const auto& n : suite_names())
      out.push_back(run_one(n, cfg, opts));
    return out;
  }
  std::vector<std::future<SuiteReport>> jobs;
  for (const auto& n : suite_names())
    jobs.push_back(std::async(std::launch::async, [&cfg, &opts, n] { return run_one(n, cfg, opts); }));
  for (auto& j : jobs)
    out.push_back(j.get());
  return out;
}

SuiteReport combine_reports(const std::vector<SuiteReport>& parts, const RunConfig& cfg) {
  SuiteReport all = start("all", cfg);
  if (!parts.empty())
    all.started = parts.front().started;
  json sections = json::object();
  for (const auto& p : parts) {
    all.records.insert(all.records.end(), p.records.begin(), p.records.end());
    for (auto t : p.tables) {
      t.name = p.suite + "-" + t.name;
      all.tables.push_back(std::move(t));
    }
    sections[p.suite] = {{"pass", p.pass()},
                         {"records", p.records.size()},
                         {"failures", p.failures()},
                         {"summary", p.summary}};
    all.wall_time += p.wall_time;
  }
  all.summary["sections"] = sections;
  all.sort_records();
  return all;
}

} // namespace bosecert
