// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "bosecert/bogoliubov.hpp"
#include "bosecert/commutator.hpp"
#include "bosecert/kinetic.hpp"
#include "bosecert/localization.hpp"
#include "bosecert/momentum_ed.hpp"
#include "bosecert/potsplit.hpp"
#include "bosecert/scattering.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

using namespace bosecert;
constexpr double pi = std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void criterion(int id, const char* what, double time_limit, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  if (time_limit > 0.0 && dt > time_limit) {
    o.pass = false;
    o.detail += fmt(" [over the %.0f s limit]", time_limit);
  }
  if (!o.pass)
    ++failures;
  std::printf("%s %2d  %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, what, o.detail.c_str(),
              dt);
  std::fflush(stdout);
}

struct Shared {
  RadialPotential pot = RadialPotential::square_well(2.0, 1.0);
  ScatteringSolution sol = solve_scattering(pot, 2.0);
  BumpProfile chi = build_bump(1.0);

  LocalizedPotentials box(double rho_a3, double K) const {
    return {BoxGeometry::from_diluteness(rho_a3, sol.a(), K), pot, sol, chi};
  }
};

} // namespace

int main() {
  const auto start = Clock::now();
  const Shared sh;

  criterion(1, "square well scattering length against 1 - tanh 1", 1.0, [] {
    const auto sol = solve_scattering(RadialPotential::square_well(2.0, 1.0), 2.0);
    const double exact = 1.0 - std::tanh(1.0);
    const double rel = std::abs(sol.a() - exact) / sol.a();
    return Outcome{rel <= 1e-8, fmt("a = %.15f, relative error %.2e", sol.a(), rel)};
  });

  criterion(2, "Born limit of a weak square well", 1.0, [] {
    const auto sol = solve_scattering(RadialPotential::square_well(1e-3, 1.0), 2.0);
    const double rel = std::abs(sol.a() - 1e-3 / 6.0) / sol.a();
    return Outcome{rel <= 1e-2, fmt("a = %.6e, relative deviation %.2e", sol.a(), rel)};
  });

  criterion(3, "Fourier identity 2k^2 omega-hat = g-hat", 0.0, [&] {
    const auto rep = check_scattering_identities(sh.sol, {0.5, 1.0, 2.0, 5.0}, 1e-6);
    double worst = 0.0;
    for (const auto& r : rep.records)
      if (r.check_id.rfind("scattering.fourier.k=", 0) == 0)
        worst = std::max(worst, r.residual);
    return Outcome{worst <= 1e-6, fmt("max residual / g-hat(0) = %.2e over 4 momenta", worst)};
  });

  criterion(4, "integral identities for w1 and w2 at K = 5 and 10", 30.0, [&] {
    double worst = 0.0;
    for (double K : {5.0, 10.0}) {
      const auto lp = sh.box(1e-6, K);
      const auto rep = check_integral_identities(lp, 1e-6);
      worst = std::max({worst, rep.find("localization.integral-w1")->residual,
                        rep.find("localization.integral-w2")->residual});
    }
    return Outcome{worst <= 1e-6, fmt("max relative residual %.2e", worst)};
  });

  criterion(5, "sliding identity on 20 sampled pairs", 0.0, [&] {
    const auto lp = sh.box(1e-6, 10.0);
    const double L = lp.geometry().L();
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<std::pair<Vec3, Vec3>> pairs;
    while (pairs.size() < 20) {
      const Vec3 x{U(rng) * L, U(rng) * L, U(rng) * L};
      const Vec3 d{2 * U(rng) - 1, 2 * U(rng) - 1, 2 * U(rng) - 1};
      if (norm(d) < 1.0)
        pairs.push_back({x, {x[0] - d[0], x[1] - d[1], x[2] - d[2]}});
    }
    const auto rep = sliding_identity_check(lp, pairs, 1e-5);
    return Outcome{rep.max_residual() <= 1e-5,
                   fmt("max relative residual %.2e over %zu values", rep.max_residual(),
                       rep.records.size())};
  });

  criterion(6, "kinetic localization certificate from a (b, s) grid", 300.0, [&] {
    const auto res = search_admissible(sh.chi, {1e-3, 1e-2, 1e-1}, {0.02, 0.03, 0.04}, 4.0);
    const auto& c = res.certificate;
    const bool ok = c.lattice_pass && c.tail_pass && std::abs(c.F0) <= 1e-10;
    return Outcome{ok, fmt("b = %g, s = %g, min margin %.4f over %zu momenta, tail margin %.3f, "
                           "|F(0)| = %.1e",
                           res.b, res.s, c.min_margin, c.lattice_points, c.tail_margin,
                           std::abs(c.F0))};
  });

  criterion(7, "potential split identity for (N, M) = (2,2), (2,3), (3,2)", 120.0, [&] {
    BoxGeometry g;
    g.a = sh.sol.a();
    g.K = 2.0;
    g.rho_mu = 1.0 / (4.0 * 2.2 * 2.2 * g.a);
    const LocalizedPotentials lp(g, sh.pot, sh.sol, sh.chi);
    double worst = 0.0;
    for (auto [N, M] : {std::pair{2, 2}, {2, 3}, {3, 2}}) {
      const auto t = build_potsplit_terms(LatticeBox{lp.ell(), M}, lp, N);
      worst = std::max({worst, potsplit_residual(t), t.tensor_residual});
    }
    return Outcome{worst <= 1e-12, fmt("max entry |LHS - sum Q| = %.2e", worst)};
  });

  criterion(8, "N - [b, b^dagger] >= 0 for N = 1, 2, 3 and two momenta", 0.0, [&] {
    double lowest = INFINITY;
    for (int N : {1, 2, 3})
      for (const Vec3& k : {Vec3{2 * pi / 2.2, 0, 0}, Vec3{pi / 2.2, pi / 2.2, 0}})
        lowest = std::min(lowest, verify_commutator_bound(LatticeBox{2.2, 3}, sh.chi, k, N).lambda_min);
    return Outcome{lowest >= -1e-10, fmt("smallest lambda_min %.6f", lowest)};
  });

  criterion(9, "momentum-space integral of g omega and the pointwise expansion bound", 0.0, [&] {
    const auto m = g_omega_momentum_check(sh.sol);
    const auto lp = sh.box(1e-6, 10.0);
    const double x = lp.geometry().rho_ell3();
    bool holds = true;
    double ratio = 0.0;
    for (double n : {1.0, std::round(x), std::floor((lp.geometry().Xi + 1) * x)}) {
      const auto bi = bogoliubov_integral(lp, std::max(1.0, n), lp.geometry().s);
      holds = holds && bi.expansion_holds;
      ratio = std::max(ratio, bi.max_ratio);
    }
    return Outcome{m.relative_residual <= 1e-6 && holds,
                   fmt("relative residual %.2e, expansion bound %s (max W/A %.3f)",
                       m.relative_residual, holds ? "holds" : "violated", ratio)};
  });

  criterion(10, "box energy budget: vertex of E_Main and C0 under refinement", 0.0, [&] {
    const auto lp = sh.box(1e-6, 10.0);
    const auto& g = lp.geometry();
    const double a = sh.sol.a(), rho = g.rho_mu, ell = lp.ell(), l3 = ell * ell * ell;
    const double e = energy_main(g.rho_ell3(), rho, a, ell);
    const double ref = -4.0 * pi * a * rho * rho * l3;
    const double vertex = std::abs(e - ref) / std::abs(ref);
    BudgetConstants k;
    const auto coarse = assemble_box_bound(lp, k);
    k.refine = 2;
    const auto fine = assemble_box_bound(lp, k);
    const double form = ref - coarse.C0_realized * rho * rho * a * l3 * std::sqrt(g.diluteness());
    const double form_res = std::abs(coarse.box_bound - form) / std::abs(form);
    const double drift = std::abs(fine.C0_realized - coarse.C0_realized) / coarse.C0_realized;
    return Outcome{vertex <= 1e-12 && form_res <= 1e-12 && drift <= 0.05,
                   fmt("vertex error %.1e, C0 = %.6e (refined %.6e, drift %.1e)", vertex,
                       coarse.C0_realized, fine.C0_realized, drift)};
  });

  criterion(11, "LHY constant 128/(15 sqrt pi)", 0.0, [] {
    const double c = lhy_constant();
    return Outcome{std::abs(c - 4.814418) <= 1e-6,
                   fmt("%.9f, deviation %.1e", c, std::abs(c - 4.814418))};
  });

  criterion(12, "exact diagonalization: free gas, dense vs Lanczos, weak pair", 0.0, [] {
    const auto free = build_hamiltonian_momentum(4.0, [](double) { return 0.0; }, 3, 4.0);
    const auto fp = build_projectors(free.basis);
    const auto gs0 = ground_state(free.H, {}, &fp);
    const bool free_ok = std::abs(gs0.E0) <= 1e-12 && std::abs(gs0.nplus) <= 1e-12;

    const auto vh = potential_fourier(RadialPotential::square_well(2.0, 1.0));
    double dense = 0.0;
    for (int N : {2, 3, 4}) {
      const auto h = build_hamiltonian_momentum(4.0, vh, N, 4.0);
      dense = std::max(dense, ground_state(h.H).dense_difference);
    }
    const auto full = build_hamiltonian_momentum(4.0, vh, 2, 4.0, std::nullopt);
    dense = std::max(dense, ground_state(full.H).dense_difference);

    const auto wv = potential_fourier(RadialPotential::square_well(0.02, 1.0));
    const auto h2 = build_hamiltonian_momentum(4.0, wv, 2, 4.0);
    const auto o = pair_perturbation_oracle(h2.modes, wv);
    const double pt = std::abs(ground_state(h2.H).E0 - o.E1 - o.E2);
    return Outcome{free_ok && dense <= 1e-10 && pt <= o.budget,
                   fmt("free E0 = %.1e, n+ = %.1e; max dense difference %.1e; "
                       "|E0 - E1 - E2| = %.2e within budget %.2e",
                       gs0.E0, gs0.nplus, dense, pt, o.budget)};
  });

  criterion(13, "depletion decreases with the coupling and n0 + n+ = N", 0.0, [] {
    DepletionStudyConfig c{RadialPotential::square_well(2.0, 1.0)};
    c.couplings = {0.25, 0.5, 1.0};
    const auto st = depletion_study(c);
    double number = 0.0;
    for (const auto& r : st.rows)
      number = std::max(number, r.number_residual);
    return Outcome{st.depletion_monotone && number <= 1e-10,
                   fmt("n+/N = %.3e, %.3e, %.3e; max |n0 + n+ - N| = %.1e",
                       st.rows[0].depletion, st.rows[1].depletion, st.rows[2].depletion,
                       number)};
  });

  criterion(14, "GP scaling kappa = 2/5 gives delta = 1/4", 0.0, [] {
    const auto gp = gp_scaling_convert(1e6, 0.4, 1.0, 0.2);
    return Outcome{gp.delta == 0.25, fmt("delta = %.17g", gp.delta)};
  });

  const double total = std::chrono::duration<double>(Clock::now() - start).count();
  const bool in_time = total < 900.0;
  if (!in_time)
    ++failures;
  std::printf("total %.1f s (limit 900 s)%s\n", total, in_time ? "" : " EXCEEDED");
  std::printf("%s: %d failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
