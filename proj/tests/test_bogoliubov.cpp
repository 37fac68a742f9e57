#include "bosecert/bogoliubov.hpp"
#include "bosecert/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace bosecert;
constexpr double pi = std::numbers::pi;

namespace {

struct Setup {
  RadialPotential pot = RadialPotential::square_well(2.0, 1.0);
  ScatteringSolution sol = solve_scattering(pot, 2.0);
  BumpProfile chi = build_bump(1.0);
  BoxGeometry geom = BoxGeometry::from_diluteness(1e-6, sol.a(), 10.0);
  LocalizedPotentials lp{geom, pot, sol, chi};
};

const Setup& setup() {
  static const Setup s;
  return s;
}

} // namespace

TEST_CASE("radial transform of a ball indicator matches the closed form") {
  RadialTransform t([](double) { return 1.0; }, 1.0, {}, 40.0);
  CHECK(t.at_zero() == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-13));
  for (double k : {0.5, 3.0, 17.0, 39.0}) {
    const double exact = 4.0 * pi * (std::sin(k) - k * std::cos(k)) / (k * k * k);
    CHECK(t(k) == doctest::Approx(exact).epsilon(1e-10));
  }
  CHECK(t.edge_envelope() == doctest::Approx(4.0 * pi));
}

TEST_CASE("expansion constant is the maximum of the fourth-order remainder ratio") {
  const double c = expansion_constant();
  CHECK(c == doctest::Approx(16.0 * (7.0 / 8.0 - std::sqrt(3.0) / 2.0)).epsilon(1e-14));
  double worst = 0.0;
  for (int i = 1; i <= 5000; ++i) {
    const double y = 0.5 * i / 5000.0;
    worst = std::max(worst, (y * y / (1.0 + std::sqrt(1.0 - y * y)) - 0.5 * y * y) / std::pow(y, 4));
  }
  CHECK(worst <= c * (1 + 1e-12));
  CHECK(worst >= c * (1 - 1e-6));
}

TEST_CASE("momentum-space integral of g-hat squared reproduces integral g omega") {
  const auto m = g_omega_momentum_check(setup().sol);
  CHECK(m.relative_residual <= 1e-6);
  CHECK(m.value == doctest::Approx(setup().sol.integral_g_omega()).epsilon(1e-6));
}

TEST_CASE("bogoliubov integral respects the pointwise and second-order bounds") {
  const auto& s = setup();
  for (double n : {1.0, 2.0, 4.0}) {
    const auto bi = bogoliubov_integral(s.lp, n, s.geom.s);
    CHECK(bi.total > 0.0);
    CHECK(bi.expansion_holds);
    CHECK(bi.bound_holds);
    CHECK(bi.max_ratio <= 0.5 + 1e-12);
    // A - √(A² - W²) >= W²/(2A) makes -(n/2)·total sit below I + II
    CHECK(-0.5 * n * bi.total <= bi.I + bi.II + 1e-14);
    CHECK(-0.5 * n * bi.total >= bi.I + bi.II - expansion_constant() * bi.remainder - 1e-14);
  }
}

TEST_CASE("bogoliubov integral vanishes for a zero symbol") {
  const auto sym = QuadraticSymbol::zero(10.0, 3.0, 0.02);
  const auto bi = bogoliubov_integral(sym, 50.0);
  CHECK(bi.total == 0.0);
  CHECK(bi.remainder == 0.0);
}

TEST_CASE("A0 closed form at fixed parameter points") {
  // ρ = 2, ℓ = 1, ∬w₁ = 3, ∬w₂ = 5
  CHECK(compute_A0(0.0, 2.0, 1.0, 3.0, 5.0) == doctest::Approx(-0.25 * 9.0 * 3.0));
  CHECK(compute_A0(1.0, 2.0, 1.0, 3.0, 5.0) == doctest::Approx(-(2.0 + 1.0) * 3.0));
  CHECK(compute_A0(2.0, 2.0, 1.0, 3.0, 5.0) == doctest::Approx(5.0 - 4.25 * 3.0));
}

TEST_CASE("partition examples") {
  CHECK(partition_particles(10, 3.0, 1.0).sizes == std::vector<long>{4, 3, 3});
  CHECK(partition_particles(0, 3.0, 1.0).sizes.empty());
  const auto short_one = partition_particles(2, 3.0, 1.0);
  CHECK(short_one.sizes == std::vector<long>{2});
  CHECK(short_one.single_short_group);
  CHECK_THROWS_AS(partition_particles(10, 2.5, 1.0), InfeasiblePartition);
  CHECK_THROWS_AS(partition_particles(10, 3.0, 0.5), InfeasiblePartition);
}

TEST_CASE("partition respects the group bounds on random instances") {
  std::mt19937_64 rng(20240607);
  std::uniform_int_distribution<long> Mdist(0, 5000);
  std::uniform_real_distribution<double> Xdist(3.0, 8.0), rdist(1.0, 40.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const long M = Mdist(rng);
    const double Xi = Xdist(rng), x = rdist(rng);
    const auto p = partition_particles(M, Xi, x);
    CHECK(p.sizes == partition_particles(M, Xi, x).sizes);
    long sum = 0;
    for (std::size_t j = 0; j < p.sizes.size(); ++j) {
      sum += p.sizes[j];
      CHECK(p.sizes[j] > 0);
      CHECK(p.sizes[j] <= (Xi + 1) * x + 1e-9);
      if (j + 1 < p.sizes.size())
        CHECK(p.sizes[j] >= Xi * x - 1e-9);
    }
    CHECK(sum == M);
  }
}

TEST_CASE("main energy is a parabola with vertex at rho ell^3") {
  const double rho = 0.3, a = 0.2, ell = 4.0;
  const double n_star = rho * ell * ell * ell;
  const double e = energy_main(n_star, rho, a, ell);
  CHECK(std::abs(e + 4.0 * pi * a * rho * rho * ell * ell * ell) <=
        1e-12 * std::abs(e));
  for (double n = 0.0; n < 3 * n_star; n += 0.7) {
    CHECK(energy_main(n, rho, a, ell) >= e);
    const double second = energy_main(n + 1, rho, a, ell) - 2 * energy_main(n, rho, a, ell) +
                          energy_main(n - 1, rho, a, ell);
    CHECK(second > 0.0);
  }
}

TEST_CASE("box bound has the leading plus C0 form and C0 is stable under refinement") {
  const auto& s = setup();
  BudgetConstants k;
  const auto coarse = assemble_box_bound(s.lp, k);
  k.refine = 2;
  const auto fine = assemble_box_bound(s.lp, k);
  const double rho = s.geom.rho_mu, a = s.sol.a(), l3 = std::pow(s.lp.ell(), 3);
  const double form = -4.0 * pi * rho * rho * a * l3 -
                      coarse.C0_realized * rho * rho * a * l3 * std::sqrt(s.geom.diluteness());
  CHECK(coarse.box_bound == doctest::Approx(form).epsilon(1e-12));
  for (const auto& r : coarse.rows)
    CHECK(r.bound >= coarse.box_bound - 1e-12 * std::abs(form));
  CHECK(coarse.rows.size() ==
        static_cast<std::size_t>(std::floor((s.geom.Xi + 1) * s.geom.rho_ell3() + 1e-9)) + 1);
  CHECK(std::abs(fine.C0_realized - coarse.C0_realized) / coarse.C0_realized <= 0.05);
}

TEST_CASE("strict mode raises when the gap does not dominate") {
  const auto& s = setup();
  BudgetConstants k;
  const auto b = assemble_box_bound(s.lp, k);
  k.strict_gap = true;
  if (!b.gap_dominating)
    CHECK_THROWS_AS(assemble_box_bound(s.lp, k), GapNotDominating);
  else
    CHECK_NOTHROW(assemble_box_bound(s.lp, k));
}

TEST_CASE("LHY constant and energy") {
  CHECK(std::abs(lhy_constant() - 4.814418) <= 1e-6);
  const auto e = lhy_energy(1e-6, 1.0);
  CHECK(e.leading == doctest::Approx(4.0 * pi * 1e-6));
  CHECK(e.correction == doctest::Approx(e.leading * lhy_constant() * 1e-3));
  CHECK_THROWS_AS(lhy_energy(2.0, 1.0), DilutenessViolation);
  CHECK_THROWS_AS(lhy_energy(-1.0, 1.0), DomainError);
}

TEST_CASE("depletion bound from the energy excess") {
  DepletionInputs in;
  in.rho = 1e-3;
  in.a = 1.0;
  in.L = 10.0;
  in.N = 1.0;
  in.excess_per_particle = 1e-4;
  in.lower_bound_per_particle = 4.0 * pi * in.a * in.rho - 1e-4;
  in.delta = 0.2;
  const auto d = depletion_bound(in);
  CHECK(d.fraction == doctest::Approx(2e-4 * 100.0 / (2.0 * pi * pi)));
  CHECK(d.closed_form == doctest::Approx(1e-3 * 100.0 * std::sqrt(1e-3)));
  CHECK(d.complete_condensation);
  in.delta = 0.25;
  CHECK_FALSE(depletion_bound(in).complete_condensation);
  in.lower_bound_per_particle = 1.0;
  CHECK_THROWS_AS(depletion_bound(in), InconsistentInputs);
}
