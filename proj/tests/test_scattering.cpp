#include "bosecert/errors.hpp"
#include "bosecert/scattering.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace bosecert;
constexpr double pi = std::numbers::pi;

namespace {

// -u'' + (v0/2) u = 0 inside, u linear outside.
double square_well_a(double v0, double R) {
  const double k = std::sqrt(v0 / 2.0);
  return R - std::tanh(k * R) / k;
}

} // namespace

TEST_CASE("square well scattering length matches the closed form") {
  for (auto [v0, R] : {std::pair{2.0, 1.0}, {0.5, 1.0}, {8.0, 0.5}, {20.0, 2.0}}) {
    const auto sol = solve_scattering(RadialPotential::square_well(v0, R), 2.0 * R);
    const double exact = square_well_a(v0, R);
    CHECK(std::abs(sol.a() - exact) / exact <= 1e-8);
  }
}

TEST_CASE("weak square well approaches the first Born value") {
  const auto sol = solve_scattering(RadialPotential::square_well(1e-3, 1.0), 2.0);
  const double born = 1e-3 / 6.0;
  CHECK(std::abs(sol.a() - born) / sol.a() <= 1e-2);
  // the second Born term is negative, so a sits below the first-order value
  CHECK(sol.a() < born);
}

TEST_CASE("scattering length scales linearly under dilation") {
  const auto pot = RadialPotential::square_well(3.0, 0.8);
  const double a = solve_scattering(pot, 1.6).a();
  for (double lambda : {0.5, 2.0, 3.0}) {
    const double al = solve_scattering(pot.dilated(lambda), 1.6 * lambda).a();
    CHECK(al == doctest::Approx(lambda * a).epsilon(1e-8));
  }
}

TEST_CASE("scattering length increases with the coupling and stays below R") {
  double prev = 0.0;
  for (double v0 : {0.1, 0.5, 1.0, 4.0, 16.0, 64.0}) {
    const double a = solve_scattering(RadialPotential::square_well(v0, 1.0), 2.0).a();
    CHECK(a > prev);
    CHECK(a < 1.0);
    prev = a;
  }
}

TEST_CASE("omega equals a/r outside the support and lies in [0, 1]") {
  const auto sol = solve_scattering(RadialPotential::square_well(2.0, 1.0), 2.0);
  for (double r : {1.0, 1.3, 1.9})
    CHECK(sol.omega(r) == doctest::Approx(sol.a() / r).epsilon(1e-10));
  double prev = 2.0;
  for (int i = 0; i <= 50; ++i) {
    const double w = sol.omega(2.0 * i / 50.0);
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);
    CHECK(w <= prev);
    prev = w;
  }
}

TEST_CASE("integral of g equals 8 pi a") {
  const auto sol = solve_scattering(RadialPotential::square_well(2.0, 1.0), 2.0);
  CHECK(sol.integral_g() == doctest::Approx(8.0 * pi * sol.a()).epsilon(1e-9));
  CHECK(sol.integral_g_omega() > 0.0);
  CHECK(sol.integral_g_omega() < sol.integral_g());
}

TEST_CASE("fourier identity 2k^2 omega-hat = g-hat holds on the default grid") {
  const auto sol = solve_scattering(RadialPotential::square_well(2.0, 1.0), 2.0);
  const auto rep = check_scattering_identities(sol, {0.5, 1.0, 2.0, 5.0}, 1e-6);
  CHECK(rep.pass());
  for (const auto& r : rep.records)
    CHECK_MESSAGE(r.pass, r.check_id);
}

TEST_CASE("radial fourier transform of a ball indicator") {
  // 4π(sin kR - kR cos kR)/k³
  RadialProfile ball{[](double) { return 1.0; }, 1.0, {}, 0.0};
  for (double k : {0.0, 0.7, 3.0, 11.0}) {
    const double exact = k == 0.0 ? 4.0 * pi / 3.0
                                  : 4.0 * pi * (std::sin(k) - k * std::cos(k)) / (k * k * k);
    CHECK(radial_fourier(ball, k) == doctest::Approx(exact).epsilon(1e-11));
  }
}

TEST_CASE("tabulated potential agrees with the same callable profile") {
  std::vector<double> r, v;
  for (int i = 0; i <= 400; ++i) {
    r.push_back(i / 400.0);
    v.push_back(3.0 * (1.0 - r.back() * r.back()));
  }
  const auto tab = RadialPotential::tabulated(r, v, 1.0);
  const auto fn =
      RadialPotential::from_callable([](double x) { return 3.0 * (1.0 - x * x); }, 1.0);
  const double at = solve_scattering(tab, 2.0).a();
  const double af = solve_scattering(fn, 2.0).a();
  CHECK(at == doctest::Approx(af).epsilon(1e-5));
}

TEST_CASE("potential table file loads") {
  const auto path = std::filesystem::temp_directory_path() / "bosecert_table_test.txt";
  {
    std::ofstream f(path);
    f << "# R=1\n0 2\n0.5 2\n1 2\n";
  }
  const auto pot = load_potential_table(path.string());
  CHECK(pot.support_radius() == 1.0);
  CHECK(solve_scattering(pot, 2.0).a() ==
        doctest::Approx(square_well_a(2.0, 1.0)).epsilon(1e-6));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_potential_table(path.string()), IoError);
}

TEST_CASE("invalid potentials are rejected") {
  CHECK_THROWS_AS(RadialPotential::square_well(2.0, 0.0).validate(), InvalidPotential);
  CHECK_THROWS_AS(RadialPotential::from_callable([](double) { return -1.0; }, 1.0).validate(),
                  InvalidPotential);
  CHECK_THROWS_AS(RadialPotential::tabulated({0.0, 0.0}, {1.0, 1.0}, 1.0), InvalidPotential);
  CHECK_THROWS_AS(solve_scattering(RadialPotential::square_well(2.0, 1.0), 0.5),
                  InvalidPotential);
}
