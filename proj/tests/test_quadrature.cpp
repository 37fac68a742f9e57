#include "bosecert/errors.hpp"
#include "bosecert/quadrature.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

using namespace bosecert;

TEST_CASE("gauss-legendre weights sum to 2 and integrate monomials exactly") {
  for (int n : {2, 5, 16, 32}) {
    const auto& g = gauss_legendre(n);
    REQUIRE(g.nodes.size() == static_cast<std::size_t>(n));
    double w = 0.0;
    for (double x : g.weights)
      w += x;
    CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
    // degree 2n-1 is exact
    const int d = 2 * n - 2;
    double m = 0.0;
    for (int i = 0; i < n; ++i)
      m += g.weights[i] * std::pow(g.nodes[i], d);
    CHECK(m == doctest::Approx(2.0 / (d + 1)).epsilon(1e-13));
  }
}

TEST_CASE("gauss-legendre cache returns the same rule") {
  CHECK(&gauss_legendre(16) == &gauss_legendre(16));
}

TEST_CASE("composite rule on smooth integrands") {
  CHECK(integrate_composite([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 4) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(integrate_composite([](double x) { return std::exp(-x); }, 0.0, 10.0, 8) ==
        doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-14));
}

TEST_CASE("adaptive rule handles a kink at a breakpoint") {
  auto f = [](double x) { return std::abs(x - 0.3); };
  const std::array<double, 3> bp{0.0, 0.3, 1.0};
  const auto r = integrate_adaptive(f, bp, 1e-12);
  CHECK(r.value == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-13));
  CHECK(r.residual <= 1e-12);
}

TEST_CASE("adaptive rule converges on a sqrt singularity at the endpoint") {
  auto f = [](double x) { return std::sqrt(x); };
  const std::array<double, 2> bp{0.0, 1.0};
  const auto r = integrate_adaptive(f, bp, 1e-8, 0.0, 2, 20);
  CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("adaptive rule throws when it cannot converge") {
  auto f = [](double x) { return std::sin(1.0 / (x + 1e-12)); };
  const std::array<double, 2> bp{0.0, 1.0};
  CHECK_THROWS_AS(integrate_adaptive(f, bp, 1e-14, 0.0, 1, 3), QuadratureFailure);
}

TEST_CASE("hermite interpolants reproduce polynomials of their degree") {
  const double h = 0.7;
  auto p5 = [](double x) { return 1 - 2 * x + 3 * x * x - x * x * x + 0.5 * std::pow(x, 5); };
  auto d5 = [](double x) { return -2 + 6 * x - 3 * x * x + 2.5 * std::pow(x, 4); };
  auto s5 = [](double x) { return 6 - 6 * x + 10 * std::pow(x, 3); };
  for (double t : {0.0, 0.1, 0.45, 0.7}) {
    CHECK(hermite5(t / h, h, p5(0), d5(0), s5(0), p5(h), d5(h), s5(h)) ==
          doctest::Approx(p5(t)).epsilon(1e-13));
  }
  auto p3 = [](double x) { return 2 - x + 4 * x * x * x; };
  auto d3 = [](double x) { return -1 + 12 * x * x; };
  CHECK(hermite3(0.33 / h, h, p3(0), d3(0), p3(h), d3(h)) == doctest::Approx(p3(0.33)).epsilon(1e-13));
}
