#include "bosecert/errors.hpp"
#include "bosecert/kinetic.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bosecert;
constexpr double pi = std::numbers::pi;

namespace {

const BumpProfile& bump() {
  static const BumpProfile b = build_bump(1.0);
  return b;
}

} // namespace

TEST_CASE("normalized box transform is one at zero and even") {
  KineticSymbol sym{0.04, 1e-3, 1.0};
  CHECK(sym.theta_hat_normalized({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(sym.theta_hat_normalized({1.0, -2.0, 0.5}) ==
        doctest::Approx(sym.theta_hat_normalized({-1.0, 2.0, -0.5})).epsilon(1e-15));
  // sinc zeros at kℓ/2 = π
  CHECK(std::abs(sym.theta_hat_normalized({2 * pi, 0, 0})) < 1e-15);
  CHECK(sym.tau(1.0 / 0.04) == 0.0);
  CHECK(sym.tau(30.0) == doctest::Approx(900.0 - 625.0));
}

TEST_CASE("F vanishes at zero momentum") {
  KineticEngine eng(bump(), 0.04);
  const auto c = eng.evaluate({0, 0, 0}, 1e-3);
  CHECK(std::abs(c.F1) <= 1e-10);
}

TEST_CASE("F is invariant under coordinate permutations and sign flips") {
  KineticEngine eng(bump(), 0.04);
  const Vec3 k{0.9, -2.3, 4.1};
  const double ref = eng.evaluate(k, 1e-3).F1;
  const Vec3 variants[] = {{-2.3, 0.9, 4.1}, {4.1, 0.9, -2.3}, {-0.9, 2.3, -4.1}, {2.3, -4.1, 0.9}};
  for (const auto& v : variants)
    CHECK(eng.evaluate(v, 1e-3).F1 == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("F at general ell follows the ell^-2 scaling") {
  const Vec3 k{1.2, 0.4, -0.7};
  const auto one = compute_F(k, bump(), 0.04, 1e-3, 1.0);
  const Vec3 k3{k[0] / 3.0, k[1] / 3.0, k[2] / 3.0};
  const auto three = compute_F(k3, bump(), 0.04, 1e-3, 3.0);
  CHECK(three.F == doctest::Approx(one.F / 9.0).epsilon(1e-10));
}

TEST_CASE("F grows at most quadratically near zero") {
  KineticEngine eng(bump(), 0.04);
  double prev_ratio = 0.0;
  for (double t : {0.05, 0.1, 0.2}) {
    const double f = eng.evaluate({t, 0, 0}, 1e-3).F1;
    CHECK(f >= -1e-12);
    const double ratio = f / (t * t);
    if (prev_ratio > 0.0)
      CHECK(ratio == doctest::Approx(prev_ratio).epsilon(0.05));
    prev_ratio = ratio;
  }
}

TEST_CASE("lattice point count matches direct enumeration") {
  for (double Lr : {3.0, 4.0, 6.5})
    for (double ks : {5.0, 12.5}) {
      const double f = 2.0 * pi / Lr;
      const int m = static_cast<int>(ks / f) + 1;
      std::size_t n = 0;
      for (int i = -m; i <= m; ++i)
        for (int j = -m; j <= m; ++j)
          for (int l = -m; l <= m; ++l)
            if ((i || j || l) && f * std::sqrt(double(i * i + j * j + l * l)) <= ks)
              ++n;
      CHECK(count_lattice_points(Lr, ks) == n);
    }
}

TEST_CASE("certificate at s = 0.04 closes on the lattice and in the tail") {
  const auto cert = certify_gap(bump(), 1e-3, 0.04, 4.0);
  CHECK(cert.pass);
  CHECK(cert.lattice_pass);
  CHECK(cert.tail_pass);
  CHECK(std::abs(cert.F0) <= 1e-10);
  CHECK(cert.min_margin > 0.0);
  CHECK(cert.beta_observed <= cert.beta);
  CHECK(cert.gap_constant == doctest::Approx(2.0 * pi * pi));
  std::size_t counted = 0;
  for (const auto& r : cert.rows) {
    CHECK(r.margin > r.residual);
    CHECK(r.k[0] >= 0.0);
    CHECK(r.k[0] <= r.k[1]);
    CHECK(r.k[1] <= r.k[2]);
    counted += static_cast<std::size_t>(r.multiplicity);
  }
  CHECK(counted == cert.lattice_points);
}

TEST_CASE("certificate rejects a box that is too small") {
  CHECK_THROWS_AS(certify_gap(bump(), 1e-3, 0.04, 2.0), GeometryViolation);
}

TEST_CASE("search picks an admissible pair and reports every candidate") {
  const auto res = search_admissible(bump(), {1e-3, 1e-2}, {0.04, 0.05}, 4.0);
  CHECK(res.certificate.pass);
  CHECK(res.candidates.size() == 4);
  for (const auto& c : res.candidates)
    if (c.pass)
      CHECK(c.min_margin <= res.certificate.min_margin + 1e-12);
}

TEST_CASE("search with an oversized gap has no admissible pair") {
  CHECK_THROWS_AS(search_admissible(bump(), {1e4}, {0.05}, 4.0), NoAdmissiblePair);
}
