#include "bosecert/commutator.hpp"
#include "bosecert/errors.hpp"
#include "bosecert/fock_basis.hpp"
#include "bosecert/lanczos.hpp"
#include "bosecert/momentum_ed.hpp"
#include "bosecert/potsplit.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace bosecert;
constexpr double pi = std::numbers::pi;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      A(i, j) = A(j, i) = g(rng);
  return A;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

} // namespace

// ---- occupation basis ------------------------------------------------------------------

TEST_CASE("basis dimension is the multiset count") {
  for (int m : {1, 2, 5, 9})
    for (int N : {0, 1, 3, 4}) {
      const OccupationBasis b(m, N);
      CHECK(b.dim() == static_cast<std::size_t>(binomial(m + N - 1, N)));
      CHECK(OccupationBasis::full_dimension(m, N) == b.dim());
    }
}

TEST_CASE("basis starts with the condensed state and is descending lexicographic") {
  const OccupationBasis b(4, 3);
  CHECK(b.state(0)[0] == 3);
  for (std::size_t i = 1; i < b.dim(); ++i) {
    const auto p = b.state(i - 1), q = b.state(i);
    CHECK(std::lexicographical_compare(q.begin(), q.end(), p.begin(), p.end()));
    int sum = 0;
    for (auto x : q)
      sum += x;
    CHECK(sum == 3);
  }
}

TEST_CASE("rank and find invert the enumeration") {
  const OccupationBasis b(6, 4);
  for (std::size_t i = 0; i < b.dim(); ++i) {
    CHECK(b.rank(b.state(i)) == i);
    CHECK(b.find(b.state(i)) == i);
  }
  const std::vector<std::uint8_t> wrong_count{1, 0, 0, 0, 0, 0};
  CHECK(b.find(wrong_count) == OccupationBasis::npos);
}

TEST_CASE("filtered basis keeps order and reports absent states") {
  const OccupationBasis b(5, 3, [](Occupation o) { return o[0] != 1; });
  for (std::size_t i = 0; i < b.dim(); ++i)
    CHECK(b.state(i)[0] != 1);
  const std::vector<std::uint8_t> excluded{1, 2, 0, 0, 0};
  CHECK(b.find(excluded) == OccupationBasis::npos);
}

TEST_CASE("basis larger than the budget overflows") {
  CHECK_THROWS_AS(OccupationBasis(40, 8, 1000), DimensionOverflow);
}

TEST_CASE("second quantization of the identity is the particle number") {
  const OccupationBasis b(5, 3);
  const Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(5, 5);
  const Eigen::MatrixXd D = Eigen::MatrixXd(second_quantize(b, Id));
  CHECK((D - 3.0 * Eigen::MatrixXd::Identity(D.rows(), D.cols())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("second-quantized spectrum is the sum of one-body eigenvalues") {
  const Eigen::MatrixXd A = random_symmetric(3, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> one(A);
  const auto e = one.eigenvalues();
  std::vector<double> expected;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      expected.push_back(e[i] + e[j]);
  std::sort(expected.begin(), expected.end());
  const OccupationBasis b(3, 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> many(Eigen::MatrixXd(second_quantize(b, A)));
  REQUIRE(many.eigenvalues().size() == 6);
  for (int i = 0; i < 6; ++i)
    CHECK(many.eigenvalues()[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("second quantization is a Lie algebra homomorphism") {
  const Eigen::MatrixXd A = random_symmetric(4, 1), B = random_symmetric(4, 2);
  const OccupationBasis b(4, 3);
  const Eigen::MatrixXd dA(second_quantize(b, A)), dB(second_quantize(b, B));
  const Eigen::MatrixXd AB = A * B - B * A;
  const Eigen::MatrixXd dAB(second_quantize(b, AB));
  CHECK(((dA * dB - dB * dA) - dAB).cwiseAbs().maxCoeff() < 1e-12);
}

// ---- Lanczos ---------------------------------------------------------------------------

TEST_CASE("lanczos finds the lowest eigenvalue of a random symmetric matrix") {
  const Eigen::MatrixXd A = random_symmetric(300, 9);
  const auto r = lanczos_lowest([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(A * x); },
                                300);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
  CHECK(std::abs(r.value - eig.eigenvalues()[0]) <= 1e-10);
  CHECK(r.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.residual <= 1e-9);
}

TEST_CASE("lanczos handles a degenerate lowest level and tiny dimensions") {
  Eigen::VectorXd d(50);
  for (int i = 0; i < 50; ++i)
    d[i] = i < 3 ? -1.0 : double(i);
  const auto r =
      lanczos_lowest([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(d.cwiseProduct(x)); }, 50);
  CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-12));
  const auto one =
      lanczos_lowest([](const Eigen::VectorXd& x) { return Eigen::VectorXd(2.5 * x); }, 1);
  CHECK(one.value == doctest::Approx(2.5));
}

TEST_CASE("lanczos without restarts on a clustered spectrum does not converge") {
  Eigen::VectorXd d(400);
  for (int i = 0; i < 400; ++i)
    d[i] = 1.0 + 1e-6 * i * i;
  LanczosOptions o;
  o.krylov_dim = 3;
  o.max_restarts = 0;
  o.tol = 1e-14;
  CHECK_THROWS_AS(
      lanczos_lowest([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(d.cwiseProduct(x)); },
                     400, o),
      NoConvergence);
}

// ---- momentum-space ED ------------------------------------------------------------------

TEST_CASE("mode set and zero-momentum sector dimensions") {
  const MomentumModes modes(4.0, 4.0);
  CHECK(modes.size() == 33);
  CHECK(modes.k2(0) == 0.0);
  const auto zero = [](double) { return 0.0; };
  const std::size_t dims[] = {1, 17, 91, 543};
  for (int N = 1; N <= 4; ++N)
    CHECK(build_hamiltonian_momentum(4.0, zero, N, 4.0).basis.dim() == dims[N - 1]);
}

TEST_CASE("free gas has zero ground energy and no depletion") {
  const auto h = build_hamiltonian_momentum(4.0, [](double) { return 0.0; }, 3, 4.0);
  const auto proj = build_projectors(h.basis);
  const auto gs = ground_state(h.H, {}, &proj);
  CHECK(std::abs(gs.E0) <= 1e-12);
  CHECK(std::abs(gs.nplus) <= 1e-12);
  CHECK(gs.n0 == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("one particle spectrum is k squared") {
  const auto vh = potential_fourier(RadialPotential::square_well(2.0, 1.0));
  const auto h = build_hamiltonian_momentum(4.0, vh, 1, 4.0, std::nullopt);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.H.dense(), Eigen::EigenvaluesOnly);
  std::vector<double> k2;
  for (std::size_t i = 0; i < h.modes.size(); ++i)
    k2.push_back(h.modes.k2(i));
  std::sort(k2.begin(), k2.end());
  for (std::size_t i = 0; i < k2.size(); ++i)
    CHECK(eig.eigenvalues()[Eigen::Index(i)] == doctest::Approx(k2[i]).epsilon(1e-12));
  CHECK(k2[1] == doctest::Approx(std::pow(2.0 * pi / 4.0, 2)));
}

TEST_CASE("weak two-body ground energy follows second-order perturbation theory") {
  const auto vh = potential_fourier(RadialPotential::square_well(0.02, 1.0));
  const auto h = build_hamiltonian_momentum(4.0, vh, 2, 4.0);
  const auto gs = ground_state(h.H);
  const auto o = pair_perturbation_oracle(h.modes, vh);
  CHECK(o.E2 < 0.0);
  CHECK(std::abs(gs.E0 - o.E1 - o.E2) <= o.budget);
  CHECK(gs.dense_difference <= 1e-10);
}

TEST_CASE("interaction conserves total momentum") {
  const auto vh = potential_fourier(RadialPotential::square_well(2.0, 1.0));
  const auto h = build_hamiltonian_momentum(4.0, vh, 2, 4.0, std::nullopt);
  CHECK(momentum_block_leakage(h) == 0.0);
  CHECK(h.H.max_asymmetry() < 1e-14);
}

TEST_CASE("iterative and dense ground energies agree and particle number is conserved") {
  const auto vh = potential_fourier(RadialPotential::square_well(2.0, 1.0));
  for (int N : {2, 3, 4}) {
    const auto h = build_hamiltonian_momentum(4.0, vh, N, 4.0);
    const auto proj = build_projectors(h.basis);
    const auto gs = ground_state(h.H, {}, &proj);
    CHECK(gs.dense_difference <= 1e-10);
    CHECK(std::abs(gs.n0 + gs.nplus - N) <= 1e-10);
  }
}

TEST_CASE("depletion grows with the coupling") {
  DepletionStudyConfig c{RadialPotential::square_well(2.0, 1.0)};
  const auto st = depletion_study(c);
  REQUIRE(st.rows.size() == 3);
  CHECK(st.depletion_monotone);
  CHECK(st.energy_monotone);
  for (std::size_t i = 1; i < st.rows.size(); ++i)
    CHECK(st.rows[i].depletion > st.rows[i - 1].depletion);
}

TEST_CASE("eigenvector dump layout is a dimension header then float64 values") {
  const auto path = std::filesystem::temp_directory_path() / "bosecert_vec_test.bin";
  Eigen::VectorXd v(5);
  v << 0.1, -2.0, 3.5, 0.0, 1e-300;
  write_eigenvector(path.string(), v);
  CHECK(std::filesystem::file_size(path) == 8 + 5 * 8);
  std::ifstream f(path, std::ios::binary);
  unsigned char head[8];
  f.read(reinterpret_cast<char*>(head), 8);
  CHECK(head[0] == 5);
  for (int i = 1; i < 8; ++i)
    CHECK(head[i] == 0);
  const auto back = read_eigenvector(path.string());
  CHECK(back == v);
  std::filesystem::remove(path);
}

// ---- potential split and commutator ------------------------------------------------------

namespace {

struct SmallBox {
  RadialPotential pot = RadialPotential::square_well(2.0, 1.0);
  ScatteringSolution sol = solve_scattering(pot, 4.0);
  BumpProfile chi = build_bump(1.0);
  BoxGeometry geom = [this] {
    BoxGeometry g;
    g.a = sol.a();
    g.K = 2.0;
    g.rho_mu = 1.0 / (g.K * g.K * 2.2 * 2.2 * g.a);
    return g;
  }();
  LocalizedPotentials lp{geom, pot, sol, chi};
};

const SmallBox& small_box() {
  static const SmallBox s;
  return s;
}

} // namespace

TEST_CASE("potential split identity holds to rounding") {
  const auto& s = small_box();
  CHECK(s.lp.ell() == doctest::Approx(2.2));
  for (auto [N, M] : {std::pair{2, 2}, {3, 2}}) {
    const LatticeBox box{s.lp.ell(), M};
    const auto t = build_potsplit_terms(box, s.lp, N);
    CHECK(potsplit_residual(t) <= 1e-12);
    CHECK(t.tensor_residual <= 1e-12);
    PotsplitOptions z;
    z.zero_omega = true;
    CHECK(potsplit_residual(build_potsplit_terms(box, s.lp, N, z)) <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> q4(t.Q[4], Eigen::EigenvaluesOnly);
    CHECK(q4.eigenvalues()[0] >= -1e-12);
    const Eigen::MatrixXd total = t.n0 + t.nplus;
    CHECK((total - N * Eigen::MatrixXd::Identity(total.rows(), total.cols())).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("interaction estimate is reproducible for a fixed seed") {
  const auto& s = small_box();
  const auto t = build_potsplit_terms(LatticeBox{s.lp.ell(), 2}, s.lp, 2);
  const auto e1 = verify_interaction_estimate(t, s.sol.a(), 50, 3);
  const auto e2 = verify_interaction_estimate(t, s.sol.a(), 50, 3);
  CHECK(e1.inf_ratio == e2.inf_ratio);
  CHECK(e1.inf_ratio <= e1.raw_inf_ratio + 1e-12);
  CHECK(e1.A2_asymmetry < 1e-12);
}

TEST_CASE("lattice box rejects nonsense") {
  CHECK_THROWS(LatticeBox{0.0, 2}.validate());
  CHECK_THROWS(LatticeBox{1.0, 0}.validate());
}

TEST_CASE("N minus the commutator of b and its adjoint is nonnegative") {
  const auto& chi = small_box().chi;
  const LatticeBox box{2.2, 3};
  for (int N : {1, 2})
    for (const Vec3& k : {Vec3{2 * pi / 2.2, 0, 0}, Vec3{pi / 2.2, pi / 2.2, 0}}) {
      const auto r = verify_commutator_bound(box, chi, k, N);
      CHECK(r.lambda_min >= -1e-10);
      CHECK(r.analytic_residual <= 1e-12);
      CHECK(r.pass);
    }
}

TEST_CASE("constant localization function gives b = 0") {
  CommutatorOptions o;
  o.constant_chi = true;
  const auto r = verify_commutator_bound(LatticeBox{2.2, 3}, small_box().chi, {0, 0, 0}, 2, o);
  CHECK(r.lambda_min == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.f_norm2 <= 1e-24);
}
