#include "bosecert/momentum_ed.hpp"

#include "bosecert/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace bosecert {

namespace {

constexpr double pi = std::numbers::pi;

int norm2(const IntVec3& v) { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }

IntVec3 total_momentum(const MomentumModes& modes, Occupation occ) {
  IntVec3 P{0, 0, 0};
  for (std::size_t a = 0; a < occ.size(); ++a)
    for (int c = 0; c < 3; ++c)
      P[c] += occ[a] * modes.n[a][c];
  return P;
}

} // namespace

MomentumModes::MomentumModes(double L_, double cutoff_) : L(L_), cutoff(cutoff_) {
  if (!(L > 0.0) || !(cutoff >= 0.0))
    throw DomainError("mode set needs L > 0 and cutoff >= 0");
  const int r = static_cast<int>(std::floor(std::sqrt(cutoff)));
  for (int x = -r; x <= r; ++x)
    for (int y = -r; y <= r; ++y)
      for (int z = -r; z <= r; ++z)
        if (x * x + y * y + z * z <= cutoff + 1e-12)
          n.push_back({x, y, z});
  std::sort(n.begin(), n.end(), [](const IntVec3& a, const IntVec3& b) {
    const int na = norm2(a), nb = norm2(b);
    return na != nb ? na < nb : a < b;
  });
}

double MomentumModes::k2(std::size_t i) const {
  const double f = 2.0 * pi / L;
  return f * f * norm2(n[i]);
}

std::size_t MomentumModes::find(const IntVec3& v) const {
  const auto it = std::find(n.begin(), n.end(), v);
  return it == n.end() ? OccupationBasis::npos : static_cast<std::size_t>(it - n.begin());
}

std::function<double(double)> potential_fourier(const RadialPotential& pot) {
  struct Cache {
    std::mutex mu;
    std::map<double, double> values;
  };
  auto cache = std::make_shared<Cache>();
  RadialProfile prof{[pot](double r) { return pot(r); }, pot.support_radius(), pot.breakpoints(),
                     0.0};
  return [cache, prof](double q) {
    {
      std::lock_guard lock(cache->mu);
      const auto it = cache->values.find(q);
      if (it != cache->values.end())
        return it->second;
    }
    const double v = radial_fourier(prof, q);
    std::lock_guard lock(cache->mu);
    cache->values.emplace(q, v);
    return v;
  };
}

MomentumHamiltonian build_hamiltonian_momentum(double L,
                                               const std::function<double(double)>& v_hat,
                                               int N, double cutoff, std::optional<IntVec3> sector,
                                               std::size_t max_dim) {
  MomentumModes modes(L, cutoff);
  const int m = static_cast<int>(modes.size());
  auto make_basis = [&]() {
    if (!sector)
      return OccupationBasis(m, N, max_dim);
    const IntVec3 target = *sector;
    return OccupationBasis(
        m, N, [&](Occupation occ) { return total_momentum(modes, occ) == target; }, max_dim);
  };
  OccupationBasis basis = make_basis();

  // v̂ at every momentum transfer between modes, keyed by |n_q|²
  const double f = 2.0 * pi / L;
  std::map<int, double> vq;
  for (const auto& a : modes.n)
    for (const auto& b : modes.n) {
      const IntVec3 q{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
      const int q2 = norm2(q);
      if (!vq.count(q2))
        vq.emplace(q2, v_hat(f * std::sqrt(static_cast<double>(q2))));
    }

  const double pref = 1.0 / (2.0 * L * L * L);
  std::vector<Eigen::Triplet<double>> trip, kin;
  std::vector<std::uint8_t> w(m);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const Occupation occ = basis.state(s);
    double diag_k = 0.0;
    for (int a = 0; a < m; ++a)
      diag_k += occ[a] * modes.k2(a);
    if (diag_k != 0.0) {
      trip.emplace_back(s, s, diag_k);
      kin.emplace_back(s, s, diag_k);
    }
    for (int p = 0; p < m; ++p) {
      if (occ[p] == 0)
        continue;
      for (int r = 0; r < m; ++r) {
        const int nr = occ[r] - (r == p ? 1 : 0);
        if (nr <= 0)
          continue;
        const double amp_in = std::sqrt(static_cast<double>(occ[p]) * nr);
        const IntVec3 tot{modes.n[p][0] + modes.n[r][0], modes.n[p][1] + modes.n[r][1],
                          modes.n[p][2] + modes.n[r][2]};
        for (int pp = 0; pp < m; ++pp) {
          const IntVec3 rv{tot[0] - modes.n[pp][0], tot[1] - modes.n[pp][1],
                           tot[2] - modes.n[pp][2]};
          const std::size_t rr = modes.find(rv);
          if (rr == OccupationBasis::npos)
            continue;
          const IntVec3 q{modes.n[pp][0] - modes.n[p][0], modes.n[pp][1] - modes.n[p][1],
                          modes.n[pp][2] - modes.n[p][2]};
          const double v = vq.at(norm2(q));
          if (v == 0.0)
            continue;
          std::copy(occ.begin(), occ.end(), w.begin());
          --w[p];
          --w[r];
          double amp = amp_in * std::sqrt(w[rr] + 1.0);
          ++w[rr];
          amp *= std::sqrt(w[pp] + 1.0);
          ++w[pp];
          const std::size_t t = basis.find(Occupation(w.data(), w.size()));
          if (t == OccupationBasis::npos)
            throw std::logic_error("interaction left the total-momentum sector");
          trip.emplace_back(t, s, pref * v * amp);
        }
      }
    }
  }
  MomentumHamiltonian out{std::move(modes), std::move(basis), {}, {}, sector};
  out.H.matrix.resize(out.basis.dim(), out.basis.dim());
  out.H.matrix.setFromTriplets(trip.begin(), trip.end());
  out.kinetic.matrix.resize(out.basis.dim(), out.basis.dim());
  out.kinetic.matrix.setFromTriplets(kin.begin(), kin.end());
  return out;
}

double momentum_block_leakage(const MomentumHamiltonian& h) {
  double worst = 0.0;
  const auto& M = h.H.matrix;
  for (int row = 0; row < M.outerSize(); ++row) {
    const IntVec3 Pr = total_momentum(h.modes, h.basis.state(row));
    for (SparseMatrixT<double>::InnerIterator it(M, row); it; ++it)
      if (total_momentum(h.modes, h.basis.state(it.col())) != Pr)
        worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

Projectors build_projectors(const OccupationBasis& basis) {
  const int m = basis.modes();
  Projectors out;
  out.P = Eigen::MatrixXd::Zero(m, m);
  out.P(0, 0) = 1.0;
  out.Q = Eigen::MatrixXd::Identity(m, m) - out.P;
  std::vector<double> c0(m, 0.0), cp(m, 1.0);
  c0[0] = 1.0;
  cp[0] = 0.0;
  out.n0 = number_weighted(basis, c0);
  out.nplus = number_weighted(basis, cp);
  return out;
}

GroundStateResult ground_state(const SparseOperator& op, const GroundStateOptions& opts,
                               const Projectors* proj) {
  if (op.max_asymmetry() > 1e-12 * std::max(1.0, op.matrix.cwiseAbs().sum()))
    throw DomainError("ground_state needs a symmetric operator");
  GroundStateResult out;
  const auto lz = lanczos_lowest([&](const Eigen::VectorXd& x) { return op.apply(x); }, op.dim(),
                                 opts.lanczos);
  out.E0 = lz.value;
  out.vector = lz.vector;
  out.residual = lz.residual;
  out.iterations = lz.iterations;
  out.method = "lanczos";
  if (opts.dense_check && op.dim() <= opts.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op.dense(), Eigen::EigenvaluesOnly);
    out.dense_E0 = eig.eigenvalues()[0];
    out.dense_difference = std::abs(*out.dense_E0 - out.E0);
    out.method = "lanczos+dense";
  }
  if (proj) {
    out.n0 = proj->n0.expectation(out.vector);
    out.nplus = proj->nplus.expectation(out.vector);
  }
  return out;
}

PerturbationOracle pair_perturbation_oracle(const MomentumModes& modes,
                                            const std::function<double(double)>& v_hat) {
  const double L3 = modes.L * modes.L * modes.L;
  const double f = 2.0 * pi / modes.L;
  PerturbationOracle out;
  out.E1 = v_hat(0.0) / L3;
  double k2min = 0.0;
  for (std::size_t i = 1; i < modes.size(); ++i) {
    const double k2 = modes.k2(i);
    const double v = v_hat(std::sqrt(k2));
    out.E2 -= v * v / (2.0 * k2) / (L3 * L3);
    k2min = k2min == 0.0 ? k2 : std::min(k2min, k2);
  }
  double vnorm = 0.0;
  std::map<IntVec3, bool> seen;
  for (const auto& a : modes.n)
    for (const auto& b : modes.n) {
      const IntVec3 q{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
      if (seen.emplace(q, true).second)
        vnorm += std::abs(v_hat(f * std::sqrt(static_cast<double>(norm2(q)))));
    }
  vnorm *= 2.0 / L3;
  const double gap = 2.0 * k2min;
  out.budget = gap > 0.0 ? 4.0 * std::abs(out.E2) * vnorm / gap : 0.0;
  return out;
}

DepletionStudy depletion_study(const DepletionStudyConfig& cfg) {
  if (cfg.couplings.empty())
    throw DomainError("depletion study needs at least one coupling");
  DepletionStudy out;
  for (double c : cfg.couplings) {
    if (c < 0.0)
      throw DomainError("couplings must be non-negative");
    DepletionRow row;
    row.coupling = c;
    row.N = cfg.N;
    std::function<double(double)> vh = [](double) { return 0.0; };
    double a = 0.0;
    if (c > 0.0) {
      const RadialPotential pot = cfg.potential.scaled(c);
      a = solve_scattering(pot, 4.0 * pot.support_radius()).a();
      vh = potential_fourier(pot);
    }
    const auto h = build_hamiltonian_momentum(cfg.L, vh, cfg.N, cfg.cutoff);
    const auto proj = build_projectors(h.basis);
    const auto gs = ground_state(h.H, cfg.solver, &proj);
    const double rho = cfg.N / std::pow(cfg.L, 3);
    row.rho_a3 = rho * a * a * a;
    row.L_units = cfg.L * std::sqrt(rho * a);
    row.E0_per_N = gs.E0 / cfg.N;
    row.leading = 4.0 * pi * a * rho;
    row.depletion = gs.nplus / cfg.N;
    row.bound = cfg.C_bound * rho * a * cfg.L * cfg.L * std::pow(row.rho_a3, 0.5 - cfg.epsilon);
    row.number_residual = std::abs(gs.n0 + gs.nplus - cfg.N);
    row.dense_difference = gs.dense_difference;
    row.residual = gs.residual;
    row.dim = h.basis.dim();
    out.rows.push_back(row);
  }
  std::vector<DepletionRow> sorted = out.rows;
  std::sort(sorted.begin(), sorted.end(),
            [](const DepletionRow& x, const DepletionRow& y) { return x.coupling < y.coupling; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!(sorted[i].depletion > sorted[i - 1].depletion))
      out.depletion_monotone = false;
    if (sorted[i].E0_per_N < sorted[i - 1].E0_per_N - 1e-12)
      out.energy_monotone = false;
  }
  return out;
}

namespace {

template <class T> T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

} // namespace

void write_eigenvector(const std::string& path, const Eigen::VectorXd& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open " + path + " for writing");
  const std::uint64_t n = to_little(static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = to_little(v[i]);
    out.write(reinterpret_cast<const char*>(&x), sizeof x);
  }
  if (!out)
    throw IoError("write failed for " + path);
}

Eigen::VectorXd read_eigenvector(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  n = to_little(n);
  if (!in || n > (1ull << 32))
    throw IoError("bad eigenvector header in " + path);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    double x = 0.0;
    in.read(reinterpret_cast<char*>(&x), sizeof x);
    v[static_cast<Eigen::Index>(i)] = to_little(x);
  }
  if (!in)
    throw IoError("truncated eigenvector file " + path);
  return v;
}

} // namespace bosecert
