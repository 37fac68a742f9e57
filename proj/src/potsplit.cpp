#include "bosecert/potsplit.hpp"

#include "bosecert/bogoliubov.hpp"
#include "bosecert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace bosecert {

Vec3 LatticeBox::site(int i) const {
  const int ix = i % M, iy = (i / M) % M, iz = i / (M * M);
  const double o = -0.5 * side;
  return {o + (ix + 0.5) * h(), o + (iy + 0.5) * h(), o + (iz + 0.5) * h()};
}

Vec3 LatticeBox::separation(int i, int j) const {
  const Vec3 x = site(i), y = site(j);
  Vec3 d{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
  if (periodic)
    for (double& c : d)
      c -= side * std::round(c / side);
  return d;
}

void LatticeBox::validate() const {
  if (M < 2)
    throw DomainError("lattice needs at least 2 points per side");
  if (!(side > 0.0) || !std::isfinite(side))
    throw DomainError("lattice side must be positive");
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Tensor space (ℂ^d)^{⊗N} with particle 0 as the most significant digit.
struct Tensor {
  int d = 0, N = 0;
  std::size_t D = 0;

  int digit(std::size_t idx, int particle) const {
    for (int p = N - 1; p > particle; --p)
      idx /= d;
    return static_cast<int>(idx % d);
  }

  // ⊗ of one-body matrices, `ops[p]` acting on particle p (nullptr = identity).
  Mat kron(const std::vector<const Mat*>& ops) const {
    Mat out = Mat::Ones(1, 1);
    for (int p = 0; p < N; ++p) {
      const Mat& A = ops[p] ? *ops[p] : identity_;
      Mat next(out.rows() * d, out.cols() * d);
      for (Eigen::Index r = 0; r < out.rows(); ++r)
        for (Eigen::Index c = 0; c < out.cols(); ++c)
          next.block(r * d, c * d, d, d) = out(r, c) * A;
      out.swap(next);
    }
    return out;
  }

  Mat identity_;
};

// A · diag(f) · B
Mat sandwich(const Mat& A, const Vec& f, const Mat& B) { return A * f.asDiagonal() * B; }
Mat hc(const Mat& X) { return X + X.transpose(); }

} // namespace

PotsplitTerms build_potsplit_terms(const LatticeBox& box, const LocalizedPotentials& lp, int N,
                                   const PotsplitOptions& opts) {
  box.validate();
  if (N < 2 || N > 3)
    throw DomainError("potential split check supports N = 2 or 3");
  const int d = box.sites();
  Tensor T{d, N, 1, Mat::Identity(d, d)};
  for (int p = 0; p < N; ++p) {
    if (T.D > opts.max_tensor_dim / static_cast<std::size_t>(d))
      throw DimensionOverflow("tensor space too large for the dense potential split check");
    T.D *= static_cast<std::size_t>(d);
  }
  const auto D = static_cast<Eigen::Index>(T.D);

  // kernels at lattice sites
  Mat w(d, d), w1(d, d), w2(d, d), om(d, d);
  const auto& sol = lp.scattering();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Vec3 x = box.site(i);
      const Vec3 sep = box.separation(i, j);
      const Vec3 y{x[0] - sep[0], x[1] - sep[1], x[2] - sep[2]};
      w(i, j) = lp.w(x, y);
      if (opts.zero_omega) {
        om(i, j) = 0.0;
        w1(i, j) = w2(i, j) = w(i, j);
      } else {
        om(i, j) = sol.omega(norm(sep));
        w1(i, j) = lp.w1(x, y);
        w2(i, j) = lp.w2(x, y);
      }
      if (!std::isfinite(w(i, j)) || !std::isfinite(w1(i, j)) || !std::isfinite(w2(i, j)) ||
          !std::isfinite(om(i, j))) {
        std::ostringstream msg;
        msg << "non-finite kernel sample at sites " << i << ", " << j;
        throw KernelSamplingError(msg.str());
      }
    }
  const double hw = box.weight();
  PotsplitTerms out;
  out.box = box;
  out.N = N;
  out.rho = lp.geometry().rho_mu;
  out.ell = lp.ell();
  out.iint_w1 = hw * hw * w1.sum();
  out.iint_w2 = hw * hw * w2.sum();
  out.tensor_dim = T.D;
  const Vec U = hw * w1.rowwise().sum();
  const double rho = out.rho;

  const Mat e = Mat::Constant(d, 1, 1.0 / std::sqrt(static_cast<double>(d)));
  const Mat P1 = e * e.transpose();
  const Mat Q1 = Mat::Identity(d, d) - P1;

  // diagonal samples in the tensor space
  auto pair_diag = [&](const Mat& k, int i, int j) {
    Vec f(D);
    for (Eigen::Index s = 0; s < D; ++s)
      f[s] = k(T.digit(s, i), T.digit(s, j));
    return f;
  };
  auto one_diag = [&](const Vec& k, int i) {
    Vec f(D);
    for (Eigen::Index s = 0; s < D; ++s)
      f[s] = k[T.digit(s, i)];
    return f;
  };
  auto local = [&](int i, const Mat& A, int j = -1, const Mat* B = nullptr) {
    std::vector<const Mat*> ops(N, nullptr);
    ops[i] = &A;
    if (j >= 0)
      ops[j] = B;
    return T.kron(ops);
  };

  Mat lhs = Mat::Zero(D, D);
  std::array<Mat, 5> Q;
  for (auto& q : Q)
    q = Mat::Zero(D, D);
  Mat A2 = Mat::Zero(D, D);

  for (int i = 0; i < N; ++i) {
    const Vec Ui = one_diag(U, i);
    const Mat Pi = local(i, P1), Qi = local(i, Q1);
    lhs.diagonal() -= rho * Ui;
    Q[0] -= rho * sandwich(Pi, Ui, Pi);
    Q[1] -= rho * hc(sandwich(Qi, Ui, Pi));
    Q[2] -= rho * sandwich(Qi, Ui, Qi);
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j)
        continue;
      const Vec fw = pair_diag(w, i, j), f1 = pair_diag(w1, i, j), f2 = pair_diag(w2, i, j);
      const Vec fo = pair_diag(om, i, j);
      const Mat PP = local(i, P1, j, &P1), PQ = local(i, P1, j, &Q1);
      const Mat QP = local(i, Q1, j, &P1), QQ = local(i, Q1, j, &Q1);
      lhs.diagonal() += 0.5 * fw;
      Q[0] += 0.5 * sandwich(PP, f2, PP);
      Q[1] += hc(sandwich(QP, f2, PP));
      Q[2] += sandwich(PQ, f2, QP) + sandwich(PQ, f2, PQ) + 0.5 * hc(sandwich(PP, f1, QQ));
      Q[3] += hc(sandwich(PQ, f1, QQ));
      const Mat Lft = QQ + (PP + PQ + QP) * fo.asDiagonal();
      Q[4] += 0.5 * Lft * fw.asDiagonal() * Lft.transpose();
      A2 += 0.5 * hc(sandwich(PP, f1, QQ));
    }

  Mat sum = Q[0] + Q[1] + Q[2] + Q[3] + Q[4];
  out.tensor_residual = (lhs - sum).cwiseAbs().maxCoeff();

  // n₀ = Σ Pᵢ and A₀ = f(n₀) through the spectral resolution over subsets of condensed particles
  Mat n0 = Mat::Zero(D, D);
  for (int i = 0; i < N; ++i)
    n0 += local(i, P1);
  Mat A0 = Mat::Zero(D, D);
  for (int mask = 0; mask < (1 << N); ++mask) {
    std::vector<const Mat*> ops(N);
    int k = 0;
    for (int p = 0; p < N; ++p) {
      const bool in = (mask >> p) & 1;
      ops[p] = in ? &P1 : &Q1;
      k += in;
    }
    A0 += compute_A0(k, rho, out.ell, out.iint_w1, out.iint_w2) * T.kron(ops);
  }

  // isometry onto symmetric tensors
  out.basis = OccupationBasis(d, N);
  const auto ds = static_cast<Eigen::Index>(out.basis.dim());
  Mat S = Mat::Zero(D, ds);
  std::vector<std::uint8_t> occ(d);
  for (Eigen::Index s = 0; s < D; ++s) {
    std::fill(occ.begin(), occ.end(), 0);
    for (int p = 0; p < N; ++p)
      ++occ[T.digit(s, p)];
    const std::size_t col = out.basis.find(Occupation(occ.data(), occ.size()));
    S(s, static_cast<Eigen::Index>(col)) = 1.0;
  }
  for (Eigen::Index c = 0; c < ds; ++c)
    S.col(c).normalize();
  auto compress = [&](const Mat& X) -> Mat { return S.transpose() * X * S; };
  out.isometry = S;
  out.lhs = compress(lhs);
  for (int q = 0; q < 5; ++q)
    out.Q[q] = compress(Q[q]);
  out.n0 = compress(n0);
  out.nplus = static_cast<double>(N) * Mat::Identity(ds, ds) - out.n0;
  out.A0 = compress(A0);
  out.A2 = compress(A2);
  return out;
}

double potsplit_residual(const PotsplitTerms& t) {
  const Eigen::MatrixXd sum = t.Q[0] + t.Q[1] + t.Q[2] + t.Q[3] + t.Q[4];
  return (t.lhs - sum).cwiseAbs().maxCoeff();
}

InteractionEstimate verify_interaction_estimate(const PotsplitTerms& t, double a, int samples,
                                                std::uint64_t seed, int descent_steps) {
  if (samples < 1 || !(a > 0.0))
    throw DomainError("interaction estimate needs samples >= 1 and a > 0");
  using Vec = Eigen::VectorXd;
  InteractionEstimate out;
  out.seed = seed;
  out.A2_asymmetry = (t.A2 - t.A2.transpose()).cwiseAbs().maxCoeff();
  const Eigen::Index ds = t.lhs.rows();
  const Mat diff = t.lhs - t.A0 - t.A2;
  const double ell3 = t.ell * t.ell * t.ell;
  const double inf = std::numeric_limits<double>::infinity();

  struct Eval {
    double r, np, n0, num, den;
  };
  auto eval = [&](const Vec& psi) {
    Eval e{};
    e.np = psi.dot(t.nplus * psi);
    e.n0 = psi.dot(t.n0 * psi);
    e.num = psi.dot(diff * psi);
    e.den = a * (t.rho + e.n0 / ell3) * e.np;
    e.r = e.np > 1e-12 ? e.num / e.den : inf;
    return e;
  };
  // Riemannian gradient descent with backtracking on r(ψ), ‖ψ‖ = 1
  auto descend = [&](Vec psi) {
    Eval cur = eval(psi);
    double step = 1e-2;
    for (int it = 0; it < descent_steps && std::isfinite(cur.r); ++it) {
      const Vec dN = 2.0 * diff * psi;
      const Vec dnp = 2.0 * t.nplus * psi, dn0 = 2.0 * t.n0 * psi;
      const Vec dD = a * ((t.rho + cur.n0 / ell3) * dnp + (cur.np / ell3) * dn0);
      Vec g = (dN - cur.r * dD) / cur.den;
      g -= psi * psi.dot(g);
      const double gn = g.norm();
      if (gn < 1e-12)
        break;
      bool moved = false;
      for (int k = 0; k < 30; ++k) {
        Vec trial = (psi - step * g).normalized();
        const Eval e = eval(trial);
        if (e.r < cur.r) {
          psi = trial;
          cur = e;
          step *= 2.0;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved)
        break;
    }
    return cur.r;
  };

  out.inf_ratio = out.raw_inf_ratio = out.sector_inf_ratio = inf;
  out.sup_ratio = -inf;
  std::vector<Vec> starts;

  // sectors of fixed n₀, where the denominator is constant
  Eigen::SelfAdjointEigenSolver<Mat> eig(t.n0);
  for (int k = 0; k < t.N; ++k) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < ds; ++i)
      if (std::abs(eig.eigenvalues()[i] - k) < 1e-8)
        cols.push_back(i);
    if (cols.empty())
      continue;
    Mat V(ds, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
      V.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(cols[c]);
    Eigen::SelfAdjointEigenSolver<Mat> sec(V.transpose() * diff * V);
    const Vec psi = V * sec.eigenvectors().col(0);
    out.sector_inf_ratio = std::min(out.sector_inf_ratio, eval(psi).r);
    starts.push_back(psi);
  }

  // fully condensed state: top eigenvector of n₀
  ++out.samples;
  if (!std::isfinite(eval(eig.eigenvectors().col(ds - 1)).r))
    ++out.skipped;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<std::pair<double, Vec>> best;
  for (int s = 0; s < samples; ++s) {
    Vec psi(ds);
    for (Eigen::Index i = 0; i < ds; ++i)
      psi[i] = gauss(rng);
    psi.normalize();
    ++out.samples;
    const Eval e = eval(psi);
    if (!std::isfinite(e.r)) {
      ++out.skipped;
      continue;
    }
    out.raw_inf_ratio = std::min(out.raw_inf_ratio, e.r);
    out.sup_ratio = std::max(out.sup_ratio, e.r);
    best.emplace_back(e.r, std::move(psi));
  }
  const std::size_t keep = std::min<std::size_t>(best.size(), 8);
  std::partial_sort(best.begin(), best.begin() + keep, best.end(),
                    [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t i = 0; i < keep; ++i)
    starts.push_back(best[i].second);
  for (const Vec& psi : starts)
    out.inf_ratio = std::min(out.inf_ratio, descend(psi));
  return out;
}

} // namespace bosecert
