#include "bosecert/lanczos.hpp"

#include "bosecert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace bosecert {

LanczosResult lanczos_lowest(const LinearMap& A, std::size_t dim, const LanczosOptions& opts) {
  if (dim == 0)
    throw DomainError("Lanczos needs a non-empty space");
  const Eigen::Index n = static_cast<Eigen::Index>(dim);
  LanczosResult out;
  Eigen::VectorXd start(n);
  {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i)
      start[i] = u(rng);
    start.normalize();
  }
  const Eigen::Index kmax = std::min<Eigen::Index>(opts.krylov_dim, n);
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    Eigen::MatrixXd V(n, kmax);
    Eigen::VectorXd alpha(kmax), beta(kmax);
    V.col(0) = start;
    Eigen::Index k = 0;
    for (; k < kmax; ++k) {
      Eigen::VectorXd w = A(V.col(k));
      ++out.iterations;
      alpha[k] = V.col(k).dot(w);
      // two passes of classical Gram-Schmidt against the whole basis
      for (int pass = 0; pass < 2; ++pass)
        w -= V.leftCols(k + 1) * (V.leftCols(k + 1).transpose() * w);
      beta[k] = w.norm();
      if (k + 1 == kmax || beta[k] <= 1e-13 * std::max(1.0, std::abs(alpha[k])))
        break;
      V.col(k + 1) = w / beta[k];
    }
    const Eigen::Index m = k + 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m)
        T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
    const double theta = eig.eigenvalues()[0];
    Eigen::VectorXd x = V.leftCols(m) * eig.eigenvectors().col(0);
    x.normalize();
    const Eigen::VectorXd r = A(x) - theta * x;
    ++out.iterations;
    out.value = theta;
    out.vector = x;
    out.residual = r.norm();
    out.restarts = restart;
    if (out.residual <= opts.tol * std::max(1.0, std::abs(theta)))
      return out;
    start = x;
  }
  std::ostringstream msg;
  msg << "Lanczos did not converge: residual " << out.residual << " after " << out.restarts
      << " restarts";
  throw NoConvergence(msg.str());
}

} // namespace bosecert
