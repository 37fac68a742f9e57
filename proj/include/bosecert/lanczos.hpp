#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace bosecert {

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LanczosOptions {
  int krylov_dim = 120;
  int max_restarts = 60;
  double tol = 1e-11; // on ‖Ax - λx‖ / max(1, |λ|)
  std::uint64_t seed = 20240607;
};

struct LanczosResult {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0; // ‖Ax - λx‖
  int iterations = 0;    // matrix-vector products
  int restarts = 0;
};

// Lowest eigenpair of a symmetric map: restarted Lanczos with full reorthogonalization,
// restarting from the current Ritz vector. Throws NoConvergence.
LanczosResult lanczos_lowest(const LinearMap& A, std::size_t dim, const LanczosOptions& opts = {});

} // namespace bosecert
