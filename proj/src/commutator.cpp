#include "bosecert/commutator.hpp"

#include "bosecert/errors.hpp"

#include <cmath>
#include <complex>

namespace bosecert {

using cplx = std::complex<double>;

CommutatorReport verify_commutator_bound(const LatticeBox& box, const BumpProfile& chi,
                                         const Vec3& k, int N, const CommutatorOptions& opts) {
  box.validate();
  if (N < 1)
    throw DomainError("commutator check needs N >= 1");
  const int d = box.sites();
  const double ell = box.side;
  const double h32 = std::pow(box.h(), 1.5);

  Eigen::VectorXcd e = Eigen::VectorXcd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  Eigen::VectorXcd f(d);
  for (int i = 0; i < d; ++i) {
    const Vec3 x = box.site(i);
    const double c =
        opts.constant_chi ? 1.0 : chi.chi({x[0] / ell, x[1] / ell, x[2] / ell});
    f[i] = h32 * c * std::polar(1.0, -(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
  }
  f -= e * e.dot(f);

  CommutatorReport out;
  out.N = N;
  out.k = k;
  const double ell3 = ell * ell * ell;
  out.f_norm2 = f.squaredNorm() / ell3;

  const OccupationBasis basis(d, N, 200'000);
  out.dim = basis.dim();
  const Eigen::MatrixXcd one_b = (e * f.adjoint()) / std::pow(ell, 1.5);
  const SparseMatrixT<cplx> B = second_quantize(basis, one_b);
  const SparseMatrixT<cplx> Bd = B.adjoint();
  const SparseMatrixT<cplx> C = (B * Bd - Bd * B).pruned();
  const Eigen::MatrixXcd one_c = (f.squaredNorm() * e * e.adjoint() - f * f.adjoint()) / ell3;
  const SparseMatrixT<cplx> Ca = second_quantize(basis, one_c);
  const SparseMatrixT<cplx> gap = C - Ca;
  for (int r = 0; r < gap.outerSize(); ++r)
    for (SparseMatrixT<cplx>::InnerIterator it(gap, r); it; ++it)
      out.analytic_residual = std::max(out.analytic_residual, std::abs(it.value()));
  for (int r = 0; r < C.outerSize(); ++r)
    for (SparseMatrixT<cplx>::InnerIterator it(C, r); it; ++it)
      out.commutator_norm = std::max(out.commutator_norm, std::abs(it.value()));

  const auto n = static_cast<Eigen::Index>(basis.dim());
  if (basis.dim() <= opts.dense_threshold) {
    Eigen::MatrixXcd M = -Eigen::MatrixXcd(C);
    M.diagonal().array() += static_cast<double>(N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M, Eigen::EigenvaluesOnly);
    out.lambda_min = eig.eigenvalues()[0];
    out.method = "dense";
  } else {
    // Hermitian H = X + iY acts on (u, v) as [X -Y; Y X], a real symmetric map with the same
    // spectrum (each eigenvalue doubled)
    auto apply = [&](const Eigen::VectorXd& z) {
      Eigen::VectorXcd x(n);
      x.real() = z.head(n);
      x.imag() = z.tail(n);
      const Eigen::VectorXcd y = static_cast<double>(N) * x - C * x;
      Eigen::VectorXd out_v(2 * n);
      out_v.head(n) = y.real();
      out_v.tail(n) = y.imag();
      return out_v;
    };
    const auto lz = lanczos_lowest(apply, 2 * basis.dim(), opts.lanczos);
    out.lambda_min = lz.value;
    out.method = "lanczos-realified";
  }
  out.pass = out.lambda_min >= -1e-10;
  return out;
}

} // namespace bosecert
