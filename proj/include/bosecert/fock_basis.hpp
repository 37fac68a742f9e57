#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

namespace bosecert {

using Occupation = std::span<const std::uint8_t>;

// Occupation vectors of N bosons in m modes, enumerated in descending lexicographic order so that
// index 0 puts every particle in mode 0.
class OccupationBasis {
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  static constexpr std::size_t default_max_dim = 4'000'000;

  OccupationBasis() = default;
  OccupationBasis(int modes, int particles, std::size_t max_dim = default_max_dim);
  // Subset accepted by `keep`, same order. The unfiltered count may exceed max_dim.
  OccupationBasis(int modes, int particles, const std::function<bool(Occupation)>& keep,
                  std::size_t max_dim = default_max_dim);

  // C(m+N-1, N), saturating at SIZE_MAX.
  static std::size_t full_dimension(int modes, int particles);

  std::size_t dim() const { return dim_; }
  int modes() const { return m_; }
  int particles() const { return N_; }
  bool complete() const { return complete_; }

  Occupation state(std::size_t i) const {
    return {occ_.data() + i * static_cast<std::size_t>(m_), static_cast<std::size_t>(m_)};
  }
  // Rank in the unfiltered enumeration.
  std::size_t rank(Occupation occ) const;
  // Position in this basis, npos when absent.
  std::size_t find(Occupation occ) const;

private:
  void init_tables();
  template <class Visit> void enumerate(Visit&& visit) const;

  int m_ = 0, N_ = 0;
  std::size_t dim_ = 0;
  bool complete_ = true;
  std::vector<std::uint8_t> occ_;
  std::vector<std::vector<std::size_t>> ways_; // ways_[k][t]: t bosons in k modes
  std::unordered_map<std::size_t, std::size_t> index_of_rank_;
};

template <class T> using SparseMatrixT = Eigen::SparseMatrix<T, Eigen::RowMajor>;

// Real sparse operator with a symmetry flag.
struct SparseOperator {
  SparseMatrixT<double> matrix;
  bool symmetric = true;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix * x; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
  double expectation(const Eigen::VectorXd& x) const { return x.dot(matrix * x); }
  // max |A - Aᵀ| entry.
  double max_asymmetry() const;
};

// dΓ(A) = Σ A_ab a_a† a_b on the basis.
SparseMatrixT<double> second_quantize(const OccupationBasis& basis, const Eigen::MatrixXd& A);
SparseMatrixT<std::complex<double>> second_quantize(const OccupationBasis& basis,
                                                    const Eigen::MatrixXcd& A);

// Diagonal operator Σ_a c_a n_a.
SparseOperator number_weighted(const OccupationBasis& basis, const std::vector<double>& c);

} // namespace bosecert
