#include "bosecert/fock_basis.hpp"

#include "bosecert/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bosecert {

namespace {

constexpr std::size_t saturated = std::numeric_limits<std::size_t>::max();

std::size_t add_sat(std::size_t a, std::size_t b) { return a > saturated - b ? saturated : a + b; }

void check_shape(int modes, int particles) {
  if (modes < 1 || particles < 0 || particles > 255)
    throw DomainError("occupation basis needs m >= 1 and 0 <= N <= 255");
}

[[noreturn]] void overflow(std::size_t dim, std::size_t max_dim) {
  std::ostringstream msg;
  msg << "Fock space dimension " << dim << " exceeds the limit " << max_dim;
  throw DimensionOverflow(msg.str());
}

} // namespace

std::size_t OccupationBasis::full_dimension(int modes, int particles) {
  check_shape(modes, particles);
  // C(m+N-1, N) through the recursion C(n, k) = C(n-1, k-1)·n/k with saturation.
  std::size_t c = 1;
  for (int k = 1; k <= particles; ++k) {
    const std::size_t n = static_cast<std::size_t>(modes - 1 + k);
    if (c > saturated / n)
      return saturated;
    c = c * n / static_cast<std::size_t>(k);
  }
  return c;
}

void OccupationBasis::init_tables() {
  ways_.assign(static_cast<std::size_t>(m_) + 1, std::vector<std::size_t>(N_ + 1, 0));
  ways_[0][0] = 1;
  for (int k = 1; k <= m_; ++k) {
    std::size_t run = 0;
    for (int t = 0; t <= N_; ++t) {
      run = add_sat(run, ways_[k - 1][t]);
      ways_[k][t] = run;
    }
  }
}

template <class Visit> void OccupationBasis::enumerate(Visit&& visit) const {
  std::vector<std::uint8_t> n(m_, 0);
  n[0] = static_cast<std::uint8_t>(N_);
  for (;;) {
    visit(Occupation(n.data(), n.size()));
    int i = m_ - 2;
    while (i >= 0 && n[i] == 0)
      --i;
    if (i < 0)
      return;
    int rest = 0;
    for (int j = i + 1; j < m_; ++j) {
      rest += n[j];
      n[j] = 0;
    }
    --n[i];
    n[i + 1] = static_cast<std::uint8_t>(rest + 1);
  }
}

OccupationBasis::OccupationBasis(int modes, int particles, std::size_t max_dim)
    : m_(modes), N_(particles) {
  const std::size_t d = full_dimension(modes, particles);
  if (d > max_dim)
    overflow(d, max_dim);
  init_tables();
  occ_.reserve(d * static_cast<std::size_t>(m_));
  enumerate([&](Occupation n) { occ_.insert(occ_.end(), n.begin(), n.end()); });
  dim_ = d;
}

OccupationBasis::OccupationBasis(int modes, int particles,
                                 const std::function<bool(Occupation)>& keep, std::size_t max_dim)
    : m_(modes), N_(particles), complete_(false) {
  const std::size_t full = full_dimension(modes, particles);
  if (full == saturated)
    overflow(full, max_dim);
  init_tables();
  std::size_t r = 0;
  enumerate([&](Occupation n) {
    if (keep(n)) {
      if (dim_ == max_dim)
        overflow(dim_ + 1, max_dim);
      occ_.insert(occ_.end(), n.begin(), n.end());
      index_of_rank_.emplace(r, dim_++);
    }
    ++r;
  });
}

std::size_t OccupationBasis::rank(Occupation occ) const {
  std::size_t r = 0;
  int left = N_;
  for (int i = 0; i + 1 < m_; ++i) {
    const int above = left - occ[i] - 1;
    if (above >= 0)
      r += ways_[m_ - i][above];
    left -= occ[i];
  }
  return r;
}

std::size_t OccupationBasis::find(Occupation occ) const {
  int total = 0;
  for (auto v : occ)
    total += v;
  if (total != N_ || static_cast<int>(occ.size()) != m_)
    return npos;
  const std::size_t r = rank(occ);
  if (complete_)
    return r;
  const auto it = index_of_rank_.find(r);
  return it == index_of_rank_.end() ? npos : it->second;
}

double SparseOperator::max_asymmetry() const {
  const SparseMatrixT<double> t = matrix.transpose();
  const SparseMatrixT<double> d = matrix - t;
  double worst = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrixT<double>::InnerIterator it(d, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

namespace {

template <class T, class Mat>
SparseMatrixT<T> quantize(const OccupationBasis& basis, const Mat& A) {
  const int m = basis.modes();
  if (A.rows() != m || A.cols() != m)
    throw DomainError("one-body matrix does not match the mode count");
  std::vector<Eigen::Triplet<T>> trip;
  std::vector<std::uint8_t> work(m);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const Occupation n = basis.state(s);
    for (int b = 0; b < m; ++b) {
      if (n[b] == 0)
        continue;
      for (int a = 0; a < m; ++a) {
        const T v = A(a, b);
        if (v == T(0))
          continue;
        if (a == b) {
          trip.emplace_back(s, s, v * static_cast<double>(n[b]));
          continue;
        }
        std::copy(n.begin(), n.end(), work.begin());
        const double amp = std::sqrt(static_cast<double>(work[b]) * (work[a] + 1.0));
        --work[b];
        ++work[a];
        const std::size_t t = basis.find(Occupation(work.data(), work.size()));
        if (t != OccupationBasis::npos)
          trip.emplace_back(t, s, v * amp);
      }
    }
  }
  SparseMatrixT<T> out(basis.dim(), basis.dim());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

} // namespace

SparseMatrixT<double> second_quantize(const OccupationBasis& basis, const Eigen::MatrixXd& A) {
  return quantize<double>(basis, A);
}

SparseMatrixT<std::complex<double>> second_quantize(const OccupationBasis& basis,
                                                    const Eigen::MatrixXcd& A) {
  return quantize<std::complex<double>>(basis, A);
}

SparseOperator number_weighted(const OccupationBasis& basis, const std::vector<double>& c) {
  if (static_cast<int>(c.size()) != basis.modes())
    throw DomainError("weights do not match the mode count");
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const Occupation n = basis.state(s);
    double v = 0.0;
    for (int a = 0; a < basis.modes(); ++a)
      v += c[a] * n[a];
    if (v != 0.0)
      trip.emplace_back(s, s, v);
  }
  SparseOperator out;
  out.matrix.resize(basis.dim(), basis.dim());
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  return out;
}

} // namespace bosecert
