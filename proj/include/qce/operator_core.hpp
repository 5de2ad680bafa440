#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace qce {

using Complex = std::complex<double>;

// Hermiticity gate applied to input matrices: max_{i,j} |a_ij - conj(a_ji)|
// must not exceed this. Failing inputs are rejected, not symmetrized.
inline constexpr double kHermitianTolerance = 1e-12;

// Dense complex matrix, row-major. Dimensions stay small (products of a few
// local dimensions), so no sparse or structured storage.
class OperatorMatrix {
public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(std::size_t dim);
  static OperatorMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return a_[i * dim_ + j];
  }
  Complex* data() { return a_.data(); }
  const Complex* data() const { return a_.data(); }

  OperatorMatrix& operator+=(const OperatorMatrix& rhs);
  OperatorMatrix& operator-=(const OperatorMatrix& rhs);
  OperatorMatrix& operator*=(Complex scale);

  OperatorMatrix adjoint() const;
  Complex trace() const;
  double frobenius_norm() const;

  // max |a_ij - conj(a_ji)|; zero for exactly Hermitian matrices.
  double hermiticity_defect() const;
  bool is_hermitian(double tol = kHermitianTolerance) const {
    return hermiticity_defect() <= tol;
  }

private:
  std::size_t dim_ = 0;
  std::vector<Complex> a_;
};

OperatorMatrix operator+(OperatorMatrix lhs, const OperatorMatrix& rhs);
OperatorMatrix operator-(OperatorMatrix lhs, const OperatorMatrix& rhs);
OperatorMatrix operator*(Complex scale, OperatorMatrix m);
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);

// Ordered list of sites carrying a uniform d-dimensional local space each.
// The first site is the most significant digit of the product-basis index.
class SiteSpace {
public:
  SiteSpace(std::vector<int> sites, int local_dim);

  const std::vector<int>& sites() const { return sites_; }
  int local_dim() const { return d_; }
  std::size_t total_dim() const { return total_dim_; }
  // Position of `site` in the ordering; -1 if absent.
  int position_of(int site) const;

private:
  std::vector<int> sites_;
  int d_ = 0;
  std::size_t total_dim_ = 0;
};

// Embeds a two-site operator acting on (edge.first, edge.second) into the
// product space of `target`, acting as identity on all other sites.
OperatorMatrix tensor_embed(const OperatorMatrix& op, std::pair<int, int> edge,
                            const SiteSpace& target);

// Trace normalized so that the identity has trace one.
Complex normalized_trace(const OperatorMatrix& m, const SiteSpace& space);

enum class PowerTraceRoute { RepeatedMultiply, Eigenvalues };

// Normalized trace of m^n for Hermitian m. Both routes must agree; the
// repeated-multiply route is the default used in weight evaluation.
Complex matrix_power_trace(const OperatorMatrix& m, int n,
                           const SiteSpace& space,
                           PowerTraceRoute route = PowerTraceRoute::RepeatedMultiply);

// All eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi
// rotations (off-diagonal Frobenius tolerance 1e-12, at most 100 sweeps).
std::vector<double> hermitian_eigenvalues(const OperatorMatrix& m);

// Largest |eigenvalue| of a Hermitian matrix.
double operator_norm(const OperatorMatrix& m);

}  // namespace qce
