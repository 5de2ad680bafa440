#include "qce/operator_core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "qce/errors.hpp"

namespace qce {

OperatorMatrix::OperatorMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {
  if (dim == 0) throw domain_error("OperatorMatrix: dimension must be >= 1");
}

OperatorMatrix OperatorMatrix::identity(std::size_t dim) {
  OperatorMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& rhs) {
  if (dim_ != rhs.dim_) throw domain_error("matrix addition: dimension mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += rhs.a_[i];
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& rhs) {
  if (dim_ != rhs.dim_) throw domain_error("matrix subtraction: dimension mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= rhs.a_[i];
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(Complex scale) {
  for (auto& v : a_) v *= scale;
  return *this;
}

OperatorMatrix OperatorMatrix::adjoint() const {
  OperatorMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

Complex OperatorMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double OperatorMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

double OperatorMatrix::hermiticity_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return worst;
}

OperatorMatrix operator+(OperatorMatrix lhs, const OperatorMatrix& rhs) {
  lhs += rhs;
  return lhs;
}

OperatorMatrix operator-(OperatorMatrix lhs, const OperatorMatrix& rhs) {
  lhs -= rhs;
  return lhs;
}

OperatorMatrix operator*(Complex scale, OperatorMatrix m) {
  m *= scale;
  return m;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw domain_error("matrix product: dimension mismatch");
  using EMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto n = static_cast<Eigen::Index>(a.dim());
  OperatorMatrix out(a.dim());
  Eigen::Map<EMat>(out.data(), n, n).noalias() =
      Eigen::Map<const EMat>(a.data(), n, n) * Eigen::Map<const EMat>(b.data(), n, n);
  return out;
}

namespace {

std::size_t checked_power(int d, std::size_t count) {
  // Keeps dense matrices representable: count * log2(d) <= 30.
  double bits = static_cast<double>(count) * std::log2(static_cast<double>(d));
  if (bits > 30.0) throw domain_error("SiteSpace: total dimension exceeds 2^30");
  std::size_t dim = 1;
  for (std::size_t i = 0; i < count; ++i) dim *= static_cast<std::size_t>(d);
  return dim;
}

}  // namespace

SiteSpace::SiteSpace(std::vector<int> sites, int local_dim)
    : sites_(std::move(sites)), d_(local_dim) {
  if (d_ < 2) throw domain_error("SiteSpace: local dimension must be >= 2");
  std::vector<int> sorted = sites_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw domain_error("SiteSpace: sites must be distinct");
  total_dim_ = checked_power(d_, sites_.size());
}

int SiteSpace::position_of(int site) const {
  for (std::size_t i = 0; i < sites_.size(); ++i)
    if (sites_[i] == site) return static_cast<int>(i);
  return -1;
}

OperatorMatrix tensor_embed(const OperatorMatrix& op, std::pair<int, int> edge,
                            const SiteSpace& target) {
  const int d = target.local_dim();
  const std::size_t d2 = static_cast<std::size_t>(d) * d;
  if (op.dim() != d2)
    throw domain_error("tensor_embed: operator dimension " + std::to_string(op.dim()) +
                       " does not match local dimension squared " + std::to_string(d2));
  const int pu = target.position_of(edge.first);
  const int pv = target.position_of(edge.second);
  if (pu < 0 || pv < 0)
    throw domain_error("tensor_embed: edge site not contained in target space");
  if (pu == pv) throw domain_error("tensor_embed: edge sites must be distinct");

  const std::size_t k = target.sites().size();
  const std::size_t dim = target.total_dim();
  std::vector<std::size_t> stride(k, 1);
  for (std::size_t t = k; t-- > 1;) stride[t - 1] = stride[t] * d;

  const std::size_t su = stride[pu];
  const std::size_t sv = stride[pv];
  OperatorMatrix out(dim);
  for (std::size_t base = 0; base < dim; ++base) {
    if ((base / su) % d != 0 || (base / sv) % d != 0) continue;
    for (int au = 0; au < d; ++au)
      for (int av = 0; av < d; ++av) {
        const std::size_t row = base + su * au + sv * av;
        const std::size_t orow = static_cast<std::size_t>(au) * d + av;
        for (int bu = 0; bu < d; ++bu)
          for (int bv = 0; bv < d; ++bv) {
            const Complex v = op(orow, static_cast<std::size_t>(bu) * d + bv);
            if (v == Complex(0.0)) continue;
            out(row, base + su * bu + sv * bv) = v;
          }
      }
  }
  return out;
}

Complex normalized_trace(const OperatorMatrix& m, const SiteSpace& space) {
  if (m.dim() != space.total_dim())
    throw domain_error("normalized_trace: matrix dimension does not match space");
  return m.trace() / static_cast<double>(space.total_dim());
}

Complex matrix_power_trace(const OperatorMatrix& m, int n, const SiteSpace& space,
                           PowerTraceRoute route) {
  if (n < 1) throw domain_error("matrix_power_trace: power must be >= 1");
  if (m.dim() != space.total_dim())
    throw domain_error("matrix_power_trace: matrix dimension does not match space");
  if (!m.is_hermitian())
    throw domain_error("matrix_power_trace: matrix is not Hermitian");
  if (route == PowerTraceRoute::Eigenvalues) {
    const auto eig = hermitian_eigenvalues(m);
    double s = 0.0;
    for (double lambda : eig) s += std::pow(lambda, n);
    return Complex(s / static_cast<double>(space.total_dim()), 0.0);
  }
  OperatorMatrix p = m;
  for (int i = 1; i < n; ++i) p = p * m;
  return normalized_trace(p, space);
}

std::vector<double> hermitian_eigenvalues(const OperatorMatrix& m) {
  if (m.dim() == 0) throw domain_error("hermitian_eigenvalues: empty matrix");
  if (!m.is_hermitian())
    throw domain_error("hermitian_eigenvalues: matrix is not Hermitian");

  const std::size_t n = m.dim();
  std::vector<Complex> a(m.data(), m.data() + n * n);
  auto at = [&](std::size_t i, std::size_t j) -> Complex& { return a[i * n + j]; };

  if (n == 1) return {at(0, 0).real()};

  double fro = 0.0;
  for (const auto& v : a) fro += std::norm(v);
  fro = std::sqrt(fro);
  const double tol = kHermitianTolerance * std::max(1.0, fro);
  const double skip = tol / static_cast<double>(n);

  constexpr int kMaxSweeps = 100;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * std::norm(at(i, j));
    if (std::sqrt(off) <= tol) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex b = at(p, q);
        const double ab = std::abs(b);
        if (ab <= skip) continue;
        const double app = at(p, p).real();
        const double aqq = at(q, q).real();
        const double tau = (aqq - app) / (2.0 * ab);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex phase = b / ab;
        const Complex sp = s * phase;
        const Complex spc = s * std::conj(phase);
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const Complex alpha = at(i, p);
          const Complex beta = at(i, q);
          at(i, p) = c * alpha - spc * beta;
          at(i, q) = sp * alpha + c * beta;
          at(p, i) = std::conj(at(i, p));
          at(q, i) = std::conj(at(i, q));
        }
        at(p, p) = app - t * ab;
        at(q, q) = aqq + t * ab;
        at(p, q) = 0.0;
        at(q, p) = 0.0;
      }
    }
  }
  if (!converged) {
    // Re-check after the final sweep before giving up.
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * std::norm(at(i, j));
    if (std::sqrt(off) > tol)
      throw numeric_error("hermitian_eigenvalues: Jacobi sweeps did not converge");
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i).real();
  std::sort(eig.begin(), eig.end());
  return eig;
}

double operator_norm(const OperatorMatrix& m) {
  const auto eig = hermitian_eigenvalues(m);
  double best = 0.0;
  for (double v : eig) best = std::max(best, std::abs(v));
  return best;
}

}  // namespace qce
