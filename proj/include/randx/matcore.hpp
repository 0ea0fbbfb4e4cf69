#pragma once

// Dense complex matrix algebra and the Schatten functionals
//
//   <Z>_{1+eps} = Tr[(Z*Z)^{(1+eps)/2}],   ||Z||_{1+eps} = <Z>^{1/(1+eps)}
//
// on which the rest of the library is built. Everything here is a pure
// function of its arguments; dimensions are desk-scale (<= a few hundred).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "randx/error.hpp"

namespace randx {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kStructural = 1e-9;   // Hermiticity / projector / resolution checks
inline constexpr double kValidation = 1e-6;   // herm_eig rejects asymmetry above this
inline constexpr double kRank = 1e-12;        // relative eigenvalue cut for supports
inline constexpr double kNegative = 1e-8;     // relative negativity allowed in PSD inputs
}  // namespace tol

inline ComplexMatrix identity(std::size_t dim) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

inline ComplexMatrix zeros(std::size_t dim) {
  return ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
  if (!all_finite(m)) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorCode::DimMismatch, std::string(what) + " must be a non-empty square matrix");
}

inline double hermitian_deviation(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) * 0.5;
}

struct HermEig {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // columns, unitary

  ComplexMatrix reconstruct() const {
    return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
  }
};

/// Eigendecomposition of a Hermitian matrix, symmetrized before solving.
/// Rejects inputs whose anti-Hermitian part exceeds 1e-6 (scaled by the entry size).
inline HermEig herm_eig(const ComplexMatrix& m) {
  require_square(m, "herm_eig input");
  require_finite(m, "herm_eig input");
  const double scale = std::max(1.0, max_abs(m));
  const double asym = hermitian_deviation(m);
  if (asym > tol::kValidation * scale)
    throw Error(ErrorCode::NonHermitian, "asymmetry " + std::to_string(asym));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NonFinite, "eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector eigenvalues(const ComplexMatrix& m) {
  require_square(m, "eigenvalue input");
  require_finite(m, "eigenvalue input");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// Spectral power of a PSD matrix. Eigenvalues at or below 1e-12 * max are
/// treated as outside the support and map to zero, for every exponent.
inline ComplexMatrix psd_power(const ComplexMatrix& m, double p) {
  const HermEig eig = herm_eig(m);
  const Eigen::Index n = eig.eigenvalues.size();
  const double top = eig.eigenvalues(n - 1);
  const double bottom = eig.eigenvalues(0);
  if (bottom < -tol::kNegative * std::max(top, 0.0) || (top <= 0.0 && bottom < 0.0))
    throw Error(ErrorCode::NegativeEigenvalue, "min eigenvalue " + std::to_string(bottom));
  if (top <= 0.0) return ComplexMatrix::Zero(n, n);
  const double cut = tol::kRank * top;
  RealVector mapped(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = eig.eigenvalues(i);
    mapped(i) = lambda > cut ? std::pow(lambda, p) : 0.0;
  }
  return eig.eigenvectors * mapped.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
}

inline ComplexMatrix psd_sqrt(const ComplexMatrix& m) { return psd_power(m, 0.5); }

/// Singular values of Z. Hermitian inputs go through the eigensolver (|lambda|),
/// everything else through a two-sided Jacobi SVD.
inline RealVector singular_values(const ComplexMatrix& z) {
  require_square(z, "matrix");
  require_finite(z, "matrix");
  const double scale = max_abs(z);
  if (scale == 0.0) return RealVector::Zero(z.rows());
  if (hermitian_deviation(z) <= 1e-14 * scale) return eigenvalues(z).cwiseAbs();
  Eigen::JacobiSVD<ComplexMatrix> svd(z);
  return svd.singularValues();
}

struct SchattenValue {
  double bracket;  // <Z>_{1+eps}
  double norm;     // ||Z||_{1+eps}
};

/// <Z>_{1+eps} and ||Z||_{1+eps}. eps = 0 gives the trace norm.
inline SchattenValue schatten(const ComplexMatrix& z, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorCode::DomainError, "eps must lie in [0,1]");
  const RealVector sv = singular_values(z);
  const double exponent = 1.0 + eps;
  double bracket = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 0.0) bracket += std::pow(sv(i), exponent);
  if (!std::isfinite(bracket)) throw Error(ErrorCode::NonFinite, "Schatten bracket overflow");
  return {bracket, std::pow(bracket, 1.0 / exponent)};
}

inline double bracket(const ComplexMatrix& z, double eps) { return schatten(z, eps).bracket; }
inline double schatten_norm(const ComplexMatrix& z, double eps) { return schatten(z, eps).norm; }

/// Orthogonal projector, P = P* = P^2 within 1e-9 entrywise.
class Projector {
 public:
  explicit Projector(ComplexMatrix m) : m_(std::move(m)) {
    require_square(m_, "projector");
    require_finite(m_, "projector");
    const double dev = deviation(m_);
    if (dev > tol::kStructural)
      throw Error(ErrorCode::NotProjector, "projector deviation " + std::to_string(dev));
  }

  static double deviation(const ComplexMatrix& m) {
    return std::max(hermitian_deviation(m), max_abs(m * m - m));
  }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  ComplexMatrix complement() const { return identity(dim()) - m_; }

 private:
  ComplexMatrix m_;
};

/// Largest deviation of {P_k} from an orthogonal resolution of the identity.
inline double resolution_deviation(std::span<const ComplexMatrix> blocks, std::size_t dim) {
  ComplexMatrix sum = zeros(dim);
  double dev = 0.0;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    sum += blocks[j];
    for (std::size_t k = j + 1; k < blocks.size(); ++k)
      dev = std::max(dev, max_abs(blocks[j] * blocks[k]));
  }
  return std::max(dev, max_abs(sum - identity(dim)));
}

inline double resolution_deviation(std::span<const Projector> blocks) {
  if (blocks.empty()) return INFINITY;
  std::vector<ComplexMatrix> ms;
  ms.reserve(blocks.size());
  for (const auto& p : blocks) ms.push_back(p.matrix());
  return resolution_deviation(std::span<const ComplexMatrix>(ms), blocks.front().dim());
}

/// Sum_k P_k A P_k for an orthogonal resolution {P_k}.
inline ComplexMatrix pinch(const ComplexMatrix& a, std::span<const Projector> blocks) {
  require_square(a, "pinch input");
  if (blocks.empty()) throw Error(ErrorCode::NotAResolution, "no blocks");
  for (const auto& p : blocks)
    if (p.dim() != static_cast<std::size_t>(a.rows()))
      throw Error(ErrorCode::DimMismatch, "block dimension differs from operator");
  const double dev = resolution_deviation(blocks);
  if (dev > tol::kStructural)
    throw Error(ErrorCode::NotAResolution, "resolution deviation " + std::to_string(dev));
  ComplexMatrix out = ComplexMatrix::Zero(a.rows(), a.cols());
  for (const auto& p : blocks) out += p.matrix() * a * p.matrix();
  return out;
}

/// Kronecker product A (x) B, A acting on the first (most significant) factor.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_finite(a, "tensor factor");
  require_finite(b, "tensor factor");
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexMatrix tensor(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = tensor(out, f);
  return out;
}

/// Rank-one projector |v><v| for a unit vector v.
inline ComplexMatrix outer(const ComplexVector& v) { return v * v.adjoint(); }

/// |theta> = cos(theta)|0> + sin(theta)|1>.
inline ComplexVector real_qubit(double theta) {
  ComplexVector v(2);
  v << std::cos(theta), std::sin(theta);
  return v;
}

inline ComplexVector basis_vector(std::size_t dim, std::size_t k) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(k)) = 1.0;
  return v;
}

inline double relative_frobenius(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double denom = std::max(1e-300, b.norm());
  return (a - b).norm() / denom;
}

}  // namespace randx
