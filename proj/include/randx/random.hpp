#pragma once

// Seedable randomness. The generator is counter based (splitmix64 finalizer
// applied to key + counter), so the k-th draw of stream s under seed z is a
// pure function of (z, s, k) and per-trial streams can run on any thread.
// Distributions are implemented here rather than via <random> so that output
// is bit-identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "randx/matcore.hpp"

namespace randx {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(seed ^ splitmix64(stream ^ 0x5851f42d4c957f2dULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n; }

  /// Standard normal via Box-Muller (one draw per call, no cached state).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Matrix with i.i.d. standard complex Gaussian entries (E|z|^2 = 1).
inline ComplexMatrix gaussian_matrix(CounterRng& rng, std::size_t rows, std::size_t cols) {
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const double s = std::sqrt(0.5);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = Complex(s * rng.normal(), s * rng.normal());
  return g;
}

inline ComplexMatrix gaussian_matrix(CounterRng& rng, std::size_t dim) { return gaussian_matrix(rng, dim, dim); }

/// Wishart-style PSD sample G*G with G of shape rank x dim, trace normalized to 1.
inline ComplexMatrix random_psd(CounterRng& rng, std::size_t dim, std::size_t rank = 0) {
  if (rank == 0) rank = dim;
  const ComplexMatrix g = gaussian_matrix(rng, rank, dim);
  ComplexMatrix m = g.adjoint() * g;
  m /= m.trace().real();
  return hermitian_part(m);
}

inline ComplexVector random_unit_vector(CounterRng& rng, std::size_t dim) {
  ComplexVector v = gaussian_matrix(rng, dim, 1).col(0);
  return v / v.norm();
}

/// Haar-random unitary: QR of a Gaussian matrix with the phases of R divided out.
inline ComplexMatrix haar_unitary(CounterRng& rng, std::size_t dim) {
  const ComplexMatrix g = gaussian_matrix(rng, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

/// exp(i t H) for a random Hermitian H with unit-variance entries.
inline ComplexMatrix near_identity_unitary(CounterRng& rng, std::size_t dim, double t) {
  const ComplexMatrix h = hermitian_part(gaussian_matrix(rng, dim));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  ComplexVector phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) phases(i) = std::polar(1.0, t * solver.eigenvalues()(i));
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

/// Random orthogonal resolution with `blocks` nonempty parts: a Haar unitary
/// applied to a random partition of the coordinate projectors.
inline std::vector<Projector> random_resolution(CounterRng& rng, std::size_t dim, std::size_t blocks) {
  if (blocks == 0 || blocks > dim) throw Error(ErrorCode::BadParams, "need 1 <= blocks <= dim");
  std::vector<std::size_t> owner(dim);
  for (std::size_t k = 0; k < dim; ++k) owner[k] = k < blocks ? k : rng.below(blocks);
  for (std::size_t k = dim; k-- > 1;) std::swap(owner[k], owner[rng.below(k + 1)]);
  const ComplexMatrix u = haar_unitary(rng, dim);
  std::vector<ComplexMatrix> parts(blocks, zeros(dim));
  for (std::size_t k = 0; k < dim; ++k) parts[owner[k]] += outer(u.col(static_cast<Eigen::Index>(k)));
  std::vector<Projector> out;
  out.reserve(blocks);
  for (auto& p : parts) out.emplace_back(hermitian_part(p));
  return out;
}

}  // namespace randx
