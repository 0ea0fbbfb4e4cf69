#include "test_support.hpp"

using namespace randx;
using namespace randx::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::vector<double> kEpsGrid{0.01, 0.1, 0.5, 1.0};

// Reference bracket through the eigenvalues of Z*Z, computed without matcore.
double bracket_via_gram(const ComplexMatrix& z, double eps) {
  const ComplexMatrix gram = z.adjoint() * z;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram, Eigen::EigenvaluesOnly);
  double total = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    total += std::pow(std::max(0.0, solver.eigenvalues()(i)), (1.0 + eps) / 2.0);
  return total;
}

// Singular values of a 2x2 matrix from the closed form
// s^2 = (|Z|_F^2 +- sqrt(|Z|_F^4 - 4 |det Z|^2)) / 2.
std::pair<double, double> singular_values_2x2(const ComplexMatrix& z) {
  const double f = z.squaredNorm();
  const double det = std::abs(z(0, 0) * z(1, 1) - z(0, 1) * z(1, 0));
  const double disc = std::sqrt(std::max(0.0, f * f - 4.0 * det * det));
  return {std::sqrt((f + disc) / 2.0), std::sqrt(std::max(0.0, (f - disc) / 2.0))};
}

}  // namespace

TEST_CASE("herm_eig returns ascending eigenvalues", "[matcore]") {
  SECTION("diagonal input") {
    const HermEig e = herm_eig(diag({2, 1}));
    CHECK(e.eigenvalues(0) == 1.0);
    CHECK(e.eigenvalues(1) == 2.0);
  }
  SECTION("identity") {
    const HermEig e = herm_eig(identity(3));
    for (int i = 0; i < 3; ++i) CHECK_THAT(e.eigenvalues(i), WithinAbs(1.0, 1e-15));
  }
  SECTION("Pauli X has eigenvalues -1 and 1") {
    const HermEig e = herm_eig(mat2(0, 1, 1, 0));
    CHECK_THAT(e.eigenvalues(0), WithinAbs(-1.0, 1e-15));
    CHECK_THAT(e.eigenvalues(1), WithinAbs(1.0, 1e-15));
  }
  SECTION("reconstruction and unitarity on random Hermitian matrices") {
    CounterRng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t dim = 1 + rng.below(12);
      const ComplexMatrix h = hermitian_part(gaussian_matrix(rng, dim));
      const HermEig e = herm_eig(h);
      CHECK(relative_frobenius(e.reconstruct(), h) < 1e-9);
      CHECK(max_diff(e.eigenvectors.adjoint() * e.eigenvectors, identity(dim)) < 1e-9);
      for (Eigen::Index i = 1; i < e.eigenvalues.size(); ++i) CHECK(e.eigenvalues(i - 1) <= e.eigenvalues(i));
    }
  }
}

TEST_CASE("herm_eig rejects bad input", "[matcore][errors]") {
  ComplexMatrix m = mat2(1, 0.5, 0.0, 1);
  CHECK_THROWS_MATCHES(herm_eig(m), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::NonHermitian;
                       }));
  // Small asymmetry is symmetrized away.
  m(1, 0) = 0.5 + 1e-8;
  CHECK_NOTHROW(herm_eig(m));
  ComplexMatrix nan = identity(2);
  nan(0, 0) = std::nan("");
  try {
    herm_eig(nan);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
}

TEST_CASE("psd_power", "[matcore]") {
  CHECK(max_diff(psd_power(diag({4, 9}), 0.5), diag({2, 3})) < 1e-14);
  CHECK(max_diff(psd_power(diag({4, 0}), -1.0), diag({0.25, 0})) < 1e-15);

  CounterRng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = 2 + rng.below(7);
    const ComplexMatrix m = random_psd(rng, dim, 1 + rng.below(dim));
    CHECK(max_diff(psd_power(m, 1.0), m) < 1e-12);
    const double a = 0.2 + 2.0 * rng.uniform(), b = 0.2 + 2.0 * rng.uniform();
    const ComplexMatrix lhs = psd_power(psd_power(m, a), b);
    CHECK(relative_frobenius(lhs, psd_power(m, a * b)) < 1e-8);
    const ComplexMatrix s = psd_sqrt(m);
    CHECK(max_diff(s * s, m) < 1e-12);
  }

  SECTION("negative eigenvalues are rejected") {
    try {
      psd_power(diag({1, -0.1}), 0.5);
      FAIL("expected NegativeEigenvalue");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NegativeEigenvalue);
    }
    CHECK_NOTHROW(psd_power(diag({1, -1e-10}), 0.5));
  }
}

TEST_CASE("schatten bracket and norm", "[matcore]") {
  SECTION("identity") {
    for (double eps : kEpsGrid)
      for (std::size_t d : {1, 2, 5}) {
        const SchattenValue s = schatten(identity(d), eps);
        CHECK_THAT(s.bracket, WithinRel(static_cast<double>(d), 1e-14));
        CHECK_THAT(s.norm, WithinRel(std::pow(static_cast<double>(d), 1.0 / (1.0 + eps)), 1e-14));
      }
  }
  SECTION("rank-one projectors have bracket and norm 1") {
    CounterRng rng(5);
    for (double eps : kEpsGrid) {
      const ComplexMatrix p = outer(random_unit_vector(rng, 4));
      CHECK_THAT(bracket(p, eps), WithinAbs(1.0, 1e-10));
      CHECK_THAT(schatten_norm(p, eps), WithinAbs(1.0, 1e-10));
    }
  }
  SECTION("diag(3,4) at eps = 1") {
    const SchattenValue s = schatten(diag({3, 4}), 1.0);
    CHECK_THAT(s.bracket, WithinRel(25.0, 1e-14));
    CHECK_THAT(s.norm, WithinRel(5.0, 1e-14));
  }
  SECTION("eps = 0 is the trace norm") {
    CHECK_THAT(bracket(diag({-2, 3}), 0.0), WithinRel(5.0, 1e-14));
  }
  SECTION("agrees with the Gram-matrix route and the 2x2 closed form") {
    CounterRng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      const double eps = kEpsGrid[trial % kEpsGrid.size()];
      const std::size_t dim = 2 + rng.below(7);
      const ComplexMatrix z = gaussian_matrix(rng, dim);
      const SchattenValue s = schatten(z, eps);
      CHECK_THAT(s.bracket, WithinRel(bracket_via_gram(z, eps), 1e-9));
      CHECK_THAT(std::pow(s.norm, 1.0 + eps), WithinRel(s.bracket, 1e-10));
      const ComplexMatrix z2 = gaussian_matrix(rng, 2);
      const auto [s1, s2] = singular_values_2x2(z2);
      CHECK_THAT(bracket(z2, eps), WithinRel(std::pow(s1, 1.0 + eps) + std::pow(s2, 1.0 + eps), 1e-9));
    }
  }
  SECTION("eps outside [0,1]") {
    CHECK_THROWS_AS(schatten(identity(2), 1.5), Error);
    CHECK_THROWS_AS(schatten(identity(2), -0.1), Error);
  }
}

TEST_CASE("Schatten inequalities on random inputs", "[matcore][property]") {
  CounterRng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const double eps = kEpsGrid[trial % kEpsGrid.size()];
    const std::size_t dim = 2 + rng.below(7);

    const ComplexMatrix x = gaussian_matrix(rng, dim), y = gaussian_matrix(rng, dim);
    CHECK(schatten_norm(x + y, eps) <= schatten_norm(x, eps) + schatten_norm(y, eps) + 1e-10);

    const ComplexMatrix px = random_psd(rng, dim, 1 + rng.below(dim));
    const ComplexMatrix py = random_psd(rng, dim, 1 + rng.below(dim));
    CHECK(bracket(px, eps) + bracket(py, eps) <= bracket(px + py, eps) + 1e-10);

    const auto blocks = random_resolution(rng, dim, 1 + rng.below(dim));
    CHECK(bracket(pinch(px, blocks), eps) <= bracket(px, eps) + 1e-10);

    const ComplexMatrix u = haar_unitary(rng, dim), v = haar_unitary(rng, dim);
    CHECK_THAT(bracket(u * x * v, eps), WithinRel(bracket(x, eps), 1e-9));
  }
}

TEST_CASE("Projector validation", "[matcore]") {
  CHECK_NOTHROW(Projector(diag({1, 0})));
  try {
    Projector p(diag({1, 0.5}));
    FAIL("expected NotProjector");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotProjector);
  }
  const Projector p(outer(real_qubit(0.3)));
  CHECK(max_diff(p.complement() + p.matrix(), identity(2)) < 1e-15);
}

TEST_CASE("pinch", "[matcore]") {
  const std::vector<Projector> comp{Projector(diag({1, 0})), Projector(diag({0, 1}))};
  SECTION("diagonal input is unchanged") {
    const ComplexMatrix a = diag({0.3, 0.7});
    CHECK(max_diff(pinch(a, comp), a) == 0.0);
  }
  SECTION("|+><+| pinches to the maximally mixed state") {
    CHECK(max_diff(pinch(mat2(0.5, 0.5, 0.5, 0.5), comp), diag({0.5, 0.5})) < 1e-15);
  }
  SECTION("single block is the identity map") {
    CounterRng rng(1);
    const ComplexMatrix a = gaussian_matrix(rng, 3);
    const std::vector<Projector> one{Projector(identity(3))};
    CHECK(max_diff(pinch(a, one), a) < 1e-15);
  }
  SECTION("incomplete or overlapping blocks") {
    const std::vector<Projector> partial{Projector(diag({1, 0}))};
    CHECK_THROWS_AS(pinch(identity(2), partial), Error);
    const std::vector<Projector> overlap{Projector(diag({1, 0})), Projector(outer(real_qubit(0.4)))};
    try {
      pinch(identity(2), overlap);
      FAIL("expected NotAResolution");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotAResolution);
    }
  }
}

TEST_CASE("tensor", "[matcore]") {
  CHECK(max_diff(tensor(identity(2), identity(2)), identity(4)) == 0.0);
  CHECK(max_diff(tensor(diag({1, 2}), diag({3, 4})), diag({3, 4, 6, 8})) == 0.0);
  CounterRng rng(9);
  const ComplexMatrix a = gaussian_matrix(rng, 3), b = gaussian_matrix(rng, 2);
  CHECK(max_diff(tensor(a, identity(1)), a) == 0.0);
  // (A (x) B)[i*2 + k, j*2 + l] = A[i,j] B[k,l]
  const ComplexMatrix t = tensor(a, b);
  double dev = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) dev = std::max(dev, std::abs(t(i * 2 + k, j * 2 + l) - a(i, j) * b(k, l)));
  CHECK(dev == 0.0);
  ComplexMatrix bad = identity(2);
  bad(1, 1) = INFINITY;
  CHECK_THROWS_AS(tensor(bad, identity(2)), Error);
}
