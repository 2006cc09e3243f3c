#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>
#include <vector>

#include "wvn/jacobi.hpp"

namespace wvn {
namespace {

ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = g(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      h(i, j) = Complex(g(rng), g(rng));
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

bool in_gershgorin_union(const ComplexMatrix& h, double x) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (j != i) radius += std::abs(h(i, j));
    }
    if (std::abs(x - h(i, i).real()) <= radius * (1 + 1e-12) + 1e-12) return true;
  }
  return false;
}

TEST(Jacobi, DiagonalInputIsSortedWithPermutationTransform) {
  ComplexMatrix h(3);
  h(0, 0) = 3;
  h(1, 1) = 1;
  h(2, 2) = 2;
  const auto r = jacobi_diagonalize(h);
  EXPECT_EQ(r.eigenvalues, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(r.sweeps, 0);
  EXPECT_EQ(r.transform(1, 0), Complex(1));
  EXPECT_EQ(r.transform(2, 1), Complex(1));
  EXPECT_EQ(r.transform(0, 2), Complex(1));
}

TEST(Jacobi, PauliX) {
  ComplexMatrix h(2);
  h(0, 1) = 1;
  h(1, 0) = 1;
  const auto r = jacobi_diagonalize(h);
  EXPECT_NEAR(r.eigenvalues[0], -1, 1e-15);
  EXPECT_NEAR(r.eigenvalues[1], 1, 1e-15);
}

TEST(Jacobi, PauliY) {
  ComplexMatrix h(2);
  h(0, 1) = Complex(0, -1);
  h(1, 0) = Complex(0, 1);
  const auto r = jacobi_diagonalize(h);
  EXPECT_NEAR(r.eigenvalues[0], -1, 1e-15);
  EXPECT_NEAR(r.eigenvalues[1], 1, 1e-15);
  EXPECT_LT((reconstruct(r.transform, r.eigenvalues) - h).frobenius_norm(), 1e-14);
}

TEST(Jacobi, RandomHermitianAgainstEigenOracle) {
  std::mt19937_64 rng(20240616);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 16;
    const auto h = random_hermitian(n, rng);
    const auto r = jacobi_diagonalize(h);
    const double norm = h.frobenius_norm();
    EXPECT_LT((reconstruct(r.transform, r.eigenvalues) - h).frobenius_norm(), 1e-10 * norm);
    const auto uu = multiply(adjoint(r.transform), r.transform);
    EXPECT_LT((uu - ComplexMatrix::identity(n)).frobenius_norm(), 1e-10);

    Eigen::MatrixXcd e(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) e(i, j) = h(i, j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> oracle(e);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(r.eigenvalues[i], oracle.eigenvalues()(static_cast<Eigen::Index>(i)), 1e-11 * norm);
      EXPECT_TRUE(in_gershgorin_union(h, r.eigenvalues[i]));
    }
    EXPECT_TRUE(std::is_sorted(r.eigenvalues.begin(), r.eigenvalues.end()));
  }
}

TEST(Jacobi, LargerAndDegenerateSpectra) {
  std::mt19937_64 rng(7);
  auto h = random_hermitian(64, rng);
  // A repeated eigenvalue: H = V diag(1,1,1,2,...) V*.
  const auto base = jacobi_diagonalize(h);
  std::vector<double> d(64, 1.0);
  for (std::size_t i = 3; i < 64; ++i) d[i] = static_cast<double>(i);
  const auto g = reconstruct(base.transform, d);
  const auto r = jacobi_diagonalize(g);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(r.eigenvalues[i], d[i], 1e-10);
}

TEST(Jacobi, Errors) {
  ComplexMatrix h(2);
  h(0, 1) = 1;
  h(1, 0) = 2;
  try {
    jacobi_diagonalize(h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_hermitian);
  }
  EXPECT_THROW(jacobi_diagonalize(ComplexMatrix(513)), Error);
  EXPECT_EQ(jacobi_diagonalize(ComplexMatrix(4)).eigenvalues, std::vector<double>(4, 0.0));
}

}  // namespace
}  // namespace wvn
