#pragma once

// Cyclic Jacobi diagonalization of small dense Hermitian matrices.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "wvn/error.hpp"

namespace wvn {

using Complex = std::complex<double>;

// Square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : n_(n), a_(n * n) {}

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const { return n_; }
  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : a_) s += std::norm(z);
    return std::sqrt(s);
  }

 private:
  std::size_t n_ = 0;
  std::vector<Complex> a_;
};

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) c(i, j) = a(i, j) - b(i, j);
  }
  return c;
}

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.size();
  ComplexMatrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) c(j, i) = std::conj(a(i, j));
  }
  return c;
}

// U diag(d) U*.
inline ComplexMatrix reconstruct(const ComplexMatrix& u, const std::vector<double>& d) {
  ComplexMatrix ud = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < u.size(); ++j) ud(i, j) *= d[j];
  }
  return multiply(ud, adjoint(u));
}

struct JacobiResult {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix transform;          // column j is the eigenvector of eigenvalues[j]
  int sweeps = 0;
  double off_diagonal = 0.0;        // Frobenius mass left off the diagonal
};

inline constexpr std::size_t kMaxJacobiDimension = 512;
inline constexpr int kMaxJacobiSweeps = 100;

// H = U diag(eigenvalues) U*. Sweeps stop once the off-diagonal Frobenius
// mass drops below tol * ||H||_F.
inline JacobiResult jacobi_diagonalize(const ComplexMatrix& h, double tol = 1e-13) {
  const std::size_t n = h.size();
  if (n > kMaxJacobiDimension) {
    throw Error(ErrorCode::invalid_argument, "dimension " + std::to_string(n) + " exceeds 512");
  }
  if (!(tol > 0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  const double norm = h.frobenius_norm();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (std::abs(h(i, j) - std::conj(h(j, i))) > tol * std::max(1.0, norm)) {
        throw Error(ErrorCode::not_hermitian,
                    "entry (" + std::to_string(i) + "," + std::to_string(j) + ") differs from its mirror");
      }
    }
  }

  ComplexMatrix a = h;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) a(j, i) = std::conj(a(i, j));
    a(i, i) = a(i, i).real();
  }
  ComplexMatrix u = ComplexMatrix::identity(n);

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) s += std::norm(a(i, j));
      }
    }
    return std::sqrt(s);
  };

  JacobiResult r;
  r.off_diagonal = off_mass();
  while (r.off_diagonal >= tol * norm && norm > 0) {
    if (r.sweeps == kMaxJacobiSweeps) {
      throw Error(ErrorCode::no_convergence,
                  "off-diagonal mass " + std::to_string(r.off_diagonal) + " after " +
                      std::to_string(kMaxJacobiSweeps) + " sweeps");
    }
    ++r.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex hpq = a(p, q);
        const double mag = std::abs(hpq);
        if (mag == 0.0) continue;
        // J = diag(1, conj(e)) R with e = hpq/|hpq| makes the pivot real, then
        // the real rotation R annihilates it.
        const Complex e = hpq / mag;
        const double theta = (a(q, q).real() - a(p, p).real()) / (2 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1 / std::hypot(t, 1.0);
        const double s = t * c;
        const Complex jpp = c;
        const Complex jpq = s;
        const Complex jqp = -s * std::conj(e);
        const Complex jqq = c * std::conj(e);
        for (std::size_t i = 0; i < n; ++i) {
          const Complex aip = a(i, p);
          const Complex aiq = a(i, q);
          a(i, p) = aip * jpp + aiq * jqp;
          a(i, q) = aip * jpq + aiq * jqq;
          const Complex uip = u(i, p);
          const Complex uiq = u(i, q);
          u(i, p) = uip * jpp + uiq * jqp;
          u(i, q) = uip * jpq + uiq * jqq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const Complex apj = a(p, j);
          const Complex aqj = a(q, j);
          a(p, j) = std::conj(jpp) * apj + std::conj(jqp) * aqj;
          a(q, j) = std::conj(jpq) * apj + std::conj(jqq) * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
    r.off_diagonal = off_mass();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  r.eigenvalues.resize(n);
  r.transform = ComplexMatrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    r.eigenvalues[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) r.transform(i, j) = u(i, order[j]);
  }
  return r;
}

}  // namespace wvn
