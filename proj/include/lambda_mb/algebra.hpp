#pragma once

// Fixed-size complex linear algebra for the three-level state space.
//
// Indices are zero-based in code: atomic level |n> lives at index n-1.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "lambda_mb/error.hpp"

namespace lambda_mb {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

struct ComplexVector3 {
  std::array<Complex, 3> c{};

  constexpr Complex& operator[](std::size_t i) { return c[i]; }
  constexpr const Complex& operator[](std::size_t i) const { return c[i]; }

  double norm_squared() const {
    return std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]);
  }
  double norm() const { return std::sqrt(norm_squared()); }

  friend ComplexVector3 operator+(ComplexVector3 a, const ComplexVector3& b) {
    for (std::size_t i = 0; i < 3; ++i) a[i] += b[i];
    return a;
  }
  friend ComplexVector3 operator-(ComplexVector3 a, const ComplexVector3& b) {
    for (std::size_t i = 0; i < 3; ++i) a[i] -= b[i];
    return a;
  }
  friend ComplexVector3 operator*(Complex s, ComplexVector3 a) {
    for (auto& x : a.c) x *= s;
    return a;
  }
  friend ComplexVector3 operator*(ComplexVector3 a, Complex s) { return s * a; }
  friend ComplexVector3 operator/(ComplexVector3 a, Complex s) {
    for (auto& x : a.c) x /= s;
    return a;
  }
  friend bool operator==(const ComplexVector3&, const ComplexVector3&) = default;
};

class ComplexMatrix3 {
 public:
  constexpr ComplexMatrix3() = default;

  static constexpr ComplexMatrix3 zero() { return {}; }

  static constexpr ComplexMatrix3 identity() { return diagonal(1.0, 1.0, 1.0); }

  static constexpr ComplexMatrix3 diagonal(Complex d0, Complex d1, Complex d2) {
    ComplexMatrix3 m;
    m(0, 0) = d0;
    m(1, 1) = d1;
    m(2, 2) = d2;
    return m;
  }

  /// Matrix unit with a single one at (row, col).
  static constexpr ComplexMatrix3 unit(std::size_t row, std::size_t col) {
    ComplexMatrix3 m;
    m(row, col) = 1.0;
    return m;
  }

  static ComplexMatrix3 from_columns(const ComplexVector3& c0, const ComplexVector3& c1,
                                     const ComplexVector3& c2) {
    ComplexMatrix3 m;
    m.set_column(0, c0);
    m.set_column(1, c1);
    m.set_column(2, c2);
    return m;
  }

  constexpr Complex& operator()(std::size_t r, std::size_t c) { return a_[3 * r + c]; }
  constexpr const Complex& operator()(std::size_t r, std::size_t c) const { return a_[3 * r + c]; }

  ComplexVector3 column(std::size_t j) const {
    return {{(*this)(0, j), (*this)(1, j), (*this)(2, j)}};
  }

  void set_column(std::size_t j, const ComplexVector3& v) {
    for (std::size_t i = 0; i < 3; ++i) (*this)(i, j) = v[i];
  }

  Complex trace() const { return a_[0] + a_[4] + a_[8]; }

  Complex determinant() const {
    const auto& m = *this;
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }

  /// Maximum absolute row sum.
  double norm_inf() const {
    double best = 0.0;
    for (std::size_t r = 0; r < 3; ++r) {
      best = std::max(best, std::abs((*this)(r, 0)) + std::abs((*this)(r, 1)) +
                                std::abs((*this)(r, 2)));
    }
    return best;
  }

  double max_abs() const {
    double best = 0.0;
    for (const auto& x : a_) best = std::max(best, std::abs(x));
    return best;
  }

  double frobenius_squared() const {
    double s = 0.0;
    for (const auto& x : a_) s += std::norm(x);
    return s;
  }

  ComplexMatrix3& operator+=(const ComplexMatrix3& o) {
    for (std::size_t i = 0; i < 9; ++i) a_[i] += o.a_[i];
    return *this;
  }
  ComplexMatrix3& operator-=(const ComplexMatrix3& o) {
    for (std::size_t i = 0; i < 9; ++i) a_[i] -= o.a_[i];
    return *this;
  }
  ComplexMatrix3& operator*=(Complex s) {
    for (auto& x : a_) x *= s;
    return *this;
  }

  friend ComplexMatrix3 operator+(ComplexMatrix3 a, const ComplexMatrix3& b) { return a += b; }
  friend ComplexMatrix3 operator-(ComplexMatrix3 a, const ComplexMatrix3& b) { return a -= b; }
  friend ComplexMatrix3 operator-(ComplexMatrix3 a) { return a *= -1.0; }
  friend ComplexMatrix3 operator*(Complex s, ComplexMatrix3 a) { return a *= s; }
  friend ComplexMatrix3 operator*(ComplexMatrix3 a, Complex s) { return a *= s; }
  friend ComplexMatrix3 operator/(ComplexMatrix3 a, Complex s) { return a *= 1.0 / s; }

  friend ComplexMatrix3 operator*(const ComplexMatrix3& a, const ComplexMatrix3& b) {
    ComplexMatrix3 r;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
      }
    }
    return r;
  }

  friend ComplexVector3 operator*(const ComplexMatrix3& a, const ComplexVector3& v) {
    ComplexVector3 r;
    for (std::size_t i = 0; i < 3; ++i) {
      r[i] = a(i, 0) * v[0] + a(i, 1) * v[1] + a(i, 2) * v[2];
    }
    return r;
  }

  friend bool operator==(const ComplexMatrix3&, const ComplexMatrix3&) = default;

  friend std::ostream& operator<<(std::ostream& os, const ComplexMatrix3& m) {
    for (std::size_t r = 0; r < 3; ++r) {
      os << (r == 0 ? "[" : " ") << m(r, 0) << ' ' << m(r, 1) << ' ' << m(r, 2)
         << (r == 2 ? "]" : "\n");
    }
    return os;
  }

 private:
  std::array<Complex, 9> a_{};
};

/// D = diag(1, 1, -1): separates the ground levels from the excited level.
inline const ComplexMatrix3 kLevelSign = ComplexMatrix3::diagonal(1.0, 1.0, -1.0);

inline ComplexMatrix3 adjoint(const ComplexMatrix3& m) {
  ComplexMatrix3 r;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = std::conj(m(j, i));
  }
  return r;
}

/// Singularity threshold relative to ||m||^3, so the test does not depend on units.
inline constexpr double kSingularityTolerance = 1e-12;

/// Closed-form cofactor inverse. Throws SingularMatrix when
/// |det m| <= kSingularityTolerance * ||m||_inf^3.
inline ComplexMatrix3 inverse(const ComplexMatrix3& m) {
  const Complex det = m.determinant();
  const double scale = m.norm_inf();
  if (!(std::abs(det) > kSingularityTolerance * scale * scale * scale)) {
    throw Error(ErrorCode::SingularMatrix, "3x3 matrix is singular to working precision");
  }
  ComplexMatrix3 r;
  r(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  r(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  r(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  r(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  r(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  r(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  r(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  r(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  r(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return r / det;
}

inline ComplexMatrix3 commutator(const ComplexMatrix3& a, const ComplexMatrix3& b) {
  return a * b - b * a;
}

/// Conjugate-linear in the first argument: (u, v) = sum conj(u_i) v_i.
inline Complex scalar_product(const ComplexVector3& u, const ComplexVector3& v) {
  return std::conj(u[0]) * v[0] + std::conj(u[1]) * v[1] + std::conj(u[2]) * v[2];
}

/// |u><v|
inline ComplexMatrix3 outer(const ComplexVector3& u, const ComplexVector3& v) {
  ComplexMatrix3 r;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = u[i] * std::conj(v[j]);
  }
  return r;
}

/// Largest elementwise |m - m^dagger|.
inline double hermiticity_defect(const ComplexMatrix3& m) {
  return (m - adjoint(m)).max_abs();
}

/// Ascending eigenvalues of the Hermitian part of m.
inline std::array<double, 3> hermitian_eigenvalues(const ComplexMatrix3& m) {
  Eigen::Matrix3cd e;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      e(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(e, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

}  // namespace lambda_mb
