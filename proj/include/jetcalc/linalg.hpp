#ifndef JETCALC_LINALG_HPP
#define JETCALC_LINALG_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "jetcalc/rational.hpp"

namespace jetcalc {

/// Dense matrix of exact rationals, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : m_rows(rows), m_cols(cols), m_data(rows * cols) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return m_rows; }
  std::size_t cols() const { return m_cols; }

  Rational& at(std::size_t r, std::size_t c) { return m_data[r * m_cols + c]; }
  const Rational& at(std::size_t r, std::size_t c) const {
    return m_data[r * m_cols + c];
  }

  Matrix transposed() const;
  Matrix operator*(const Matrix& other) const;
  std::vector<Rational> operator*(const std::vector<Rational>& v) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t m_rows = 0;
  std::size_t m_cols = 0;
  std::vector<Rational> m_data;
};

/// Reduces to reduced row echelon form in place; returns the pivot columns
/// in order.
std::vector<std::size_t> rref(Matrix& a);

std::size_t rank(Matrix a);

/// Basis of the kernel of a, one column per basis vector (cols() may be 0).
Matrix nullspace(const Matrix& a);

/// One exact solution of a x = b, or nothing when the system is
/// inconsistent.
std::optional<std::vector<Rational>> solve(const Matrix& a,
                                           const std::vector<Rational>& b);

/// The least-squares solution of a x = b for the componentwise inner
/// product, and among all minimizers the one of least norm. Exact: solves
/// the normal equations and removes the kernel component.
std::vector<Rational> least_squares_min_norm(const Matrix& a,
                                             const std::vector<Rational>& b);

}  // namespace jetcalc

#endif
