#include "jetcalc/linalg.hpp"

#include <cassert>
#include <utility>

namespace jetcalc {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(m_cols, m_rows);
  for (std::size_t r = 0; r < m_rows; ++r)
    for (std::size_t c = 0; c < m_cols; ++c) t.at(c, r) = at(r, c);
  return t;
}

Matrix Matrix::operator*(const Matrix& other) const {
  assert(m_cols == other.m_rows);
  Matrix out(m_rows, other.m_cols);
  for (std::size_t r = 0; r < m_rows; ++r)
    for (std::size_t k = 0; k < m_cols; ++k) {
      const Rational& a = at(r, k);
      if (a == 0) continue;
      for (std::size_t c = 0; c < other.m_cols; ++c)
        out.at(r, c) += a * other.at(k, c);
    }
  return out;
}

std::vector<Rational> Matrix::operator*(const std::vector<Rational>& v) const {
  assert(m_cols == v.size());
  std::vector<Rational> out(m_rows);
  for (std::size_t r = 0; r < m_rows; ++r)
    for (std::size_t c = 0; c < m_cols; ++c)
      if (at(r, c) != 0) out[r] += at(r, c) * v[c];
  return out;
}

std::vector<std::size_t> rref(Matrix& a) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < a.rows() && a.at(pivot, col) == 0) ++pivot;
    if (pivot == a.rows()) continue;
    if (pivot != row)
      for (std::size_t c = 0; c < a.cols(); ++c)
        std::swap(a.at(pivot, c), a.at(row, c));
    Rational inv = Rational(1) / a.at(row, col);
    for (std::size_t c = col; c < a.cols(); ++c) a.at(row, c) *= inv;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == row || a.at(r, col) == 0) continue;
      Rational factor = a.at(r, col);
      for (std::size_t c = col; c < a.cols(); ++c)
        a.at(r, c) -= factor * a.at(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::size_t rank(Matrix a) { return rref(a).size(); }

Matrix nullspace(const Matrix& a) {
  Matrix reduced = a;
  std::vector<std::size_t> pivots = rref(reduced);
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t col : pivots) is_pivot[col] = true;

  std::vector<std::size_t> free_cols;
  for (std::size_t col = 0; col < a.cols(); ++col)
    if (!is_pivot[col]) free_cols.push_back(col);

  Matrix basis(a.cols(), free_cols.size());
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    std::size_t fc = free_cols[k];
    basis.at(fc, k) = 1;
    for (std::size_t p = 0; p < pivots.size(); ++p)
      basis.at(pivots[p], k) = -reduced.at(p, fc);
  }
  return basis;
}

std::optional<std::vector<Rational>> solve(const Matrix& a,
                                           const std::vector<Rational>& b) {
  assert(a.rows() == b.size());
  Matrix aug(a.rows(), a.cols() + 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) aug.at(r, c) = a.at(r, c);
    aug.at(r, a.cols()) = b[r];
  }
  std::vector<std::size_t> pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  std::vector<Rational> x(a.cols());
  for (std::size_t p = 0; p < pivots.size(); ++p)
    x[pivots[p]] = aug.at(p, a.cols());
  return x;
}

std::vector<Rational> least_squares_min_norm(const Matrix& a,
                                             const std::vector<Rational>& b) {
  Matrix at = a.transposed();
  Matrix gram = at * a;
  std::vector<Rational> rhs = at * b;

  auto particular = solve(gram, rhs);
  assert(particular.has_value());  // normal equations are always consistent
  std::vector<Rational> x = *particular;

  // Subtract the kernel component: x* = x - K (K^T K)^{-1} K^T x. The kernel
  // of the Gram matrix equals the kernel of a itself.
  Matrix kernel = nullspace(gram);
  if (kernel.cols() == 0) return x;
  Matrix kt = kernel.transposed();
  std::vector<Rational> ktx = kt * x;
  auto coeffs = solve(kt * kernel, ktx);
  assert(coeffs.has_value());
  std::vector<Rational> correction = kernel * *coeffs;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= correction[i];
  return x;
}

}  // namespace jetcalc
