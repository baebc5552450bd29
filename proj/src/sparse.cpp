#include "thermofrac/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thermofrac {

CsrMatrix CsrMatrix::from_pattern(int rows, int cols, std::vector<std::vector<int>> row_cols) {
  if (static_cast<int>(row_cols.size()) != rows) {
    throw std::invalid_argument("CsrMatrix::from_pattern: row count mismatch");
  }
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  for (int r = 0; r < rows; ++r) {
    auto& c = row_cols[r];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    m.row_ptr[r + 1] = m.row_ptr[r] + static_cast<int>(c.size());
  }
  m.col_idx.reserve(m.row_ptr[rows]);
  for (auto& c : row_cols) m.col_idx.insert(m.col_idx.end(), c.begin(), c.end());
  m.values.assign(m.col_idx.size(), 0.0);
  return m;
}

int CsrMatrix::find(int r, int c) const {
  const auto first = col_idx.begin() + row_ptr[r];
  const auto last = col_idx.begin() + row_ptr[r + 1];
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return -1;
  return static_cast<int>(it - col_idx.begin());
}

double CsrMatrix::get(int r, int c) const {
  const int k = find(r, c);
  return k < 0 ? 0.0 : values[k];
}

double& CsrMatrix::at(int r, int c) {
  const int k = find(r, c);
  if (k < 0) throw std::out_of_range("CsrMatrix::at: entry outside the sparsity pattern");
  return values[k];
}

void CsrMatrix::set_zero() { std::fill(values.begin(), values.end(), 0.0); }

void CsrMatrix::scale(double s) {
  for (double& v : values) v *= s;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y, Execution exec) const {
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
      double s = 0.0;
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += values[k] * x[col_idx[k]];
      y[r] = s;
    }
    return;
  }
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += values[k] * x[col_idx[k]];
    y[r] = s;
  }
}

void CsrMatrix::multiply_add(std::span<const double> x, std::span<double> y,
                             Execution exec) const {
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
      double s = 0.0;
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += values[k] * x[col_idx[k]];
      y[r] += s;
    }
    return;
  }
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += values[k] * x[col_idx[k]];
    y[r] += s;
  }
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(rows, cols), 0.0);
  for (int r = 0; r < static_cast<int>(d.size()); ++r) d[r] = get(r, r);
  return d;
}

bool CsrMatrix::is_symmetric(double rel_tol) const {
  if (rows != cols) return false;
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  for (int r = 0; r < rows; ++r) {
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (std::abs(values[k] - get(col_idx[k], r)) > rel_tol * scale) return false;
    }
  }
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace thermofrac
