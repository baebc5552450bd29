#pragma once

#include <span>
#include <vector>

namespace thermofrac {

enum class Execution { serial, parallel };

/// Compressed sparse row matrix with sorted column indices per row.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;

  /// Builds the pattern from per-row column lists (sorted and deduplicated
  /// here); all values start at zero.
  static CsrMatrix from_pattern(int rows, int cols, std::vector<std::vector<int>> row_cols);

  int nnz() const { return static_cast<int>(col_idx.size()); }
  /// Position of (r, c) in values, or -1 when outside the pattern.
  int find(int r, int c) const;
  double get(int r, int c) const;
  double& at(int r, int c);

  void set_zero();
  void scale(double s);

  /// y = A x. The serial loop is the reference; the parallel variant splits
  /// rows across OpenMP threads and is bitwise identical.
  void multiply(std::span<const double> x, std::span<double> y,
                Execution exec = Execution::serial) const;
  /// y += A x
  void multiply_add(std::span<const double> x, std::span<double> y,
                    Execution exec = Execution::serial) const;

  std::vector<double> diagonal() const;
  bool is_symmetric(double rel_tol) const;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace thermofrac
