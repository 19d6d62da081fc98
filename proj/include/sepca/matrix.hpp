#ifndef SEPCA_MATRIX_HPP
#define SEPCA_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sepca {

using Vector = std::vector<double>;
using IndexSet = std::vector<std::size_t>;

/// Dense row-major p x n matrix of finite values. Rows are the p coordinates,
/// columns the n observations.
class DataMatrix {
 public:
  DataMatrix() = default;

  /// Zero matrix.
  DataMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  /// Takes ownership of row-major values; rejects size mismatch and non-finite entries.
  DataMatrix(std::size_t rows, std::size_t cols, Vector values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
      throw std::invalid_argument("DataMatrix: expected " + std::to_string(rows_ * cols_) + " values, got " +
                                  std::to_string(values_.size()));
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!std::isfinite(values_[k])) {
        throw std::invalid_argument("DataMatrix: non-finite entry at row " + std::to_string(k / cols_) +
                                    ", column " + std::to_string(k % cols_));
      }
    }
  }

  static DataMatrix from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return {};
    const std::size_t cols = rows.front().size();
    Vector values;
    values.reserve(rows.size() * cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) {
        throw std::invalid_argument("DataMatrix: row " + std::to_string(i) + " has " +
                                    std::to_string(rows[i].size()) + " entries, expected " + std::to_string(cols));
      }
      values.insert(values.end(), rows[i].begin(), rows[i].end());
    }
    return DataMatrix(rows.size(), cols, std::move(values));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> values() const noexcept { return values_; }

  /// Rows listed in `indices`, in that order.
  DataMatrix select_rows(std::span<const std::size_t> indices) const {
    Vector out;
    out.reserve(indices.size() * cols_);
    for (std::size_t i : indices) {
      if (i >= rows_) throw std::out_of_range("DataMatrix: row index " + std::to_string(i) + " out of range");
      auto r = row(i);
      out.insert(out.end(), r.begin(), r.end());
    }
    return DataMatrix(indices.size(), cols_, std::move(out));
  }

  /// Entrywise scaling by a finite factor.
  DataMatrix scaled(double c) const {
    Vector out(values_);
    for (double& x : out) x *= c;
    return DataMatrix(rows_, cols_, std::move(out));
  }

  friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector values_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const std::size_t n = a.size();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += std::abs(x);
  return s;
}

}  // namespace sepca

#endif  // SEPCA_MATRIX_HPP
