#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace igcn {

/// Row-major dense matrix of 64-bit reals. Every public kernel below
/// validates shapes and leaves only finite entries in its result.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
  const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Throws std::runtime_error naming `op` if any entry is NaN or infinite.
void check_finite(const DenseMatrix& m, const char* op);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix relu(const DenseMatrix& a);
DenseMatrix leaky_relu(const DenseMatrix& a, double slope);

/// Numerically stabilized softmax over each row; rows sum to 1 within 1e-12.
DenseMatrix row_softmax(const DenseMatrix& a);

/// Adds a scalar bias to every entry of a single-column matrix.
DenseMatrix add_bias_column(const DenseMatrix& column, double bias);

/// Elementwise product of two equal-shape matrices.
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);

/// Scales row n of `a` by entry n of `column` (an m-by-1 matrix).
DenseMatrix hadamard_broadcast_column(const DenseMatrix& a, const DenseMatrix& column);

}  // namespace igcn
