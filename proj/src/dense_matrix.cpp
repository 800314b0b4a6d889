#include "igcn/dense_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace igcn {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  DenseMatrix m;
  m.rows_ = rows.size();
  m.cols_ = rows.size() == 0 ? 0 : rows.begin()->size();
  m.data_.reserve(m.rows_ * m.cols_);
  for (const auto& row : rows) {
    if (row.size() != m.cols_) {
      throw std::invalid_argument("DenseMatrix::from_rows: ragged rows");
    }
    m.data_.insert(m.data_.end(), row.begin(), row.end());
  }
  return m;
}

void check_finite(const DenseMatrix& m, const char* op) {
  for (double v : m.data()) {
    if (!std::isfinite(v)) {
      throw std::runtime_error(std::string(op) + ": non-finite entry in result");
    }
  }
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions do not match");
  }
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out_row = out.row_ptr(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* b_row = b.row_ptr(k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out_row[j] += aik * b_row[j];
      }
    }
  }
  check_finite(out, "matmul");
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out(j, i) = a(i, j);
    }
  }
  return out;
}

DenseMatrix relu(const DenseMatrix& a) {
  DenseMatrix out = a;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

DenseMatrix leaky_relu(const DenseMatrix& a, double slope) {
  DenseMatrix out = a;
  for (double& v : out.data()) v = v >= 0.0 ? v : slope * v;
  check_finite(out, "leaky_relu");
  return out;
}

DenseMatrix row_softmax(const DenseMatrix& a) {
  if (a.cols() == 0) {
    throw std::invalid_argument("row_softmax: empty rows");
  }
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* in_row = a.row_ptr(i);
    double* out_row = out.row_ptr(i);
    const double row_max = *std::max_element(in_row, in_row + a.cols());
    double denom = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out_row[j] = std::exp(in_row[j] - row_max);
      denom += out_row[j];
    }
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out_row[j] /= denom;
    }
  }
  check_finite(out, "row_softmax");
  return out;
}

DenseMatrix add_bias_column(const DenseMatrix& column, double bias) {
  if (column.cols() != 1) {
    throw std::invalid_argument("add_bias_column: expected a single-column matrix");
  }
  DenseMatrix out = column;
  for (double& v : out.data()) v += bias;
  check_finite(out, "add_bias_column");
  return out;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("hadamard: shape mismatch");
  }
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] *= b.data()[i];
  }
  check_finite(out, "hadamard");
  return out;
}

DenseMatrix hadamard_broadcast_column(const DenseMatrix& a, const DenseMatrix& column) {
  if (column.cols() != 1 || column.rows() != a.rows()) {
    throw std::invalid_argument("hadamard_broadcast_column: column shape mismatch");
  }
  DenseMatrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double scale = column(i, 0);
    double* row = out.row_ptr(i);
    for (std::size_t j = 0; j < a.cols(); ++j) row[j] *= scale;
  }
  check_finite(out, "hadamard_broadcast_column");
  return out;
}

}  // namespace igcn
