#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "igcn/dense_matrix.hpp"
#include "igcn/sparse_adjacency.hpp"

namespace igcn {

/// Symmetric matrix of pairwise node similarities with an exactly zero
/// diagonal; entries lie in [-1, 1].
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t size) : size_(size), values_(size * size, 0.0) {}

  std::size_t size() const { return size_; }
  double at(std::size_t q, std::size_t w) const { return values_[q * size_ + w]; }

  /// Sets both (q,w) and (w,q); q == w is rejected to keep the zero diagonal.
  void set_pair(std::size_t q, std::size_t w, double value);

  /// Upper-triangle values (q < w), row-major order.
  std::vector<double> off_diagonal_values() const;

 private:
  std::size_t size_ = 0;
  std::vector<double> values_;
};

struct ThresholdReport {
  double epsilon = 0.0;
  double achieved_avg_degree = 0.0;
  double requested_k = 0.0;
};

/// Pairwise cosine similarities of the rows of x. Rows with zero norm get
/// similarity 0 against everything.
SimilarityMatrix cosine_similarity_matrix(const DenseMatrix& x);

/// Picks the largest epsilon such that the average number of retained
/// ordered pairs per node, |{(q,w) : q != w, s(q,w) >= epsilon}| / m, is at
/// least k. Equivalently epsilon is the ceil(m*k)-th largest off-diagonal
/// entry counting ordered pairs. Requires 0 < k <= m-1.
ThresholdReport select_threshold(const SimilarityMatrix& s, double k);

/// Binary adjacency with a unit edge wherever the similarity clears the
/// threshold; no self loops.
SparseAdjacency threshold_adjacency(const SimilarityMatrix& s, double epsilon);

/// Full pipeline: cosine similarities, degree-controlled threshold, binary
/// adjacency, self loops. The caller symmetric-normalizes the result.
std::pair<SparseAdjacency, ThresholdReport> build_similarity_network(const DenseMatrix& x,
                                                                     double k);

}  // namespace igcn
