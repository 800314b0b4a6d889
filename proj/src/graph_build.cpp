#include "igcn/graph_build.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace igcn {

void SimilarityMatrix::set_pair(std::size_t q, std::size_t w, double value) {
  if (q == w) {
    throw std::invalid_argument("SimilarityMatrix::set_pair: diagonal is fixed at zero");
  }
  if (q >= size_ || w >= size_) {
    throw std::invalid_argument("SimilarityMatrix::set_pair: index out of range");
  }
  values_[q * size_ + w] = value;
  values_[w * size_ + q] = value;
}

std::vector<double> SimilarityMatrix::off_diagonal_values() const {
  std::vector<double> out;
  out.reserve(size_ * (size_ - 1) / 2);
  for (std::size_t q = 0; q < size_; ++q) {
    for (std::size_t w = q + 1; w < size_; ++w) {
      out.push_back(at(q, w));
    }
  }
  return out;
}

SimilarityMatrix cosine_similarity_matrix(const DenseMatrix& x) {
  if (x.rows() < 2) {
    throw std::invalid_argument("cosine_similarity_matrix: need at least two rows");
  }
  const std::size_t m = x.rows();
  std::vector<double> norms(m);
  for (std::size_t i = 0; i < m; ++i) {
    double sq = 0.0;
    const double* row = x.row_ptr(i);
    for (std::size_t j = 0; j < x.cols(); ++j) sq += row[j] * row[j];
    norms[i] = std::sqrt(sq);
  }
  SimilarityMatrix s(m);
  for (std::size_t q = 0; q < m; ++q) {
    for (std::size_t w = q + 1; w < m; ++w) {
      double value = 0.0;
      if (norms[q] > 0.0 && norms[w] > 0.0) {
        double dot = 0.0;
        const double* a = x.row_ptr(q);
        const double* b = x.row_ptr(w);
        for (std::size_t j = 0; j < x.cols(); ++j) dot += a[j] * b[j];
        value = dot / (norms[q] * norms[w]);
        value = std::clamp(value, -1.0, 1.0);
      }
      s.set_pair(q, w, value);
    }
  }
  return s;
}

ThresholdReport select_threshold(const SimilarityMatrix& s, double k) {
  const std::size_t m = s.size();
  if (m < 2) {
    throw std::invalid_argument("select_threshold: need at least two nodes");
  }
  if (!(k > 0.0) || k > static_cast<double>(m - 1)) {
    throw std::invalid_argument("select_threshold: k must satisfy 0 < k <= m-1");
  }
  // Each retained unordered pair contributes two ordered pairs, so the
  // q-th largest ordered entry is the ceil(q/2)-th largest unordered one.
  std::vector<double> values = s.off_diagonal_values();
  std::sort(values.begin(), values.end(), std::greater<>());

  const double target = static_cast<double>(m) * k;
  // snap near-integer targets so k exactly integral is not pushed up a rank
  std::size_t ordered_rank = static_cast<std::size_t>(std::ceil(target - 1e-9));
  if (ordered_rank == 0) ordered_rank = 1;

  ThresholdReport report;
  report.requested_k = k;
  for (;;) {
    const std::size_t unordered_rank = (ordered_rank + 1) / 2;
    report.epsilon = values[unordered_rank - 1];
    const std::size_t retained = static_cast<std::size_t>(
        std::upper_bound(values.begin(), values.end(), report.epsilon, std::greater<>()) -
        values.begin());
    report.achieved_avg_degree = 2.0 * static_cast<double>(retained) / static_cast<double>(m);
    if (report.achieved_avg_degree >= k || ordered_rank >= 2 * values.size()) break;
    ++ordered_rank;  // guards the invariant when m*k rounding shaved the rank
  }
  return report;
}

SparseAdjacency threshold_adjacency(const SimilarityMatrix& s, double epsilon) {
  std::vector<Edge> edges;
  for (std::size_t q = 0; q < s.size(); ++q) {
    for (std::size_t w = q + 1; w < s.size(); ++w) {
      if (s.at(q, w) >= epsilon) edges.push_back({q, w, 1.0});
    }
  }
  return SparseAdjacency::from_undirected_edges(s.size(), edges);
}

std::pair<SparseAdjacency, ThresholdReport> build_similarity_network(const DenseMatrix& x,
                                                                     double k) {
  const SimilarityMatrix s = cosine_similarity_matrix(x);
  const ThresholdReport report = select_threshold(s, k);
  return {add_self_loops(threshold_adjacency(s, report.epsilon)), report};
}

}  // namespace igcn
