#pragma once

#include <cstddef>
#include <vector>

#include "igcn/dense_matrix.hpp"

namespace igcn {

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 1.0;
};

/// Structurally symmetric weighted graph stored in compressed sparse row
/// form: column indices sorted within each row, no duplicate entries, paired
/// (q,w)/(w,q) entries carry equal non-negative values. The canonical layout
/// makes operator== a meaningful structural comparison.
class SparseAdjacency {
 public:
  SparseAdjacency() = default;

  /// Builds from an edge list. Each undirected edge may appear once or in
  /// both orientations; exact duplicates are merged, conflicting duplicate
  /// weights are an error. Diagonal entries are kept as given.
  static SparseAdjacency from_undirected_edges(std::size_t num_nodes,
                                               const std::vector<Edge>& edges);

  /// Wraps existing CSR arrays; validates every class invariant.
  static SparseAdjacency from_csr(std::size_t num_nodes,
                                  std::vector<std::size_t> row_offsets,
                                  std::vector<std::size_t> col_indices,
                                  std::vector<double> values);

  static SparseAdjacency identity(std::size_t num_nodes);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t nnz() const { return col_indices_.size(); }

  const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  bool has_entry(std::size_t row, std::size_t col) const;
  /// Value at (row, col), or 0 when the entry is absent.
  double value_at(std::size_t row, std::size_t col) const;

  /// Number of stored entries with row != col.
  std::size_t num_off_diagonal() const;

  friend bool operator==(const SparseAdjacency& a, const SparseAdjacency& b) {
    return a.num_nodes_ == b.num_nodes_ && a.row_offsets_ == b.row_offsets_ &&
           a.col_indices_ == b.col_indices_ && a.values_ == b.values_;
  }

 private:
  void validate() const;

  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> row_offsets_ = {0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

/// Adds a unit self loop at every node. The input must not already contain
/// diagonal entries.
SparseAdjacency add_self_loops(const SparseAdjacency& adj);

/// Rescales entry (q,w) to value/sqrt(deg(q)*deg(w)) with deg = row sum of
/// the input. Every row sum must be positive, which add_self_loops ensures.
SparseAdjacency sym_normalize(const SparseAdjacency& adj);

/// Sparse-dense product adj * x.
DenseMatrix spmm(const SparseAdjacency& adj, const DenseMatrix& x);

}  // namespace igcn
