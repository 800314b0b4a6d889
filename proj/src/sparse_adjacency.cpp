#include "igcn/sparse_adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace igcn {

namespace {

std::size_t find_entry(const std::vector<std::size_t>& offsets,
                       const std::vector<std::size_t>& cols, std::size_t row,
                       std::size_t col) {
  const auto begin = cols.begin() + static_cast<std::ptrdiff_t>(offsets[row]);
  const auto end = cols.begin() + static_cast<std::ptrdiff_t>(offsets[row + 1]);
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - cols.begin());
}

}  // namespace

SparseAdjacency SparseAdjacency::from_undirected_edges(std::size_t num_nodes,
                                                       const std::vector<Edge>& edges) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> triplets;
  triplets.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.src >= num_nodes || e.dst >= num_nodes) {
      throw std::invalid_argument("SparseAdjacency: edge endpoint out of range");
    }
    triplets.emplace_back(e.src, e.dst, e.weight);
    if (e.src != e.dst) triplets.emplace_back(e.dst, e.src, e.weight);
  }
  std::sort(triplets.begin(), triplets.end());

  SparseAdjacency adj;
  adj.num_nodes_ = num_nodes;
  adj.row_offsets_.assign(num_nodes + 1, 0);
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto& [r, c, v] = triplets[i];
    if (i > 0 && r == std::get<0>(triplets[i - 1]) && c == std::get<1>(triplets[i - 1])) {
      if (v != std::get<2>(triplets[i - 1])) {
        throw std::invalid_argument("SparseAdjacency: duplicate edge with conflicting weight");
      }
      continue;  // exact duplicate, merge
    }
    adj.col_indices_.push_back(c);
    adj.values_.push_back(v);
    ++adj.row_offsets_[r + 1];
  }
  for (std::size_t r = 0; r < num_nodes; ++r) {
    adj.row_offsets_[r + 1] += adj.row_offsets_[r];
  }
  adj.validate();
  return adj;
}

SparseAdjacency SparseAdjacency::from_csr(std::size_t num_nodes,
                                          std::vector<std::size_t> row_offsets,
                                          std::vector<std::size_t> col_indices,
                                          std::vector<double> values) {
  SparseAdjacency adj;
  adj.num_nodes_ = num_nodes;
  adj.row_offsets_ = std::move(row_offsets);
  adj.col_indices_ = std::move(col_indices);
  adj.values_ = std::move(values);
  adj.validate();
  return adj;
}

SparseAdjacency SparseAdjacency::identity(std::size_t num_nodes) {
  SparseAdjacency adj;
  adj.num_nodes_ = num_nodes;
  adj.row_offsets_.resize(num_nodes + 1);
  adj.col_indices_.resize(num_nodes);
  adj.values_.assign(num_nodes, 1.0);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    adj.row_offsets_[i + 1] = i + 1;
    adj.col_indices_[i] = i;
  }
  return adj;
}

bool SparseAdjacency::has_entry(std::size_t row, std::size_t col) const {
  return find_entry(row_offsets_, col_indices_, row, col) != static_cast<std::size_t>(-1);
}

double SparseAdjacency::value_at(std::size_t row, std::size_t col) const {
  const std::size_t idx = find_entry(row_offsets_, col_indices_, row, col);
  return idx == static_cast<std::size_t>(-1) ? 0.0 : values_[idx];
}

std::size_t SparseAdjacency::num_off_diagonal() const {
  std::size_t count = 0;
  for (std::size_t r = 0; r < num_nodes_; ++r) {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      if (col_indices_[k] != r) ++count;
    }
  }
  return count;
}

void SparseAdjacency::validate() const {
  if (row_offsets_.size() != num_nodes_ + 1 || row_offsets_.front() != 0 ||
      row_offsets_.back() != col_indices_.size() || col_indices_.size() != values_.size()) {
    throw std::invalid_argument("SparseAdjacency: malformed CSR arrays");
  }
  for (std::size_t r = 0; r < num_nodes_; ++r) {
    if (row_offsets_[r] > row_offsets_[r + 1]) {
      throw std::invalid_argument("SparseAdjacency: row offsets not non-decreasing");
    }
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      if (col_indices_[k] >= num_nodes_) {
        throw std::invalid_argument("SparseAdjacency: column index out of range");
      }
      if (k > row_offsets_[r] && col_indices_[k] <= col_indices_[k - 1]) {
        throw std::invalid_argument("SparseAdjacency: columns not sorted or duplicated");
      }
      if (!(values_[k] >= 0.0) || !std::isfinite(values_[k])) {
        throw std::invalid_argument("SparseAdjacency: values must be finite and non-negative");
      }
    }
  }
  // structural symmetry with equal paired values
  for (std::size_t r = 0; r < num_nodes_; ++r) {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const std::size_t c = col_indices_[k];
      const std::size_t mirror = find_entry(row_offsets_, col_indices_, c, r);
      if (mirror == static_cast<std::size_t>(-1) || values_[mirror] != values_[k]) {
        throw std::invalid_argument("SparseAdjacency: not symmetric");
      }
    }
  }
}

SparseAdjacency add_self_loops(const SparseAdjacency& adj) {
  const std::size_t m = adj.num_nodes();
  std::vector<std::size_t> offsets(m + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  cols.reserve(adj.nnz() + m);
  vals.reserve(adj.nnz() + m);
  for (std::size_t r = 0; r < m; ++r) {
    bool inserted = false;
    for (std::size_t k = adj.row_offsets()[r]; k < adj.row_offsets()[r + 1]; ++k) {
      const std::size_t c = adj.col_indices()[k];
      if (c == r) {
        throw std::invalid_argument("add_self_loops: input already has a diagonal entry");
      }
      if (!inserted && c > r) {
        cols.push_back(r);
        vals.push_back(1.0);
        inserted = true;
      }
      cols.push_back(c);
      vals.push_back(adj.values()[k]);
    }
    if (!inserted) {
      cols.push_back(r);
      vals.push_back(1.0);
    }
    offsets[r + 1] = cols.size();
  }
  return SparseAdjacency::from_csr(m, std::move(offsets), std::move(cols), std::move(vals));
}

SparseAdjacency sym_normalize(const SparseAdjacency& adj) {
  const std::size_t m = adj.num_nodes();
  std::vector<double> degree(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t k = adj.row_offsets()[r]; k < adj.row_offsets()[r + 1]; ++k) {
      degree[r] += adj.values()[k];
    }
  }
  std::vector<double> inv_sqrt(m);
  for (std::size_t r = 0; r < m; ++r) {
    if (!(degree[r] > 0.0)) {
      throw std::invalid_argument("sym_normalize: zero-degree row; add self loops first");
    }
    inv_sqrt[r] = 1.0 / std::sqrt(degree[r]);
  }
  std::vector<double> vals(adj.nnz());
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t k = adj.row_offsets()[r]; k < adj.row_offsets()[r + 1]; ++k) {
      // grouping keeps paired entries bitwise equal
      vals[k] = adj.values()[k] * (inv_sqrt[r] * inv_sqrt[adj.col_indices()[k]]);
    }
  }
  return SparseAdjacency::from_csr(m, adj.row_offsets(), adj.col_indices(), std::move(vals));
}

DenseMatrix spmm(const SparseAdjacency& adj, const DenseMatrix& x) {
  if (adj.num_nodes() != x.rows()) {
    throw std::invalid_argument("spmm: adjacency and matrix row counts differ");
  }
  DenseMatrix out(adj.num_nodes(), x.cols());
  for (std::size_t r = 0; r < adj.num_nodes(); ++r) {
    double* out_row = out.row_ptr(r);
    for (std::size_t k = adj.row_offsets()[r]; k < adj.row_offsets()[r + 1]; ++k) {
      const double w = adj.values()[k];
      const double* x_row = x.row_ptr(adj.col_indices()[k]);
      for (std::size_t j = 0; j < x.cols(); ++j) {
        out_row[j] += w * x_row[j];
      }
    }
  }
  check_finite(out, "spmm");
  return out;
}

}  // namespace igcn
