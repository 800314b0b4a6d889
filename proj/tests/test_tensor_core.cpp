#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "igcn/dense_matrix.hpp"
#include "igcn/rng.hpp"
#include "igcn/sparse_adjacency.hpp"

using namespace igcn;

namespace {

// dense reference for spmm checks
DenseMatrix to_dense(const SparseAdjacency& adj) {
  DenseMatrix out(adj.num_nodes(), adj.num_nodes());
  for (std::size_t r = 0; r < adj.num_nodes(); ++r) {
    for (std::size_t k = adj.row_offsets()[r]; k < adj.row_offsets()[r + 1]; ++k) {
      out(r, adj.col_indices()[k]) = adj.values()[k];
    }
  }
  return out;
}

SparseAdjacency random_symmetric_graph(std::size_t m, double edge_prob, Rng& rng) {
  std::vector<Edge> edges;
  for (std::size_t q = 0; q < m; ++q) {
    for (std::size_t w = q + 1; w < m; ++w) {
      if (rng.bernoulli(edge_prob)) edges.push_back({q, w, rng.uniform(0.1, 2.0)});
    }
  }
  return SparseAdjacency::from_undirected_edges(m, edges);
}

}  // namespace

TEST_CASE("add_self_loops on an empty graph fills the diagonal") {
  const SparseAdjacency adj = SparseAdjacency::from_undirected_edges(3, {});
  const SparseAdjacency looped = add_self_loops(adj);
  CHECK(looped.nnz() == 3);
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(looped.value_at(n, n) == 1.0);
  }
}

TEST_CASE("add_self_loops keeps off-diagonal structure") {
  const SparseAdjacency adj = SparseAdjacency::from_undirected_edges(2, {{0, 1, 1.0}});
  const SparseAdjacency looped = add_self_loops(adj);
  CHECK(looped.value_at(0, 0) == 1.0);
  CHECK(looped.value_at(1, 1) == 1.0);
  CHECK(looped.value_at(0, 1) == 1.0);
  CHECK(looped.value_at(1, 0) == 1.0);
  CHECK(looped.nnz() == 4);
}

TEST_CASE("add_self_loops rejects an existing diagonal entry") {
  const SparseAdjacency adj = SparseAdjacency::from_undirected_edges(3, {{2, 2, 1.0}});
  CHECK_THROWS_AS(add_self_loops(adj), std::invalid_argument);
}

TEST_CASE("sym_normalize of a self-loops-only graph is the identity, bitwise") {
  const SparseAdjacency looped = add_self_loops(SparseAdjacency::from_undirected_edges(5, {}));
  const SparseAdjacency normalized = sym_normalize(looped);
  CHECK(normalized == SparseAdjacency::identity(5));
}

TEST_CASE("sym_normalize of the 2-node complete graph gives all 0.5") {
  const SparseAdjacency adj =
      add_self_loops(SparseAdjacency::from_undirected_edges(2, {{0, 1, 1.0}}));
  const SparseAdjacency normalized = sym_normalize(adj);
  for (std::size_t q = 0; q < 2; ++q) {
    for (std::size_t w = 0; w < 2; ++w) {
      CHECK(normalized.value_at(q, w) == doctest::Approx(0.5).epsilon(1e-15));
    }
  }
}

TEST_CASE("sym_normalize of the path 0-1-2 matches hand-computed values") {
  // degrees with self loops: 2, 3, 2
  const SparseAdjacency adj = add_self_loops(
      SparseAdjacency::from_undirected_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}}));
  const SparseAdjacency normalized = sym_normalize(adj);
  CHECK(normalized.value_at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(normalized.value_at(0, 1) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(normalized.value_at(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(normalized.value_at(1, 2) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(normalized.value_at(2, 2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sym_normalize rejects zero-degree rows") {
  // node 2 is isolated and has no self loop
  const SparseAdjacency adj = SparseAdjacency::from_undirected_edges(3, {{0, 1, 1.0}});
  CHECK_THROWS_AS(sym_normalize(adj), std::invalid_argument);
}

TEST_CASE("sym_normalize output is exactly symmetric on random weighted graphs") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 3 + rng.uniform_index(15);
    const SparseAdjacency adj = add_self_loops(random_symmetric_graph(m, 0.4, rng));
    const SparseAdjacency normalized = sym_normalize(adj);
    for (std::size_t q = 0; q < m; ++q) {
      for (std::size_t k = normalized.row_offsets()[q]; k < normalized.row_offsets()[q + 1];
           ++k) {
        const std::size_t w = normalized.col_indices()[k];
        CHECK(normalized.values()[k] == normalized.value_at(w, q));
      }
    }
  }
}

TEST_CASE("spmm with the identity returns the input") {
  const DenseMatrix x = DenseMatrix::from_rows({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  CHECK(spmm(SparseAdjacency::identity(3), x) == x);
}

TEST_CASE("spmm with all-zero values returns zeros") {
  const SparseAdjacency adj = SparseAdjacency::from_undirected_edges(2, {{0, 1, 0.0}});
  const DenseMatrix x = DenseMatrix::from_rows({{1.0}, {2.0}});
  const DenseMatrix out = spmm(adj, x);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(1, 0) == 0.0);
}

TEST_CASE("spmm on the normalized 2-node complete graph averages rows") {
  const SparseAdjacency normalized = sym_normalize(
      add_self_loops(SparseAdjacency::from_undirected_edges(2, {{0, 1, 1.0}})));
  const DenseMatrix out = spmm(normalized, DenseMatrix::from_rows({{2.0}, {4.0}}));
  CHECK(out(0, 0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(out(1, 0) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("spmm rejects mismatched dimensions") {
  const DenseMatrix x(4, 2, 1.0);
  CHECK_THROWS_AS(spmm(SparseAdjacency::identity(3), x), std::invalid_argument);
}

TEST_CASE("spmm agrees with the dense reference product") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t m = 2 + rng.uniform_index(19);
    const std::size_t cols = 1 + rng.uniform_index(6);
    const SparseAdjacency adj = add_self_loops(random_symmetric_graph(m, 0.35, rng));
    DenseMatrix x(m, cols);
    for (double& v : x.data()) v = rng.normal();
    const DenseMatrix fast = spmm(adj, x);
    const DenseMatrix reference = matmul(to_dense(adj), x);
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast.data()[i] == doctest::Approx(reference.data()[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("relu clamps negatives") {
  const DenseMatrix out = relu(DenseMatrix::from_rows({{-1.0, 2.0}}));
  CHECK(out(0, 0) == 0.0);
  CHECK(out(0, 1) == 2.0);
}

TEST_CASE("leaky_relu scales the negative side") {
  const DenseMatrix out = leaky_relu(DenseMatrix::from_rows({{-10.0}}), 0.2);
  CHECK(out(0, 0) == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("row_softmax of equal entries is uniform") {
  for (double c : {-3.0, 0.0, 1e8}) {
    const DenseMatrix out = row_softmax(DenseMatrix::from_rows({{c, c}}));
    CHECK(out(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(out(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("row_softmax rows sum to one and entries stay in (0,1)") {
  Rng rng(13);
  DenseMatrix logits(8, 5);
  for (double& v : logits.data()) v = rng.uniform(-800.0, 800.0);
  const DenseMatrix out = row_softmax(logits);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < out.cols(); ++c) {
      sum += out(r, c);
      CHECK(out(r, c) > 0.0);
      CHECK(out(r, c) < 1.0);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("dense ops reject mismatched shapes") {
  const DenseMatrix a(2, 3, 1.0);
  const DenseMatrix b(2, 3, 1.0);
  CHECK_THROWS_AS(matmul(a, b), std::invalid_argument);
  CHECK_THROWS_AS(hadamard(a, DenseMatrix(3, 2, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(hadamard_broadcast_column(a, DenseMatrix(3, 1, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(add_bias_column(a, 0.5), std::invalid_argument);
}

TEST_CASE("transpose and matmul round trip") {
  const DenseMatrix a = DenseMatrix::from_rows({{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}});
  const DenseMatrix t = transpose(a);
  CHECK(t.rows() == 3);
  CHECK(t.cols() == 2);
  CHECK(transpose(t) == a);
  const DenseMatrix product = matmul(a, t);
  CHECK(product(0, 0) == doctest::Approx(14.0));
  CHECK(product(0, 1) == doctest::Approx(32.0));
  CHECK(product(1, 1) == doctest::Approx(77.0));
}

TEST_CASE("hadamard_broadcast_column scales rows") {
  const DenseMatrix a = DenseMatrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  const DenseMatrix scale = DenseMatrix::from_rows({{2.0}, {-1.0}});
  const DenseMatrix out = hadamard_broadcast_column(a, scale);
  CHECK(out(0, 0) == 2.0);
  CHECK(out(0, 1) == 4.0);
  CHECK(out(1, 0) == -3.0);
  CHECK(out(1, 1) == -4.0);
}
