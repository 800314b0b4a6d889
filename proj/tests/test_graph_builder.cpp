#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "igcn/graph_build.hpp"
#include "igcn/rng.hpp"

using namespace igcn;

namespace {

using EdgeSet = std::set<std::pair<std::size_t, std::size_t>>;

EdgeSet off_diagonal_edges(const SparseAdjacency& adj) {
  EdgeSet edges;
  for (std::size_t r = 0; r < adj.num_nodes(); ++r) {
    for (std::size_t k = adj.row_offsets()[r]; k < adj.row_offsets()[r + 1]; ++k) {
      const std::size_t c = adj.col_indices()[k];
      if (c > r) edges.emplace(r, c);
    }
  }
  return edges;
}

// Literal transcription of the paper's decrement loop: epsilon starts at 1
// and drops by 1e-6 until the average ordered-pair count per node reaches k.
// Counting uses a sorted array; the loop itself is unchanged.
double algorithm1_oracle_epsilon(const SimilarityMatrix& s, double k) {
  std::vector<double> ordered;  // every ordered pair, ascending
  for (std::size_t q = 0; q < s.size(); ++q) {
    for (std::size_t w = 0; w < s.size(); ++w) {
      if (q != w) ordered.push_back(s.at(q, w));
    }
  }
  std::sort(ordered.begin(), ordered.end());
  const double m = static_cast<double>(s.size());
  double epsilon = 1.0;
  for (;;) {
    const auto it = std::lower_bound(ordered.begin(), ordered.end(), epsilon);
    const double counter = static_cast<double>(ordered.end() - it) / m;
    if (counter >= k) break;
    epsilon -= 1e-6;
  }
  return epsilon;
}

EdgeSet oracle_edge_set(const SimilarityMatrix& s, double k) {
  const double epsilon = algorithm1_oracle_epsilon(s, k);
  EdgeSet edges;
  for (std::size_t q = 0; q < s.size(); ++q) {
    for (std::size_t w = q + 1; w < s.size(); ++w) {
      if (s.at(q, w) >= epsilon) edges.emplace(q, w);
    }
  }
  return edges;
}

// random features whose off-diagonal similarities are pairwise separated
DenseMatrix separated_features(std::size_t m, std::size_t dim, Rng& rng) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    DenseMatrix x(m, dim);
    for (double& v : x.data()) v = rng.normal();
    std::vector<double> sims = cosine_similarity_matrix(x).off_diagonal_values();
    std::sort(sims.begin(), sims.end());
    bool ok = true;
    for (std::size_t i = 1; i < sims.size(); ++i) {
      if (sims[i] - sims[i - 1] <= 1e-6) {
        ok = false;
        break;
      }
    }
    if (ok) return x;
  }
  FAIL("could not draw separated similarities");
  return DenseMatrix();
}

}  // namespace

TEST_CASE("cosine similarity of identical nonzero rows is 1") {
  const DenseMatrix x = DenseMatrix::from_rows({{0.5, 2.0, -1.0}, {0.5, 2.0, -1.0}});
  CHECK(cosine_similarity_matrix(x).at(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cosine similarity of orthogonal rows is 0") {
  const DenseMatrix x = DenseMatrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
  CHECK(cosine_similarity_matrix(x).at(0, 1) == 0.0);
}

TEST_CASE("cosine similarity of (1,0) and (1,1) is 1/sqrt(2)") {
  const DenseMatrix x = DenseMatrix::from_rows({{1.0, 0.0}, {1.0, 1.0}});
  CHECK(cosine_similarity_matrix(x).at(0, 1) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("zero-norm rows get similarity 0 against everything") {
  const DenseMatrix x = DenseMatrix::from_rows({{0.0, 0.0}, {1.0, 2.0}, {3.0, -1.0}});
  const SimilarityMatrix s = cosine_similarity_matrix(x);
  CHECK(s.at(0, 1) == 0.0);
  CHECK(s.at(0, 2) == 0.0);
  CHECK(s.at(1, 2) != 0.0);
}

TEST_CASE("similarity matrix is symmetric with zero diagonal, entries in [-1,1]") {
  Rng rng(313);
  DenseMatrix x(12, 4);
  for (double& v : x.data()) v = rng.normal();
  const SimilarityMatrix s = cosine_similarity_matrix(x);
  for (std::size_t q = 0; q < s.size(); ++q) {
    CHECK(s.at(q, q) == 0.0);
    for (std::size_t w = 0; w < s.size(); ++w) {
      CHECK(s.at(q, w) == s.at(w, q));
      CHECK(s.at(q, w) >= -1.0);
      CHECK(s.at(q, w) <= 1.0);
    }
  }
}

TEST_CASE("select_threshold matches the worked 3-node example") {
  // off-diagonal similarities 0.9, 0.5, 0.2; k = 2
  SimilarityMatrix s(3);
  s.set_pair(0, 1, 0.9);
  s.set_pair(0, 2, 0.5);
  s.set_pair(1, 2, 0.2);
  const ThresholdReport report = select_threshold(s, 2.0);
  CHECK(report.epsilon == 0.2);
  CHECK(report.achieved_avg_degree == 2.0);
  CHECK(report.requested_k == 2.0);
}

TEST_CASE("k = m-1 with distinct similarities keeps the complete graph") {
  SimilarityMatrix s(4);
  s.set_pair(0, 1, 0.9);
  s.set_pair(0, 2, 0.7);
  s.set_pair(0, 3, 0.6);
  s.set_pair(1, 2, 0.4);
  s.set_pair(1, 3, 0.2);
  s.set_pair(2, 3, -0.5);
  const ThresholdReport report = select_threshold(s, 3.0);
  CHECK(report.epsilon == -0.5);
  CHECK(report.achieved_avg_degree == 3.0);
}

TEST_CASE("all-equal similarities keep every edge at any valid k") {
  SimilarityMatrix s(4);
  for (std::size_t q = 0; q < 4; ++q) {
    for (std::size_t w = q + 1; w < 4; ++w) s.set_pair(q, w, 0.37);
  }
  for (double k : {0.5, 1.0, 2.0, 3.0}) {
    const ThresholdReport report = select_threshold(s, k);
    CHECK(report.epsilon == 0.37);
    CHECK(report.achieved_avg_degree == 3.0);
  }
}

TEST_CASE("select_threshold rejects out-of-range k") {
  SimilarityMatrix s(3);
  s.set_pair(0, 1, 0.5);
  CHECK_THROWS_AS(select_threshold(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(select_threshold(s, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(select_threshold(s, -1.0), std::invalid_argument);
}

TEST_CASE("build_similarity_network on the 3-node example keeps all edges plus loops") {
  // reuse the worked example via features that produce three distinct sims
  SimilarityMatrix s(3);
  s.set_pair(0, 1, 0.9);
  s.set_pair(0, 2, 0.5);
  s.set_pair(1, 2, 0.2);
  const ThresholdReport report = select_threshold(s, 2.0);
  const SparseAdjacency adj = add_self_loops(threshold_adjacency(s, report.epsilon));
  CHECK(adj.num_off_diagonal() == 6);
  CHECK(adj.nnz() == 9);
  for (double v : adj.values()) CHECK(v == 1.0);
}

TEST_CASE("an identical pair of rows is retained first at small k") {
  const DenseMatrix x = DenseMatrix::from_rows(
      {{1.0, 1.0, 0.0}, {1.0, 1.0, 0.0}, {1.0, 0.0, 0.2}, {0.0, 1.0, -0.3}});
  auto [adj, report] = build_similarity_network(x, 0.5);
  CHECK(adj.value_at(0, 1) == 1.0);
  CHECK(report.epsilon == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("built adjacency is binary and symmetric before self loops") {
  Rng rng(17);
  const DenseMatrix x = separated_features(14, 5, rng);
  const SimilarityMatrix s = cosine_similarity_matrix(x);
  const ThresholdReport report = select_threshold(s, 4.0);
  const SparseAdjacency adj = threshold_adjacency(s, report.epsilon);
  for (double v : adj.values()) CHECK(v == 1.0);
  for (std::size_t r = 0; r < adj.num_nodes(); ++r) {
    CHECK_FALSE(adj.has_entry(r, r));
    for (std::size_t k = adj.row_offsets()[r]; k < adj.row_offsets()[r + 1]; ++k) {
      CHECK(adj.has_entry(adj.col_indices()[k], r));
    }
  }
  CHECK(report.achieved_avg_degree ==
        static_cast<double>(adj.num_off_diagonal()) / static_cast<double>(adj.num_nodes()));
  CHECK(report.achieved_avg_degree >= 4.0);
}

TEST_CASE("edge sets are nested as k grows") {
  Rng rng(23);
  const DenseMatrix x = separated_features(16, 5, rng);
  const SimilarityMatrix s = cosine_similarity_matrix(x);
  EdgeSet previous;
  for (double k : {1.0, 2.0, 4.0, 8.0, 15.0}) {
    const ThresholdReport report = select_threshold(s, k);
    const EdgeSet edges = off_diagonal_edges(threshold_adjacency(s, report.epsilon));
    CHECK(std::includes(edges.begin(), edges.end(), previous.begin(), previous.end()));
    previous = edges;
  }
}

TEST_CASE("retained edges match the decrement-loop oracle on random instances") {
  Rng rng(41);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t m = 5 + rng.uniform_index(14);
    const DenseMatrix x = separated_features(m, 6, rng);
    const SimilarityMatrix s = cosine_similarity_matrix(x);
    const double k = 1.0 + static_cast<double>(rng.uniform_index(std::min<std::size_t>(m - 1, 6)));
    const ThresholdReport report = select_threshold(s, k);
    const EdgeSet ours = off_diagonal_edges(threshold_adjacency(s, report.epsilon));
    const EdgeSet oracle = oracle_edge_set(s, k);
    CHECK(ours == oracle);
  }
}
