#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "igcn/graph_build.hpp"
#include "igcn/model.hpp"
#include "igcn/rng.hpp"

using namespace igcn;

namespace {

ModalityInput self_loop_modality(DenseMatrix features) {
  const std::size_t m = features.rows();
  return {std::move(features), SparseAdjacency::identity(m)};
}

ModalityInput similarity_modality(DenseMatrix features, double k) {
  auto [adj, report] = build_similarity_network(features, k);
  (void)report;
  return {std::move(features), sym_normalize(adj)};
}

MultiModalDataset random_dataset(std::size_t m, std::size_t p, std::size_t classes,
                                 Rng& rng) {
  MultiModalDataset dataset;
  dataset.num_classes = classes;
  dataset.labels.resize(m);
  for (std::size_t n = 0; n < m; ++n) dataset.labels[n] = static_cast<int>(n % classes);
  for (std::size_t i = 0; i < p; ++i) {
    DenseMatrix features(m, 3 + i);
    for (double& v : features.data()) v = rng.normal();
    dataset.modalities.push_back(similarity_modality(std::move(features), 3.0));
  }
  for (std::size_t n = 0; n < m; ++n) dataset.masks.train.push_back(n);
  return dataset;
}

}  // namespace

TEST_CASE("init_params is deterministic in the seed") {
  const ModelParams a = init_params({5, 7}, 4, 3, 99);
  const ModelParams b = init_params({5, 7}, 4, 3, 99);
  CHECK(a.gcn_weights[0] == b.gcn_weights[0]);
  CHECK(a.gcn_weights[1] == b.gcn_weights[1]);
  CHECK(a.attn_weight == b.attn_weight);
  CHECK(a.attn_bias == b.attn_bias);
  CHECK(a.head_weights[0] == b.head_weights[0]);
  CHECK(a.head_weights[1] == b.head_weights[1]);
  const ModelParams c = init_params({5, 7}, 4, 3, 100);
  CHECK_FALSE(a.gcn_weights[0] == c.gcn_weights[0]);
}

TEST_CASE("init_params shapes and Glorot bounds") {
  const ModelParams params = init_params({6, 9}, 4, 3, 1);
  CHECK(params.attn_weight.rows() == 4);
  CHECK(params.attn_weight.cols() == 1);
  CHECK(params.attn_bias == 0.0);
  CHECK(params.head_weights.size() == 2);
  CHECK(params.head_weights[0].rows() == 4);
  CHECK(params.head_weights[0].cols() == 3);
  const double bound = std::sqrt(6.0 / (6.0 + 4.0));
  for (double v : params.gcn_weights[0].data()) {
    CHECK(std::abs(v) <= bound);
  }
}

TEST_CASE("init_params for the mlp-head variant has a single head weight") {
  const ModelParams params = init_params({6, 9}, 4, 3, 1, Variant::mlp_head);
  CHECK(params.head_weights.size() == 1);
}

TEST_CASE("gcn_layer_forward on a single self-looped node") {
  const ModalityInput modality = self_loop_modality(DenseMatrix::from_rows({{1.0, 2.0}}));
  SUBCASE("positive pre-activation passes through") {
    const auto [pre, h] = gcn_layer_forward(modality, DenseMatrix::from_rows({{1.0}, {0.0}}));
    CHECK(pre(0, 0) == 1.0);
    CHECK(h(0, 0) == 1.0);
  }
  SUBCASE("negative pre-activation is clamped") {
    const auto [pre, h] = gcn_layer_forward(modality, DenseMatrix::from_rows({{-1.0}, {0.0}}));
    CHECK(pre(0, 0) == -1.0);
    CHECK(h(0, 0) == 0.0);
  }
}

TEST_CASE("gcn_layer_forward propagates over the normalized complete graph") {
  const SparseAdjacency normalized = sym_normalize(
      add_self_loops(SparseAdjacency::from_undirected_edges(2, {{0, 1, 1.0}})));
  const ModalityInput modality{DenseMatrix::from_rows({{2.0}, {4.0}}), normalized};
  const auto [pre, h] = gcn_layer_forward(modality, DenseMatrix::from_rows({{1.0}}));
  CHECK(h(0, 0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(h(1, 0) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("gcn_layer_forward rejects mismatched weight shapes") {
  const ModalityInput modality = self_loop_modality(DenseMatrix::from_rows({{1.0, 2.0}}));
  CHECK_THROWS_AS(gcn_layer_forward(modality, DenseMatrix::from_rows({{1.0}})),
                  std::invalid_argument);
}

TEST_CASE("attention with one modality is all ones") {
  const auto [logits, coeffs] = attention_coefficients(
      {DenseMatrix::from_rows({{1.0, -2.0}, {0.5, 3.0}})},
      DenseMatrix::from_rows({{0.3}, {-0.7}}), 0.1);
  for (std::size_t n = 0; n < 2; ++n) CHECK(coeffs(n, 0) == 1.0);
}

TEST_CASE("identical embeddings split attention evenly") {
  const DenseMatrix h = DenseMatrix::from_rows({{1.0, 2.0}, {-1.0, 0.5}});
  const auto [logits, coeffs] =
      attention_coefficients({h, h}, DenseMatrix::from_rows({{0.4}, {0.2}}), -0.3);
  for (std::size_t n = 0; n < 2; ++n) {
    CHECK(coeffs(n, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(coeffs(n, 1) == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("attention softmax matches the evaluated (1,0) logit row") {
  // h_1.W_a + b = 1 and h_2.W_a + b = 0, both on the linear side of LeakyReLU
  const auto [logits, coeffs] = attention_coefficients(
      {DenseMatrix::from_rows({{1.0}}), DenseMatrix::from_rows({{0.0}})},
      DenseMatrix::from_rows({{1.0}}), 0.0);
  CHECK(logits(0, 0) == 1.0);
  CHECK(logits(0, 1) == 0.0);
  CHECK(coeffs(0, 0) == doctest::Approx(0.73106).epsilon(1e-5));
  CHECK(coeffs(0, 1) == doctest::Approx(0.26894).epsilon(1e-5));
}

TEST_CASE("attention rejects an empty embedding list") {
  CHECK_THROWS_AS(attention_coefficients({}, DenseMatrix(1, 1, 0.0), 0.0),
                  std::invalid_argument);
}

TEST_CASE("fusion identities") {
  const DenseMatrix h1 = DenseMatrix::from_rows({{4.0, 0.0}, {2.0, 2.0}});
  SUBCASE("single modality passes through") {
    CHECK(fuse_embeddings({h1}, DenseMatrix(2, 1, 1.0)) == h1);
  }
  SUBCASE("convex combination of identical embeddings is the embedding") {
    const DenseMatrix fused = fuse_embeddings({h1, h1}, DenseMatrix(2, 2, 0.5));
    for (std::size_t i = 0; i < fused.size(); ++i) {
      CHECK(fused.data()[i] == doctest::Approx(h1.data()[i]).epsilon(1e-15));
    }
  }
  SUBCASE("weighted row mix matches hand evaluation") {
    const DenseMatrix h2 = DenseMatrix::from_rows({{0.0, 4.0}, {1.0, 1.0}});
    DenseMatrix coeffs(2, 2);
    coeffs(0, 0) = 0.25;
    coeffs(0, 1) = 0.75;
    coeffs(1, 0) = 0.5;
    coeffs(1, 1) = 0.5;
    const DenseMatrix fused = fuse_embeddings({h1, h2}, coeffs);
    CHECK(fused(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fused(0, 1) == doctest::Approx(3.0).epsilon(1e-15));
  }
}

TEST_CASE("fusion is linear in each embedding") {
  Rng rng(5);
  const std::size_t m = 6, h = 4;
  std::vector<DenseMatrix> embeddings(2, DenseMatrix(m, h));
  for (auto& e : embeddings) {
    for (double& v : e.data()) v = rng.normal();
  }
  DenseMatrix coeffs(m, 2);
  for (std::size_t n = 0; n < m; ++n) {
    const double c = rng.uniform(0.1, 0.9);
    coeffs(n, 0) = c;
    coeffs(n, 1) = 1.0 - c;
  }
  const DenseMatrix base = fuse_embeddings(embeddings, coeffs);
  const double alpha = 2.5;
  std::vector<DenseMatrix> scaled = embeddings;
  for (std::size_t n = 0; n < m; ++n) scaled[0](n, 2) *= alpha;
  const DenseMatrix fused = fuse_embeddings(scaled, coeffs);
  for (std::size_t n = 0; n < m; ++n) {
    const double contribution = coeffs(n, 0) * embeddings[0](n, 2);
    const double expected = base(n, 2) + (alpha - 1.0) * contribution;
    CHECK(fused(n, 2) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("prediction head identities") {
  SUBCASE("identity graph, single modality") {
    const ModalityInput modality = self_loop_modality(DenseMatrix(1, 2, 0.0));
    const DenseMatrix fused = DenseMatrix::from_rows({{1.0, 0.0}});
    const DenseMatrix head = DenseMatrix::from_rows({{2.0, 0.0}, {0.0, 3.0}});
    const DenseMatrix logits = prediction_head({modality}, fused, {head});
    CHECK(logits(0, 0) == 2.0);
    CHECK(logits(0, 1) == 0.0);
  }
  SUBCASE("two identical modalities double the single result") {
    Rng rng(3);
    DenseMatrix features(5, 3);
    for (double& v : features.data()) v = rng.normal();
    const ModalityInput modality = similarity_modality(features, 2.0);
    DenseMatrix fused(5, 4);
    for (double& v : fused.data()) v = rng.normal();
    DenseMatrix head(4, 3);
    for (double& v : head.data()) v = rng.normal();
    const DenseMatrix single = prediction_head({modality}, fused, {head});
    const DenseMatrix doubled = prediction_head({modality, modality}, fused, {head, head});
    for (std::size_t i = 0; i < single.size(); ++i) {
      CHECK(doubled.data()[i] == doctest::Approx(2.0 * single.data()[i]).epsilon(1e-12));
    }
  }
  SUBCASE("normalized 2-node complete graph mixes rows") {
    const SparseAdjacency normalized = sym_normalize(
        add_self_loops(SparseAdjacency::from_undirected_edges(2, {{0, 1, 1.0}})));
    const ModalityInput modality{DenseMatrix(2, 1, 0.0), normalized};
    const DenseMatrix logits = prediction_head(
        {modality}, DenseMatrix::from_rows({{1.0}, {3.0}}),
        {DenseMatrix::from_rows({{1.0, -1.0}})});
    CHECK(logits(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(logits(0, 1) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(logits(1, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(logits(1, 1) == doctest::Approx(-2.0).epsilon(1e-15));
  }
}

TEST_CASE("eval-mode forward is a pure function") {
  Rng rng(77);
  const MultiModalDataset dataset = random_dataset(9, 2, 3, rng);
  const ModelParams params = init_params({3, 4}, 4, 3, 5);
  const ForwardCache a = forward(dataset, params, Mode::eval);
  const ForwardCache b = forward(dataset, params, Mode::eval);
  CHECK(a.logits == b.logits);
  CHECK(a.fused == b.fused);
  CHECK(a.attn_coeffs == b.attn_coeffs);
}

TEST_CASE("train mode with dropout rate 0 equals eval mode bitwise") {
  Rng rng(78);
  const MultiModalDataset dataset = random_dataset(8, 2, 2, rng);
  const ModelParams params = init_params({3, 4}, 4, 2, 6);
  Rng dropout_rng(1);
  const ForwardCache train_cache = forward(dataset, params, Mode::train, 0.0, &dropout_rng);
  const ForwardCache eval_cache = forward(dataset, params, Mode::eval);
  CHECK(train_cache.logits == eval_cache.logits);
  CHECK(train_cache.dropout_masks.empty());
}

TEST_CASE("train mode dropout masks are 0/1 and consumed from the rng") {
  Rng rng(79);
  const MultiModalDataset dataset = random_dataset(8, 2, 2, rng);
  const ModelParams params = init_params({3, 4}, 4, 2, 6);
  Rng dropout_rng(2);
  const ForwardCache cache = forward(dataset, params, Mode::train, 0.5, &dropout_rng);
  CHECK(cache.dropout_masks.size() == 2);
  for (const DenseMatrix& mask : cache.dropout_masks) {
    for (double v : mask.data()) CHECK((v == 0.0 || v == 1.0));
  }
  CHECK_THROWS_AS(forward(dataset, params, Mode::train, 0.5, nullptr),
                  std::invalid_argument);
}

TEST_CASE("single-modality pipeline equals composing the layer and head directly") {
  Rng rng(80);
  const MultiModalDataset dataset = random_dataset(7, 1, 2, rng);
  const ModelParams params = init_params({3}, 4, 2, 7);
  const ForwardCache cache = forward(dataset, params, Mode::eval);
  const auto [pre, h] = gcn_layer_forward(dataset.modalities[0], params.gcn_weights[0]);
  const DenseMatrix expected =
      prediction_head(dataset.modalities, h, params.head_weights);
  CHECK(cache.logits == expected);
}

TEST_CASE("attention coefficient rows sum to one at extreme logits") {
  Rng rng(81);
  MultiModalDataset dataset = random_dataset(6, 3, 2, rng);
  ModelParams params = init_params({3, 4, 5}, 4, 2, 8);
  // huge scoring weights push the logits apart
  for (double& v : params.attn_weight.data()) v = 400.0 * rng.normal();
  const ForwardCache cache = forward(dataset, params, Mode::eval);
  for (std::size_t n = 0; n < dataset.num_nodes(); ++n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) sum += cache.attn_coeffs(n, i);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("masked cross entropy identities") {
  SUBCASE("uniform logits cost |mask| ln(c)") {
    const DenseMatrix logits(4, 3, 0.7);
    const std::vector<int> labels{0, 1, 2, 0};
    const double loss = masked_cross_entropy(logits, labels, {0, 1, 2, 3});
    CHECK(loss == doctest::Approx(4.0 * std::log(3.0)).epsilon(1e-12));
  }
  SUBCASE("saturated true logit costs nearly zero") {
    DenseMatrix logits(1, 3, 0.0);
    logits(0, 1) = 1000.0;
    CHECK(masked_cross_entropy(logits, {1}, {0}) < 1e-9);
  }
  SUBCASE("closed form for a (1,0) row with true class 0") {
    const DenseMatrix logits = DenseMatrix::from_rows({{1.0, 0.0}});
    CHECK(masked_cross_entropy(logits, {0}, {0}) ==
          doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-9));
    CHECK(masked_cross_entropy(logits, {0}, {0}) == doctest::Approx(0.313262).epsilon(1e-5));
  }
  SUBCASE("empty mask is rejected") {
    const DenseMatrix logits(2, 2, 0.0);
    CHECK_THROWS_AS(masked_cross_entropy(logits, {0, 1}, {}), std::invalid_argument);
  }
}

TEST_CASE("loss ignores logits and labels outside the mask") {
  Rng rng(82);
  DenseMatrix logits(5, 3);
  for (double& v : logits.data()) v = rng.normal();
  std::vector<int> labels{0, 1, 2, 1, 0};
  const std::vector<std::size_t> mask{1, 3};
  const double base = masked_cross_entropy(logits, labels, mask);
  logits(0, 0) = 1e6;
  logits(4, 2) = -37.0;
  labels[2] = 0;
  CHECK(masked_cross_entropy(logits, labels, mask) == base);
}

TEST_CASE("forward is permutation equivariant and the loss is invariant") {
  Rng rng(83);
  const std::size_t m = 10, p = 2, c = 3;
  const MultiModalDataset dataset = random_dataset(m, p, c, rng);
  const ModelParams params = init_params({3, 4}, 4, c, 9);
  const ForwardCache cache = forward(dataset, params, Mode::eval);

  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);

  MultiModalDataset permuted;
  permuted.num_classes = c;
  permuted.labels.resize(m);
  for (std::size_t n = 0; n < m; ++n) permuted.labels[perm[n]] = dataset.labels[n];
  for (std::size_t i = 0; i < p; ++i) {
    const DenseMatrix& features = dataset.modalities[i].features;
    DenseMatrix perm_features(m, features.cols());
    for (std::size_t n = 0; n < m; ++n) {
      for (std::size_t j = 0; j < features.cols(); ++j) {
        perm_features(perm[n], j) = features(n, j);
      }
    }
    const SparseAdjacency& adj = dataset.modalities[i].norm_adj;
    std::vector<Edge> edges;
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t k = adj.row_offsets()[r]; k < adj.row_offsets()[r + 1]; ++k) {
        const std::size_t col = adj.col_indices()[k];
        if (col >= r) edges.push_back({perm[r], perm[col], adj.values()[k]});
      }
    }
    permuted.modalities.push_back(
        {std::move(perm_features), SparseAdjacency::from_undirected_edges(m, edges)});
  }
  for (std::size_t idx : dataset.masks.train) permuted.masks.train.push_back(perm[idx]);

  const ForwardCache perm_cache = forward(permuted, params, Mode::eval);
  for (std::size_t n = 0; n < m; ++n) {
    for (std::size_t k = 0; k < c; ++k) {
      CHECK(perm_cache.logits(perm[n], k) == doctest::Approx(cache.logits(n, k)).epsilon(1e-12));
    }
  }
  const double loss = masked_cross_entropy(cache.logits, dataset.labels, dataset.masks.train);
  const double perm_loss =
      masked_cross_entropy(perm_cache.logits, permuted.labels, permuted.masks.train);
  CHECK(perm_loss == doctest::Approx(loss).epsilon(1e-12));
}

TEST_CASE("dataset validation catches bad labels and non-disjoint masks") {
  Rng rng(84);
  MultiModalDataset dataset = random_dataset(6, 1, 2, rng);
  SUBCASE("out-of-range label") {
    dataset.labels[0] = 7;
    CHECK_THROWS_AS(dataset.validate(), std::invalid_argument);
  }
  SUBCASE("overlapping masks") {
    dataset.masks.validation.push_back(dataset.masks.train.front());
    CHECK_THROWS_AS(dataset.validate(), std::invalid_argument);
  }
  SUBCASE("class missing from the training mask") {
    dataset.masks.train.clear();
    dataset.masks.train.push_back(0);  // class 0 only
    CHECK_THROWS_AS(dataset.validate(), std::invalid_argument);
  }
}
