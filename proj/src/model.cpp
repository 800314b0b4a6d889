#include "igcn/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace igcn {

void SplitMask::validate(std::size_t num_nodes) const {
  std::vector<char> seen(num_nodes, 0);
  for (const auto* part : {&train, &validation, &test}) {
    for (std::size_t idx : *part) {
      if (idx >= num_nodes) {
        throw std::invalid_argument("SplitMask: node index out of range");
      }
      if (seen[idx]) {
        throw std::invalid_argument("SplitMask: splits are not disjoint");
      }
      seen[idx] = 1;
    }
  }
}

void MultiModalDataset::validate() const {
  if (modalities.empty()) {
    throw std::invalid_argument("MultiModalDataset: need at least one modality");
  }
  if (num_classes < 2) {
    throw std::invalid_argument("MultiModalDataset: need at least two classes");
  }
  const std::size_t m = num_nodes();
  for (const ModalityInput& mod : modalities) {
    if (mod.features.rows() != m || mod.norm_adj.num_nodes() != m) {
      throw std::invalid_argument("MultiModalDataset: modality node count mismatch");
    }
  }
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw std::invalid_argument("MultiModalDataset: label out of range");
    }
  }
  masks.validate(m);
  std::vector<char> in_train(num_classes, 0);
  for (std::size_t idx : masks.train) in_train[static_cast<std::size_t>(labels[idx])] = 1;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (!in_train[c]) {
      throw std::invalid_argument("MultiModalDataset: class missing from training mask");
    }
  }
}

namespace {

DenseMatrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  DenseMatrix w(fan_in, fan_out);
  for (double& v : w.data()) v = rng.uniform(-bound, bound);
  return w;
}

}  // namespace

ModelParams init_params(const std::vector<std::size_t>& feature_dims, std::size_t hidden,
                        std::size_t classes, std::uint64_t seed, Variant variant) {
  if (hidden < 1 || classes < 2 || feature_dims.empty()) {
    throw std::invalid_argument("init_params: need hidden >= 1, classes >= 2, p >= 1");
  }
  Rng rng(seed);
  ModelParams params;
  params.variant = variant;
  for (std::size_t d : feature_dims) {
    params.gcn_weights.push_back(glorot_uniform(d, hidden, rng));
  }
  params.attn_weight = glorot_uniform(hidden, 1, rng);
  params.attn_bias = 0.0;
  const std::size_t head_count = variant == Variant::mlp_head ? 1 : feature_dims.size();
  for (std::size_t i = 0; i < head_count; ++i) {
    params.head_weights.push_back(glorot_uniform(hidden, classes, rng));
  }
  return params;
}

std::pair<DenseMatrix, DenseMatrix> gcn_layer_forward(const ModalityInput& modality,
                                                      const DenseMatrix& weight,
                                                      const DenseMatrix* scaled_mask) {
  if (weight.rows() != modality.features.cols()) {
    throw std::invalid_argument("gcn_layer_forward: weight rows must equal feature dim");
  }
  DenseMatrix transformed =
      scaled_mask == nullptr ? matmul(modality.features, weight)
                             : matmul(hadamard(modality.features, *scaled_mask), weight);
  DenseMatrix pre_activation = spmm(modality.norm_adj, transformed);
  DenseMatrix embedding = relu(pre_activation);
  return {std::move(pre_activation), std::move(embedding)};
}

std::pair<DenseMatrix, DenseMatrix> attention_coefficients(
    const std::vector<DenseMatrix>& embeddings, const DenseMatrix& attn_weight,
    double attn_bias) {
  if (embeddings.empty()) {
    throw std::invalid_argument("attention_coefficients: need at least one modality");
  }
  const std::size_t m = embeddings.front().rows();
  const std::size_t p = embeddings.size();
  DenseMatrix logits(m, p);
  for (std::size_t i = 0; i < p; ++i) {
    if (!embeddings[i].same_shape(embeddings.front())) {
      throw std::invalid_argument("attention_coefficients: embedding shapes differ");
    }
    const DenseMatrix scores = leaky_relu(
        add_bias_column(matmul(embeddings[i], attn_weight), attn_bias), kLeakyReluSlope);
    for (std::size_t n = 0; n < m; ++n) logits(n, i) = scores(n, 0);
  }
  DenseMatrix coeffs = row_softmax(logits);
  return {std::move(logits), std::move(coeffs)};
}

DenseMatrix fuse_embeddings(const std::vector<DenseMatrix>& embeddings,
                            const DenseMatrix& coeffs) {
  if (embeddings.empty() || coeffs.cols() != embeddings.size() ||
      coeffs.rows() != embeddings.front().rows()) {
    throw std::invalid_argument("fuse_embeddings: coefficient shape mismatch");
  }
  const std::size_t m = coeffs.rows();
  const std::size_t h = embeddings.front().cols();
  DenseMatrix fused(m, h);
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    const DenseMatrix& emb = embeddings[i];
    if (!emb.same_shape(embeddings.front())) {
      throw std::invalid_argument("fuse_embeddings: embedding shapes differ");
    }
    for (std::size_t n = 0; n < m; ++n) {
      const double c = coeffs(n, i);
      const double* src = emb.row_ptr(n);
      double* dst = fused.row_ptr(n);
      for (std::size_t j = 0; j < h; ++j) dst[j] += c * src[j];
    }
  }
  check_finite(fused, "fuse_embeddings");
  return fused;
}

DenseMatrix prediction_head(const std::vector<ModalityInput>& modalities,
                            const DenseMatrix& fused,
                            const std::vector<DenseMatrix>& head_weights) {
  if (modalities.empty() || head_weights.size() != modalities.size()) {
    throw std::invalid_argument("prediction_head: need one weight per modality");
  }
  DenseMatrix logits(fused.rows(), head_weights.front().cols());
  for (std::size_t i = 0; i < modalities.size(); ++i) {
    const DenseMatrix contribution =
        matmul(spmm(modalities[i].norm_adj, fused), head_weights[i]);
    for (std::size_t idx = 0; idx < logits.size(); ++idx) {
      logits.data()[idx] += contribution.data()[idx];
    }
  }
  check_finite(logits, "prediction_head");
  return logits;
}

ForwardCache forward(const MultiModalDataset& dataset, const ModelParams& params, Mode mode,
                     double dropout_rate, Rng* rng) {
  const std::size_t p = dataset.num_modalities();
  if (params.gcn_weights.size() != p) {
    throw std::invalid_argument("forward: params do not match dataset modality count");
  }
  const std::size_t expected_heads = params.variant == Variant::mlp_head ? 1 : p;
  if (params.head_weights.size() != expected_heads) {
    throw std::invalid_argument("forward: head weight count does not match variant");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw std::invalid_argument("forward: dropout rate must lie in [0, 1)");
  }
  const bool use_dropout = mode == Mode::train && dropout_rate > 0.0;
  if (use_dropout && rng == nullptr) {
    throw std::invalid_argument("forward: train mode with dropout needs an rng");
  }

  ForwardCache cache;
  cache.dropout_rate = use_dropout ? dropout_rate : 0.0;
  const double keep_scale = use_dropout ? 1.0 / (1.0 - dropout_rate) : 1.0;

  for (std::size_t i = 0; i < p; ++i) {
    const ModalityInput& modality = dataset.modalities[i];
    DenseMatrix scaled_mask;
    if (use_dropout) {
      DenseMatrix indicator(modality.features.rows(), modality.features.cols());
      for (double& v : indicator.data()) v = rng->bernoulli(dropout_rate) ? 0.0 : 1.0;
      scaled_mask = indicator;
      for (double& v : scaled_mask.data()) v *= keep_scale;
      cache.dropout_masks.push_back(std::move(indicator));
    }
    auto [pre, emb] = gcn_layer_forward(modality, params.gcn_weights[i],
                                        use_dropout ? &scaled_mask : nullptr);
    cache.pre_activations.push_back(std::move(pre));
    cache.embeddings.push_back(std::move(emb));
  }

  if (params.variant == Variant::no_attention) {
    const std::size_t m = dataset.num_nodes();
    cache.attn_logits = DenseMatrix(m, p, 0.0);
    cache.attn_coeffs = DenseMatrix(m, p, 1.0 / static_cast<double>(p));
  } else {
    auto [logits, coeffs] =
        attention_coefficients(cache.embeddings, params.attn_weight, params.attn_bias);
    cache.attn_logits = std::move(logits);
    cache.attn_coeffs = std::move(coeffs);
  }

  cache.fused = fuse_embeddings(cache.embeddings, cache.attn_coeffs);

  if (params.variant == Variant::mlp_head) {
    cache.logits = matmul(cache.fused, params.head_weights.front());
  } else {
    cache.logits = prediction_head(dataset.modalities, cache.fused, params.head_weights);
  }
  return cache;
}

double masked_cross_entropy(const DenseMatrix& logits, const std::vector<int>& labels,
                            const std::vector<std::size_t>& mask) {
  if (mask.empty()) {
    throw std::invalid_argument("masked_cross_entropy: empty mask");
  }
  if (labels.size() != logits.rows()) {
    throw std::invalid_argument("masked_cross_entropy: label count mismatch");
  }
  double loss = 0.0;
  for (std::size_t j : mask) {
    if (j >= logits.rows()) {
      throw std::invalid_argument("masked_cross_entropy: mask index out of range");
    }
    const double* row = logits.row_ptr(j);
    const double row_max = *std::max_element(row, row + logits.cols());
    double sum_exp = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) sum_exp += std::exp(row[c] - row_max);
    const double true_logit = row[static_cast<std::size_t>(labels[j])];
    loss += std::log(sum_exp) + row_max - true_logit;
  }
  return loss;
}

std::vector<int> predict(const DenseMatrix& logits) {
  std::vector<int> out(logits.rows());
  for (std::size_t n = 0; n < logits.rows(); ++n) {
    const double* row = logits.row_ptr(n);
    out[n] = static_cast<int>(std::max_element(row, row + logits.cols()) - row);
  }
  return out;
}

}  // namespace igcn
