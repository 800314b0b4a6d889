#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "igcn/dense_matrix.hpp"
#include "igcn/rng.hpp"
#include "igcn/sparse_adjacency.hpp"
#include "igcn/split_mask.hpp"

namespace igcn {

inline constexpr double kLeakyReluSlope = 0.2;

/// Model variants: the full architecture, attention disabled (uniform
/// fusion weights, scoring parameters frozen), or the graph-aware
/// prediction layer replaced by a single dense map.
enum class Variant { full, no_attention, mlp_head };

enum class Mode { train, eval };

/// One data modality: node features plus the symmetric-normalized,
/// self-looped adjacency of its similarity network.
struct ModalityInput {
  DenseMatrix features;
  SparseAdjacency norm_adj;
};

struct MultiModalDataset {
  std::vector<ModalityInput> modalities;
  std::vector<int> labels;
  std::size_t num_classes = 0;
  SplitMask masks;

  std::size_t num_nodes() const { return labels.size(); }
  std::size_t num_modalities() const { return modalities.size(); }

  /// Checks modality alignment, label range, and that every class appears
  /// in the training mask.
  void validate() const;
};

/// All learnable tensors. head_weights has one entry per modality for the
/// full and no_attention variants and exactly one entry for mlp_head.
struct ModelParams {
  Variant variant = Variant::full;
  std::vector<DenseMatrix> gcn_weights;  // d_i x h
  DenseMatrix attn_weight;               // h x 1
  double attn_bias = 0.0;
  std::vector<DenseMatrix> head_weights;  // h x c

  std::size_t hidden_width() const { return attn_weight.rows(); }
  std::size_t num_classes() const {
    return head_weights.empty() ? 0 : head_weights.front().cols();
  }
};

/// Every intermediate of one forward pass, retained for the backward pass.
struct ForwardCache {
  std::vector<DenseMatrix> pre_activations;  // m x h per modality
  std::vector<DenseMatrix> embeddings;       // m x h per modality, post-ReLU
  DenseMatrix attn_logits;                   // m x p, post-LeakyReLU
  DenseMatrix attn_coeffs;                   // m x p, rows sum to 1
  DenseMatrix fused;                         // m x h
  DenseMatrix logits;                        // m x c
  std::vector<DenseMatrix> dropout_masks;    // 0/1 kept-entry indicators; empty in eval
  double dropout_rate = 0.0;
};

/// Glorot-uniform initialization, deterministic in the seed. attn_bias
/// starts at zero.
ModelParams init_params(const std::vector<std::size_t>& feature_dims, std::size_t hidden,
                        std::size_t classes, std::uint64_t seed,
                        Variant variant = Variant::full);

/// Single graph-convolution layer: preActivation = normAdj * (X o mask) * W,
/// embedding = ReLU(preActivation). `scaled_mask`, when given, is the
/// elementwise feature multiplier (dropout indicator already scaled by the
/// inverted-dropout factor).
std::pair<DenseMatrix, DenseMatrix> gcn_layer_forward(const ModalityInput& modality,
                                                      const DenseMatrix& weight,
                                                      const DenseMatrix* scaled_mask = nullptr);

/// Per-node modality scores and their row-softmax. Returns (logits, coeffs)
/// where logit(n,i) = leaky_relu(h_i^n . W_a + b).
std::pair<DenseMatrix, DenseMatrix> attention_coefficients(
    const std::vector<DenseMatrix>& embeddings, const DenseMatrix& attn_weight,
    double attn_bias);

/// Z = sum_i c_i (x) H_i with column i of `coeffs` scaling the rows of H_i.
DenseMatrix fuse_embeddings(const std::vector<DenseMatrix>& embeddings,
                            const DenseMatrix& coeffs);

/// Y = sum_i normAdj_i * Z * headWeight_i. Logits only; the loss normalizes.
DenseMatrix prediction_head(const std::vector<ModalityInput>& modalities,
                            const DenseMatrix& fused,
                            const std::vector<DenseMatrix>& head_weights);

/// Full pipeline. Train mode draws a fresh 0/1 dropout mask per modality
/// from `rng` (required when dropout_rate > 0) and applies inverted dropout
/// to the input features; eval mode is deterministic and ignores rng.
ForwardCache forward(const MultiModalDataset& dataset, const ModelParams& params, Mode mode,
                     double dropout_rate = 0.0, Rng* rng = nullptr);

/// Summed (not averaged) cross entropy over the masked nodes, computed with
/// max-subtraction stabilization.
double masked_cross_entropy(const DenseMatrix& logits, const std::vector<int>& labels,
                            const std::vector<std::size_t>& mask);

/// Argmax class per row.
std::vector<int> predict(const DenseMatrix& logits);

}  // namespace igcn
