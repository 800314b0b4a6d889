#include "igcn/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace igcn {

Gradients zeros_like(const ModelParams& params) {
  Gradients g;
  for (const DenseMatrix& w : params.gcn_weights) {
    g.gcn_weights.emplace_back(w.rows(), w.cols());
  }
  g.attn_weight = DenseMatrix(params.attn_weight.rows(), params.attn_weight.cols());
  g.attn_bias = 0.0;
  for (const DenseMatrix& w : params.head_weights) {
    g.head_weights.emplace_back(w.rows(), w.cols());
  }
  return g;
}

std::vector<std::span<double>> param_spans(ModelParams& params) {
  std::vector<std::span<double>> spans;
  for (DenseMatrix& w : params.gcn_weights) spans.emplace_back(w.data());
  spans.emplace_back(params.attn_weight.data());
  spans.emplace_back(&params.attn_bias, 1);
  for (DenseMatrix& w : params.head_weights) spans.emplace_back(w.data());
  return spans;
}

std::vector<std::span<double>> grad_spans(Gradients& grads) {
  std::vector<std::span<double>> spans;
  for (DenseMatrix& w : grads.gcn_weights) spans.emplace_back(w.data());
  spans.emplace_back(grads.attn_weight.data());
  spans.emplace_back(&grads.attn_bias, 1);
  for (DenseMatrix& w : grads.head_weights) spans.emplace_back(w.data());
  return spans;
}

std::vector<std::span<const double>> grad_spans(const Gradients& grads) {
  std::vector<std::span<const double>> spans;
  for (const DenseMatrix& w : grads.gcn_weights) spans.emplace_back(w.data());
  spans.emplace_back(grads.attn_weight.data());
  spans.emplace_back(&grads.attn_bias, 1);
  for (const DenseMatrix& w : grads.head_weights) spans.emplace_back(w.data());
  return spans;
}

namespace {

void check_cache_matches(const MultiModalDataset& dataset, const ModelParams& params,
                         const ForwardCache& cache) {
  const std::size_t p = dataset.num_modalities();
  const std::size_t m = dataset.num_nodes();
  const std::size_t h = params.hidden_width();
  if (params.gcn_weights.size() != p || cache.embeddings.size() != p ||
      cache.pre_activations.size() != p) {
    throw std::invalid_argument("backward: cache/params modality count mismatch");
  }
  const std::size_t expected_heads = params.variant == Variant::mlp_head ? 1 : p;
  if (params.head_weights.size() != expected_heads) {
    throw std::invalid_argument("backward: head weight count does not match variant");
  }
  if (cache.logits.rows() != m || cache.logits.cols() != params.num_classes() ||
      cache.fused.rows() != m || cache.fused.cols() != h) {
    throw std::invalid_argument("backward: cache shapes do not match params");
  }
  if (!cache.dropout_masks.empty() && cache.dropout_masks.size() != p) {
    throw std::invalid_argument("backward: dropout mask count mismatch");
  }
}

/// d(loss)/d(logits): softmax(row) - onehot(label) on masked rows, 0 elsewhere.
DenseMatrix loss_grad_logits(const DenseMatrix& logits, const std::vector<int>& labels,
                             const std::vector<std::size_t>& mask) {
  DenseMatrix grad(logits.rows(), logits.cols());
  for (std::size_t j : mask) {
    const double* row = logits.row_ptr(j);
    double* out = grad.row_ptr(j);
    const double row_max = *std::max_element(row, row + logits.cols());
    double sum_exp = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) sum_exp += std::exp(row[c] - row_max);
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      out[c] = std::exp(row[c] - row_max) / sum_exp;
    }
    out[static_cast<std::size_t>(labels[j])] -= 1.0;
  }
  return grad;
}

void accumulate(DenseMatrix& dst, const DenseMatrix& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] += src.data()[i];
}

}  // namespace

std::pair<double, Gradients> backward(const MultiModalDataset& dataset,
                                      const ModelParams& params, const ForwardCache& cache,
                                      const std::vector<std::size_t>& mask) {
  check_cache_matches(dataset, params, cache);
  const std::size_t p = dataset.num_modalities();
  const std::size_t m = dataset.num_nodes();
  const std::size_t h = params.hidden_width();

  const double loss = masked_cross_entropy(cache.logits, dataset.labels, mask);
  Gradients grads = zeros_like(params);

  const DenseMatrix d_logits = loss_grad_logits(cache.logits, dataset.labels, mask);

  // Prediction layer. The normalized adjacency is symmetric, so its
  // transpose in the chain rule is the matrix itself.
  DenseMatrix d_fused(m, h);
  if (params.variant == Variant::mlp_head) {
    grads.head_weights[0] = matmul(transpose(cache.fused), d_logits);
    d_fused = matmul(d_logits, transpose(params.head_weights[0]));
  } else {
    const DenseMatrix fused_t = transpose(cache.fused);
    for (std::size_t i = 0; i < p; ++i) {
      const DenseMatrix propagated = spmm(dataset.modalities[i].norm_adj, d_logits);
      grads.head_weights[i] = matmul(fused_t, propagated);
      accumulate(d_fused, matmul(propagated, transpose(params.head_weights[i])));
    }
  }

  // Fusion: Z[n] = sum_i C[n,i] H_i[n].
  std::vector<DenseMatrix> d_embeddings;
  d_embeddings.reserve(p);
  for (std::size_t i = 0; i < p; ++i) d_embeddings.emplace_back(m, h);
  DenseMatrix d_coeffs(m, p);
  for (std::size_t i = 0; i < p; ++i) {
    const DenseMatrix& emb = cache.embeddings[i];
    DenseMatrix& d_emb = d_embeddings[i];
    for (std::size_t n = 0; n < m; ++n) {
      const double* dz = d_fused.row_ptr(n);
      const double* e = emb.row_ptr(n);
      double* de = d_emb.row_ptr(n);
      const double c = cache.attn_coeffs(n, i);
      double dot = 0.0;
      for (std::size_t j = 0; j < h; ++j) {
        dot += dz[j] * e[j];
        de[j] += c * dz[j];
      }
      d_coeffs(n, i) = dot;
    }
  }

  // Attention: softmax Jacobian, then the LeakyReLU subgradient, then the
  // shared scoring parameters. Skipped entirely when attention is disabled
  // (coefficients are constants there).
  if (params.variant != Variant::no_attention) {
    const double* wa = params.attn_weight.data().data();
    for (std::size_t n = 0; n < m; ++n) {
      double weighted_sum = 0.0;
      for (std::size_t i = 0; i < p; ++i) {
        weighted_sum += d_coeffs(n, i) * cache.attn_coeffs(n, i);
      }
      for (std::size_t i = 0; i < p; ++i) {
        const double d_logit =
            cache.attn_coeffs(n, i) * (d_coeffs(n, i) - weighted_sum);
        const double d_score =
            d_logit * (cache.attn_logits(n, i) > 0.0 ? 1.0 : kLeakyReluSlope);
        const double* e = cache.embeddings[i].row_ptr(n);
        double* de = d_embeddings[i].row_ptr(n);
        double* dwa = grads.attn_weight.data().data();
        for (std::size_t j = 0; j < h; ++j) {
          dwa[j] += d_score * e[j];
          de[j] += d_score * wa[j];
        }
        grads.attn_bias += d_score;
      }
    }
  }

  // GCN layers: through ReLU, the symmetric propagation, and the dropout
  // scaling on the input features.
  const double keep_scale =
      cache.dropout_rate > 0.0 ? 1.0 / (1.0 - cache.dropout_rate) : 1.0;
  for (std::size_t i = 0; i < p; ++i) {
    DenseMatrix d_pre = d_embeddings[i];
    const DenseMatrix& pre = cache.pre_activations[i];
    for (std::size_t idx = 0; idx < d_pre.size(); ++idx) {
      if (pre.data()[idx] <= 0.0) d_pre.data()[idx] = 0.0;
    }
    const DenseMatrix propagated = spmm(dataset.modalities[i].norm_adj, d_pre);
    DenseMatrix inputs = dataset.modalities[i].features;
    if (!cache.dropout_masks.empty()) {
      const DenseMatrix& mask_i = cache.dropout_masks[i];
      if (!mask_i.same_shape(inputs)) {
        throw std::invalid_argument("backward: dropout mask shape mismatch");
      }
      for (std::size_t idx = 0; idx < inputs.size(); ++idx) {
        inputs.data()[idx] *= mask_i.data()[idx] * keep_scale;
      }
    }
    grads.gcn_weights[i] = matmul(transpose(inputs), propagated);
  }

  return {loss, std::move(grads)};
}

double finite_difference_check(const MultiModalDataset& dataset, ModelParams params,
                               const std::vector<std::size_t>& mask, double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("finite_difference_check: step must be positive");
  }
  const auto loss_at = [&](const ModelParams& p) {
    const ForwardCache cache = forward(dataset, p, Mode::eval);
    return masked_cross_entropy(cache.logits, dataset.labels, mask);
  };

  const ForwardCache cache = forward(dataset, params, Mode::eval);
  const auto [loss, grads] = backward(dataset, params, cache, mask);
  (void)loss;

  auto p_spans = param_spans(params);
  const auto g_spans = grad_spans(grads);

  double max_rel_error = 0.0;
  for (std::size_t t = 0; t < p_spans.size(); ++t) {
    for (std::size_t idx = 0; idx < p_spans[t].size(); ++idx) {
      double& coord = p_spans[t][idx];
      const double saved = coord;
      coord = saved + step;
      const double plus = loss_at(params);
      coord = saved - step;
      const double minus = loss_at(params);
      coord = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      const double analytic = g_spans[t][idx];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      max_rel_error = std::max(max_rel_error, std::abs(analytic - numeric) / denom);
    }
  }
  return max_rel_error;
}

}  // namespace igcn
