#pragma once

#include <span>
#include <utility>
#include <vector>

#include "igcn/model.hpp"

namespace igcn {

/// Loss gradients, shape-for-shape mirror of ModelParams.
struct Gradients {
  std::vector<DenseMatrix> gcn_weights;
  DenseMatrix attn_weight;
  double attn_bias = 0.0;
  std::vector<DenseMatrix> head_weights;
};

/// Zero-filled gradient bundle matching the parameter shapes.
Gradients zeros_like(const ModelParams& params);

/// Flat views over every learnable coordinate, in a fixed order shared by
/// params and gradients (GCN weights, attention weight, bias, head weights).
std::vector<std::span<double>> param_spans(ModelParams& params);
std::vector<std::span<double>> grad_spans(Gradients& grads);
std::vector<std::span<const double>> grad_spans(const Gradients& grads);

/// Exact reverse-mode gradients of the masked cross-entropy loss for the
/// cache produced by forward() on the same dataset and params. ReLU and
/// LeakyReLU subgradients at zero take the negative-side branch. Returns the
/// loss together with the gradients.
std::pair<double, Gradients> backward(const MultiModalDataset& dataset,
                                      const ModelParams& params, const ForwardCache& cache,
                                      const std::vector<std::size_t>& mask);

/// Central-difference verification of backward() against the eval-mode loss.
/// Relative error per coordinate uses max(|analytic|, |numeric|, 1e-8) as
/// the denominator; the maximum over all coordinates is returned.
double finite_difference_check(const MultiModalDataset& dataset, ModelParams params,
                               const std::vector<std::size_t>& mask, double step);

}  // namespace igcn
