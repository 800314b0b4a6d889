#include "igcn/train.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "igcn/metrics.hpp"

namespace igcn {

AdamState init_adam(const ModelParams& params, const AdamHyper& hyper) {
  AdamState state;
  state.first_moment = zeros_like(params);
  state.second_moment = zeros_like(params);
  state.step_count = 0;
  state.hyper = hyper;
  return state;
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state) {
  auto p_spans = param_spans(params);
  const auto g_spans = grad_spans(grads);
  auto m_spans = grad_spans(state.first_moment);
  auto v_spans = grad_spans(state.second_moment);
  if (p_spans.size() != g_spans.size()) {
    throw std::invalid_argument("adam_step: gradient bundle does not match params");
  }
  const AdamHyper& hp = state.hyper;
  ++state.step_count;
  const double bias1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.step_count));
  const double bias2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.step_count));
  for (std::size_t t = 0; t < p_spans.size(); ++t) {
    if (p_spans[t].size() != g_spans[t].size()) {
      throw std::invalid_argument("adam_step: gradient tensor shape mismatch");
    }
    for (std::size_t i = 0; i < p_spans[t].size(); ++i) {
      const double g = g_spans[t][i];
      double& m = m_spans[t][i];
      double& v = v_spans[t][i];
      m = hp.beta1 * m + (1.0 - hp.beta1) * g;
      v = hp.beta2 * v + (1.0 - hp.beta2) * g * g;
      const double m_hat = m / bias1;
      const double v_hat = v / bias2;
      p_spans[t][i] -= hp.learning_rate * m_hat / (std::sqrt(v_hat) + hp.epsilon);
    }
  }
}

void TrainConfig::validate() const {
  if (min_epochs > max_epochs) {
    throw std::invalid_argument("TrainConfig: min_epochs must not exceed max_epochs");
  }
  if (patience < 1) {
    throw std::invalid_argument("TrainConfig: patience must be at least 1");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw std::invalid_argument("TrainConfig: dropout rate must lie in [0, 1)");
  }
  if (hidden_width < 1) {
    throw std::invalid_argument("TrainConfig: hidden width must be at least 1");
  }
}

TrainResult train(const MultiModalDataset& dataset, const TrainConfig& config) {
  config.validate();
  dataset.validate();
  if (dataset.masks.train.empty() || dataset.masks.validation.empty()) {
    throw std::invalid_argument("train: training and validation masks must be nonempty");
  }

  std::vector<std::size_t> feature_dims;
  for (const ModalityInput& modality : dataset.modalities) {
    feature_dims.push_back(modality.features.cols());
  }
  ModelParams params = init_params(feature_dims, config.hidden_width, dataset.num_classes,
                                   config.seed, config.variant);
  // separate stream for dropout so parameter init stays comparable across configs
  Rng dropout_rng(config.seed + 0x9e3779b97f4a7c15ull);
  AdamState adam = init_adam(params, AdamHyper{.learning_rate = config.learning_rate});

  constexpr double kImprovementThreshold = 1e-6;
  TrainResult result;
  result.best_params = params;
  double best_val_loss = std::numeric_limits<double>::infinity();
  TrainHistory& history = result.history;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const ForwardCache train_cache =
        forward(dataset, params, Mode::train, config.dropout_rate, &dropout_rng);
    const auto [train_loss, grads] = backward(dataset, params, train_cache, dataset.masks.train);
    adam_step(params, grads, adam);

    const ForwardCache eval_cache = forward(dataset, params, Mode::eval);
    const double val_loss =
        masked_cross_entropy(eval_cache.logits, dataset.labels, dataset.masks.validation);
    const std::vector<int> preds = predict(eval_cache.logits);
    std::vector<int> val_true, val_pred;
    for (std::size_t idx : dataset.masks.validation) {
      val_true.push_back(dataset.labels[idx]);
      val_pred.push_back(preds[idx]);
    }
    const double val_macro_f1 =
        metrics(confusion(val_true, val_pred, dataset.num_classes)).macro_f1;
    history.epochs.push_back({train_loss, val_loss, val_macro_f1});

    if (val_loss < best_val_loss - kImprovementThreshold) {
      best_val_loss = val_loss;
      history.best_epoch = epoch;
      result.best_params = params;
    } else if (epoch >= config.min_epochs &&
               epoch >= history.best_epoch + config.patience) {
      history.stopped_at_epoch = epoch;
      break;
    }
    history.stopped_at_epoch = epoch;
  }
  return result;
}

}  // namespace igcn
