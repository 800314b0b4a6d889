#pragma once

#include <cstdint>
#include <vector>

#include "igcn/autograd.hpp"
#include "igcn/model.hpp"

namespace igcn {

struct AdamHyper {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  long step_count = 0;
  AdamHyper hyper;
};

AdamState init_adam(const ModelParams& params, const AdamHyper& hyper);

/// One bias-corrected Adam update, in place.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state);

struct TrainConfig {
  std::size_t max_epochs = 2000;
  std::size_t min_epochs = 200;
  std::size_t patience = 30;
  double learning_rate = 0.01;
  std::size_t hidden_width = 64;
  double dropout_rate = 0.5;
  std::uint64_t seed = 0;
  Variant variant = Variant::full;

  void validate() const;
};

struct EpochRecord {
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_macro_f1 = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;      // 1-based
  std::size_t stopped_at_epoch = 0;
};

struct TrainResult {
  ModelParams best_params;
  TrainHistory history;
};

/// Full-batch transductive training: forward (train mode, fresh dropout),
/// backward over the training mask, Adam step; afterwards an eval-mode pass
/// records validation loss and macro F1. Stops once the validation loss has
/// not improved by at least 1e-6 for `patience` consecutive epochs, but
/// never before `min_epochs`. Returns the parameter snapshot from the
/// best-validation epoch. Deterministic in config.seed.
TrainResult train(const MultiModalDataset& dataset, const TrainConfig& config);

}  // namespace igcn
