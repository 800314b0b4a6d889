#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "igcn/dataset_io.hpp"
#include "igcn/metrics.hpp"
#include "igcn/train.hpp"

namespace igcn {

struct RunMetrics {
  std::uint64_t seed = 0;
  MetricsReport test;
  std::size_t best_epoch = 0;
  std::size_t stopped_at_epoch = 0;
};

struct ExperimentResult {
  std::vector<RunMetrics> runs;
  MetricsReport mean;
  MetricsReport stddev;  // population
};

/// Trains once and evaluates the best parameters on the given mask.
MetricsReport evaluate_params(const MultiModalDataset& dataset, const ModelParams& params,
                              const std::vector<std::size_t>& mask);

/// Run r uses split seed and training seed base_seed + r, so the whole
/// protocol is reproducible and enumerable.
ExperimentResult run_experiment(const LoadedData& data, const TrainConfig& base_config,
                                std::size_t num_runs, std::uint64_t base_seed);

struct AttentionRow {
  std::size_t node = 0;
  int true_label = 0;
  int pred_label = 0;
  bool correct = false;
  std::vector<double> coeffs;
};

/// Eval-mode attention coefficients per requested node. Defaults to the
/// correctly predicted test nodes when no subset is given.
std::vector<AttentionRow> export_attention(const MultiModalDataset& dataset,
                                           const ModelParams& params,
                                           const std::optional<std::vector<std::size_t>>& subset);

struct AblationRun {
  std::uint64_t seed = 0;
  MetricsReport full;
  MetricsReport no_attention;
  MetricsReport mlp_head;
  std::vector<AttentionRow> full_attention;  // correct test nodes, full variant
};

struct AblationResult {
  std::vector<AblationRun> runs;
};

/// Trains all three variants on identical splits/seeds per run.
AblationResult ablation_run(const LoadedData& data, const TrainConfig& base_config,
                            std::size_t num_runs, std::uint64_t base_seed);

struct SweepEntry {
  double k = 0.0;
  std::vector<std::optional<ThresholdReport>> thresholds;  // per modality
  std::vector<std::size_t> edge_counts;                    // off-diagonal entries, per modality
  ExperimentResult result;
};

/// Rebuilds the similarity networks for each k and reruns the protocol.
/// Requires that no modality comes with a fixed edge list.
std::vector<SweepEntry> k_sweep(const LoadedData& data, const TrainConfig& base_config,
                                std::size_t num_runs, std::uint64_t base_seed,
                                const std::vector<double>& ks);

struct GradcheckCase {
  std::uint64_t seed = 0;
  std::size_t num_nodes = 0;
  std::size_t num_modalities = 0;
  std::size_t hidden = 0;
  std::size_t num_classes = 0;
  double max_rel_error = 0.0;
};

/// Random small instance for gradient verification: multi-modal features,
/// similarity graphs, random labels and mask, Glorot parameters nudged away
/// from activation kinks.
struct GradcheckInstance {
  MultiModalDataset dataset;
  ModelParams params;
  std::vector<std::size_t> mask;
};
GradcheckInstance make_gradcheck_instance(std::uint64_t seed, Variant variant = Variant::full);

/// Moves params until every pre-activation and raw attention score is at
/// least `margin` from zero, so central differences stay one-sided.
void perturb_from_kinks(const MultiModalDataset& dataset, ModelParams& params, double margin,
                        Rng& rng);

std::vector<GradcheckCase> gradcheck_suite(std::size_t count, std::uint64_t base_seed,
                                           double step = 1e-5);

// --- aggregation and report files ---

MetricsReport metrics_mean(const std::vector<RunMetrics>& runs);
MetricsReport metrics_stddev(const std::vector<RunMetrics>& runs, const MetricsReport& mean);

void write_run_metrics_csv(const ExperimentResult& result, const std::string& path);
void write_summary_csv(const ExperimentResult& result, const std::string& path);
void write_history_csv(const TrainHistory& history, const std::string& path);
void write_attention_csv(const std::vector<AttentionRow>& rows, const std::string& path);
void write_ablation_csv(const AblationResult& result, const std::string& path);
void write_sweep_csv(const std::vector<SweepEntry>& entries, const std::string& path);
void write_threshold_csv(const std::vector<std::string>& names,
                         const std::vector<std::optional<ThresholdReport>>& reports,
                         const std::string& path);
void write_gradcheck_csv(const std::vector<GradcheckCase>& cases, const std::string& path);

}  // namespace igcn
