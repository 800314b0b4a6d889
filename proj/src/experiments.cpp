#include "igcn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "igcn/csv.hpp"

namespace igcn {

MetricsReport evaluate_params(const MultiModalDataset& dataset, const ModelParams& params,
                              const std::vector<std::size_t>& mask) {
  const ForwardCache cache = forward(dataset, params, Mode::eval);
  const std::vector<int> preds = predict(cache.logits);
  std::vector<int> y_true, y_pred;
  y_true.reserve(mask.size());
  y_pred.reserve(mask.size());
  for (std::size_t idx : mask) {
    y_true.push_back(dataset.labels[idx]);
    y_pred.push_back(preds[idx]);
  }
  return metrics(confusion(y_true, y_pred, dataset.num_classes));
}

MetricsReport metrics_mean(const std::vector<RunMetrics>& runs) {
  MetricsReport mean;
  for (const RunMetrics& run : runs) {
    mean.accuracy += run.test.accuracy;
    mean.macro_f1 += run.test.macro_f1;
    mean.weighted_f1 += run.test.weighted_f1;
    mean.mcc += run.test.mcc;
  }
  const double n = static_cast<double>(runs.size());
  mean.accuracy /= n;
  mean.macro_f1 /= n;
  mean.weighted_f1 /= n;
  mean.mcc /= n;
  return mean;
}

MetricsReport metrics_stddev(const std::vector<RunMetrics>& runs, const MetricsReport& mean) {
  MetricsReport var;
  for (const RunMetrics& run : runs) {
    var.accuracy += (run.test.accuracy - mean.accuracy) * (run.test.accuracy - mean.accuracy);
    var.macro_f1 += (run.test.macro_f1 - mean.macro_f1) * (run.test.macro_f1 - mean.macro_f1);
    var.weighted_f1 +=
        (run.test.weighted_f1 - mean.weighted_f1) * (run.test.weighted_f1 - mean.weighted_f1);
    var.mcc += (run.test.mcc - mean.mcc) * (run.test.mcc - mean.mcc);
  }
  const double n = static_cast<double>(runs.size());
  return {std::sqrt(var.accuracy / n), std::sqrt(var.macro_f1 / n),
          std::sqrt(var.weighted_f1 / n), std::sqrt(var.mcc / n)};
}

ExperimentResult run_experiment(const LoadedData& data, const TrainConfig& base_config,
                                std::size_t num_runs, std::uint64_t base_seed) {
  if (num_runs < 1) {
    throw std::invalid_argument("run_experiment: need at least one run");
  }
  ExperimentResult result;
  for (std::size_t r = 0; r < num_runs; ++r) {
    const std::uint64_t seed = base_seed + r;
    const MultiModalDataset dataset = realize_dataset(data, seed);
    TrainConfig config = base_config;
    config.seed = seed;
    const TrainResult trained = train(dataset, config);
    RunMetrics run;
    run.seed = seed;
    run.test = evaluate_params(dataset, trained.best_params, dataset.masks.test);
    run.best_epoch = trained.history.best_epoch;
    run.stopped_at_epoch = trained.history.stopped_at_epoch;
    result.runs.push_back(run);
  }
  result.mean = metrics_mean(result.runs);
  result.stddev = metrics_stddev(result.runs, result.mean);
  return result;
}

std::vector<AttentionRow> export_attention(
    const MultiModalDataset& dataset, const ModelParams& params,
    const std::optional<std::vector<std::size_t>>& subset) {
  const ForwardCache cache = forward(dataset, params, Mode::eval);
  const std::vector<int> preds = predict(cache.logits);

  std::vector<std::size_t> nodes;
  if (subset) {
    nodes = *subset;
    for (std::size_t idx : nodes) {
      if (idx >= dataset.num_nodes()) {
        throw std::invalid_argument("export_attention: node index out of range");
      }
    }
  } else {
    for (std::size_t idx : dataset.masks.test) {
      if (preds[idx] == dataset.labels[idx]) nodes.push_back(idx);
    }
  }

  std::vector<AttentionRow> rows;
  rows.reserve(nodes.size());
  for (std::size_t idx : nodes) {
    AttentionRow row;
    row.node = idx;
    row.true_label = dataset.labels[idx];
    row.pred_label = preds[idx];
    row.correct = row.pred_label == row.true_label;
    for (std::size_t i = 0; i < dataset.num_modalities(); ++i) {
      row.coeffs.push_back(cache.attn_coeffs(idx, i));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

AblationResult ablation_run(const LoadedData& data, const TrainConfig& base_config,
                            std::size_t num_runs, std::uint64_t base_seed) {
  AblationResult result;
  for (std::size_t r = 0; r < num_runs; ++r) {
    const std::uint64_t seed = base_seed + r;
    const MultiModalDataset dataset = realize_dataset(data, seed);
    AblationRun run;
    run.seed = seed;
    for (const Variant variant :
         {Variant::full, Variant::no_attention, Variant::mlp_head}) {
      TrainConfig config = base_config;
      config.seed = seed;
      config.variant = variant;
      const TrainResult trained = train(dataset, config);
      const MetricsReport report =
          evaluate_params(dataset, trained.best_params, dataset.masks.test);
      switch (variant) {
        case Variant::full:
          run.full = report;
          run.full_attention = export_attention(dataset, trained.best_params, std::nullopt);
          break;
        case Variant::no_attention:
          run.no_attention = report;
          break;
        case Variant::mlp_head:
          run.mlp_head = report;
          break;
      }
    }
    result.runs.push_back(std::move(run));
  }
  return result;
}

std::vector<SweepEntry> k_sweep(const LoadedData& data, const TrainConfig& base_config,
                                std::size_t num_runs, std::uint64_t base_seed,
                                const std::vector<double>& ks) {
  for (const auto& provided : data.provided_adjacency) {
    if (provided) {
      throw std::invalid_argument("k_sweep: dataset has fixed edge lists; k has no effect");
    }
  }
  if (ks.empty()) {
    throw std::invalid_argument("k_sweep: need at least one k value");
  }
  std::vector<SweepEntry> entries;
  for (double k : ks) {
    SweepEntry entry;
    entry.k = k;
    std::vector<ModalityInput> modalities = build_modalities(data, k, &entry.thresholds);
    for (const ModalityInput& modality : modalities) {
      // self loops are on the diagonal, so this counts 2x undirected edges
      entry.edge_counts.push_back(modality.norm_adj.num_off_diagonal());
    }
    LoadedData with_k = data;
    with_k.k = k;
    entry.result = run_experiment(with_k, base_config, num_runs, base_seed);
    entries.push_back(std::move(entry));
  }
  return entries;
}

GradcheckInstance make_gradcheck_instance(std::uint64_t seed, Variant variant) {
  Rng rng(seed);
  const std::size_t m = 6 + rng.uniform_index(10);           // 6..15
  const std::size_t p = 1 + rng.uniform_index(3);            // 1..3
  const std::size_t c = 2 + rng.uniform_index(2);            // 2..3
  const std::size_t h = rng.bernoulli(0.5) ? 4 : 8;

  GradcheckInstance instance;
  MultiModalDataset& dataset = instance.dataset;
  dataset.num_classes = c;
  dataset.labels.resize(m);
  for (std::size_t n = 0; n < m; ++n) {
    dataset.labels[n] = static_cast<int>(n % c);  // all classes covered
  }
  rng.shuffle(dataset.labels);

  std::vector<std::size_t> feature_dims;
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t d = 3 + rng.uniform_index(5);  // 3..7, varies per modality
    feature_dims.push_back(d);
    DenseMatrix features(m, d);
    for (double& v : features.data()) v = rng.normal();
    auto [adj, report] = build_similarity_network(features, std::min(3.0, double(m - 1)));
    (void)report;
    dataset.modalities.push_back({std::move(features), sym_normalize(adj)});
  }

  // random nonempty mask covering every class so dataset.validate() holds
  for (std::size_t n = 0; n < m; ++n) {
    if (rng.bernoulli(0.6)) instance.mask.push_back(n);
  }
  std::vector<char> covered(c, 0);
  for (std::size_t idx : instance.mask) covered[dataset.labels[idx]] = 1;
  for (std::size_t n = 0; n < m; ++n) {
    if (!covered[dataset.labels[n]]) {
      instance.mask.push_back(n);
      covered[dataset.labels[n]] = 1;
    }
  }
  std::sort(instance.mask.begin(), instance.mask.end());
  dataset.masks.train = instance.mask;

  instance.params = init_params(feature_dims, h, c, rng.next_u64(), variant);
  perturb_from_kinks(dataset, instance.params, 1e-3, rng);
  return instance;
}

void perturb_from_kinks(const MultiModalDataset& dataset, ModelParams& params, double margin,
                        Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const ForwardCache cache = forward(dataset, params, Mode::eval);
    double min_distance = std::numeric_limits<double>::infinity();
    for (const DenseMatrix& pre : cache.pre_activations) {
      for (double v : pre.data()) min_distance = std::min(min_distance, std::abs(v));
    }
    if (params.variant != Variant::no_attention) {
      for (double v : cache.attn_logits.data()) {
        const double raw = v >= 0.0 ? v : v / kLeakyReluSlope;
        min_distance = std::min(min_distance, std::abs(raw));
      }
    }
    if (min_distance > margin) return;
    for (auto& span : param_spans(params)) {
      for (double& v : span) v += rng.uniform(-10.0 * margin, 10.0 * margin);
    }
  }
  throw std::runtime_error("perturb_from_kinks: could not move parameters off a kink");
}

std::vector<GradcheckCase> gradcheck_suite(std::size_t count, std::uint64_t base_seed,
                                           double step) {
  std::vector<GradcheckCase> cases;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t seed = base_seed + i;
    GradcheckInstance instance = make_gradcheck_instance(seed);
    GradcheckCase entry;
    entry.seed = seed;
    entry.num_nodes = instance.dataset.num_nodes();
    entry.num_modalities = instance.dataset.num_modalities();
    entry.hidden = instance.params.hidden_width();
    entry.num_classes = instance.dataset.num_classes;
    entry.max_rel_error =
        finite_difference_check(instance.dataset, instance.params, instance.mask, step);
    cases.push_back(entry);
  }
  return cases;
}

void write_run_metrics_csv(const ExperimentResult& result, const std::string& path) {
  std::ostringstream out;
  out << "run,seed,accuracy,macro_f1,weighted_f1,mcc,best_epoch,stopped_at_epoch\n";
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const RunMetrics& run = result.runs[r];
    out << r << ',' << run.seed << ',' << format_real(run.test.accuracy) << ','
        << format_real(run.test.macro_f1) << ',' << format_real(run.test.weighted_f1) << ','
        << format_real(run.test.mcc) << ',' << run.best_epoch << ',' << run.stopped_at_epoch
        << "\n";
  }
  write_text_file(path, out.str());
}

void write_summary_csv(const ExperimentResult& result, const std::string& path) {
  std::ostringstream out;
  out << "stat,accuracy,macro_f1,weighted_f1,mcc\n";
  out << "mean," << format_real(result.mean.accuracy) << ',' << format_real(result.mean.macro_f1)
      << ',' << format_real(result.mean.weighted_f1) << ',' << format_real(result.mean.mcc)
      << "\n";
  out << "stddev," << format_real(result.stddev.accuracy) << ','
      << format_real(result.stddev.macro_f1) << ',' << format_real(result.stddev.weighted_f1)
      << ',' << format_real(result.stddev.mcc) << "\n";
  write_text_file(path, out.str());
}

void write_history_csv(const TrainHistory& history, const std::string& path) {
  std::ostringstream out;
  out << "epoch,train_loss,val_loss,val_macro_f1\n";
  for (std::size_t e = 0; e < history.epochs.size(); ++e) {
    const EpochRecord& rec = history.epochs[e];
    out << (e + 1) << ',' << format_real(rec.train_loss) << ',' << format_real(rec.val_loss)
        << ',' << format_real(rec.val_macro_f1) << "\n";
  }
  write_text_file(path, out.str());
}

void write_attention_csv(const std::vector<AttentionRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "node_id,true_label,pred_label,correct";
  const std::size_t p = rows.empty() ? 0 : rows.front().coeffs.size();
  for (std::size_t i = 0; i < p; ++i) out << ",attn_" << i;
  out << "\n";
  for (const AttentionRow& row : rows) {
    out << row.node << ',' << row.true_label << ',' << row.pred_label << ','
        << (row.correct ? 1 : 0);
    for (double c : row.coeffs) out << ',' << format_real(c);
    out << "\n";
  }
  write_text_file(path, out.str());
}

void write_ablation_csv(const AblationResult& result, const std::string& path) {
  const auto column = [&](auto getter) {
    std::vector<RunMetrics> runs;
    for (const AblationRun& run : result.runs) runs.push_back({run.seed, getter(run), 0, 0});
    const MetricsReport mean = metrics_mean(runs);
    const MetricsReport stddev = metrics_stddev(runs, mean);
    return std::pair{mean, stddev};
  };
  const auto [full_mean, full_std] = column([](const AblationRun& r) { return r.full; });
  const auto [noatt_mean, noatt_std] =
      column([](const AblationRun& r) { return r.no_attention; });
  const auto [mlp_mean, mlp_std] = column([](const AblationRun& r) { return r.mlp_head; });

  std::ostringstream out;
  out << "variant,attention,graph_prediction,mean_macro_f1,std_macro_f1\n";
  out << "no-attention,0,1," << format_real(noatt_mean.macro_f1) << ','
      << format_real(noatt_std.macro_f1) << "\n";
  out << "mlp-head,1,0," << format_real(mlp_mean.macro_f1) << ','
      << format_real(mlp_std.macro_f1) << "\n";
  out << "full,1,1," << format_real(full_mean.macro_f1) << ','
      << format_real(full_std.macro_f1) << "\n";
  write_text_file(path, out.str());
}

void write_sweep_csv(const std::vector<SweepEntry>& entries, const std::string& path) {
  std::ostringstream out;
  out << "k,modality,epsilon,achieved_avg_degree,edge_count,mean_macro_f1,std_macro_f1\n";
  for (const SweepEntry& entry : entries) {
    for (std::size_t i = 0; i < entry.edge_counts.size(); ++i) {
      out << format_real(entry.k) << ',' << i << ',';
      if (entry.thresholds[i]) {
        out << format_real(entry.thresholds[i]->epsilon) << ','
            << format_real(entry.thresholds[i]->achieved_avg_degree);
      } else {
        out << ",";
      }
      out << ',' << entry.edge_counts[i] << ',' << format_real(entry.result.mean.macro_f1)
          << ',' << format_real(entry.result.stddev.macro_f1) << "\n";
    }
  }
  write_text_file(path, out.str());
}

void write_threshold_csv(const std::vector<std::string>& names,
                         const std::vector<std::optional<ThresholdReport>>& reports,
                         const std::string& path) {
  std::ostringstream out;
  out << "modality,epsilon,achieved_avg_degree,requested_k\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << names[i] << ',';
    if (reports[i]) {
      out << format_real(reports[i]->epsilon) << ','
          << format_real(reports[i]->achieved_avg_degree) << ','
          << format_real(reports[i]->requested_k);
    } else {
      out << ",,";
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

void write_gradcheck_csv(const std::vector<GradcheckCase>& cases, const std::string& path) {
  std::ostringstream out;
  out << "seed,num_nodes,num_modalities,hidden,num_classes,max_rel_error\n";
  for (const GradcheckCase& c : cases) {
    out << c.seed << ',' << c.num_nodes << ',' << c.num_modalities << ',' << c.hidden << ','
        << c.num_classes << ',' << format_real(c.max_rel_error) << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace igcn
