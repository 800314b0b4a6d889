#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "igcn/csv.hpp"
#include "igcn/experiments.hpp"
#include "igcn/params_io.hpp"
#include "igcn/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
  }
}

struct CliConfig {
  igcn::DatasetManifest manifest;
  igcn::TrainConfig train;
  std::size_t runs = 10;
  std::uint64_t base_seed = 0;
  std::vector<double> k_sweep = {3.0, 5.0, 7.0, 9.0};
};

igcn::TrainConfig parse_train_config(const json& doc) {
  igcn::TrainConfig config;
  if (doc.contains("maxEpochs")) config.max_epochs = doc["maxEpochs"].get<std::size_t>();
  if (doc.contains("minEpochs")) config.min_epochs = doc["minEpochs"].get<std::size_t>();
  if (doc.contains("patience")) config.patience = doc["patience"].get<std::size_t>();
  if (doc.contains("learningRate")) config.learning_rate = doc["learningRate"].get<double>();
  if (doc.contains("hidden")) config.hidden_width = doc["hidden"].get<std::size_t>();
  if (doc.contains("dropout")) config.dropout_rate = doc["dropout"].get<double>();
  if (doc.contains("variant")) {
    const std::string name = doc["variant"].get<std::string>();
    if (name == "full") {
      config.variant = igcn::Variant::full;
    } else if (name == "no-attention") {
      config.variant = igcn::Variant::no_attention;
    } else if (name == "mlp-head") {
      config.variant = igcn::Variant::mlp_head;
    } else {
      throw std::runtime_error("unknown variant '" + name + "'");
    }
  }
  config.validate();
  return config;
}

CliConfig parse_cli_config(const std::string& path) {
  const json doc = read_json(path);
  const fs::path base_dir = fs::path(path).parent_path();

  CliConfig config;
  if (!doc.contains("manifest")) {
    throw std::runtime_error(path + ": config needs a 'manifest' entry (path or object)");
  }
  if (doc["manifest"].is_string()) {
    fs::path manifest_path(doc["manifest"].get<std::string>());
    if (!manifest_path.is_absolute()) manifest_path = base_dir / manifest_path;
    config.manifest = igcn::load_manifest(manifest_path.string());
  } else {
    config.manifest =
        igcn::parse_manifest_json_string(doc["manifest"].dump(), base_dir.string());
  }
  if (doc.contains("train")) config.train = parse_train_config(doc["train"]);
  if (doc.contains("variant")) {
    // variant may sit at the top level next to runs
    json shim;
    shim["variant"] = doc["variant"];
    igcn::TrainConfig parsed = parse_train_config(shim);
    config.train.variant = parsed.variant;
  }
  if (doc.contains("runs")) config.runs = doc["runs"].get<std::size_t>();
  if (doc.contains("baseSeed")) config.base_seed = doc["baseSeed"].get<std::uint64_t>();
  if (doc.contains("kSweep")) config.k_sweep = doc["kSweep"].get<std::vector<double>>();
  if (config.runs < 1) throw std::runtime_error("runs must be at least 1");
  return config;
}

std::string joined(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  if (dir.empty()) throw std::runtime_error("--out-dir is required for this command");
  fs::create_directories(dir);
}

void write_ablation_runs_csv(const igcn::AblationResult& result, const std::string& path) {
  std::ostringstream out;
  out << "run,seed,full_macro_f1,no_attention_macro_f1,mlp_head_macro_f1\n";
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const igcn::AblationRun& run = result.runs[r];
    out << r << ',' << run.seed << ',' << igcn::format_real(run.full.macro_f1) << ','
        << igcn::format_real(run.no_attention.macro_f1) << ','
        << igcn::format_real(run.mlp_head.macro_f1) << "\n";
  }
  igcn::write_text_file(path, out.str());
}

void write_evaluation_csv(const igcn::MultiModalDataset& dataset,
                          const igcn::ModelParams& params, const std::string& path) {
  const auto row = [&](const char* name, const std::vector<std::size_t>& mask) {
    const igcn::MetricsReport report = igcn::evaluate_params(dataset, params, mask);
    std::ostringstream out;
    out << name << ',' << igcn::format_real(report.accuracy) << ','
        << igcn::format_real(report.macro_f1) << ',' << igcn::format_real(report.weighted_f1)
        << ',' << igcn::format_real(report.mcc) << "\n";
    return out.str();
  };
  std::string body = "split,accuracy,macro_f1,weighted_f1,mcc\n";
  body += row("train", dataset.masks.train);
  body += row("validation", dataset.masks.validation);
  body += row("test", dataset.masks.test);
  igcn::write_text_file(path, body);
}

igcn::SyntheticSpec parse_synth_spec(const json& doc) {
  igcn::SyntheticSpec spec;
  if (doc.contains("nodes")) spec.num_nodes = doc["nodes"].get<std::size_t>();
  if (doc.contains("classes")) spec.num_classes = doc["classes"].get<std::size_t>();
  if (doc.contains("modalities")) spec.num_modalities = doc["modalities"].get<std::size_t>();
  if (doc.contains("featureDims")) {
    if (doc["featureDims"].is_array()) {
      spec.feature_dims = doc["featureDims"].get<std::vector<std::size_t>>();
    } else {
      spec.feature_dims.assign(spec.num_modalities, doc["featureDims"].get<std::size_t>());
    }
  } else {
    spec.feature_dims.assign(spec.num_modalities, 8);
  }
  if (doc.contains("informativeModality")) {
    spec.informative_modality = doc["informativeModality"].get<std::vector<std::size_t>>();
  } else {
    for (std::size_t y = 0; y < spec.num_classes; ++y) {
      spec.informative_modality.push_back(y % spec.num_modalities);
    }
  }
  if (doc.contains("noiseScale")) spec.noise_scale = doc["noiseScale"].get<double>();
  if (doc.contains("separation")) spec.separation = doc["separation"].get<double>();
  if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
  spec.validate();
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IGCN: integrative graph convolutional networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string params_path;
  std::string nodes_arg;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::size_t> runs_override;
  std::size_t gradcheck_count = 20;

  const auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "JSON config file");
    if (needs_config) opt->required();
    cmd->add_option("--out-dir", out_dir, "output directory");
    cmd->add_option("--seed", seed_override, "override the base seed");
    cmd->add_option("--runs", runs_override, "override the number of runs");
  };

  auto* cmd_build = app.add_subcommand(
      "build-graphs", "build similarity networks from a dataset manifest");
  add_common(cmd_build, true);

  auto* cmd_synth =
      app.add_subcommand("synth", "generate a synthetic multi-modal dataset");
  add_common(cmd_synth, true);

  auto* cmd_train = app.add_subcommand("train", "train a model on a dataset");
  add_common(cmd_train, true);

  auto* cmd_eval = app.add_subcommand("evaluate", "evaluate saved parameters");
  add_common(cmd_eval, true);
  cmd_eval->add_option("--params", params_path, "saved parameter file")->required();

  auto* cmd_ablate = app.add_subcommand("ablate", "run the three-variant ablation");
  add_common(cmd_ablate, true);

  auto* cmd_sweep = app.add_subcommand("sweep-k", "rerun the protocol across k values");
  add_common(cmd_sweep, true);

  auto* cmd_attn =
      app.add_subcommand("export-attention", "export per-node attention coefficients");
  add_common(cmd_attn, true);
  cmd_attn->add_option("--params", params_path, "saved parameter file")->required();
  cmd_attn->add_option("--nodes", nodes_arg,
                       "comma-separated node ids (default: correct test nodes)");

  auto* cmd_gradcheck =
      app.add_subcommand("gradcheck", "finite-difference gradient verification suite");
  add_common(cmd_gradcheck, false);
  cmd_gradcheck->add_option("--count", gradcheck_count, "number of random instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_build->parsed()) {
      ensure_out_dir(out_dir);
      const igcn::DatasetManifest manifest = igcn::load_manifest(config_path);
      const igcn::LoadedData data = igcn::load_data(manifest);
      std::vector<std::optional<igcn::ThresholdReport>> reports;
      for (std::size_t i = 0; i < data.features.size(); ++i) {
        if (data.provided_adjacency[i]) {
          reports.emplace_back(std::nullopt);
          continue;
        }
        const igcn::SimilarityMatrix sim = igcn::cosine_similarity_matrix(data.features[i]);
        const igcn::ThresholdReport report = igcn::select_threshold(sim, data.k);
        const igcn::SparseAdjacency adj = igcn::threshold_adjacency(sim, report.epsilon);
        igcn::save_edge_list_csv(adj,
                                 joined(out_dir, data.modality_names[i] + "_edges.csv"));
        reports.emplace_back(report);
      }
      igcn::write_threshold_csv(data.modality_names, reports,
                                joined(out_dir, "thresholds.csv"));
    } else if (cmd_synth->parsed()) {
      ensure_out_dir(out_dir);
      const json doc = read_json(config_path);
      igcn::SyntheticSpec spec = parse_synth_spec(doc);
      if (seed_override) spec.seed = *seed_override;
      const double k = doc.contains("k") ? doc["k"].get<double>() : 5.0;
      const igcn::SyntheticData data = igcn::generate_synthetic(spec);
      igcn::save_synthetic(data, k, out_dir);
    } else if (cmd_train->parsed()) {
      ensure_out_dir(out_dir);
      CliConfig config = parse_cli_config(config_path);
      if (seed_override) config.base_seed = *seed_override;
      config.train.seed = config.base_seed;
      const igcn::MultiModalDataset dataset =
          igcn::load_dataset(config.manifest, config.base_seed);
      const igcn::TrainResult result = igcn::train(dataset, config.train);
      igcn::save_params(result.best_params, joined(out_dir, "params.bin"));
      igcn::write_history_csv(result.history, joined(out_dir, "history.csv"));
      write_evaluation_csv(dataset, result.best_params, joined(out_dir, "metrics.csv"));
    } else if (cmd_eval->parsed()) {
      ensure_out_dir(out_dir);
      CliConfig config = parse_cli_config(config_path);
      if (seed_override) config.base_seed = *seed_override;
      const igcn::MultiModalDataset dataset =
          igcn::load_dataset(config.manifest, config.base_seed);
      const igcn::ModelParams params = igcn::load_params(params_path);
      write_evaluation_csv(dataset, params, joined(out_dir, "evaluation.csv"));
    } else if (cmd_ablate->parsed()) {
      ensure_out_dir(out_dir);
      CliConfig config = parse_cli_config(config_path);
      if (seed_override) config.base_seed = *seed_override;
      if (runs_override) config.runs = *runs_override;
      const igcn::LoadedData data = igcn::load_data(config.manifest);
      const igcn::AblationResult result =
          igcn::ablation_run(data, config.train, config.runs, config.base_seed);
      igcn::write_ablation_csv(result, joined(out_dir, "ablation.csv"));
      write_ablation_runs_csv(result, joined(out_dir, "ablation_runs.csv"));
    } else if (cmd_sweep->parsed()) {
      ensure_out_dir(out_dir);
      CliConfig config = parse_cli_config(config_path);
      if (seed_override) config.base_seed = *seed_override;
      if (runs_override) config.runs = *runs_override;
      const igcn::LoadedData data = igcn::load_data(config.manifest);
      const std::vector<igcn::SweepEntry> entries =
          igcn::k_sweep(data, config.train, config.runs, config.base_seed, config.k_sweep);
      igcn::write_sweep_csv(entries, joined(out_dir, "sweep.csv"));
    } else if (cmd_attn->parsed()) {
      ensure_out_dir(out_dir);
      CliConfig config = parse_cli_config(config_path);
      if (seed_override) config.base_seed = *seed_override;
      const igcn::MultiModalDataset dataset =
          igcn::load_dataset(config.manifest, config.base_seed);
      const igcn::ModelParams params = igcn::load_params(params_path);
      std::optional<std::vector<std::size_t>> subset;
      if (!nodes_arg.empty()) {
        subset.emplace();
        std::stringstream stream(nodes_arg);
        std::string token;
        while (std::getline(stream, token, ',')) {
          subset->push_back(
              static_cast<std::size_t>(igcn::parse_integer(token, "--nodes")));
        }
      }
      const std::vector<igcn::AttentionRow> rows =
          igcn::export_attention(dataset, params, subset);
      igcn::write_attention_csv(rows, joined(out_dir, "attention.csv"));
    } else if (cmd_gradcheck->parsed()) {
      const std::uint64_t seed = seed_override.value_or(0);
      const std::vector<igcn::GradcheckCase> cases =
          igcn::gradcheck_suite(gradcheck_count, seed);
      bool all_ok = true;
      for (const igcn::GradcheckCase& c : cases) {
        const bool ok = c.max_rel_error < 1e-4;
        all_ok = all_ok && ok;
        std::cout << (ok ? "ok  " : "FAIL") << " seed=" << c.seed << " m=" << c.num_nodes
                  << " p=" << c.num_modalities << " h=" << c.hidden << " c=" << c.num_classes
                  << " max_rel_error=" << igcn::format_real(c.max_rel_error) << "\n";
      }
      if (!out_dir.empty()) {
        ensure_out_dir(out_dir);
        igcn::write_gradcheck_csv(cases, joined(out_dir, "gradcheck.csv"));
      }
      if (!all_ok) {
        std::cerr << "error: gradient check exceeded the 1e-4 tolerance\n";
        return 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
