#include "igcn/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "igcn/rng.hpp"

namespace igcn {

void SyntheticSpec::validate() const {
  if (num_nodes < num_classes * 3 || num_classes < 2 || num_modalities < 1) {
    throw std::invalid_argument(
        "SyntheticSpec: need >= 2 classes, >= 1 modality, >= 3 nodes per class");
  }
  if (feature_dims.size() != num_modalities) {
    throw std::invalid_argument("SyntheticSpec: feature_dims must list one dim per modality");
  }
  if (informative_modality.size() != num_classes) {
    throw std::invalid_argument(
        "SyntheticSpec: informative_modality must map every class to a modality");
  }
  for (std::size_t mod : informative_modality) {
    if (mod >= num_modalities) {
      throw std::invalid_argument("SyntheticSpec: informative modality index out of range");
    }
  }
  if (noise_scale < 0.0 || separation <= 0.0) {
    throw std::invalid_argument("SyntheticSpec: need noise_scale >= 0 and separation > 0");
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  // class mean directions, scaled to `separation`, in each class's modality
  std::vector<std::vector<double>> class_means(spec.num_classes);
  for (std::size_t y = 0; y < spec.num_classes; ++y) {
    const std::size_t dim = spec.feature_dims[spec.informative_modality[y]];
    std::vector<double> mean(dim);
    double norm_sq = 0.0;
    for (double& v : mean) {
      v = rng.normal();
      norm_sq += v * v;
    }
    const double scale = spec.separation / std::sqrt(norm_sq);
    for (double& v : mean) v *= scale;
    class_means[y] = std::move(mean);
  }

  SyntheticData data;
  data.labels.resize(spec.num_nodes);
  for (std::size_t n = 0; n < spec.num_nodes; ++n) {
    data.labels[n] = static_cast<int>(n % spec.num_classes);
  }
  for (std::size_t i = 0; i < spec.num_modalities; ++i) {
    data.features.emplace_back(spec.num_nodes, spec.feature_dims[i]);
  }
  for (std::size_t n = 0; n < spec.num_nodes; ++n) {
    const std::size_t y = static_cast<std::size_t>(data.labels[n]);
    const std::size_t informative = spec.informative_modality[y];
    for (std::size_t i = 0; i < spec.num_modalities; ++i) {
      double* row = data.features[i].row_ptr(n);
      for (std::size_t j = 0; j < spec.feature_dims[i]; ++j) {
        row[j] = i == informative ? class_means[y][j] + spec.noise_scale * rng.normal()
                                  : rng.normal();
      }
    }
  }
  return data;
}

LoadedData to_loaded_data(const SyntheticData& data, double k) {
  LoadedData loaded;
  loaded.k = k;
  loaded.labels = data.labels;
  std::size_t max_label = 0;
  for (int label : data.labels) max_label = std::max<std::size_t>(max_label, label);
  loaded.num_classes = max_label + 1;
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    loaded.modality_names.push_back("mod" + std::to_string(i));
    loaded.features.push_back(data.features[i]);
    loaded.provided_adjacency.emplace_back(std::nullopt);
  }
  return loaded;
}

MultiModalDataset make_synthetic_dataset(const SyntheticSpec& spec, double k,
                                         std::uint64_t split_seed) {
  return realize_dataset(to_loaded_data(generate_synthetic(spec), k), split_seed);
}

DatasetManifest save_synthetic(const SyntheticData& data, double k,
                               const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  DatasetManifest manifest;
  manifest.k = k;
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    const std::string name = "mod" + std::to_string(i);
    const std::string path = (fs::path(out_dir) / (name + "_features.csv")).string();
    save_features_csv(data.features[i], path);
    manifest.modalities.push_back({name, path, std::nullopt});
  }
  manifest.labels_path = (fs::path(out_dir) / "labels.csv").string();
  save_labels_csv(data.labels, manifest.labels_path);
  save_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
  return manifest;
}

}  // namespace igcn
