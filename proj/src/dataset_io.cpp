#include "igcn/dataset_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "igcn/csv.hpp"
#include "igcn/metrics.hpp"

namespace igcn {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve(const fs::path& base_dir, const std::string& path) {
  fs::path p(path);
  return p.is_absolute() ? p.string() : (base_dir / p).string();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
  }
}

void check_node_column(const CsvTable& table, const std::string& path) {
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const long id = parse_integer(table.rows[i][0], path);
    if (id != static_cast<long>(i)) {
      throw std::runtime_error(path + ": node ids must be 0-based and ascending");
    }
  }
}

}  // namespace

namespace {

DatasetManifest manifest_from_json(const json& doc, const fs::path& base_dir,
                                   const std::string& context) {
  DatasetManifest manifest;
  if (!doc.contains("modalities") || !doc["modalities"].is_array() ||
      doc["modalities"].empty()) {
    throw std::runtime_error(context + ": manifest needs a nonempty 'modalities' array");
  }
  for (const json& entry : doc["modalities"]) {
    ModalitySpec spec;
    spec.name = entry.at("name").get<std::string>();
    spec.features_path = resolve(base_dir, entry.at("features").get<std::string>());
    if (entry.contains("edges")) {
      spec.edge_list_path = resolve(base_dir, entry["edges"].get<std::string>());
    }
    manifest.modalities.push_back(std::move(spec));
  }
  manifest.labels_path = resolve(base_dir, doc.at("labels").get<std::string>());
  if (doc.contains("k")) manifest.k = doc["k"].get<double>();
  if (doc.contains("splits")) {
    const json& splits = doc["splits"];
    manifest.fixed_splits = SplitPaths{
        resolve(base_dir, splits.at("train").get<std::string>()),
        resolve(base_dir, splits.at("validation").get<std::string>()),
        resolve(base_dir, splits.at("test").get<std::string>()),
    };
  }
  return manifest;
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
  return manifest_from_json(read_json_file(path), fs::path(path).parent_path(), path);
}

DatasetManifest parse_manifest_json_string(const std::string& text,
                                           const std::string& base_dir) {
  try {
    return manifest_from_json(json::parse(text), fs::path(base_dir), "inline manifest");
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed inline manifest JSON: ") + e.what());
  }
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  json doc;
  doc["k"] = manifest.k;
  doc["labels"] = manifest.labels_path;
  doc["modalities"] = json::array();
  for (const ModalitySpec& spec : manifest.modalities) {
    json entry;
    entry["name"] = spec.name;
    entry["features"] = spec.features_path;
    if (spec.edge_list_path) entry["edges"] = *spec.edge_list_path;
    doc["modalities"].push_back(entry);
  }
  if (manifest.fixed_splits) {
    doc["splits"] = {{"train", manifest.fixed_splits->train},
                     {"validation", manifest.fixed_splits->validation},
                     {"test", manifest.fixed_splits->test}};
  }
  write_text_file(path, doc.dump(2) + "\n");
}

DenseMatrix load_features_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 2 || table.rows.empty()) {
    throw std::runtime_error(path + ": feature file needs node_id plus feature columns");
  }
  check_node_column(table, path);
  DenseMatrix features(table.rows.size(), table.header.size() - 1);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 1; j < table.header.size(); ++j) {
      features(i, j - 1) = parse_real(table.rows[i][j], path);
    }
  }
  check_finite(features, "load_features_csv");
  return features;
}

void save_features_csv(const DenseMatrix& features, const std::string& path) {
  std::ostringstream out;
  out << "node_id";
  for (std::size_t j = 0; j < features.cols(); ++j) out << ",f" << j;
  out << "\n";
  for (std::size_t i = 0; i < features.rows(); ++i) {
    out << i;
    for (std::size_t j = 0; j < features.cols(); ++j) {
      out << ',' << format_real(features(i, j));
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

std::pair<std::vector<int>, std::size_t> load_labels_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 2 || table.rows.empty()) {
    throw std::runtime_error(path + ": label file needs node_id,label");
  }
  check_node_column(table, path);
  std::vector<int> labels;
  labels.reserve(table.rows.size());
  long max_label = -1;
  for (const auto& row : table.rows) {
    const long label = parse_integer(row[1], path);
    if (label < 0) {
      throw std::runtime_error(path + ": labels must be non-negative");
    }
    max_label = std::max(max_label, label);
    labels.push_back(static_cast<int>(label));
  }
  const std::size_t num_classes = static_cast<std::size_t>(max_label) + 1;
  std::vector<char> present(num_classes, 0);
  for (int label : labels) present[static_cast<std::size_t>(label)] = 1;
  if (!std::all_of(present.begin(), present.end(), [](char c) { return c != 0; })) {
    throw std::runtime_error(path + ": class indices must be contiguous from 0");
  }
  return {std::move(labels), num_classes};
}

void save_labels_csv(const std::vector<int>& labels, const std::string& path) {
  std::ostringstream out;
  out << "node_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << i << ',' << labels[i] << "\n";
  }
  write_text_file(path, out.str());
}

SparseAdjacency load_edge_list_csv(const std::string& path, std::size_t num_nodes) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 3) {
    throw std::runtime_error(path + ": edge list needs src,dst,weight columns");
  }
  std::vector<Edge> edges;
  edges.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    const long src = parse_integer(row[0], path);
    const long dst = parse_integer(row[1], path);
    const double weight = parse_real(row[2], path);
    if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= num_nodes ||
        static_cast<std::size_t>(dst) >= num_nodes) {
      throw std::runtime_error(path + ": edge endpoint out of range");
    }
    if (src == dst) {
      throw std::runtime_error(path + ": self loops are not allowed in edge lists");
    }
    if (!(weight > 0.0)) {
      throw std::runtime_error(path + ": edge weights must be positive");
    }
    edges.push_back({static_cast<std::size_t>(src), static_cast<std::size_t>(dst), weight});
  }
  return SparseAdjacency::from_undirected_edges(num_nodes, edges);
}

void save_edge_list_csv(const SparseAdjacency& adj, const std::string& path) {
  std::ostringstream out;
  out << "src,dst,weight\n";
  for (std::size_t r = 0; r < adj.num_nodes(); ++r) {
    for (std::size_t k = adj.row_offsets()[r]; k < adj.row_offsets()[r + 1]; ++k) {
      const std::size_t c = adj.col_indices()[k];
      if (c <= r) continue;  // emit each undirected edge once
      out << r << ',' << c << ',' << format_real(adj.values()[k]) << "\n";
    }
  }
  write_text_file(path, out.str());
}

std::vector<std::size_t> load_index_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 1) {
    throw std::runtime_error(path + ": index file needs a single node_id column");
  }
  std::vector<std::size_t> indices;
  for (const auto& row : table.rows) {
    const long idx = parse_integer(row[0], path);
    if (idx < 0) throw std::runtime_error(path + ": negative node index");
    indices.push_back(static_cast<std::size_t>(idx));
  }
  return indices;
}

void save_index_csv(const std::vector<std::size_t>& indices, const std::string& path) {
  std::ostringstream out;
  out << "node_id\n";
  for (std::size_t idx : indices) out << idx << "\n";
  write_text_file(path, out.str());
}

LoadedData load_data(const DatasetManifest& manifest) {
  if (manifest.modalities.empty()) {
    throw std::runtime_error("load_data: manifest has no modalities");
  }
  LoadedData data;
  data.k = manifest.k;
  auto [labels, num_classes] = load_labels_csv(manifest.labels_path);
  data.labels = std::move(labels);
  data.num_classes = num_classes;
  const std::size_t m = data.labels.size();

  for (const ModalitySpec& spec : manifest.modalities) {
    data.modality_names.push_back(spec.name);
    DenseMatrix features = load_features_csv(spec.features_path);
    if (features.rows() != m) {
      throw std::runtime_error("load_data: row count of " + spec.features_path +
                               " does not match the label file");
    }
    data.features.push_back(std::move(features));
    if (spec.edge_list_path) {
      data.provided_adjacency.emplace_back(load_edge_list_csv(*spec.edge_list_path, m));
    } else {
      data.provided_adjacency.emplace_back(std::nullopt);
    }
  }

  if (manifest.fixed_splits) {
    SplitMask mask;
    mask.train = load_index_csv(manifest.fixed_splits->train);
    mask.validation = load_index_csv(manifest.fixed_splits->validation);
    mask.test = load_index_csv(manifest.fixed_splits->test);
    mask.validate(m);
    data.fixed_split = std::move(mask);
  }
  return data;
}

std::vector<ModalityInput> build_modalities(
    const LoadedData& data, double k,
    std::vector<std::optional<ThresholdReport>>* reports) {
  std::vector<ModalityInput> modalities;
  if (reports) reports->clear();
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    SparseAdjacency with_loops;
    std::optional<ThresholdReport> report;
    if (data.provided_adjacency[i]) {
      with_loops = add_self_loops(*data.provided_adjacency[i]);
    } else {
      auto [adj, threshold_report] = build_similarity_network(data.features[i], k);
      with_loops = std::move(adj);
      report = threshold_report;
    }
    modalities.push_back({data.features[i], sym_normalize(with_loops)});
    if (reports) reports->push_back(report);
  }
  return modalities;
}

MultiModalDataset realize_dataset_with_k(const LoadedData& data, double k,
                                         std::uint64_t split_seed) {
  MultiModalDataset dataset;
  dataset.modalities = build_modalities(data, k, nullptr);
  dataset.labels = data.labels;
  dataset.num_classes = data.num_classes;
  dataset.masks = data.fixed_split
                      ? *data.fixed_split
                      : stratified_split(data.labels, {0.6, 0.2, 0.2}, split_seed);
  dataset.validate();
  return dataset;
}

MultiModalDataset realize_dataset(const LoadedData& data, std::uint64_t split_seed) {
  return realize_dataset_with_k(data, data.k, split_seed);
}

MultiModalDataset load_dataset(const DatasetManifest& manifest, std::uint64_t split_seed) {
  return realize_dataset(load_data(manifest), split_seed);
}

}  // namespace igcn
