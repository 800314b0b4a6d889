#pragma once

#include <optional>
#include <string>
#include <vector>

#include "igcn/graph_build.hpp"
#include "igcn/model.hpp"

namespace igcn {

struct ModalitySpec {
  std::string name;
  std::string features_path;
  std::optional<std::string> edge_list_path;  // built from features when absent
};

struct SplitPaths {
  std::string train;
  std::string validation;
  std::string test;
};

struct DatasetManifest {
  std::vector<ModalitySpec> modalities;
  std::string labels_path;
  std::optional<SplitPaths> fixed_splits;
  double k = 5.0;  // average-degree parameter for built similarity networks
};

/// Parses a manifest JSON file; relative paths resolve against the manifest
/// file's directory.
DatasetManifest load_manifest(const std::string& path);
/// Same schema from an in-memory JSON document, resolving against base_dir.
DatasetManifest parse_manifest_json_string(const std::string& text, const std::string& base_dir);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

/// Loaded-but-not-realized data: features, labels, and any provided raw
/// adjacencies (no self loops). Graph construction and splitting happen in
/// realize_dataset so experiment harnesses can re-split or rebuild per k.
struct LoadedData {
  std::vector<std::string> modality_names;
  std::vector<DenseMatrix> features;
  std::vector<std::optional<SparseAdjacency>> provided_adjacency;
  std::vector<int> labels;
  std::size_t num_classes = 0;
  std::optional<SplitMask> fixed_split;
  double k = 5.0;
};

LoadedData load_data(const DatasetManifest& manifest);

/// Builds each modality's normalized adjacency (provided edges or a
/// similarity network with average degree >= k) and reports thresholds for
/// the built ones.
std::vector<ModalityInput> build_modalities(const LoadedData& data, double k,
                                            std::vector<std::optional<ThresholdReport>>* reports);

/// Graphs with the manifest k plus the fixed split or a fresh stratified
/// 60/20/20 split seeded by split_seed.
MultiModalDataset realize_dataset(const LoadedData& data, std::uint64_t split_seed);
MultiModalDataset realize_dataset_with_k(const LoadedData& data, double k,
                                         std::uint64_t split_seed);

MultiModalDataset load_dataset(const DatasetManifest& manifest, std::uint64_t split_seed);

// --- file primitives ---

DenseMatrix load_features_csv(const std::string& path);
void save_features_csv(const DenseMatrix& features, const std::string& path);

/// Returns labels plus the class count (max label + 1); requires every
/// class in [0, max] to appear.
std::pair<std::vector<int>, std::size_t> load_labels_csv(const std::string& path);
void save_labels_csv(const std::vector<int>& labels, const std::string& path);

/// Edge list rows are (src,dst,weight); both orientations may appear. Rows
/// must not put an entry on the diagonal (self loops are added later).
SparseAdjacency load_edge_list_csv(const std::string& path, std::size_t num_nodes);
/// Writes each undirected edge once with src < dst.
void save_edge_list_csv(const SparseAdjacency& adj, const std::string& path);

std::vector<std::size_t> load_index_csv(const std::string& path);
void save_index_csv(const std::vector<std::size_t>& indices, const std::string& path);

}  // namespace igcn
