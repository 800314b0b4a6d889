#pragma once

#include <cstdint>
#include <vector>

#include "igcn/dataset_io.hpp"
#include "igcn/model.hpp"

namespace igcn {

/// Generator spec for a multi-modal dataset where each class carries its
/// signal in one designated modality and looks like noise everywhere else.
struct SyntheticSpec {
  std::size_t num_nodes = 60;
  std::size_t num_classes = 3;
  std::size_t num_modalities = 2;
  std::vector<std::size_t> feature_dims;          // one per modality
  std::vector<std::size_t> informative_modality;  // one per class
  double noise_scale = 0.5;
  double separation = 4.0;  // norm of each class mean in its modality
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  std::vector<DenseMatrix> features;  // one per modality
  std::vector<int> labels;
};

/// Class labels cycle through nodes (balanced up to remainder). A node's
/// informative modality draws from its class mean plus noise_scale-scaled
/// Gaussian noise; all other modalities are standard normal noise.
/// Deterministic in spec.seed.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Wraps generated features as loader output so the experiment harnesses
/// can re-split and rebuild graphs exactly as with file-backed data.
LoadedData to_loaded_data(const SyntheticData& data, double k);

/// Convenience: generate, build similarity networks with the given k,
/// stratified-split with split_seed.
MultiModalDataset make_synthetic_dataset(const SyntheticSpec& spec, double k,
                                         std::uint64_t split_seed);

/// Persists features, labels, and a manifest under out_dir.
DatasetManifest save_synthetic(const SyntheticData& data, double k,
                               const std::string& out_dir);

}  // namespace igcn
