#pragma once

#include <string>

#include "igcn/model.hpp"

namespace igcn {

/// Versioned binary container for model parameters: magic bytes, format
/// version, variant, shape table, then all tensors as little-endian 64-bit
/// reals in the param_spans order.
void save_params(const ModelParams& params, const std::string& path);
ModelParams load_params(const std::string& path);

}  // namespace igcn
