#pragma once

#include <cstddef>
#include <vector>

namespace igcn {

/// Disjoint train/validation/test node index sets; union need not cover all
/// nodes but must stay within [0, num_nodes).
struct SplitMask {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;

  void validate(std::size_t num_nodes) const;
};

}  // namespace igcn
