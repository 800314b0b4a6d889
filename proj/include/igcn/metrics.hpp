#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "igcn/split_mask.hpp"

namespace igcn {

/// Rows index the true class, columns the predicted class.
struct ConfusionMatrix {
  std::size_t num_classes = 0;
  std::vector<long> counts;  // num_classes x num_classes, row-major

  long& at(std::size_t true_class, std::size_t pred_class) {
    return counts[true_class * num_classes + pred_class];
  }
  long at(std::size_t true_class, std::size_t pred_class) const {
    return counts[true_class * num_classes + pred_class];
  }
  long total() const;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  double mcc = 0.0;
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                          std::size_t num_classes);

/// Accuracy, macro/weighted F1 (per-class F1 defined as 0 when precision
/// and recall are both 0), and the Gorodkin multiclass MCC (0 when a
/// marginal is degenerate).
MetricsReport metrics(const ConfusionMatrix& conf);

/// Per-class seeded shuffle partitioned by largest-remainder apportionment,
/// so the three parts exactly cover each class. Ties in the remainder go to
/// the earlier split (train, validation, test). Every class needs at least
/// 3 samples.
SplitMask stratified_split(const std::vector<int>& labels,
                           const std::array<double, 3>& ratios, std::uint64_t seed);

}  // namespace igcn
