#include "igcn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "igcn/rng.hpp"

namespace igcn {

long ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0L);
}

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                          std::size_t num_classes) {
  if (y_true.empty() || y_true.size() != y_pred.size()) {
    throw std::invalid_argument("confusion: inputs must be nonempty and equal length");
  }
  ConfusionMatrix conf;
  conf.num_classes = num_classes;
  conf.counts.assign(num_classes * num_classes, 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= num_classes ||
        static_cast<std::size_t>(p) >= num_classes) {
      throw std::invalid_argument("confusion: label out of range");
    }
    ++conf.at(static_cast<std::size_t>(t), static_cast<std::size_t>(p));
  }
  return conf;
}

MetricsReport metrics(const ConfusionMatrix& conf) {
  const std::size_t c = conf.num_classes;
  const double total = static_cast<double>(conf.total());
  if (total < 1.0) {
    throw std::invalid_argument("metrics: confusion matrix is empty");
  }

  double trace = 0.0;
  std::vector<double> true_marginal(c, 0.0), pred_marginal(c, 0.0);
  for (std::size_t t = 0; t < c; ++t) {
    for (std::size_t p = 0; p < c; ++p) {
      const double n = static_cast<double>(conf.at(t, p));
      true_marginal[t] += n;
      pred_marginal[p] += n;
      if (t == p) trace += n;
    }
  }

  MetricsReport report;
  report.accuracy = trace / total;

  double macro_sum = 0.0;
  double weighted_sum = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    const double tp = static_cast<double>(conf.at(k, k));
    const double precision = pred_marginal[k] > 0.0 ? tp / pred_marginal[k] : 0.0;
    const double recall = true_marginal[k] > 0.0 ? tp / true_marginal[k] : 0.0;
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    macro_sum += f1;
    weighted_sum += true_marginal[k] * f1;
  }
  report.macro_f1 = macro_sum / static_cast<double>(c);
  report.weighted_f1 = weighted_sum / total;

  // Gorodkin R_K statistic
  double cross = 0.0, pred_sq = 0.0, true_sq = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    cross += pred_marginal[k] * true_marginal[k];
    pred_sq += pred_marginal[k] * pred_marginal[k];
    true_sq += true_marginal[k] * true_marginal[k];
  }
  const double numerator = trace * total - cross;
  const double denom_pred = total * total - pred_sq;
  const double denom_true = total * total - true_sq;
  report.mcc = (denom_pred > 0.0 && denom_true > 0.0)
                   ? numerator / std::sqrt(denom_pred * denom_true)
                   : 0.0;
  return report;
}

SplitMask stratified_split(const std::vector<int>& labels,
                           const std::array<double, 3>& ratios, std::uint64_t seed) {
  if (labels.empty()) {
    throw std::invalid_argument("stratified_split: empty labels");
  }
  const double ratio_sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(ratio_sum - 1.0) > 1e-9) {
    throw std::invalid_argument("stratified_split: ratios must sum to 1");
  }
  const int max_label = *std::max_element(labels.begin(), labels.end());
  if (*std::min_element(labels.begin(), labels.end()) < 0) {
    throw std::invalid_argument("stratified_split: negative label");
  }
  const std::size_t num_classes = static_cast<std::size_t>(max_label) + 1;

  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  for (const auto& members : by_class) {
    if (members.size() < 3) {
      throw std::invalid_argument("stratified_split: every class needs at least 3 samples");
    }
  }

  Rng rng(seed);
  SplitMask mask;
  std::vector<std::size_t>* parts[3] = {&mask.train, &mask.validation, &mask.test};
  for (auto& members : by_class) {
    rng.shuffle(members);
    const double n = static_cast<double>(members.size());
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t r = 0; r < 3; ++r) {
      const double quota = n * ratios[r];
      sizes[r] = static_cast<std::size_t>(std::floor(quota));
      remainders[r] = quota - std::floor(quota);
      assigned += sizes[r];
    }
    // largest remainder first; remainder ties go to the earlier split
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (std::size_t extra = 0; extra < members.size() - assigned; ++extra) {
      ++sizes[order[extra % 3]];
    }
    std::size_t cursor = 0;
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t j = 0; j < sizes[r]; ++j) {
        parts[r]->push_back(members[cursor++]);
      }
    }
  }
  for (auto* part : parts) std::sort(part->begin(), part->end());
  return mask;
}

}  // namespace igcn
