#include "seizure/evaluation.hpp"

namespace seizure {

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw DimensionError("predictions and labels differ in length");
  }
  if (labels.empty()) throw InvalidArgument("cannot score an empty prediction set");
  Metrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == 1;
    const bool y = labels[i] == 1;
    if (p && y) ++m.tp;
    else if (p) ++m.fp;
    else if (y) ++m.fn;
    else ++m.tn;
  }
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.recall = ratio(m.tp, m.tp + m.fn);
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.accuracy = ratio(m.tp + m.tn, m.total());
  return m;
}

int majority_label(std::span<const int> labels) {
  std::size_t pos = 0;
  for (const int y : labels) pos += y == 1 ? 1 : 0;
  return 2 * pos > labels.size() ? 1 : 0;
}

Metrics majority_baseline(std::span<const int> labels) {
  if (labels.empty()) throw InvalidArgument("majority baseline needs labels");
  const std::vector<int> predictions(labels.size(), majority_label(labels));
  return compute_metrics(predictions, labels);
}

}  // namespace seizure
