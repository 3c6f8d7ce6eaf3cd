#include "seizure/costmodel.hpp"

#include <cmath>

#include "seizure/error.hpp"

namespace seizure {

void CostParams::validate() const {
  const double values[] = {window, train_windows, channels, features, bits, neighbors, dbn_layers};
  for (const double v : values) {
    if (!(v > 0.0)) throw InvalidArgument("cost parameters must be positive");
  }
  const double ratios[] = {alpha_peak, alpha_cnn, alpha_svm};
  for (const double r : ratios) {
    if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("cost ratios must lie in (0, 1]");
  }
}

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kSimpleFeatures: return "SF";
    case ClassifierKind::kKnn: return "KNN";
    case ClassifierKind::kCnn: return "CNN";
    case ClassifierKind::kSvm: return "SVM";
    case ClassifierKind::kLr: return "LR";
    case ClassifierKind::kDbn: return "DBN";
  }
  return "?";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
  for (const auto k : {ClassifierKind::kSimpleFeatures, ClassifierKind::kKnn, ClassifierKind::kCnn,
                       ClassifierKind::kSvm, ClassifierKind::kLr, ClassifierKind::kDbn}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown classifier kind '" + name + "'");
}

double sf_ops(const CostParams& p) {
  return 19.0 * p.window + 16.0 * p.alpha_peak * p.window + 10.0;
}

double memory_bits(ClassifierKind kind, const CostParams& p) {
  const double cm = p.channels * p.features;
  const double t = p.train_windows;
  const double r = p.bits;
  switch (kind) {
    case ClassifierKind::kSimpleFeatures: return 0.0;
    case ClassifierKind::kKnn: return t * r * (cm + 1.0);
    case ClassifierKind::kCnn: return p.alpha_cnn * t * r * (cm + 1.0);
    case ClassifierKind::kSvm: return p.alpha_svm * t * r * (cm + 2.0);
    case ClassifierKind::kLr: return r * (cm + 2.0);
    // L layers of roughly CM x CM weights on top of the LR output layer.
    case ClassifierKind::kDbn: return r * (cm + 2.0) + p.dbn_layers * r * cm * cm;
  }
  throw InvalidArgument("unknown classifier kind");
}

double computation_ops(ClassifierKind kind, const CostParams& p) {
  const double cm = p.channels * p.features;
  const double t = p.train_windows;
  const double n = p.neighbors;
  const double sf = sf_ops(p);
  switch (kind) {
    case ClassifierKind::kSimpleFeatures: return sf;
    case ClassifierKind::kKnn: return 3.0 * t * (cm + n) + (n + 1.0) + sf;
    case ClassifierKind::kCnn: return 3.0 * p.alpha_cnn * t * (cm + n) + (n + 1.0) + sf;
    case ClassifierKind::kSvm: return 2.0 * cm + p.alpha_svm * t + 5.0 + sf;
    case ClassifierKind::kLr: return 2.0 * cm + 5.0 + sf;
    case ClassifierKind::kDbn: return 2.0 * cm + 5.0 + sf + p.dbn_layers * cm * (2.0 * cm + 1.0);
  }
  throw InvalidArgument("unknown classifier kind");
}

const CostRow& CostReport::row(ClassifierKind kind) const {
  for (const auto& r : rows) {
    if (r.kind == kind) return r;
  }
  throw InvalidArgument("classifier " + to_string(kind) + " not in report");
}

CostReport relative_report(const CostParams& p) {
  p.validate();
  CostReport report;
  report.params = p;
  const double lr_mem = memory_bits(ClassifierKind::kLr, p);
  const double lr_ops = computation_ops(ClassifierKind::kLr, p);
  for (const auto k : {ClassifierKind::kSimpleFeatures, ClassifierKind::kKnn, ClassifierKind::kCnn,
                       ClassifierKind::kSvm, ClassifierKind::kLr, ClassifierKind::kDbn}) {
    CostRow row;
    row.kind = k;
    row.memory_bits = memory_bits(k, p);
    row.computation_ops = computation_ops(k, p);
    row.memory_ratio = row.memory_bits / lr_mem;
    row.computation_ratio = row.computation_ops / lr_ops;
    report.rows.push_back(row);
  }
  return report;
}

ActualDbnCost actual_dbn_cost(const std::vector<std::size_t>& layer_sizes, const CostParams& p) {
  if (layer_sizes.size() < 2) throw InvalidArgument("layer sizes need an input and a hidden width");
  ActualDbnCost cost;
  double params = 0.0;
  double ops = sf_ops(p);
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    const auto in = static_cast<double>(layer_sizes[l - 1]);
    const auto out = static_cast<double>(layer_sizes[l]);
    params += in * out + out;
    ops += out * (2.0 * in + 1.0);
  }
  // Softmax output: `top` weights and a bias per class, then the same
  // constant decision overhead LR pays.
  const auto top = static_cast<double>(layer_sizes.back());
  params += 2.0 * (top + 1.0);
  ops += 2.0 * (2.0 * top) + 5.0;
  cost.memory_bits = params * p.bits;
  cost.computation_ops = ops;
  return cost;
}

}  // namespace seizure
