#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace seizure {

// Inference-time memory (bits) and operation counts for each classifier on
// an embedded target. Defaults are the reference operating point.
struct CostParams {
  double window = 256;           // W, samples per window
  double train_windows = 10000;  // T
  double channels = 23;          // C
  double features = 9;           // M, per channel
  double bits = 32;              // R, bit resolution
  double neighbors = 5;          // N
  double dbn_layers = 2;         // L
  double alpha_peak = 0.125;     // fraction of samples that are peaks
  double alpha_cnn = 0.25;       // CNN store / training set
  double alpha_svm = 0.05;       // support vectors / training set

  // Throws unless every value is positive and every ratio is in (0, 1].
  void validate() const;
};

enum class ClassifierKind { kSimpleFeatures, kKnn, kCnn, kSvm, kLr, kDbn };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

// Feature extraction: 19W + 16 alpha_K W + 10.
double sf_ops(const CostParams& p);
double memory_bits(ClassifierKind kind, const CostParams& p);
double computation_ops(ClassifierKind kind, const CostParams& p);

struct CostRow {
  ClassifierKind kind;
  double memory_bits = 0.0;
  double computation_ops = 0.0;
  double memory_ratio = 0.0;  // relative to LR
  double computation_ratio = 0.0;
};

struct CostReport {
  CostParams params;
  std::vector<CostRow> rows;  // SF, KNN, CNN, SVM, LR, DBN

  const CostRow& row(ClassifierKind kind) const;
};

CostReport relative_report(const CostParams& p);

// Exact costs of a concrete stack of dense layers (input width first, then
// each hidden width) feeding a 2-way output. Counts only parameters used at
// inference: weights and hidden biases, no visible biases.
struct ActualDbnCost {
  double memory_bits = 0.0;
  double computation_ops = 0.0;
};
ActualDbnCost actual_dbn_cost(const std::vector<std::size_t>& layer_sizes, const CostParams& p);

}  // namespace seizure
