#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "seizure/classifiers.hpp"
#include "seizure/ingestion.hpp"
#include "seizure/preprocessing.hpp"

namespace seizure {

// One featurized one-second window.
struct FeatureRow {
  std::string patient_id;
  std::size_t window_index = 0;
  int label = 0;
  FeatureVector features;  // raw, unscaled
};

// normalize -> label -> features. Window indices start at `first_index`.
std::vector<FeatureRow> featurize_record(const Record& record, const SeizureAnnotations& ann,
                                         std::size_t first_index = 0);

// Header `patient_id,window_index,label,f0..f{D-1}`. Features are scaled
// when a scaler is given.
void write_feature_csv(std::span<const FeatureRow> rows, const std::filesystem::path& path,
                       const MinMaxScaler* scaler = nullptr);
std::vector<FeatureRow> read_feature_csv(const std::filesystem::path& path);

std::map<std::string, std::vector<FeatureRow>> group_by_patient(std::span<const FeatureRow> rows);

Dataset to_dataset(std::span<const FeatureRow> rows, const MinMaxScaler* scaler = nullptr);
std::vector<FeatureVector> raw_features(std::span<const FeatureRow> rows);

}  // namespace seizure
