#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "seizure/classifiers.hpp"
#include "seizure/dbn.hpp"
#include "seizure/preprocessing.hpp"

namespace seizure {

// Container layout (all integers and floats little-endian):
//   "SZDT" | u16 version | u8 tag | u64 input dimension
//   | scaler: u64 n, n f64 mins, n f64 maxs (n = 0 when absent)
//   | provenance: str classifier, str protocol, str holdout, u64 seed
//   | tag-specific payload
// where str = u64 length + bytes. Matrices are row-major f64.
inline constexpr char kModelMagic[4] = {'S', 'Z', 'D', 'T'};
inline constexpr std::uint16_t kModelFormatVersion = 1;

enum class ModelTag : std::uint8_t { kKnn = 1, kCnn = 2, kSvm = 3, kLr = 4, kDbn = 5 };

struct Provenance {
  std::string classifier;  // e.g. "knn5", "svm-rbf", "dbn"
  std::string protocol;    // "single" or "loo"
  std::string holdout;     // patient the split was built around
  std::uint64_t seed = 0;
};

struct TrainedModel {
  std::variant<KnnModel, SvmModel, LrModel, DbnModel> model;
  MinMaxScaler scaler;
  Provenance provenance;

  ModelTag tag() const;
  std::size_t input_dimension() const;
  // Applies the embedded scaler (if any) to raw features, then classifies.
  int predict(std::span<const double> raw_features) const;
  // Classifies features that are already scaled.
  int predict_scaled(std::span<const double> features) const;
};

std::vector<std::uint8_t> serialize(const TrainedModel& model);
TrainedModel deserialize(std::span<const std::uint8_t> bytes);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace seizure
