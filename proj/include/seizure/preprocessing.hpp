#pragma once

#include <span>
#include <utility>
#include <vector>

#include "seizure/ingestion.hpp"

namespace seizure {

using FeatureVector = std::vector<double>;

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  // Nearest-rank 2.5th / 97.5th percentiles of the z-scored channel.
  std::vector<double> low_percentile;
  std::vector<double> high_percentile;
};

// 1-based nearest rank: the smallest value with at least pct% of the data at
// or below it.
double nearest_rank_percentile(std::span<const double> sorted, double pct);

// Sets values above `high` to +2 and values below `low` to -2.
void clamp_to_truncation(std::span<double> values, double low, double high);

// Per-channel z-score followed by 2.5% / 97.5% truncation to -2 / +2.
// A constant channel becomes all zeros.
std::pair<Record, ChannelStats> normalize_record(const Record& record);

class MinMaxScaler {
 public:
  MinMaxScaler() = default;
  MinMaxScaler(std::vector<double> mins, std::vector<double> maxs);

  static MinMaxScaler fit(std::span<const FeatureVector> vectors);

  // (x - min) / (max - min) clamped to [0, 1]; 0.5 where min == max.
  FeatureVector apply(std::span<const double> v) const;

  std::size_t dimension() const { return mins_.size(); }
  bool empty() const { return mins_.empty(); }
  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }

  friend bool operator==(const MinMaxScaler&, const MinMaxScaler&) = default;

 private:
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

inline MinMaxScaler fit_scaler(std::span<const FeatureVector> vectors) {
  return MinMaxScaler::fit(vectors);
}

inline FeatureVector apply_scaler(const MinMaxScaler& scaler, std::span<const double> v) {
  return scaler.apply(v);
}

}  // namespace seizure
