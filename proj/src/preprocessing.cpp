#include "seizure/preprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seizure/error.hpp"

namespace seizure {

double nearest_rank_percentile(std::span<const double> sorted, double pct) {
  if (sorted.empty()) throw InvalidArgument("percentile of an empty sequence");
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

void clamp_to_truncation(std::span<double> values, double low, double high) {
  for (auto& v : values) {
    if (v > high) {
      v = 2.0;
    } else if (v < low) {
      v = -2.0;
    }
  }
}

std::pair<Record, ChannelStats> normalize_record(const Record& record) {
  ChannelStats stats;
  std::vector<std::vector<double>> out;
  out.reserve(record.num_channels());
  for (const auto& ch : record.channels()) {
    if (ch.empty()) throw InvalidArgument("cannot normalize an empty channel");
    const auto n = static_cast<double>(ch.size());
    const double mean = std::accumulate(ch.begin(), ch.end(), 0.0) / n;
    double ss = 0.0;
    for (const double x : ch) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / n);
    // Rounding in the mean leaves a residue of a few ulps on constant input.
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) sd = 0.0;

    std::vector<double> z(ch.size(), 0.0);
    double low = 0.0;
    double high = 0.0;
    if (sd > 0.0) {
      for (std::size_t i = 0; i < ch.size(); ++i) z[i] = (ch[i] - mean) / sd;
      std::vector<double> sorted = z;
      std::sort(sorted.begin(), sorted.end());
      low = nearest_rank_percentile(sorted, 2.5);
      high = nearest_rank_percentile(sorted, 97.5);
      clamp_to_truncation(z, low, high);
    }
    stats.mean.push_back(mean);
    stats.stddev.push_back(sd);
    stats.low_percentile.push_back(low);
    stats.high_percentile.push_back(high);
    out.push_back(std::move(z));
  }
  return {Record(record.patient_id(), record.record_id(), std::move(out), record.sample_rate()),
          std::move(stats)};
}

MinMaxScaler::MinMaxScaler(std::vector<double> mins, std::vector<double> maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
  if (mins_.size() != maxs_.size()) throw DimensionError("scaler min/max lengths differ");
  for (std::size_t i = 0; i < mins_.size(); ++i) {
    if (!(mins_[i] <= maxs_[i])) throw InvalidArgument("scaler min exceeds max");
  }
}

MinMaxScaler MinMaxScaler::fit(std::span<const FeatureVector> vectors) {
  if (vectors.empty()) throw InvalidArgument("cannot fit a scaler on no vectors");
  std::vector<double> mins = vectors.front();
  std::vector<double> maxs = vectors.front();
  for (const auto& v : vectors) {
    if (v.size() != mins.size()) throw DimensionError("feature vectors differ in length");
    for (std::size_t i = 0; i < v.size(); ++i) {
      mins[i] = std::min(mins[i], v[i]);
      maxs[i] = std::max(maxs[i], v[i]);
    }
  }
  return MinMaxScaler(std::move(mins), std::move(maxs));
}

FeatureVector MinMaxScaler::apply(std::span<const double> v) const {
  if (v.size() != mins_.size()) {
    throw DimensionError("scaler expects " + std::to_string(mins_.size()) +
                         " features, got " + std::to_string(v.size()));
  }
  FeatureVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double range = maxs_[i] - mins_[i];
    out[i] = range > 0.0 ? std::clamp((v[i] - mins_[i]) / range, 0.0, 1.0) : 0.5;
  }
  return out;
}

}  // namespace seizure
