#include "seizure/features.hpp"

#include <algorithm>
#include <cmath>

#include "seizure/error.hpp"

namespace seizure {

PeaksValleys detect_peaks_valleys(std::span<const double> window) {
  PeaksValleys pv;
  int prev_sign = 0;
  std::size_t last_nonzero = 0;  // index of the last nonzero difference
  for (std::size_t i = 0; i + 1 < window.size(); ++i) {
    const double d = window[i + 1] - window[i];
    if (d == 0.0) continue;
    const int sign = d > 0.0 ? 1 : -1;
    if (prev_sign == 1 && sign == -1) pv.peaks.push_back(last_nonzero + 1);
    if (prev_sign == -1 && sign == 1) pv.valleys.push_back(last_nonzero + 1);
    prev_sign = sign;
    last_nonzero = i;
  }
  return pv;
}

namespace {

double log_mean_square(std::span<const double> window, const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0.0;
  double sum = 0.0;
  for (const auto k : idx) sum += window[k] * window[k];
  const double ms = sum / static_cast<double>(idx.size());
  return ms > 0.0 ? std::log10(ms) : 0.0;
}

// Sample standard deviation (n - 1 denominator).
double sample_stddev(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (const double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

ChannelFeatures channel_features(std::span<const double> window) {
  if (window.size() < 2) throw InvalidArgument("feature window needs at least 2 samples");
  const auto w = static_cast<double>(window.size());
  ChannelFeatures f;

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const double x : window) {
    sum += x;
    sum_sq += x * x;
  }
  f.area = sum / w;
  f.mean_energy = sum_sq / w;
  f.rms = std::sqrt(f.mean_energy);

  std::size_t falling = 0;
  double abs_steps = 0.0;
  for (std::size_t i = 0; i + 1 < window.size(); ++i) {
    const double d = window[i + 1] - window[i];
    if (d < 0.0) ++falling;
    abs_steps += std::abs(d);
  }
  f.normalized_decay = std::abs(static_cast<double>(falling) / (w - 1.0) - 0.5);
  f.line_length = abs_steps;

  const auto pv = detect_peaks_valleys(window);
  f.peak_amplitude = log_mean_square(window, pv.peaks);
  f.valley_amplitude = log_mean_square(window, pv.valleys);

  const double mean_step = abs_steps / (w - 1.0);
  f.normalized_peak_number =
      mean_step > 0.0 ? static_cast<double>(pv.peaks.size()) / mean_step : 0.0;

  const auto pairs = std::min(pv.peaks.size(), pv.valleys.size());
  if (pairs >= 2) {
    std::vector<double> index_gap(pairs);
    std::vector<double> value_gap(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
      index_gap[i] = static_cast<double>(pv.peaks[i]) - static_cast<double>(pv.valleys[i]);
      value_gap[i] = window[pv.peaks[i]] - window[pv.valleys[i]];
    }
    const double denom = sample_stddev(index_gap) * sample_stddev(value_gap);
    f.peak_variation = denom > 0.0 ? 1.0 / denom : 0.0;
  }
  return f;
}

FeatureVector window_features(const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) throw InvalidArgument("window has no channels");
  const auto width = samples.front().size();
  FeatureVector out;
  out.reserve(samples.size() * kFeaturesPerChannel);
  for (const auto& ch : samples) {
    if (ch.size() != width) throw DimensionError("ragged window: channels differ in length");
    const auto f = channel_features(ch).as_array();
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

std::vector<FeatureVector> record_features(const Record& record) {
  const auto rate = static_cast<std::size_t>(record.sample_rate());
  std::vector<FeatureVector> out(record.duration());
  for (std::size_t s = 0; s < record.duration(); ++s) {
    auto& v = out[s];
    v.reserve(record.num_channels() * kFeaturesPerChannel);
    for (const auto& ch : record.channels()) {
      const auto f = channel_features(std::span(ch).subspan(s * rate, rate)).as_array();
      v.insert(v.end(), f.begin(), f.end());
    }
  }
  return out;
}

}  // namespace seizure
