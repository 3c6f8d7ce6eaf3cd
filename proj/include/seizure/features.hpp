#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "seizure/preprocessing.hpp"

namespace seizure {

inline constexpr std::size_t kFeaturesPerChannel = 9;

struct PeaksValleys {
  std::vector<std::size_t> peaks;
  std::vector<std::size_t> valleys;
};

// Peaks are + to - turns of the first difference, valleys - to +. A zero
// difference carries the sign of the last nonzero one, and the turn is placed
// at the first sample of the plateau. Edge samples are never turns.
PeaksValleys detect_peaks_valleys(std::span<const double> window);

struct ChannelFeatures {
  double area = 0.0;
  double normalized_decay = 0.0;
  double line_length = 0.0;
  double mean_energy = 0.0;
  double peak_amplitude = 0.0;
  double valley_amplitude = 0.0;
  double normalized_peak_number = 0.0;
  double peak_variation = 0.0;
  double rms = 0.0;

  std::array<double, kFeaturesPerChannel> as_array() const {
    return {area,           normalized_decay,       line_length,
            mean_energy,    peak_amplitude,         valley_amplitude,
            normalized_peak_number, peak_variation, rms};
  }
};

// Undefined cases (no peaks, zero variance, zero mean step, log of zero)
// produce 0 so the vector stays finite.
ChannelFeatures channel_features(std::span<const double> window);

// Channel-major: the nine features of channel 0, then channel 1, ...
FeatureVector window_features(const std::vector<std::vector<double>>& samples);

// Features for every whole-second window of a record, without materializing
// the windows.
std::vector<FeatureVector> record_features(const Record& record);

}  // namespace seizure
