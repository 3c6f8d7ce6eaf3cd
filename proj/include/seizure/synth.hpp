#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seizure/ingestion.hpp"

namespace seizure {

// Synthetic multi-patient scalp EEG. Background is band-limited noise with a
// patient-specific alpha rhythm; seizures are high-amplitude 3-5 Hz
// spike-and-wave bursts on a patient-specific subset of channels. Blink and
// muscle artifacts appear outside seizures as confounders.
struct SynthConfig {
  std::size_t patients = 5;
  std::size_t seconds = 600;
  std::size_t channels = 23;
  int sample_rate = 256;
  double seizure_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct SynthRecording {
  Record record;
  SeizureAnnotations annotations;
};

std::string synth_patient_id(std::size_t index);

SynthRecording synth_recording(const SynthConfig& config, std::size_t patient_index);

// Writes <id>.edf per patient plus labels.csv; returns the EDF paths.
std::vector<std::filesystem::path> write_synth_corpus(const SynthConfig& config,
                                                      const std::filesystem::path& out_dir);

}  // namespace seizure
