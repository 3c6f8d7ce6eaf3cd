#include "seizure/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "seizure/error.hpp"
#include "seizure/rng.hpp"

namespace seizure {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Second-order resonator driven by white noise, rescaled to unit variance.
std::vector<double> resonant_noise(std::size_t n, double freq, double rate, double radius,
                                   Rng& rng) {
  std::vector<double> x(n, 0.0);
  const double a1 = 2.0 * radius * std::cos(kTwoPi * freq / rate);
  const double a2 = -radius * radius;
  double y1 = 0.0;
  double y2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = a1 * y1 + a2 * y2 + rng.normal();
    x[i] = y;
    y2 = y1;
    y1 = y;
  }
  double ss = 0.0;
  for (const double v : x) ss += v * v;
  const double sd = std::sqrt(ss / static_cast<double>(n));
  for (auto& v : x) v /= sd;
  return x;
}

// Slow drift: leaky integrator of white noise, unit variance.
std::vector<double> drift_noise(std::size_t n, double leak, Rng& rng) {
  std::vector<double> x(n, 0.0);
  double y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y = leak * y + rng.normal();
    x[i] = y;
  }
  double ss = 0.0;
  for (const double v : x) ss += v * v;
  const double sd = std::sqrt(ss / static_cast<double>(n));
  for (auto& v : x) v /= sd;
  return x;
}

std::vector<Interval> place_events(std::size_t seconds, double fraction, Rng& rng) {
  const auto total = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(seconds)));
  if (total == 0) return {};
  const std::size_t events = std::clamp<std::size_t>(total / 20, 1, 3);
  std::vector<std::size_t> lengths(events, total / events);
  lengths.back() += total % events;
  // Split the non-seizure time into events + 1 gaps with random weights.
  const std::size_t quiet = seconds - total;
  std::vector<double> weights(events + 1);
  double wsum = 0.0;
  for (auto& w : weights) {
    w = 0.5 + rng.uniform();
    wsum += w;
  }
  std::vector<Interval> out;
  double cursor = 0.0;
  for (std::size_t e = 0; e < events; ++e) {
    cursor += std::floor(static_cast<double>(quiet) * weights[e] / wsum);
    out.push_back({cursor, cursor + static_cast<double>(lengths[e])});
    cursor += static_cast<double>(lengths[e]);
  }
  return out;
}

}  // namespace

std::string synth_patient_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "pat%02zu", index + 1);
  return buf;
}

SynthRecording synth_recording(const SynthConfig& config, std::size_t patient_index) {
  if (config.channels == 0 || config.sample_rate <= 0 || config.seconds == 0) {
    throw InvalidArgument("synthetic recording needs channels, rate and duration");
  }
  if (!(config.seizure_fraction >= 0.0 && config.seizure_fraction < 1.0)) {
    throw InvalidArgument("seizure fraction must lie in [0, 1)");
  }
  Rng rng(config.seed, static_cast<std::uint64_t>(RngStream::kSynth) * 1000 + patient_index);
  const double rate = config.sample_rate;
  const std::size_t n = config.seconds * static_cast<std::size_t>(config.sample_rate);

  // Patient-level character.
  const double amplitude = rng.uniform(20.0, 60.0);  // uV
  const double alpha_freq = rng.uniform(8.0, 12.0);
  const double seizure_gain = rng.uniform(2.5, 5.0);
  const double seizure_freq = rng.uniform(3.0, 5.0);
  const double involved_fraction = rng.uniform(0.4, 1.0);
  const auto events = place_events(config.seconds, config.seizure_fraction, rng);

  std::vector<double> involvement(config.channels, 0.0);
  for (auto& w : involvement) {
    if (rng.uniform() < involved_fraction) w = rng.uniform(0.5, 1.0);
  }
  // At least one channel carries the seizure.
  involvement[rng.below(config.channels)] = 1.0;

  // Artifacts: blinks on the first two channels, muscle bursts anywhere.
  struct Artifact {
    std::size_t start;
    std::size_t length;
    std::size_t channel;
    bool blink;
  };
  std::vector<Artifact> artifacts;
  const auto inside_event = [&](double t) {
    for (const auto& e : events) {
      if (t >= e.start - 2.0 && t < e.end + 2.0) return true;
    }
    return false;
  };
  for (std::size_t s = 0; s < config.seconds; ++s) {
    if (inside_event(static_cast<double>(s))) continue;
    if (rng.uniform() < 1.0 / 30.0) {
      artifacts.push_back({s * static_cast<std::size_t>(rate), static_cast<std::size_t>(rate / 2), 0, true});
    }
    if (rng.uniform() < 1.0 / 60.0) {
      artifacts.push_back({s * static_cast<std::size_t>(rate), static_cast<std::size_t>(rate),
                           static_cast<std::size_t>(rng.below(config.channels)), false});
    }
  }

  std::vector<std::vector<double>> channels(config.channels);
  for (std::size_t c = 0; c < config.channels; ++c) {
    const double gain = amplitude * rng.uniform(0.7, 1.3);
    const auto alpha = resonant_noise(n, alpha_freq + rng.uniform(-0.5, 0.5), rate, 0.985, rng);
    const auto broad = resonant_noise(n, rng.uniform(15.0, 25.0), rate, 0.9, rng);
    const auto slow = drift_noise(n, 0.995, rng);
    const double alpha_w = rng.uniform(0.4, 0.8);
    auto& x = channels[c];
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = gain * (alpha_w * alpha[i] + 0.5 * broad[i] + 0.4 * slow[i]);
    }

    if (involvement[c] > 0.0) {
      const double phase0 = rng.uniform(0.0, kTwoPi);
      for (const auto& e : events) {
        const auto first = static_cast<std::size_t>(e.start * rate);
        const auto last = std::min(n, static_cast<std::size_t>(e.end * rate));
        const double len = e.end - e.start;
        double phase = phase0;
        for (std::size_t i = first; i < last; ++i) {
          const double t = static_cast<double>(i) / rate - e.start;
          // One-second ramps; frequency slows from f+1 to f-1 Hz.
          const double env = std::min({1.0, t / 1.0, (len - t) / 1.0}) * 0.7 + 0.3;
          const double f = seizure_freq + 1.0 - 2.0 * t / len;
          phase += kTwoPi * f / rate;
          const double wave = std::sin(phase) + 0.45 * std::sin(2.0 * phase) +
                              0.2 * std::sin(3.0 * phase);
          x[i] += env * involvement[c] * seizure_gain * amplitude * wave;
        }
      }
    }
  }

  for (const auto& a : artifacts) {
    if (a.blink) {
      for (std::size_t c = 0; c < std::min<std::size_t>(2, config.channels); ++c) {
        for (std::size_t k = 0; k < a.length && a.start + k < n; ++k) {
          const double t = static_cast<double>(k) / static_cast<double>(a.length);
          channels[c][a.start + k] += 4.0 * amplitude * std::sin(std::numbers::pi * t);
        }
      }
    } else {
      for (std::size_t k = 0; k < a.length && a.start + k < n; ++k) {
        channels[a.channel][a.start + k] += 1.5 * amplitude * rng.normal();
      }
    }
  }

  const auto id = synth_patient_id(patient_index);
  return {Record(id, id, std::move(channels), config.sample_rate),
          SeizureAnnotations(events)};
}

std::vector<std::filesystem::path> write_synth_corpus(const SynthConfig& config,
                                                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> paths;
  std::map<std::string, SeizureAnnotations> labels;
  for (std::size_t p = 0; p < config.patients; ++p) {
    const auto rec = synth_recording(config, p);
    const auto path = out_dir / (rec.record.record_id() + ".edf");
    write_edf_file(edf_from_record(rec.record), path);
    labels.emplace(rec.record.record_id(), rec.annotations);
    paths.push_back(path);
  }
  write_annotations(labels, out_dir / "labels.csv");
  return paths;
}

}  // namespace seizure
