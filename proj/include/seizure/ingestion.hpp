#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace seizure {

// One patient recording: C channels of equal length at a fixed integer rate.
// Construction truncates any ragged tail so that every channel holds exactly
// sample_rate * duration samples.
class Record {
 public:
  Record(std::string patient_id, std::string record_id,
         std::vector<std::vector<double>> channels, int sample_rate);

  const std::string& patient_id() const { return patient_id_; }
  const std::string& record_id() const { return record_id_; }
  const std::vector<std::vector<double>>& channels() const { return channels_; }
  const std::vector<double>& channel(std::size_t c) const { return channels_[c]; }
  std::size_t num_channels() const { return channels_.size(); }
  int sample_rate() const { return sample_rate_; }
  // Whole seconds.
  std::size_t duration() const { return duration_; }
  std::size_t num_samples() const { return duration_ * static_cast<std::size_t>(sample_rate_); }

 private:
  std::string patient_id_;
  std::string record_id_;
  std::vector<std::vector<double>> channels_;
  int sample_rate_;
  std::size_t duration_;
};

struct Interval {
  double start;  // seconds, inclusive
  double end;    // seconds, exclusive
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Seizure intervals for one record, kept sorted and merged.
class SeizureAnnotations {
 public:
  SeizureAnnotations() = default;
  explicit SeizureAnnotations(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }

 private:
  std::vector<Interval> intervals_;
};

struct LabeledWindow {
  std::string patient_id;
  std::size_t window_index = 0;
  std::vector<std::vector<double>> samples;  // C x W
  int label = 0;
};

// Classic EDF (16-bit, uniform rate). EDF+ annotation signals are not
// special-cased; every signal must share one rate.
struct EdfSignalHeader {
  std::string label;
  std::string transducer;
  std::string physical_dimension;
  double physical_min = -1.0;
  double physical_max = 1.0;
  int digital_min = -32768;
  int digital_max = 32767;
  std::string prefiltering;
  int samples_per_record = 0;
};

struct EdfFile {
  std::string patient;
  std::string recording;
  std::string start_date = "01.01.00";
  std::string start_time = "00.00.00";
  double record_duration = 1.0;  // seconds per data record
  std::vector<EdfSignalHeader> signals;
  // digital[s] holds every sample of signal s across all data records.
  std::vector<std::vector<std::int16_t>> digital;

  std::size_t num_records() const;
  double physical(std::size_t signal, std::int16_t value) const;
};

EdfFile read_edf_file(const std::filesystem::path& path);
void write_edf_file(const EdfFile& edf, const std::filesystem::path& path);

// Reads an EDF file into a Record of physical values. record_id is the file
// stem; patient_id is the header patient field, or the stem when blank.
Record read_edf(const std::filesystem::path& path);

// Quantizes a Record to 16-bit EDF, one data record per second, with each
// signal's physical range taken from its own extrema.
EdfFile edf_from_record(const Record& record);

// Rows are samples, columns are channels. A leading non-numeric row is
// treated as a header.
Record read_csv(const std::filesystem::path& path, int sample_rate);

// Label file: `record_id,start_second,end_second`, optional header row.
std::map<std::string, SeizureAnnotations> read_annotations(
    const std::filesystem::path& path);
void write_annotations(const std::map<std::string, SeizureAnnotations>& ann,
                       const std::filesystem::path& path);

// One window per whole second. A window is a seizure when at least half of
// its samples fall inside an annotated interval.
std::vector<LabeledWindow> label_windows(const Record& record,
                                         const SeizureAnnotations& ann);

// Same labeling rule without copying samples.
std::vector<int> window_labels(const Record& record, const SeizureAnnotations& ann);

}  // namespace seizure
