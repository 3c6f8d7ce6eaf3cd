#include "seizure/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "seizure/error.hpp"
#include "seizure/log.hpp"
#include "seizure/text.hpp"

namespace seizure {

Record::Record(std::string patient_id, std::string record_id,
               std::vector<std::vector<double>> channels, int sample_rate)
    : patient_id_(std::move(patient_id)),
      record_id_(std::move(record_id)),
      channels_(std::move(channels)),
      sample_rate_(sample_rate),
      duration_(0) {
  if (sample_rate_ <= 0) throw InvalidArgument("sample rate must be positive");
  if (channels_.empty()) throw InvalidArgument("record needs at least one channel");
  std::size_t shortest = channels_.front().size();
  for (const auto& ch : channels_) shortest = std::min(shortest, ch.size());
  duration_ = shortest / static_cast<std::size_t>(sample_rate_);
  for (auto& ch : channels_) ch.resize(num_samples());
}

SeizureAnnotations::SeizureAnnotations(std::vector<Interval> intervals) {
  for (const auto& iv : intervals) {
    if (!(iv.start >= 0.0) || !(iv.start < iv.end)) {
      throw InvalidArgument("seizure interval must satisfy 0 <= start < end");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) {
              return a.start < b.start || (a.start == b.start && a.end < b.end);
            });
  for (const auto& iv : intervals) {
    if (!intervals_.empty() && iv.start <= intervals_.back().end) {
      intervals_.back().end = std::max(intervals_.back().end, iv.end);
    } else {
      intervals_.push_back(iv);
    }
  }
}

Record read_csv(const std::filesystem::path& path, int sample_rate) {
  const auto lines = text::read_lines(path.string());
  std::vector<std::vector<double>> channels;
  std::size_t columns = 0;
  bool first_row = true;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (text::trim(lines[r]).empty()) continue;
    const auto cells = text::split(lines[r], ',');
    std::vector<double> row;
    row.reserve(cells.size());
    bool numeric = true;
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = text::parse_double(cells[c]);
      if (!v) {
        numeric = false;
        bad_col = c;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first_row) {
        first_row = false;
        columns = cells.size();
        continue;  // header
      }
      throw ParseError(path.string() + ": non-numeric cell '" +
                       std::string(text::trim(cells[bad_col])) + "' at row " +
                       std::to_string(r + 1) + ", column " + std::to_string(bad_col + 1));
    }
    if (columns == 0) columns = row.size();
    if (row.size() != columns) {
      throw ParseError(path.string() + ": row " + std::to_string(r + 1) + " has " +
                       std::to_string(row.size()) + " columns, expected " +
                       std::to_string(columns));
    }
    first_row = false;
    if (channels.empty()) channels.resize(columns);
    for (std::size_t c = 0; c < columns; ++c) channels[c].push_back(row[c]);
  }
  if (channels.empty()) throw ParseError(path.string() + ": no samples");
  const auto stem = path.stem().string();
  Record record(stem, stem, std::move(channels), sample_rate);
  return record;
}

std::map<std::string, SeizureAnnotations> read_annotations(
    const std::filesystem::path& path) {
  const auto lines = text::read_lines(path.string());
  std::map<std::string, std::vector<Interval>> grouped;
  bool first_row = true;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (text::trim(lines[r]).empty()) continue;
    const auto cells = text::split(lines[r], ',');
    const auto where = path.string() + ":" + std::to_string(r + 1);
    if (cells.size() != 3) throw ParseError(where + ": expected record_id,start,end");
    const auto start = text::parse_double(cells[1]);
    const auto end = text::parse_double(cells[2]);
    if (!start || !end) {
      if (first_row) {
        first_row = false;
        continue;
      }
      throw ParseError(where + ": non-numeric interval bound");
    }
    first_row = false;
    if (!(*start >= 0.0) || !(*start < *end)) {
      throw ParseError(where + ": interval must satisfy 0 <= start < end");
    }
    grouped[std::string(text::trim(cells[0]))].push_back({*start, *end});
  }
  std::map<std::string, SeizureAnnotations> out;
  for (auto& [id, ivs] : grouped) out.emplace(id, SeizureAnnotations(std::move(ivs)));
  return out;
}

void write_annotations(const std::map<std::string, SeizureAnnotations>& ann,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "record_id,start_second,end_second\n";
  for (const auto& [id, a] : ann) {
    for (const auto& iv : a.intervals()) {
      out << id << ',' << text::format_double(iv.start) << ','
          << text::format_double(iv.end) << '\n';
    }
  }
}

std::vector<int> window_labels(const Record& record, const SeizureAnnotations& ann) {
  const auto rate = static_cast<std::size_t>(record.sample_rate());
  const double seconds = static_cast<double>(record.duration());
  std::vector<std::size_t> inside(record.duration(), 0);
  for (const auto& iv : ann.intervals()) {
    Interval clipped = iv;
    if (iv.end > seconds) {
      warn("record " + record.record_id() + ": seizure interval [" +
           text::format_double(iv.start) + ", " + text::format_double(iv.end) +
           ") extends past the " + std::to_string(record.duration()) +
           " s recording; clipped");
      clipped.end = seconds;
    }
    if (clipped.start >= clipped.end) continue;
    // Sample i lies inside when start <= i / rate < end.
    const auto first = static_cast<std::size_t>(std::ceil(clipped.start * rate));
    const auto last = static_cast<std::size_t>(std::ceil(clipped.end * rate));
    for (std::size_t s = first / rate; s < record.duration() && s * rate < last; ++s) {
      const auto lo = std::max(first, s * rate);
      const auto hi = std::min(last, (s + 1) * rate);
      if (hi > lo) inside[s] += hi - lo;
    }
  }
  std::vector<int> labels(record.duration(), 0);
  for (std::size_t s = 0; s < labels.size(); ++s) labels[s] = 2 * inside[s] >= rate ? 1 : 0;
  return labels;
}

std::vector<LabeledWindow> label_windows(const Record& record,
                                         const SeizureAnnotations& ann) {
  const auto labels = window_labels(record, ann);
  const auto rate = static_cast<std::size_t>(record.sample_rate());
  std::vector<LabeledWindow> windows;
  windows.reserve(labels.size());
  for (std::size_t s = 0; s < labels.size(); ++s) {
    LabeledWindow w;
    w.patient_id = record.patient_id();
    w.window_index = s;
    w.label = labels[s];
    w.samples.reserve(record.num_channels());
    for (const auto& ch : record.channels()) {
      w.samples.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(s * rate),
                             ch.begin() + static_cast<std::ptrdiff_t>((s + 1) * rate));
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace seizure
