#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "seizure/error.hpp"
#include "seizure/ingestion.hpp"
#include "seizure/text.hpp"

namespace seizure {
namespace {

constexpr std::size_t kGlobalHeaderBytes = 256;
constexpr std::size_t kSignalHeaderBytes = 256;

// Sequential reader over the fixed-width ASCII header.
class HeaderCursor {
 public:
  HeaderCursor(const std::vector<char>& bytes, std::string source)
      : bytes_(bytes), source_(std::move(source)) {}

  std::string field(std::size_t width, std::string_view name) {
    if (pos_ + width > bytes_.size()) {
      throw ParseError(source_ + ": header truncated in field '" + std::string(name) + "'");
    }
    std::string s(bytes_.data() + pos_, width);
    pos_ += width;
    return std::string(text::trim(s));
  }

  double number(std::size_t width, std::string_view name) {
    const auto s = field(width, name);
    const auto v = text::parse_double(s);
    if (!v) {
      throw ParseError(source_ + ": non-numeric header field '" + std::string(name) +
                       "': '" + s + "'");
    }
    return *v;
  }

  long long integer(std::size_t width, std::string_view name) {
    const auto s = field(width, name);
    const auto v = text::parse_int(s);
    if (!v) {
      throw ParseError(source_ + ": non-integer header field '" + std::string(name) +
                       "': '" + s + "'");
    }
    return *v;
  }

  void skip(std::size_t width) { pos_ += width; }
  std::size_t position() const { return pos_; }

 private:
  const std::vector<char>& bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

void put_field(std::string& out, std::string_view value, std::size_t width) {
  std::string s(value.substr(0, width));
  s.resize(width, ' ');
  out += s;
}

std::string fit_number(double v, std::size_t width) {
  auto s = text::format_double(v);
  if (s.size() > width) {
    throw InvalidArgument("value " + s + " does not fit a " + std::to_string(width) +
                          "-character EDF field");
  }
  return s;
}

// Widest decimal representation of value, rounded outward, that fits in 8
// characters. Rounding outward keeps every sample inside the physical range.
double edf_bound(double value, bool round_down) {
  for (int decimals = 6; decimals >= 0; --decimals) {
    const double scale = std::pow(10.0, decimals);
    const double r = round_down ? std::floor(value * scale) / scale
                                : std::ceil(value * scale) / scale;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, r);
    if (std::strlen(buf) <= 8) {
      return *text::parse_double(buf);
    }
  }
  throw InvalidArgument("physical range too wide for an EDF header");
}

std::string edf_bound_text(double v) {
  for (int decimals = 6; decimals >= 0; --decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    if (std::strlen(buf) <= 8 && *text::parse_double(buf) == v) return buf;
  }
  return fit_number(v, 8);
}

}  // namespace

std::size_t EdfFile::num_records() const {
  if (signals.empty() || signals.front().samples_per_record == 0) return 0;
  return digital.front().size() / static_cast<std::size_t>(signals.front().samples_per_record);
}

double EdfFile::physical(std::size_t signal, std::int16_t value) const {
  const auto& sig = signals[signal];
  return sig.physical_min + (static_cast<double>(value) - sig.digital_min) *
                                (sig.physical_max - sig.physical_min) /
                                static_cast<double>(sig.digital_max - sig.digital_min);
}

EdfFile read_edf_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  const auto source = path.string();
  if (bytes.size() < kGlobalHeaderBytes) {
    throw ParseError(source + ": file shorter than the 256-byte EDF header");
  }

  HeaderCursor cur(bytes, source);
  EdfFile edf;
  const auto version = cur.field(8, "version");
  if (version != "0") throw ParseError(source + ": unsupported EDF version '" + version + "'");
  edf.patient = cur.field(80, "patient");
  edf.recording = cur.field(80, "recording");
  edf.start_date = cur.field(8, "start date");
  edf.start_time = cur.field(8, "start time");
  const auto header_bytes = cur.integer(8, "header bytes");
  cur.skip(44);
  auto num_records = cur.integer(8, "number of data records");
  edf.record_duration = cur.number(8, "data record duration");
  const auto ns = cur.integer(4, "number of signals");
  if (ns <= 0) throw ParseError(source + ": number of signals must be positive");
  if (header_bytes != static_cast<long long>(kGlobalHeaderBytes + kSignalHeaderBytes * ns)) {
    throw ParseError(source + ": header byte count " + std::to_string(header_bytes) +
                     " does not match " + std::to_string(ns) + " signals");
  }
  if (bytes.size() < static_cast<std::size_t>(header_bytes)) {
    throw ParseError(source + ": file ends inside the signal headers");
  }
  if (!(edf.record_duration > 0.0)) {
    throw ParseError(source + ": data record duration must be positive");
  }

  const auto n = static_cast<std::size_t>(ns);
  edf.signals.resize(n);
  // Signal header fields are stored column-wise: all labels, then all
  // transducers, and so on.
  for (auto& s : edf.signals) s.label = cur.field(16, "label");
  for (auto& s : edf.signals) s.transducer = cur.field(80, "transducer");
  for (auto& s : edf.signals) s.physical_dimension = cur.field(8, "physical dimension");
  for (auto& s : edf.signals) s.physical_min = cur.number(8, "physical minimum");
  for (auto& s : edf.signals) s.physical_max = cur.number(8, "physical maximum");
  for (auto& s : edf.signals) s.digital_min = static_cast<int>(cur.integer(8, "digital minimum"));
  for (auto& s : edf.signals) s.digital_max = static_cast<int>(cur.integer(8, "digital maximum"));
  for (auto& s : edf.signals) s.prefiltering = cur.field(80, "prefiltering");
  for (auto& s : edf.signals) {
    s.samples_per_record = static_cast<int>(cur.integer(8, "samples per record"));
  }
  cur.skip(32 * n);

  std::size_t record_bytes = 0;
  for (const auto& s : edf.signals) {
    if (s.samples_per_record <= 0) throw ParseError(source + ": samples per record must be positive");
    if (s.digital_max <= s.digital_min) throw ParseError(source + ": digital max must exceed digital min");
    if (s.samples_per_record != edf.signals.front().samples_per_record) {
      throw ParseError(source + ": signals have different sample rates; resampling is not supported");
    }
    record_bytes += 2 * static_cast<std::size_t>(s.samples_per_record);
  }
  const double rate = edf.signals.front().samples_per_record / edf.record_duration;
  if (std::abs(rate - std::round(rate)) > 1e-9) {
    throw ParseError(source + ": non-integer sample rate");
  }

  const std::size_t data_bytes = bytes.size() - static_cast<std::size_t>(header_bytes);
  if (num_records < 0) {
    // -1 means unknown; infer from the file length.
    if (data_bytes % record_bytes != 0) throw ParseError(source + ": truncated data record");
    num_records = static_cast<long long>(data_bytes / record_bytes);
  }
  const auto records = static_cast<std::size_t>(num_records);
  if (data_bytes < records * record_bytes) {
    throw ParseError(source + ": truncated data: header declares " + std::to_string(records) +
                     " records of " + std::to_string(record_bytes) + " bytes, file holds " +
                     std::to_string(data_bytes) + " bytes");
  }

  edf.digital.assign(n, {});
  for (std::size_t s = 0; s < n; ++s) {
    edf.digital[s].reserve(records * static_cast<std::size_t>(edf.signals[s].samples_per_record));
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + header_bytes;
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t s = 0; s < n; ++s) {
      for (int k = 0; k < edf.signals[s].samples_per_record; ++k, p += 2) {
        const auto raw = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        edf.digital[s].push_back(static_cast<std::int16_t>(raw));
      }
    }
  }
  return edf;
}

void write_edf_file(const EdfFile& edf, const std::filesystem::path& path) {
  const auto n = edf.signals.size();
  if (n == 0) throw InvalidArgument("EDF needs at least one signal");
  if (edf.digital.size() != n) throw DimensionError("EDF digital data does not match signal count");
  const auto records = edf.num_records();
  for (std::size_t s = 0; s < n; ++s) {
    if (edf.digital[s].size() !=
        records * static_cast<std::size_t>(edf.signals[s].samples_per_record)) {
      throw DimensionError("EDF signal " + std::to_string(s) + " is not a whole number of records");
    }
  }

  std::string header;
  header.reserve(kGlobalHeaderBytes * (n + 1));
  put_field(header, "0", 8);
  put_field(header, edf.patient, 80);
  put_field(header, edf.recording, 80);
  put_field(header, edf.start_date, 8);
  put_field(header, edf.start_time, 8);
  put_field(header, std::to_string(kGlobalHeaderBytes * (n + 1)), 8);
  put_field(header, "", 44);
  put_field(header, std::to_string(records), 8);
  put_field(header, fit_number(edf.record_duration, 8), 8);
  put_field(header, std::to_string(n), 4);
  for (const auto& s : edf.signals) put_field(header, s.label, 16);
  for (const auto& s : edf.signals) put_field(header, s.transducer, 80);
  for (const auto& s : edf.signals) put_field(header, s.physical_dimension, 8);
  for (const auto& s : edf.signals) put_field(header, edf_bound_text(s.physical_min), 8);
  for (const auto& s : edf.signals) put_field(header, edf_bound_text(s.physical_max), 8);
  for (const auto& s : edf.signals) put_field(header, std::to_string(s.digital_min), 8);
  for (const auto& s : edf.signals) put_field(header, std::to_string(s.digital_max), 8);
  for (const auto& s : edf.signals) put_field(header, s.prefiltering, 80);
  for (const auto& s : edf.signals) put_field(header, std::to_string(s.samples_per_record), 8);
  for (std::size_t s = 0; s < n; ++s) put_field(header, "", 32);

  std::string data;
  std::size_t record_samples = 0;
  for (const auto& s : edf.signals) record_samples += static_cast<std::size_t>(s.samples_per_record);
  data.reserve(records * record_samples * 2);
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t s = 0; s < n; ++s) {
      const auto spr = static_cast<std::size_t>(edf.signals[s].samples_per_record);
      for (std::size_t k = 0; k < spr; ++k) {
        const auto v = static_cast<std::uint16_t>(edf.digital[s][r * spr + k]);
        data.push_back(static_cast<char>(v & 0xff));
        data.push_back(static_cast<char>(v >> 8));
      }
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("write failed for " + path.string());
}

Record read_edf(const std::filesystem::path& path) {
  const auto edf = read_edf_file(path);
  const auto rate = static_cast<int>(std::lround(edf.signals.front().samples_per_record /
                                                 edf.record_duration));
  std::vector<std::vector<double>> channels(edf.signals.size());
  for (std::size_t s = 0; s < edf.signals.size(); ++s) {
    channels[s].reserve(edf.digital[s].size());
    for (const auto d : edf.digital[s]) channels[s].push_back(edf.physical(s, d));
  }
  const auto stem = path.stem().string();
  const bool anonymous = edf.patient.empty() || edf.patient == "X";
  return Record(anonymous ? stem : edf.patient, stem, std::move(channels), rate);
}

EdfFile edf_from_record(const Record& record) {
  EdfFile edf;
  edf.patient = record.patient_id();
  edf.recording = record.record_id();
  edf.record_duration = 1.0;
  const auto rate = record.sample_rate();
  for (std::size_t c = 0; c < record.num_channels(); ++c) {
    const auto& ch = record.channel(c);
    EdfSignalHeader sig;
    sig.label = "CH" + std::to_string(c + 1);
    sig.physical_dimension = "uV";
    sig.samples_per_record = rate;
    double lo = 0.0;
    double hi = 0.0;
    if (!ch.empty()) {
      const auto [mn, mx] = std::minmax_element(ch.begin(), ch.end());
      lo = *mn;
      hi = *mx;
    }
    sig.physical_min = edf_bound(lo, true);
    sig.physical_max = edf_bound(hi, false);
    if (sig.physical_max <= sig.physical_min) sig.physical_max = sig.physical_min + 1.0;

    const double scale = (sig.digital_max - sig.digital_min) / (sig.physical_max - sig.physical_min);
    std::vector<std::int16_t> digital;
    digital.reserve(ch.size());
    for (const double x : ch) {
      const double d = std::round((x - sig.physical_min) * scale + sig.digital_min);
      digital.push_back(static_cast<std::int16_t>(
          std::clamp(d, static_cast<double>(sig.digital_min), static_cast<double>(sig.digital_max))));
    }
    edf.signals.push_back(std::move(sig));
    edf.digital.push_back(std::move(digital));
  }
  return edf;
}

}  // namespace seizure
