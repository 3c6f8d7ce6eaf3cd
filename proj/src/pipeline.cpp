#include "seizure/pipeline.hpp"

#include <fstream>

#include "seizure/error.hpp"
#include "seizure/features.hpp"
#include "seizure/text.hpp"

namespace seizure {

std::vector<FeatureRow> featurize_record(const Record& record, const SeizureAnnotations& ann,
                                         std::size_t first_index) {
  const auto normalized = normalize_record(record).first;
  const auto labels = window_labels(record, ann);
  auto features = record_features(normalized);
  std::vector<FeatureRow> rows(features.size());
  for (std::size_t s = 0; s < rows.size(); ++s) {
    rows[s].patient_id = record.patient_id();
    rows[s].window_index = first_index + s;
    rows[s].label = labels[s];
    rows[s].features = std::move(features[s]);
  }
  return rows;
}

void write_feature_csv(std::span<const FeatureRow> rows, const std::filesystem::path& path,
                       const MinMaxScaler* scaler) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::size_t dim = rows.empty() ? 0 : rows.front().features.size();
  out << "patient_id,window_index,label";
  for (std::size_t i = 0; i < dim; ++i) out << ",f" << i;
  out << '\n';
  for (const auto& row : rows) {
    if (row.features.size() != dim) throw DimensionError("feature rows differ in length");
    out << row.patient_id << ',' << row.window_index << ',' << row.label;
    const auto values = scaler != nullptr ? scaler->apply(row.features) : row.features;
    for (const double v : values) out << ',' << text::format_double(v);
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<FeatureRow> read_feature_csv(const std::filesystem::path& path) {
  const auto lines = text::read_lines(path.string());
  if (lines.empty()) throw ParseError(path.string() + ": empty feature file");
  const auto header = text::split(lines.front(), ',');
  if (header.size() < 4 || text::trim(header[0]) != "patient_id" ||
      text::trim(header[1]) != "window_index" || text::trim(header[2]) != "label") {
    throw ParseError(path.string() + ": expected header patient_id,window_index,label,f0,...");
  }
  const std::size_t dim = header.size() - 3;
  std::vector<FeatureRow> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (text::trim(lines[r]).empty()) continue;
    const auto cells = text::split(lines[r], ',');
    const auto where = path.string() + ":" + std::to_string(r + 1);
    if (cells.size() != dim + 3) throw ParseError(where + ": wrong number of columns");
    FeatureRow row;
    row.patient_id = std::string(text::trim(cells[0]));
    const auto index = text::parse_int(cells[1]);
    const auto label = text::parse_int(cells[2]);
    if (!index || *index < 0) throw ParseError(where + ": bad window_index");
    if (!label || (*label != 0 && *label != 1)) throw ParseError(where + ": label must be 0 or 1");
    row.window_index = static_cast<std::size_t>(*index);
    row.label = static_cast<int>(*label);
    row.features.reserve(dim);
    for (std::size_t c = 3; c < cells.size(); ++c) {
      const auto v = text::parse_double(cells[c]);
      if (!v) throw ParseError(where + ": non-numeric feature in column " + std::to_string(c + 1));
      row.features.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<std::string, std::vector<FeatureRow>> group_by_patient(std::span<const FeatureRow> rows) {
  std::map<std::string, std::vector<FeatureRow>> out;
  for (const auto& r : rows) out[r.patient_id].push_back(r);
  return out;
}

Dataset to_dataset(std::span<const FeatureRow> rows, const MinMaxScaler* scaler) {
  Dataset d;
  d.vectors.reserve(rows.size());
  d.labels.reserve(rows.size());
  for (const auto& r : rows) {
    d.vectors.push_back(scaler != nullptr ? scaler->apply(r.features) : r.features);
    d.labels.push_back(r.label);
  }
  return d;
}

std::vector<FeatureVector> raw_features(std::span<const FeatureRow> rows) {
  std::vector<FeatureVector> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.features);
  return out;
}

}  // namespace seizure
