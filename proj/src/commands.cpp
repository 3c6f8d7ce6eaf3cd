#include "seizure/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <thread>

#include "seizure/error.hpp"
#include "seizure/log.hpp"
#include "seizure/text.hpp"

namespace seizure::cli {
namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results are written to
// caller-owned slots, so output order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct ClassifierChoice {
  enum class Family { kKnn, kCnn, kSvm, kLr, kDbn } family;
  int k = 5;
  KernelKind kernel = KernelKind::kRbf;
  FinetuneMode mode = FinetuneMode::kFull;
};

ClassifierChoice parse_classifier(const std::string& name, const ClassifierParams& params) {
  using F = ClassifierChoice::Family;
  if (name == "knn") return {F::kKnn, params.k};
  if (name == "knn3") return {F::kKnn, 3};
  if (name == "knn5") return {F::kKnn, 5};
  if (name == "knn7") return {F::kKnn, 7};
  if (name == "cnn") return {F::kCnn, 1};
  if (name == "svm" || name == "svm-rbf") return {F::kSvm, 0, KernelKind::kRbf};
  if (name == "svm-poly") return {F::kSvm, 0, KernelKind::kPolynomial};
  if (name == "svm-sigmoid") return {F::kSvm, 0, KernelKind::kSigmoid};
  if (name == "lr") return {F::kLr};
  if (name == "dbn") return {F::kDbn, 0, KernelKind::kRbf, FinetuneMode::kFull};
  if (name == "dbn-top") return {F::kDbn, 0, KernelKind::kRbf, FinetuneMode::kTop};
  throw InvalidArgument("unknown classifier '" + name + "'");
}

std::vector<int> predict_all(const TrainedModel& model, std::span<const FeatureRow> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(model.predict(r.features));
  return out;
}

std::vector<int> labels_of(std::span<const FeatureRow> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.label);
  return out;
}

}  // namespace

const std::vector<std::string>& all_classifier_names() {
  static const std::vector<std::string> names{"knn3", "knn5", "knn7", "cnn", "svm-rbf",
                                              "svm-poly", "svm-sigmoid", "lr", "dbn", "dbn-top"};
  return names;
}

bool is_classifier_name(const std::string& name) {
  try {
    parse_classifier(name, {});
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

std::string to_string(Protocol p) { return p == Protocol::kSingle ? "single" : "loo"; }

Protocol protocol_from_string(const std::string& name) {
  if (name == "single") return Protocol::kSingle;
  if (name == "loo" || name == "leave-one-out") return Protocol::kLeaveOneOut;
  throw InvalidArgument("unknown protocol '" + name + "' (expected single or loo)");
}

Split<FeatureRow> make_split(const std::vector<FeatureRow>& rows, Protocol protocol,
                             const std::string& patient, std::uint64_t seed, SplitOrder order) {
  auto by_patient = group_by_patient(rows);
  if (by_patient.empty()) throw InvalidArgument("no feature rows");
  if (protocol == Protocol::kSingle) {
    std::string who = patient;
    if (who.empty()) {
      if (by_patient.size() != 1) {
        throw InvalidArgument("feature file holds several patients; choose one for the single-patient protocol");
      }
      who = by_patient.begin()->first;
    }
    const auto it = by_patient.find(who);
    if (it == by_patient.end()) throw InvalidArgument("unknown patient '" + who + "'");
    return split_single_patient(std::move(it->second), seed, order);
  }
  if (patient.empty()) throw InvalidArgument("leave-one-out needs a held-out patient");
  return split_leave_one_out(by_patient, patient, seed, order);
}

TrainedModel fit_classifier(const std::string& name, const ClassifierParams& params,
                            const Split<FeatureRow>& split, std::uint64_t seed) {
  using F = ClassifierChoice::Family;
  const auto choice = parse_classifier(name, params);
  if (split.train.empty()) throw InvalidArgument("training partition is empty");

  TrainedModel tm;
  tm.scaler = MinMaxScaler::fit(raw_features(split.train));
  tm.provenance.classifier = name;
  tm.provenance.seed = seed;
  const auto train = to_dataset(split.train, &tm.scaler);
  train.validate();

  switch (choice.family) {
    case F::kKnn:
      tm.model = KnnModel{train, choice.k, false};
      break;
    case F::kCnn:
      tm.model = KnnModel{cnn_condense(train, seed), choice.k, true};
      break;
    case F::kSvm: {
      auto kernel = Kernel::defaults(choice.kernel, train.dimension());
      if (params.svm_gamma) kernel.gamma = *params.svm_gamma;
      kernel.degree = params.svm_degree;
      kernel.coef0 = params.svm_coef0;
      tm.model = svm_train(train, kernel, params.svm_c, params.svm_tol);
      break;
    }
    case F::kLr:
      tm.model = lr_train(train, params.lr_rate, params.lr_iterations);
      break;
    case F::kDbn: {
      auto hp = params.dbn;
      hp.mode = choice.mode;
      hp.seed = seed;
      if (hp.layer_sizes.empty() || hp.layer_sizes.front() != train.dimension()) {
        throw DimensionError("DBN input layer has " +
                             std::to_string(hp.layer_sizes.empty() ? 0 : hp.layer_sizes.front()) +
                             " nodes but the features have " + std::to_string(train.dimension()) +
                             " dimensions");
      }
      std::optional<Dataset> validation;
      if (!split.validation.empty()) validation = to_dataset(split.validation, &tm.scaler);
      tm.model = dbn_train(train, hp, validation ? &*validation : nullptr);
      break;
    }
  }
  return tm;
}

std::vector<FeatureRow> cmd_featurize(const FeaturizeConfig& config) {
  struct Input {
    std::filesystem::path path;
    bool edf;
  };
  std::vector<Input> inputs;
  for (const auto& p : config.edf_inputs) inputs.push_back({p, true});
  for (const auto& p : config.csv_inputs) inputs.push_back({p, false});
  if (inputs.empty()) throw InvalidArgument("no input recordings given");

  std::map<std::string, SeizureAnnotations> annotations;
  if (config.labels && std::filesystem::exists(*config.labels)) {
    annotations = read_annotations(*config.labels);
  } else {
    warn(config.labels ? "label file " + config.labels->string() + " not found; all windows labeled 0"
                       : std::string("no label file given; all windows labeled 0"));
  }

  std::optional<MinMaxScaler> scaler;
  if (config.scaler_model) {
    auto model = load_model(*config.scaler_model);
    if (model.scaler.empty()) throw InvalidArgument("model has no embedded scaler");
    scaler = std::move(model.scaler);
  }

  std::vector<std::vector<FeatureRow>> per_record(inputs.size());
  parallel_for(inputs.size(), config.jobs, [&](std::size_t i) {
    const auto& in = inputs[i];
    try {
      const auto record = in.edf ? read_edf(in.path) : read_csv(in.path, config.csv_sample_rate);
      const auto it = annotations.find(record.record_id());
      per_record[i] = featurize_record(record, it != annotations.end() ? it->second : SeizureAnnotations{});
    } catch (const Error& e) {
      throw Error(in.path.string() + ": " + e.what());
    }
  });

  // Window indices run on across a patient's records, in input order.
  std::map<std::string, std::size_t> next_index;
  std::vector<FeatureRow> rows;
  for (auto& recs : per_record) {
    if (recs.empty()) continue;
    auto& offset = next_index[recs.front().patient_id];
    for (auto& r : recs) {
      r.window_index += offset;
      rows.push_back(std::move(r));
    }
    offset += recs.size();
  }
  if (scaler && !rows.empty() && scaler->dimension() != rows.front().features.size()) {
    throw DimensionError("scaler expects " + std::to_string(scaler->dimension()) +
                         " features, recordings produce " + std::to_string(rows.front().features.size()));
  }
  write_feature_csv(rows, config.output, scaler ? &*scaler : nullptr);
  return rows;
}

TrainResult cmd_train(const TrainConfig& config, std::ostream& log) {
  const auto rows = read_feature_csv(config.features);
  const auto split = make_split(rows, config.protocol, config.patient, config.seed, config.order);
  if (!split.train.empty() && !detail::both_classes(split.train)) {
    throw InvalidArgument("training partition has a single class");
  }
  TrainResult result;
  result.model = fit_classifier(config.classifier, config.params, split, config.seed);
  result.model.provenance.protocol = to_string(config.protocol);
  result.model.provenance.holdout =
      config.patient.empty() && !split.test_patients.empty() ? split.test_patients.front() : config.patient;
  if (!split.validation.empty()) {
    result.validation = compute_metrics(predict_all(result.model, split.validation),
                                        labels_of(split.validation));
  }
  log << config.classifier << " trained on " << split.train.size() << " windows; validation F1 = "
      << std::fixed << std::setprecision(4) << result.validation.f1 << " (" << split.validation.size()
      << " windows)\n";
  if (!config.output.empty()) save_model(result.model, config.output);
  return result;
}

EvaluationResult cmd_evaluate(const EvaluateConfig& config, std::ostream& log) {
  const auto rows = read_feature_csv(config.features);
  const auto by_patient = group_by_patient(rows);
  const auto protocol_name = to_string(config.protocol);

  std::optional<TrainedModel> saved;
  std::vector<std::string> patients = config.patients;
  if (config.model) {
    saved = load_model(*config.model);
    if (saved->provenance.protocol != protocol_name) {
      throw InvalidArgument("model was trained under protocol '" + saved->provenance.protocol +
                            "' but evaluation requested '" + protocol_name + "'");
    }
    if (!rows.empty() && saved->input_dimension() != rows.front().features.size()) {
      throw DimensionError("model expects " + std::to_string(saved->input_dimension()) +
                           " features, file has " + std::to_string(rows.front().features.size()));
    }
    patients = {saved->provenance.holdout};
  } else if (patients.empty()) {
    for (const auto& [id, _] : by_patient) patients.push_back(id);
  }
  for (const auto& c : config.classifiers) parse_classifier(c, config.params);

  struct PatientResult {
    std::vector<EvaluationRow> rows;
    std::vector<PredictionRow> predictions;
  };
  std::vector<PatientResult> per_patient(patients.size());
  parallel_for(patients.size(), config.jobs, [&](std::size_t i) {
    const auto& patient = patients[i];
    const auto seed = saved ? saved->provenance.seed : config.seed;
    const auto split = make_split(rows, config.protocol, patient, seed, config.order);
    const auto labels = labels_of(split.test);
    auto& out = per_patient[i];
    const auto record = [&](const std::string& name, const std::vector<int>& predicted) {
      out.rows.push_back({protocol_name, name, patient, compute_metrics(predicted, labels)});
      for (std::size_t w = 0; w < split.test.size(); ++w) {
        out.predictions.push_back({name, patient, split.test[w].window_index, labels[w], predicted[w]});
      }
    };
    if (saved) {
      record(saved->provenance.classifier, predict_all(*saved, split.test));
    } else {
      for (const auto& name : config.classifiers) {
        const auto model = fit_classifier(name, config.params, split, seed);
        record(name, predict_all(model, split.test));
      }
    }
    record("majority", std::vector<int>(labels.size(), majority_label(labels)));
  });

  EvaluationResult result;
  for (auto& p : per_patient) {
    for (auto& r : p.rows) result.rows.push_back(std::move(r));
    for (auto& r : p.predictions) result.predictions.push_back(std::move(r));
  }

  log << std::left << std::setw(10) << "patient" << std::setw(13) << "classifier" << std::right
      << std::setw(10) << "precision" << std::setw(10) << "recall" << std::setw(10) << "f1"
      << std::setw(10) << "accuracy" << '\n';
  std::map<std::string, std::pair<double, std::size_t>> mean_f1;
  std::vector<std::string> order;
  for (const auto& r : result.rows) {
    log << std::left << std::setw(10) << r.patient << std::setw(13) << r.classifier << std::right
        << std::fixed << std::setprecision(4) << std::setw(10) << r.metrics.precision
        << std::setw(10) << r.metrics.recall << std::setw(10) << r.metrics.f1 << std::setw(10)
        << r.metrics.accuracy << '\n';
    auto& [sum, n] = mean_f1[r.classifier];
    if (n == 0) order.push_back(r.classifier);
    sum += r.metrics.f1;
    ++n;
  }
  for (const auto& name : order) {
    const auto& [sum, n] = mean_f1[name];
    log << "mean F1 " << std::left << std::setw(13) << name << std::right << std::fixed
        << std::setprecision(4) << sum / static_cast<double>(n) << '\n';
  }

  if (config.output) write_evaluation_csv(result.rows, *config.output);
  if (config.predictions) write_predictions_csv(result.predictions, *config.predictions);
  return result;
}

void write_evaluation_csv(const std::vector<EvaluationRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "protocol,classifier,patient,precision,recall,f1,accuracy\n";
  for (const auto& r : rows) {
    out << r.protocol << ',' << r.classifier << ',' << r.patient << ','
        << text::format_double(r.metrics.precision) << ',' << text::format_double(r.metrics.recall)
        << ',' << text::format_double(r.metrics.f1) << ',' << text::format_double(r.metrics.accuracy)
        << '\n';
  }
}

void write_predictions_csv(const std::vector<PredictionRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "classifier,patient,window_index,label,prediction\n";
  for (const auto& r : rows) {
    out << r.classifier << ',' << r.patient << ',' << r.window_index << ',' << r.label << ','
        << r.prediction << '\n';
  }
}

CostReport cmd_cost_report(const CostReportConfig& config, std::ostream& out) {
  const auto report = relative_report(config.params);
  std::optional<ActualDbnCost> actual;
  if (config.actual_model) {
    const auto model = load_model(*config.actual_model);
    const auto* dbn = std::get_if<DbnModel>(&model.model);
    if (dbn == nullptr) throw InvalidArgument("--actual needs a DBN model file");
    std::vector<std::size_t> sizes{dbn->input_dimension()};
    for (const auto& rbm : dbn->layers) sizes.push_back(rbm.n_hidden());
    actual = actual_dbn_cost(sizes, config.params);
  }

  const auto& p = report.params;
  out << "W=" << p.window << " T=" << p.train_windows << " C=" << p.channels << " M=" << p.features
      << " R=" << p.bits << " N=" << p.neighbors << " L=" << p.dbn_layers
      << " alpha_K=" << p.alpha_peak << " alpha_CNN=" << p.alpha_cnn << " alpha_SVM=" << p.alpha_svm
      << '\n';
  out << std::left << std::setw(12) << "classifier" << std::right << std::setw(16) << "memory_bits"
      << std::setw(16) << "ops" << std::setw(14) << "memory_vs_LR" << std::setw(14) << "ops_vs_LR"
      << '\n';
  const double lr_mem = report.row(ClassifierKind::kLr).memory_bits;
  const double lr_ops = report.row(ClassifierKind::kLr).computation_ops;
  const auto line = [&](const std::string& name, double mem, double ops, bool ratios) {
    out << std::left << std::setw(12) << name << std::right << std::fixed << std::setprecision(0)
        << std::setw(16) << mem << std::setw(16) << ops;
    if (ratios) {
      out << std::setprecision(3) << std::setw(13) << mem / lr_mem << 'x' << std::setw(13)
          << ops / lr_ops << 'x';
    } else {
      out << std::setw(14) << "-" << std::setw(14) << "-";
    }
    out << '\n';
    out.unsetf(std::ios::fixed);
  };
  for (const auto& r : report.rows) {
    line(to_string(r.kind), r.memory_bits, r.computation_ops, r.kind != ClassifierKind::kSimpleFeatures);
  }
  if (actual) line("DBN(actual)", actual->memory_bits, actual->computation_ops, true);
  if (config.csv) write_cost_csv(report, actual, *config.csv);
  return report;
}

void write_cost_csv(const CostReport& report, const std::optional<ActualDbnCost>& actual,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "classifier,memory_bits,computation_ops,memory_ratio_vs_lr,computation_ratio_vs_lr\n";
  for (const auto& r : report.rows) {
    out << to_string(r.kind) << ',' << text::format_double(r.memory_bits) << ','
        << text::format_double(r.computation_ops) << ',' << text::format_double(r.memory_ratio)
        << ',' << text::format_double(r.computation_ratio) << '\n';
  }
  if (actual) {
    const auto& lr = report.row(ClassifierKind::kLr);
    out << "DBN(actual)," << text::format_double(actual->memory_bits) << ','
        << text::format_double(actual->computation_ops) << ','
        << text::format_double(actual->memory_bits / lr.memory_bits) << ','
        << text::format_double(actual->computation_ops / lr.computation_ops) << '\n';
  }
}

}  // namespace seizure::cli
