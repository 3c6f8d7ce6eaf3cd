#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "seizure/costmodel.hpp"
#include "seizure/dbn.hpp"
#include "seizure/evaluation.hpp"
#include "seizure/model_io.hpp"
#include "seizure/pipeline.hpp"

// The subcommands behind the `seizure` tool, callable in-process.
namespace seizure::cli {

struct ClassifierParams {
  int k = 5;  // for the bare name "knn"
  double svm_c = 1.0;
  double svm_tol = 1e-3;
  std::optional<double> svm_gamma;  // default 1 / dimension
  int svm_degree = 3;
  double svm_coef0 = 0.0;
  double lr_rate = 0.1;
  std::size_t lr_iterations = 1000;
  DbnHyperparams dbn;
};

// knn, knn3, knn5, knn7, cnn, svm, svm-rbf, svm-poly, svm-sigmoid, lr, dbn, dbn-top
bool is_classifier_name(const std::string& name);
const std::vector<std::string>& all_classifier_names();

enum class Protocol { kSingle, kLeaveOneOut };
std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& name);

// Fits the scaler on split.train, trains `name` on the scaled training
// partition (the DBN also watches validation F1), and packages the result.
TrainedModel fit_classifier(const std::string& name, const ClassifierParams& params,
                            const Split<FeatureRow>& split, std::uint64_t seed);

Split<FeatureRow> make_split(const std::vector<FeatureRow>& rows, Protocol protocol,
                             const std::string& patient, std::uint64_t seed, SplitOrder order);

// ---- featurize ----

struct FeaturizeConfig {
  std::vector<std::filesystem::path> edf_inputs;
  std::vector<std::filesystem::path> csv_inputs;
  int csv_sample_rate = 256;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> scaler_model;  // scale with this model's scaler
  std::filesystem::path output;
  std::size_t jobs = 1;
};

std::vector<FeatureRow> cmd_featurize(const FeaturizeConfig& config);

// ---- train ----

struct TrainConfig {
  std::filesystem::path features;
  std::string classifier = "dbn";
  ClassifierParams params;
  Protocol protocol = Protocol::kSingle;
  std::string patient;  // single: whose windows; loo: held-out patient
  std::uint64_t seed = 0;
  SplitOrder order = SplitOrder::kShuffled;
  std::filesystem::path output;
};

struct TrainResult {
  TrainedModel model;
  Metrics validation;
};

TrainResult cmd_train(const TrainConfig& config, std::ostream& log);

// ---- evaluate ----

struct EvaluateConfig {
  std::filesystem::path features;
  std::vector<std::string> classifiers{"lr"};
  ClassifierParams params;
  Protocol protocol = Protocol::kSingle;
  std::vector<std::string> patients;  // empty = every patient
  std::uint64_t seed = 0;
  SplitOrder order = SplitOrder::kShuffled;
  std::optional<std::filesystem::path> model;  // evaluate a saved model instead of training
  std::optional<std::filesystem::path> output;
  std::optional<std::filesystem::path> predictions;
  std::size_t jobs = 1;
};

struct EvaluationRow {
  std::string protocol;
  std::string classifier;
  std::string patient;
  Metrics metrics;
};

struct PredictionRow {
  std::string classifier;
  std::string patient;
  std::size_t window_index = 0;
  int label = 0;
  int prediction = 0;
};

struct EvaluationResult {
  std::vector<EvaluationRow> rows;  // includes a "majority" row per patient
  std::vector<PredictionRow> predictions;
};

EvaluationResult cmd_evaluate(const EvaluateConfig& config, std::ostream& log);

void write_evaluation_csv(const std::vector<EvaluationRow>& rows, const std::filesystem::path& path);
void write_predictions_csv(const std::vector<PredictionRow>& rows, const std::filesystem::path& path);

// ---- cost-report ----

struct CostReportConfig {
  CostParams params;
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> actual_model;
};

CostReport cmd_cost_report(const CostReportConfig& config, std::ostream& out);
void write_cost_csv(const CostReport& report, const std::optional<ActualDbnCost>& actual,
                    const std::filesystem::path& path);

}  // namespace seizure::cli
