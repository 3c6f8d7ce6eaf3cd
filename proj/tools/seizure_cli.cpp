// seizure: synthgen, featurize, train, evaluate and cost-report from the shell.

#include <CLI11.hpp>

#include <iostream>

#include "seizure/commands.hpp"
#include "seizure/error.hpp"
#include "seizure/synth.hpp"

using namespace seizure;

namespace {

void add_seed(CLI::App* app, std::uint64_t& seed) {
  app->add_option("--seed", seed, "Seed for every random stream")->envname("SEIZURE_SEED");
}

void add_classifier_params(CLI::App* app, cli::ClassifierParams& p, std::string& layers) {
  app->add_option("--k", p.k, "Neighbors for the bare 'knn' classifier");
  app->add_option("--svm-c", p.svm_c, "SVM box constraint");
  app->add_option("--svm-tol", p.svm_tol, "SVM KKT tolerance");
  app->add_option("--svm-gamma", p.svm_gamma, "Kernel gamma (default 1/dimension)");
  app->add_option("--svm-degree", p.svm_degree, "Polynomial kernel degree");
  app->add_option("--svm-coef0", p.svm_coef0, "Polynomial/sigmoid kernel offset");
  app->add_option("--lr-rate", p.lr_rate, "Logistic regression step size");
  app->add_option("--lr-iterations", p.lr_iterations, "Logistic regression iterations");
  app->add_option("--dbn-layers", layers, "DBN layer widths, input first, e.g. 207,500,500");
  app->add_option("--dbn-pretrain-epochs", p.dbn.pretrain_epochs, "CD-1 epochs per layer");
  app->add_option("--dbn-pretrain-rate", p.dbn.pretrain_rate, "CD-1 learning rate");
  app->add_option("--dbn-finetune-iterations", p.dbn.finetune_iterations, "Fine-tuning epochs");
  app->add_option("--dbn-finetune-rate", p.dbn.finetune_rate, "Fine-tuning learning rate");
  app->add_option("--dbn-batch", p.dbn.batch_size, "Minibatch size");
}

std::vector<std::size_t> parse_layers(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& part : CLI::detail::split(text, ',')) {
    const auto v = std::stoll(part);
    if (v <= 0) throw InvalidArgument("DBN layer widths must be positive");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.size() < 2) throw InvalidArgument("--dbn-layers needs the input width and at least one hidden layer");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seizure detection from scalp EEG: features, classifiers, costs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file (flags take precedence)");

  // synthgen
  SynthConfig synth;
  std::string synth_out;
  auto* synthgen = app.add_subcommand("synthgen", "Write a synthetic multi-patient EDF corpus");
  synthgen->add_option("--patients", synth.patients, "Number of patients")->check(CLI::PositiveNumber);
  synthgen->add_option("--seconds", synth.seconds, "Seconds per recording")->check(CLI::PositiveNumber);
  synthgen->add_option("--channels", synth.channels, "Channels per recording")->check(CLI::PositiveNumber);
  synthgen->add_option("--sample-rate", synth.sample_rate, "Samples per second")->check(CLI::PositiveNumber);
  synthgen->add_option("--seizure-fraction", synth.seizure_fraction, "Approximate ictal fraction")
      ->check(CLI::Range(0.0, 0.5));
  synthgen->add_option("--out", synth_out, "Output directory")->required();
  add_seed(synthgen, synth.seed);

  // featurize
  cli::FeaturizeConfig feat;
  std::string feat_labels, feat_scaler;
  auto* featurize = app.add_subcommand("featurize", "Turn recordings into a feature CSV");
  featurize->add_option("--edf", feat.edf_inputs, "EDF recordings")->check(CLI::ExistingFile);
  featurize->add_option("--csv", feat.csv_inputs, "CSV recordings (one column per channel)")
      ->check(CLI::ExistingFile);
  featurize->add_option("--csv-rate", feat.csv_sample_rate, "Sample rate of CSV recordings")
      ->check(CLI::PositiveNumber);
  featurize->add_option("--labels", feat_labels, "Seizure annotation CSV");
  featurize->add_option("--scaler-from", feat_scaler, "Scale features with this model's scaler")
      ->check(CLI::ExistingFile);
  featurize->add_option("--out", feat.output, "Output feature CSV")->required();
  featurize->add_option("--jobs", feat.jobs, "Worker threads")->check(CLI::PositiveNumber);

  // train
  cli::TrainConfig train;
  std::string train_protocol = "single", train_layers;
  bool train_contiguous = false;
  auto* train_cmd = app.add_subcommand("train", "Train one classifier and save it");
  train_cmd->add_option("--features", train.features, "Feature CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--classifier", train.classifier, "Classifier name");
  train_cmd->add_option("--protocol", train_protocol, "single or loo");
  train_cmd->add_option("--patient", train.patient, "Patient (single) or held-out patient (loo)");
  train_cmd->add_flag("--contiguous", train_contiguous, "Split in time order instead of shuffling");
  train_cmd->add_option("--out", train.output, "Model file")->required();
  add_seed(train_cmd, train.seed);
  add_classifier_params(train_cmd, train.params, train_layers);

  // evaluate
  cli::EvaluateConfig eval;
  std::string eval_protocol = "single", eval_layers, eval_classifiers, eval_model, eval_out, eval_pred;
  bool eval_contiguous = false;
  auto* evaluate = app.add_subcommand("evaluate", "Train and score classifiers per patient");
  evaluate->add_option("--features", eval.features, "Feature CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--classifiers", eval_classifiers, "Comma-separated classifier names, or 'all'");
  evaluate->add_option("--protocol", eval_protocol, "single or loo");
  evaluate->add_option("--patients", eval.patients, "Patients to score (default all)")->delimiter(',');
  evaluate->add_option("--model", eval_model, "Score a saved model instead of training")
      ->check(CLI::ExistingFile);
  evaluate->add_flag("--contiguous", eval_contiguous, "Split in time order instead of shuffling");
  evaluate->add_option("--out", eval_out, "Per-patient metrics CSV");
  evaluate->add_option("--predictions", eval_pred, "Per-window predictions CSV");
  evaluate->add_option("--jobs", eval.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_seed(evaluate, eval.seed);
  add_classifier_params(evaluate, eval.params, eval_layers);

  // cost-report
  cli::CostReportConfig cost;
  std::string cost_csv, cost_actual;
  auto* cost_cmd = app.add_subcommand("cost-report", "Memory and operation counts per classifier");
  cost_cmd->add_option("--w", cost.params.window, "Samples per window");
  cost_cmd->add_option("--t", cost.params.train_windows, "Training windows");
  cost_cmd->add_option("--c", cost.params.channels, "Channels");
  cost_cmd->add_option("--m", cost.params.features, "Features per channel");
  cost_cmd->add_option("--r", cost.params.bits, "Bit resolution");
  cost_cmd->add_option("--n", cost.params.neighbors, "KNN neighbors");
  cost_cmd->add_option("--l", cost.params.dbn_layers, "DBN hidden layers");
  cost_cmd->add_option("--alpha-k", cost.params.alpha_peak, "Peak fraction of samples");
  cost_cmd->add_option("--alpha-cnn", cost.params.alpha_cnn, "CNN store fraction");
  cost_cmd->add_option("--alpha-svm", cost.params.alpha_svm, "Support vector fraction");
  cost_cmd->add_option("--csv", cost_csv, "Also write the table as CSV");
  cost_cmd->add_option("--actual", cost_actual, "Add the exact cost of a saved DBN model")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (synthgen->parsed()) {
      const auto paths = write_synth_corpus(synth, synth_out);
      std::cout << "wrote " << paths.size() << " recordings and labels.csv to " << synth_out << '\n';
    } else if (featurize->parsed()) {
      if (!feat_labels.empty()) feat.labels = feat_labels;
      if (!feat_scaler.empty()) feat.scaler_model = feat_scaler;
      const auto rows = cli::cmd_featurize(feat);
      std::cout << "wrote " << rows.size() << " windows to " << feat.output.string() << '\n';
    } else if (train_cmd->parsed()) {
      train.protocol = cli::protocol_from_string(train_protocol);
      train.order = train_contiguous ? SplitOrder::kContiguous : SplitOrder::kShuffled;
      if (!train_layers.empty()) train.params.dbn.layer_sizes = parse_layers(train_layers);
      if (!cli::is_classifier_name(train.classifier)) {
        throw InvalidArgument("unknown classifier '" + train.classifier + "'");
      }
      cli::cmd_train(train, std::cout);
    } else if (evaluate->parsed()) {
      eval.protocol = cli::protocol_from_string(eval_protocol);
      eval.order = eval_contiguous ? SplitOrder::kContiguous : SplitOrder::kShuffled;
      if (!eval_layers.empty()) eval.params.dbn.layer_sizes = parse_layers(eval_layers);
      if (eval_classifiers == "all") {
        eval.classifiers = cli::all_classifier_names();
      } else if (!eval_classifiers.empty()) {
        eval.classifiers = CLI::detail::split(eval_classifiers, ',');
      }
      if (!eval_model.empty()) eval.model = eval_model;
      if (!eval_out.empty()) eval.output = eval_out;
      if (!eval_pred.empty()) eval.predictions = eval_pred;
      cli::cmd_evaluate(eval, std::cout);
    } else if (cost_cmd->parsed()) {
      cost.params.validate();
      if (!cost_csv.empty()) cost.csv = cost_csv;
      if (!cost_actual.empty()) cost.actual_model = cost_actual;
      cli::cmd_cost_report(cost, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
