#include "seizure/dbn.hpp"

#include <cmath>
#include <numeric>

#include "seizure/error.hpp"
#include "seizure/evaluation.hpp"
#include "seizure/math.hpp"

namespace seizure {
namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) { return logistic(v); });
}

void check_finite(const Rbm& rbm) {
  if (!rbm.weights.allFinite() || !rbm.visible_bias.allFinite() ||
      !rbm.hidden_bias.allFinite()) {
    throw Error("RBM parameters diverged to non-finite values");
  }
}

}  // namespace

Rbm rbm_init(std::size_t n_visible, std::size_t n_hidden, Rng& rng) {
  if (n_visible == 0 || n_hidden == 0) throw InvalidArgument("RBM sizes must be positive");
  const double bound = 4.0 * std::sqrt(6.0 / static_cast<double>(n_visible + n_hidden));
  Rbm rbm;
  const auto nv = static_cast<Eigen::Index>(n_visible);
  const auto nh = static_cast<Eigen::Index>(n_hidden);
  rbm.weights.resize(nv, nh);
  for (Eigen::Index r = 0; r < nv; ++r) {
    for (Eigen::Index c = 0; c < nh; ++c) rbm.weights(r, c) = rng.uniform(-bound, bound);
  }
  rbm.visible_bias = Eigen::VectorXd::Zero(nv);
  rbm.hidden_bias = Eigen::VectorXd::Zero(nh);
  return rbm;
}

Rbm rbm_init(std::size_t n_visible, std::size_t n_hidden, std::uint64_t seed) {
  auto rng = make_rng(seed, RngStream::kInit);
  return rbm_init(n_visible, n_hidden, rng);
}

Eigen::VectorXd rbm_hidden_probs(const Rbm& rbm, const Eigen::VectorXd& visible) {
  if (static_cast<std::size_t>(visible.size()) != rbm.n_visible()) {
    throw DimensionError("RBM visible dimension mismatch");
  }
  Eigen::VectorXd z = rbm.weights.transpose() * visible + rbm.hidden_bias;
  return sigmoid(z);
}

Eigen::MatrixXd rbm_hidden_probs(const Rbm& rbm, const Eigen::MatrixXd& visible) {
  if (static_cast<std::size_t>(visible.cols()) != rbm.n_visible()) {
    throw DimensionError("RBM visible dimension mismatch");
  }
  Eigen::MatrixXd z = visible * rbm.weights;
  z.rowwise() += rbm.hidden_bias.transpose();
  return sigmoid(z);
}

Eigen::MatrixXd rbm_visible_probs(const Rbm& rbm, const Eigen::MatrixXd& hidden) {
  if (static_cast<std::size_t>(hidden.cols()) != rbm.n_hidden()) {
    throw DimensionError("RBM hidden dimension mismatch");
  }
  Eigen::MatrixXd z = hidden * rbm.weights.transpose();
  z.rowwise() += rbm.visible_bias.transpose();
  return sigmoid(z);
}

void rbm_cd1_update(Rbm& rbm, const Eigen::MatrixXd& batch, double rate, Rng& rng) {
  if (batch.rows() == 0) throw InvalidArgument("CD-1 batch is empty");
  const Eigen::MatrixXd h0 = rbm_hidden_probs(rbm, batch);
  Eigen::MatrixXd h_sample(h0.rows(), h0.cols());
  for (Eigen::Index r = 0; r < h0.rows(); ++r) {
    for (Eigen::Index c = 0; c < h0.cols(); ++c) {
      h_sample(r, c) = rng.uniform() < h0(r, c) ? 1.0 : 0.0;
    }
  }
  const Eigen::MatrixXd v1 = rbm_visible_probs(rbm, h_sample);
  const Eigen::MatrixXd h1 = rbm_hidden_probs(rbm, v1);

  const double scale = rate / static_cast<double>(batch.rows());
  rbm.weights.noalias() += scale * (batch.transpose() * h0 - v1.transpose() * h1);
  rbm.visible_bias += scale * (batch - v1).colwise().sum().transpose();
  rbm.hidden_bias += scale * (h0 - h1).colwise().sum().transpose();
}

double rbm_reconstruction_cross_entropy(const Rbm& rbm, const Eigen::MatrixXd& data) {
  const Eigen::MatrixXd recon = rbm_visible_probs(rbm, rbm_hidden_probs(rbm, data));
  constexpr double kEps = 1e-12;
  double total = 0.0;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      const double v = data(r, c);
      const double p = std::clamp(recon(r, c), kEps, 1.0 - kEps);
      total -= v * std::log(p) + (1.0 - v) * std::log(1.0 - p);
    }
  }
  return total / static_cast<double>(data.rows());
}

std::string to_string(FinetuneMode mode) { return mode == FinetuneMode::kTop ? "top" : "full"; }

FinetuneMode finetune_mode_from_string(const std::string& name) {
  if (name == "full") return FinetuneMode::kFull;
  if (name == "top") return FinetuneMode::kTop;
  throw InvalidArgument("unknown finetune mode '" + name + "' (expected full or top)");
}

void DbnModel::validate() const {
  if (layers.empty()) throw DimensionError("DBN has no RBM layers");
  for (std::size_t l = 1; l < layers.size(); ++l) {
    if (layers[l].n_visible() != layers[l - 1].n_hidden()) {
      throw DimensionError("DBN layer " + std::to_string(l) + " input does not match layer " +
                           std::to_string(l - 1) + " output");
    }
  }
  for (const auto& rbm : layers) {
    if (static_cast<std::size_t>(rbm.visible_bias.size()) != rbm.n_visible() ||
        static_cast<std::size_t>(rbm.hidden_bias.size()) != rbm.n_hidden()) {
      throw DimensionError("RBM bias length does not match its weights");
    }
  }
  if (static_cast<std::size_t>(output_weights.rows()) != layers.back().n_hidden() ||
      output_weights.cols() != 2 || output_bias.size() != 2) {
    throw DimensionError("DBN output layer must map the last hidden layer to 2 classes");
  }
}

Eigen::MatrixXd to_matrix(std::span<const FeatureVector> vectors) {
  if (vectors.empty()) return {};
  const auto rows = static_cast<Eigen::Index>(vectors.size());
  const auto cols = static_cast<Eigen::Index>(vectors.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& v = vectors[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(v.size()) != cols) throw DimensionError("ragged feature vectors");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[static_cast<std::size_t>(c)];
  }
  return m;
}

namespace {

std::vector<Eigen::Index> batch_order(Eigen::Index n, Rng& rng) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));
  return order;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& data, std::span<const Eigen::Index> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), data.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = data.row(rows[i]);
  }
  return out;
}

}  // namespace

std::vector<Rbm> dbn_pretrain(const std::vector<std::size_t>& layer_sizes,
                              const Eigen::MatrixXd& data, std::size_t epochs, double rate,
                              std::size_t batch_size, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw InvalidArgument("DBN needs an input size and at least one hidden size");
  if (static_cast<std::size_t>(data.cols()) != layer_sizes.front()) {
    throw DimensionError("pretraining data has " + std::to_string(data.cols()) +
                         " columns, first layer expects " + std::to_string(layer_sizes.front()));
  }
  if (data.rows() == 0) throw InvalidArgument("pretraining data is empty");
  if (batch_size == 0) throw InvalidArgument("batch size must be positive");

  auto init_rng = make_rng(seed, RngStream::kInit);
  auto sample_rng = make_rng(seed, RngStream::kSampling);
  auto shuffle_rng = make_rng(seed, RngStream::kShuffle);

  std::vector<Rbm> stack;
  Eigen::MatrixXd input = data;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    Rbm rbm = rbm_init(layer_sizes[l - 1], layer_sizes[l], init_rng);
    for (std::size_t e = 0; e < epochs; ++e) {
      const auto order = batch_order(input.rows(), shuffle_rng);
      for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const auto len = std::min(batch_size, order.size() - start);
        const auto batch = gather_rows(input, std::span(order).subspan(start, len));
        rbm_cd1_update(rbm, batch, rate, sample_rng);
      }
    }
    check_finite(rbm);
    input = rbm_hidden_probs(rbm, input);
    stack.push_back(std::move(rbm));
  }
  return stack;
}

namespace {

struct ForwardPass {
  std::vector<Eigen::MatrixXd> activations;  // input, then each hidden layer
  Eigen::MatrixXd probabilities;             // batch x 2
};

ForwardPass forward(const DbnModel& model, const Eigen::MatrixXd& inputs) {
  ForwardPass f;
  f.activations.push_back(inputs);
  for (const auto& rbm : model.layers) {
    f.activations.push_back(rbm_hidden_probs(rbm, f.activations.back()));
  }
  Eigen::MatrixXd logits = f.activations.back() * model.output_weights;
  logits.rowwise() += model.output_bias.transpose();
  f.probabilities.resize(logits.rows(), 2);
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    const double e0 = std::exp(logits(r, 0) - m);
    const double e1 = std::exp(logits(r, 1) - m);
    f.probabilities(r, 0) = e0 / (e0 + e1);
    f.probabilities(r, 1) = e1 / (e0 + e1);
  }
  return f;
}

DbnGradient backward(const DbnModel& model, const ForwardPass& f, std::span<const int> labels,
                     bool through_layers) {
  const auto n = f.probabilities.rows();
  DbnGradient g;
  Eigen::MatrixXd delta = f.probabilities;
  for (Eigen::Index r = 0; r < n; ++r) {
    const int y = labels[static_cast<std::size_t>(r)];
    g.loss -= std::log(std::max(f.probabilities(r, y), 1e-300));
    delta(r, y) -= 1.0;
  }
  g.loss /= static_cast<double>(n);
  delta /= static_cast<double>(n);

  g.output_weights = f.activations.back().transpose() * delta;
  g.output_bias = delta.colwise().sum().transpose();
  if (!through_layers) return g;

  const auto layers = model.layers.size();
  g.weights.resize(layers);
  g.hidden_bias.resize(layers);
  Eigen::MatrixXd upstream = delta * model.output_weights.transpose();
  for (std::size_t l = layers; l-- > 0;) {
    const auto& a = f.activations[l + 1];
    const Eigen::MatrixXd local = upstream.array() * a.array() * (1.0 - a.array());
    g.weights[l] = f.activations[l].transpose() * local;
    g.hidden_bias[l] = local.colwise().sum().transpose();
    if (l > 0) upstream = local * model.layers[l].weights.transpose();
  }
  return g;
}

double validation_f1(const DbnModel& model, const Eigen::MatrixXd& inputs,
                     std::span<const int> labels) {
  const auto f = forward(model, inputs);
  std::vector<int> predictions(static_cast<std::size_t>(inputs.rows()));
  for (Eigen::Index r = 0; r < inputs.rows(); ++r) {
    predictions[static_cast<std::size_t>(r)] = f.probabilities(r, 1) > f.probabilities(r, 0) ? 1 : 0;
  }
  return compute_metrics(predictions, labels).f1;
}

}  // namespace

DbnGradient dbn_loss_gradient(const DbnModel& model, const Eigen::MatrixXd& inputs,
                              std::span<const int> labels) {
  model.validate();
  if (static_cast<std::size_t>(inputs.rows()) != labels.size()) {
    throw DimensionError("inputs and labels differ in length");
  }
  if (static_cast<std::size_t>(inputs.cols()) != model.input_dimension()) {
    throw DimensionError("DBN input dimension mismatch");
  }
  return backward(model, forward(model, inputs), labels, true);
}

DbnModel dbn_finetune(std::vector<Rbm> stack, const Dataset& train,
                      const FinetuneOptions& options) {
  train.validate();
  if (options.batch_size == 0) throw InvalidArgument("batch size must be positive");
  DbnModel model;
  model.layers = std::move(stack);
  if (model.layers.empty()) throw DimensionError("DBN has no RBM layers");
  const auto top = static_cast<Eigen::Index>(model.layers.back().n_hidden());
  model.output_weights = Eigen::MatrixXd::Zero(top, 2);
  model.output_bias = Eigen::VectorXd::Zero(2);
  model.validate();
  if (train.dimension() != model.input_dimension()) {
    throw DimensionError("training vectors have " + std::to_string(train.dimension()) +
                         " features, DBN expects " + std::to_string(model.input_dimension()));
  }

  const Eigen::MatrixXd inputs = to_matrix(train.vectors);
  Eigen::MatrixXd val_inputs;
  if (options.validation != nullptr) {
    options.validation->validate();
    val_inputs = to_matrix(options.validation->vectors);
  }
  const bool full = options.mode == FinetuneMode::kFull;

  // In top mode the hidden features never change, so compute them once.
  Eigen::MatrixXd top_inputs;
  if (!full) {
    top_inputs = inputs;
    for (const auto& rbm : model.layers) top_inputs = rbm_hidden_probs(rbm, top_inputs);
  }

  auto shuffle_rng = make_rng(options.seed, RngStream::kFinetune);
  DbnModel best = model;
  double best_f1 = -1.0;
  std::vector<int> batch_labels;
  for (std::size_t it = 0; it < options.iterations; ++it) {
    const auto order = batch_order(inputs.rows(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const auto len = std::min(options.batch_size, order.size() - start);
      const auto rows = std::span(order).subspan(start, len);
      batch_labels.clear();
      for (const auto r : rows) batch_labels.push_back(train.labels[static_cast<std::size_t>(r)]);

      if (full) {
        const auto g = backward(model, forward(model, gather_rows(inputs, rows)), batch_labels, true);
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
          model.layers[l].weights -= options.rate * g.weights[l];
          model.layers[l].hidden_bias -= options.rate * g.hidden_bias[l];
        }
        model.output_weights -= options.rate * g.output_weights;
        model.output_bias -= options.rate * g.output_bias;
      } else {
        // Output layer alone: softmax regression on the fixed top features.
        const Eigen::MatrixXd a = gather_rows(top_inputs, rows);
        Eigen::MatrixXd logits = a * model.output_weights;
        logits.rowwise() += model.output_bias.transpose();
        Eigen::MatrixXd delta(logits.rows(), 2);
        for (Eigen::Index r = 0; r < logits.rows(); ++r) {
          const double m = logits.row(r).maxCoeff();
          const double e0 = std::exp(logits(r, 0) - m);
          const double e1 = std::exp(logits(r, 1) - m);
          delta(r, 0) = e0 / (e0 + e1);
          delta(r, 1) = e1 / (e0 + e1);
          delta(r, batch_labels[static_cast<std::size_t>(r)]) -= 1.0;
        }
        delta /= static_cast<double>(len);
        model.output_weights -= options.rate * (a.transpose() * delta);
        model.output_bias -= options.rate * delta.colwise().sum().transpose();
      }
    }
    if (!model.output_weights.allFinite()) throw Error("finetuning diverged to non-finite values");
    if (options.validation != nullptr) {
      const double f1 = validation_f1(model, val_inputs, options.validation->labels);
      if (f1 > best_f1) {
        best_f1 = f1;
        best = model;
      }
    }
  }
  return options.validation != nullptr && best_f1 >= 0.0 ? best : model;
}

DbnPrediction dbn_predict(const DbnModel& model, std::span<const double> x) {
  if (x.size() != model.input_dimension()) {
    throw DimensionError("DBN expects " + std::to_string(model.input_dimension()) +
                         " features, got " + std::to_string(x.size()));
  }
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (const auto& rbm : model.layers) {
    a = (rbm.weights.transpose() * a + rbm.hidden_bias).unaryExpr([](double v) { return logistic(v); });
  }
  const Eigen::VectorXd logits = model.output_weights.transpose() * a + model.output_bias;
  const double m = logits.maxCoeff();
  const double e0 = std::exp(logits(0) - m);
  const double e1 = std::exp(logits(1) - m);
  DbnPrediction p;
  p.probabilities = {e0 / (e0 + e1), e1 / (e0 + e1)};
  p.label = p.probabilities[1] > p.probabilities[0] ? 1 : 0;
  return p;
}

DbnModel dbn_train(const Dataset& train, const DbnHyperparams& params, const Dataset* validation) {
  train.validate();
  auto stack = dbn_pretrain(params.layer_sizes, to_matrix(train.vectors), params.pretrain_epochs,
                            params.pretrain_rate, params.batch_size, params.seed);
  FinetuneOptions opts;
  opts.rate = params.finetune_rate;
  opts.iterations = params.finetune_iterations;
  opts.batch_size = params.batch_size;
  opts.mode = params.mode;
  opts.seed = params.seed;
  opts.validation = validation;
  auto model = dbn_finetune(std::move(stack), train, opts);
  model.params = params;
  return model;
}

}  // namespace seizure
