#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seizure/classifiers.hpp"
#include "seizure/preprocessing.hpp"
#include "seizure/rng.hpp"

namespace seizure {

// Restricted Boltzmann machine: weights are n_visible x n_hidden.
struct Rbm {
  Eigen::MatrixXd weights;
  Eigen::VectorXd visible_bias;
  Eigen::VectorXd hidden_bias;

  std::size_t n_visible() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t n_hidden() const { return static_cast<std::size_t>(weights.cols()); }
};

// Weights uniform in +-4 sqrt(6 / (n_visible + n_hidden)), drawn row-major
// from `rng`; biases zero.
Rbm rbm_init(std::size_t n_visible, std::size_t n_hidden, Rng& rng);
Rbm rbm_init(std::size_t n_visible, std::size_t n_hidden, std::uint64_t seed);

// logistic(W' v + h).
Eigen::VectorXd rbm_hidden_probs(const Rbm& rbm, const Eigen::VectorXd& visible);
// Row-wise over a batch (one sample per row).
Eigen::MatrixXd rbm_hidden_probs(const Rbm& rbm, const Eigen::MatrixXd& visible);
// logistic(W h + v).
Eigen::MatrixXd rbm_visible_probs(const Rbm& rbm, const Eigen::MatrixXd& hidden);

// One CD-1 step on a batch (one sample per row). For each sample, in row
// order, one uniform per hidden unit (in unit order) decides the binary
// hidden state that drives the reconstruction. Outer products use
// probabilities, and the update is rate times the batch mean.
void rbm_cd1_update(Rbm& rbm, const Eigen::MatrixXd& batch, double rate, Rng& rng);

// Mean cross-entropy between each sample and its mean-field reconstruction.
double rbm_reconstruction_cross_entropy(const Rbm& rbm, const Eigen::MatrixXd& data);

enum class FinetuneMode : std::uint8_t { kFull = 0, kTop = 1 };

std::string to_string(FinetuneMode mode);
FinetuneMode finetune_mode_from_string(const std::string& name);

struct DbnHyperparams {
  std::vector<std::size_t> layer_sizes{207, 500, 500};
  std::size_t pretrain_epochs = 25;
  double pretrain_rate = 0.001;
  std::size_t finetune_iterations = 16;
  double finetune_rate = 0.1;
  std::size_t batch_size = 10;
  FinetuneMode mode = FinetuneMode::kFull;
  std::uint64_t seed = 0;
};

struct DbnModel {
  std::vector<Rbm> layers;
  Eigen::MatrixXd output_weights;  // last hidden size x 2
  Eigen::VectorXd output_bias;     // 2
  DbnHyperparams params;

  std::size_t input_dimension() const { return layers.empty() ? 0 : layers.front().n_visible(); }
  // Throws if adjacent layer sizes do not chain or the output is not 2 wide.
  void validate() const;
};

Eigen::MatrixXd to_matrix(std::span<const FeatureVector> vectors);

// Greedy layer-wise CD-1. layer_sizes includes the input width, so
// {207, 500, 500} yields two RBMs. Labels are never consulted.
std::vector<Rbm> dbn_pretrain(const std::vector<std::size_t>& layer_sizes,
                              const Eigen::MatrixXd& data, std::size_t epochs, double rate,
                              std::size_t batch_size, std::uint64_t seed);

struct FinetuneOptions {
  double rate = 0.1;
  std::size_t iterations = 16;
  std::size_t batch_size = 10;
  FinetuneMode mode = FinetuneMode::kFull;
  std::uint64_t seed = 0;
  // When set, the parameters with the best validation F1 over all
  // iterations are kept (earliest on ties).
  const Dataset* validation = nullptr;
};

// Adds a zero-initialized softmax output layer and trains by minibatch
// gradient descent on mean cross-entropy.
DbnModel dbn_finetune(std::vector<Rbm> stack, const Dataset& train,
                      const FinetuneOptions& options);

struct DbnGradient {
  double loss = 0.0;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> hidden_bias;
  Eigen::MatrixXd output_weights;
  Eigen::VectorXd output_bias;
};

// Mean cross-entropy and its gradient over every parameter used by the
// forward pass (visible biases are not).
DbnGradient dbn_loss_gradient(const DbnModel& model, const Eigen::MatrixXd& inputs,
                              std::span<const int> labels);

struct DbnPrediction {
  int label = 0;
  std::array<double, 2> probabilities{0.5, 0.5};
};

// Deterministic forward pass on hidden probabilities, softmax output,
// argmax label with ties to 0.
DbnPrediction dbn_predict(const DbnModel& model, std::span<const double> x);

// Full pipeline with the given hyperparameters.
DbnModel dbn_train(const Dataset& train, const DbnHyperparams& params,
                   const Dataset* validation = nullptr);

}  // namespace seizure
