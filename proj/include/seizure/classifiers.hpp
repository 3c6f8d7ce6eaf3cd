#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seizure/preprocessing.hpp"

namespace seizure {

// Binary labels: 1 = seizure, 0 = non-seizure.
struct Dataset {
  std::vector<FeatureVector> vectors;
  std::vector<int> labels;

  std::size_t size() const { return vectors.size(); }
  std::size_t dimension() const { return vectors.empty() ? 0 : vectors.front().size(); }
  bool has_both_classes() const;
  // Throws unless nonempty, equal lengths, uniform dimension, labels in {0,1}.
  void validate() const;
};

// ---- nearest neighbours ---------------------------------------------------

// Majority vote of the k nearest (Euclidean) training vectors; equal
// distances resolve to the lower training index. k must be odd.
int knn_classify(const Dataset& train, int k, std::span<const double> query);

// Hart's condensed nearest neighbour. Pass order is a seeded shuffle; the
// store starts with the first instance of each class in that order and grows
// until a full pass adds nothing.
Dataset cnn_condense(const Dataset& train, std::uint64_t seed);

struct KnnModel {
  Dataset store;
  int k = 5;
  bool condensed = false;
};

int classify(const KnnModel& model, std::span<const double> x);

// ---- support vector machine -----------------------------------------------

enum class KernelKind : std::uint8_t { kRbf = 0, kPolynomial = 1, kSigmoid = 2 };

struct Kernel {
  KernelKind kind = KernelKind::kRbf;
  double gamma = 1.0;
  int degree = 3;
  double coef0 = 0.0;

  double operator()(std::span<const double> a, std::span<const double> b) const;

  // gamma = 1 / dimension, degree 3, coef0 0.
  static Kernel defaults(KernelKind kind, std::size_t dimension);
};

std::string to_string(KernelKind kind);
KernelKind kernel_from_string(const std::string& name);

struct SvmModel {
  Kernel kernel;
  double c_reg = 1.0;
  std::vector<FeatureVector> support_vectors;
  std::vector<double> coefficients;  // alpha_i * y_i
  double bias = 0.0;

  double decision(std::span<const double> x) const;
  std::size_t dimension() const {
    return support_vectors.empty() ? 0 : support_vectors.front().size();
  }
};

// Full dual solution over the training set, for inspection and tests.
struct SvmSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  double max_violation = 0.0;
  std::size_t iterations = 0;
};

// Soft-margin C-SVC dual solved by SMO with second-order working-set
// selection; stops once the maximal KKT violation drops below tol.
SvmSolution svm_solve(const Dataset& train, const Kernel& kernel, double c_reg, double tol);
SvmModel svm_train(const Dataset& train, const Kernel& kernel, double c_reg = 1.0,
                   double tol = 1e-3);
// sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
double svm_dual_objective(const Dataset& train, const Kernel& kernel,
                          std::span<const double> alpha);
// Sign of the decision value; zero maps to 1.
int svm_classify(const SvmModel& model, std::span<const double> x);

// ---- logistic regression --------------------------------------------------

struct LrModel {
  std::vector<double> weights;
  double bias = 0.0;
  double rate = 0.1;
  std::size_t iterations = 0;

  double probability(std::span<const double> x) const;
};

struct LrGradient {
  double loss = 0.0;  // mean cross-entropy
  std::vector<double> weights;
  double bias = 0.0;
};

LrGradient lr_loss_gradient(const LrModel& model, const Dataset& train);
// One full-batch descent step.
void lr_step(LrModel& model, const Dataset& train, double rate);
LrModel lr_train(const Dataset& train, double rate = 0.1, std::size_t iters = 1000);
// Label is 1 iff p >= 0.5.
std::pair<int, double> lr_classify(const LrModel& model, std::span<const double> x);

}  // namespace seizure
