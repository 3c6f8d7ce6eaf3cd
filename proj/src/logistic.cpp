#include "seizure/classifiers.hpp"
#include "seizure/error.hpp"
#include "seizure/math.hpp"

namespace seizure {

double LrModel::probability(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw DimensionError("logistic model expects " + std::to_string(weights.size()) +
                         " features, got " + std::to_string(x.size()));
  }
  return logistic(dot(weights, x) + bias);
}

std::pair<int, double> lr_classify(const LrModel& model, std::span<const double> x) {
  const double p = model.probability(x);
  return {p >= 0.5 ? 1 : 0, p};
}

namespace {

// -log(logistic(z)) without overflow.
double softplus_neg(double z) {
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

}  // namespace

LrGradient lr_loss_gradient(const LrModel& model, const Dataset& train) {
  LrGradient g;
  g.weights.assign(model.weights.size(), 0.0);
  const auto n = static_cast<double>(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& x = train.vectors[i];
    const double z = dot(model.weights, x) + model.bias;
    const int y = train.labels[i];
    g.loss += y == 1 ? softplus_neg(z) : softplus_neg(-z);
    const double residual = logistic(z) - y;
    for (std::size_t d = 0; d < x.size(); ++d) g.weights[d] += residual * x[d];
    g.bias += residual;
  }
  g.loss /= n;
  for (auto& w : g.weights) w /= n;
  g.bias /= n;
  return g;
}

void lr_step(LrModel& model, const Dataset& train, double rate) {
  const auto g = lr_loss_gradient(model, train);
  for (std::size_t d = 0; d < model.weights.size(); ++d) model.weights[d] -= rate * g.weights[d];
  model.bias -= rate * g.bias;
}

LrModel lr_train(const Dataset& train, double rate, std::size_t iters) {
  train.validate();
  if (!(rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  LrModel model;
  model.weights.assign(train.dimension(), 0.0);
  model.rate = rate;
  model.iterations = iters;
  for (std::size_t it = 0; it < iters; ++it) lr_step(model, train, rate);
  return model;
}

}  // namespace seizure
