#include <algorithm>
#include <limits>
#include <numeric>

#include "seizure/classifiers.hpp"
#include "seizure/error.hpp"
#include "seizure/math.hpp"
#include "seizure/rng.hpp"

namespace seizure {

bool Dataset::has_both_classes() const {
  bool pos = false;
  bool neg = false;
  for (const int y : labels) (y == 1 ? pos : neg) = true;
  return pos && neg;
}

void Dataset::validate() const {
  if (vectors.empty()) throw InvalidArgument("dataset is empty");
  if (vectors.size() != labels.size()) {
    throw DimensionError("dataset has " + std::to_string(vectors.size()) + " vectors but " +
                         std::to_string(labels.size()) + " labels");
  }
  const auto dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) throw DimensionError("dataset vectors differ in length");
  }
  for (const int y : labels) {
    if (y != 0 && y != 1) throw InvalidArgument("labels must be 0 or 1");
  }
}

int knn_classify(const Dataset& train, int k, std::span<const double> query) {
  if (k <= 0 || k % 2 == 0) throw InvalidArgument("k must be a positive odd integer");
  if (static_cast<std::size_t>(k) > train.size()) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds training size " +
                          std::to_string(train.size()));
  }
  if (query.size() != train.dimension()) throw DimensionError("query dimension mismatch");

  std::vector<std::pair<double, std::size_t>> dist(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    dist[i] = {squared_distance(train.vectors[i], query), i};
  }
  const auto kk = static_cast<std::ptrdiff_t>(k);
  std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
  int votes = 0;
  for (std::ptrdiff_t i = 0; i < kk; ++i) votes += train.labels[dist[i].second];
  return 2 * votes > k ? 1 : 0;
}

int classify(const KnnModel& model, std::span<const double> x) {
  return knn_classify(model.store, model.k, x);
}

namespace {

// Label of the nearest store member; ties go to the earlier store entry.
int nearest_label(const Dataset& train, const std::vector<std::size_t>& store,
                  std::span<const double> x) {
  double best = std::numeric_limits<double>::infinity();
  int label = 0;
  for (const auto idx : store) {
    const double d = squared_distance(train.vectors[idx], x);
    if (d < best) {
      best = d;
      label = train.labels[idx];
    }
  }
  return label;
}

}  // namespace

Dataset cnn_condense(const Dataset& train, std::uint64_t seed) {
  train.validate();
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(seed, RngStream::kCondense);
  rng.shuffle(std::span(order));

  std::vector<std::size_t> store;
  std::vector<char> in_store(train.size(), 0);
  bool seen[2] = {false, false};
  for (const auto idx : order) {
    const int y = train.labels[idx];
    if (!seen[y]) {
      seen[y] = true;
      store.push_back(idx);
      in_store[idx] = 1;
    }
  }

  bool added = true;
  while (added) {
    added = false;
    for (const auto idx : order) {
      if (in_store[idx]) continue;
      if (nearest_label(train, store, train.vectors[idx]) != train.labels[idx]) {
        store.push_back(idx);
        in_store[idx] = 1;
        added = true;
      }
    }
  }

  Dataset out;
  out.vectors.reserve(store.size());
  out.labels.reserve(store.size());
  for (const auto idx : store) {
    out.vectors.push_back(train.vectors[idx]);
    out.labels.push_back(train.labels[idx]);
  }
  return out;
}

}  // namespace seizure
