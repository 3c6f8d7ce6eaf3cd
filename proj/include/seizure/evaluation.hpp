#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "seizure/error.hpp"
#include "seizure/rng.hpp"

namespace seizure {

// Positive class is seizure (label 1).
struct Metrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;

  std::size_t total() const { return tp + fp + fn + tn; }
};

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels);

// Predicts the more frequent label everywhere; a tie predicts non-seizure.
Metrics majority_baseline(std::span<const int> labels);
int majority_label(std::span<const int> labels);

enum class SplitOrder { kShuffled, kContiguous };

// Works for any item type exposing `label` and `patient_id` members.
template <typename Item>
struct Split {
  std::vector<Item> train;
  std::vector<Item> validation;
  std::vector<Item> test;
  std::vector<std::string> train_patients;
  std::vector<std::string> test_patients;
};

namespace detail {

template <typename Item>
void order_items(std::vector<Item>& items, std::uint64_t seed, SplitOrder order) {
  if (order == SplitOrder::kShuffled) {
    auto rng = make_rng(seed, RngStream::kSplit);
    std::vector<std::size_t> perm(items.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span(perm));
    std::vector<Item> shuffled;
    shuffled.reserve(items.size());
    for (const auto i : perm) shuffled.push_back(std::move(items[i]));
    items = std::move(shuffled);
  }
}

template <typename Item>
std::vector<std::string> patients_of(const std::vector<Item>& items) {
  std::vector<std::string> ids;
  for (const auto& it : items) ids.push_back(it.patient_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

template <typename Item>
bool both_classes(const std::vector<Item>& items) {
  bool pos = false;
  bool neg = false;
  for (const auto& it : items) (it.label == 1 ? pos : neg) = true;
  return pos && neg;
}

}  // namespace detail

// 5:1:1 train/validation/test. Validation and test each get floor(n / 7)
// items; the remainder goes to train.
template <typename Item>
Split<Item> split_single_patient(std::vector<Item> items, std::uint64_t seed,
                                 SplitOrder order = SplitOrder::kShuffled) {
  if (items.size() < 7) {
    throw InvalidArgument("single-patient split needs at least 7 windows, got " +
                          std::to_string(items.size()));
  }
  detail::order_items(items, seed, order);
  const std::size_t held = items.size() / 7;
  const std::size_t n_train = items.size() - 2 * held;
  Split<Item> split;
  auto it = std::make_move_iterator(items.begin());
  split.train.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
  split.validation.assign(it + static_cast<std::ptrdiff_t>(n_train),
                          it + static_cast<std::ptrdiff_t>(n_train + held));
  split.test.assign(it + static_cast<std::ptrdiff_t>(n_train + held),
                    std::make_move_iterator(items.end()));
  if (!detail::both_classes(split.train)) {
    throw InvalidArgument("training partition lacks one of the two classes");
  }
  split.train_patients = detail::patients_of(split.train);
  split.test_patients = detail::patients_of(split.test);
  return split;
}

// Test = every window of test_patient. The remaining patients are pooled and
// split 4:1 into train/validation (validation gets floor(n / 5)).
template <typename Item>
Split<Item> split_leave_one_out(const std::map<std::string, std::vector<Item>>& patients,
                                const std::string& test_patient, std::uint64_t seed,
                                SplitOrder order = SplitOrder::kShuffled) {
  if (patients.size() < 2) throw InvalidArgument("leave-one-out needs at least 2 patients");
  const auto found = patients.find(test_patient);
  if (found == patients.end()) throw InvalidArgument("unknown test patient '" + test_patient + "'");
  Split<Item> split;
  std::vector<Item> pool;
  for (const auto& [id, items] : patients) {
    if (id == test_patient) continue;
    pool.insert(pool.end(), items.begin(), items.end());
  }
  split.test = found->second;
  detail::order_items(pool, seed, order);
  const std::size_t n_val = pool.size() / 5;
  const std::size_t n_train = pool.size() - n_val;
  auto it = std::make_move_iterator(pool.begin());
  split.train.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
  split.validation.assign(it + static_cast<std::ptrdiff_t>(n_train),
                          std::make_move_iterator(pool.end()));
  split.train_patients = detail::patients_of(split.train);
  split.test_patients = {test_patient};
  return split;
}

}  // namespace seizure
