#include <doctest.h>

#include <cmath>

#include "oracles/finite_diff.hpp"
#include "oracles/hart_check.hpp"
#include "oracles/svm_qp_oracle.hpp"
#include "seizure/classifiers.hpp"
#include "seizure/error.hpp"
#include "support.hpp"

using namespace seizure;

namespace {

Dataset one_dim(std::vector<double> xs, std::vector<int> ys) {
  Dataset d;
  for (const double x : xs) d.vectors.push_back({x});
  d.labels = std::move(ys);
  return d;
}

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t dim) {
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    d.vectors.push_back(testing::random_vector(rng, dim));
    d.labels.push_back(static_cast<int>(rng.below(2)));
  }
  return d;
}

}  // namespace

TEST_CASE("dataset validation") {
  CHECK_THROWS(Dataset{}.validate());
  CHECK_THROWS(one_dim({1, 2}, {0}).validate());
  CHECK_THROWS(one_dim({1, 2}, {0, 2}).validate());
  Dataset ragged{{{1.0}, {1.0, 2.0}}, {0, 1}};
  CHECK_THROWS(ragged.validate());
  CHECK_NOTHROW(one_dim({1, 2}, {0, 1}).validate());
  CHECK(one_dim({1, 2}, {0, 1}).has_both_classes());
  CHECK_FALSE(one_dim({1, 2}, {1, 1}).has_both_classes());
}

TEST_CASE("knn examples") {
  const auto train = one_dim({0, 1, 10}, {0, 0, 1});
  CHECK(knn_classify(train, 3, std::vector<double>{0.5}) == 0);
  CHECK(knn_classify(train, 1, std::vector<double>{10}) == 1);
  CHECK_THROWS(knn_classify(train, 5, std::vector<double>{0.5}));
  CHECK_THROWS(knn_classify(train, 2, std::vector<double>{0.5}));
  CHECK_THROWS(knn_classify(train, 1, std::vector<double>{0.5, 1}));

  // Equidistant neighbours: the lower index wins the last seat.
  const auto tie = one_dim({-1, 1, 1}, {1, 0, 1});
  CHECK(knn_classify(tie, 1, std::vector<double>{0}) == 1);
  const auto tie2 = one_dim({1, -1}, {0, 1});
  CHECK(knn_classify(tie2, 1, std::vector<double>{0}) == 0);
}

TEST_CASE("property: knn self-label and duplicated training sets") {
  auto rng = make_rng(31, RngStream::kSynth);
  for (int t = 0; t < 50; ++t) {
    const auto d = random_dataset(rng, 5 + rng.below(30), 3);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(knn_classify(d, 1, d.vectors[i]) == d.labels[i]);
    Dataset twice = d;
    twice.vectors.insert(twice.vectors.end(), d.vectors.begin(), d.vectors.end());
    twice.labels.insert(twice.labels.end(), d.labels.begin(), d.labels.end());
    for (int q = 0; q < 10; ++q) {
      const auto x = testing::random_vector(rng, 3);
      // The 2k-1 nearest of the doubled set are the k nearest originals,
      // the last one once and the rest twice: the same majority.
      for (const int k : {1, 3, 5}) {
        if (static_cast<std::size_t>(k) > d.size()) continue;
        CHECK(knn_classify(twice, 2 * k - 1, x) == knn_classify(d, k, x));
      }
    }
  }
}

TEST_CASE("condensed nearest neighbour") {
  SUBCASE("single class keeps one instance") {
    const auto d = one_dim({1, 2, 3, 4}, {1, 1, 1, 1});
    CHECK(cnn_condense(d, 0).size() == 1);
  }
  SUBCASE("two separated clusters") {
    const auto d = one_dim({0, 0.1, 0.2, 10, 10.1}, {0, 0, 0, 1, 1});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = cnn_condense(d, seed);
      CHECK(s.size() <= 3);
      CHECK(oracle::one_nn_consistent(d.vectors, d.labels, s.vectors, s.labels));
    }
  }
  SUBCASE("store is a subset of the training set") {
    auto rng = make_rng(32, RngStream::kSynth);
    const auto d = random_dataset(rng, 60, 4);
    const auto s = cnn_condense(d, 5);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto it = std::find(d.vectors.begin(), d.vectors.end(), s.vectors[i]);
      REQUIRE(it != d.vectors.end());
      CHECK(d.labels[static_cast<std::size_t>(it - d.vectors.begin())] == s.labels[i]);
    }
    CHECK(cnn_condense(d, 5).vectors == s.vectors);
  }
}

TEST_CASE("property: condensed store is 1-NN consistent for any seed") {
  auto rng = make_rng(33, RngStream::kSynth);
  for (int t = 0; t < 40; ++t) {
    const auto d = random_dataset(rng, 10 + rng.below(80), 1 + rng.below(5));
    const auto s = cnn_condense(d, rng.next());
    CHECK(oracle::one_nn_consistent(d.vectors, d.labels, s.vectors, s.labels));
  }
}

TEST_CASE("svm two-point example") {
  const auto d = one_dim({0, 1}, {0, 1});
  Kernel linear{KernelKind::kPolynomial, 1.0, 1, 0.0};
  SUBCASE("C = 10: free multipliers, f(x) = 2x - 1") {
    const auto m = svm_train(d, linear, 10.0, 1e-6);
    CHECK(m.decision(std::vector<double>{0}) == doctest::Approx(-1).epsilon(1e-6));
    CHECK(m.decision(std::vector<double>{1}) == doctest::Approx(1).epsilon(1e-6));
    CHECK(m.decision(std::vector<double>{0.5}) == doctest::Approx(0).scale(1).epsilon(1e-6));
    CHECK(svm_classify(m, std::vector<double>{0}) == 0);
    CHECK(svm_classify(m, std::vector<double>{1}) == 1);
  }
  SUBCASE("C = 1: both at the bound, midpoint still 0.5") {
    const auto m = svm_train(d, linear, 1.0);
    CHECK(m.decision(std::vector<double>{0.5}) == doctest::Approx(0).scale(1).epsilon(1e-9));
    CHECK(svm_classify(m, std::vector<double>{0}) == 0);
    CHECK(svm_classify(m, std::vector<double>{1}) == 1);
  }
}

TEST_CASE("svm XOR with an RBF kernel") {
  Dataset xor_data{{{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {0, 0, 1, 1}};
  const auto m = svm_train(xor_data, Kernel{KernelKind::kRbf, 1.0, 3, 0.0});
  for (std::size_t i = 0; i < 4; ++i) CHECK(svm_classify(m, xor_data.vectors[i]) == xor_data.labels[i]);
}

TEST_CASE("svm errors") {
  CHECK_THROWS(svm_train(one_dim({0, 1}, {1, 1}), Kernel{}));
  CHECK_THROWS(svm_train(one_dim({0, 1}, {0, 1}), Kernel{}, 0.0));
  const auto m = svm_train(one_dim({0, 1}, {0, 1}), Kernel{});
  CHECK_THROWS(svm_classify(m, std::vector<double>{0, 1}));
}

TEST_CASE("svm dual matches exhaustive active-set enumeration") {
  auto rng = make_rng(34, RngStream::kSynth);
  // Sigmoid Gram matrices can be indefinite, where SMO only promises a
  // local optimum, so the comparison uses the two positive definite kernels.
  const KernelKind kinds[] = {KernelKind::kRbf, KernelKind::kPolynomial};
  int compared = 0;
  for (int t = 0; t < 120; ++t) {
    const std::size_t n = 2 + rng.below(3);
    auto d = random_dataset(rng, n, 2);
    d.labels[0] = 0;
    d.labels[1] = 1;
    Kernel k = Kernel::defaults(kinds[t % 2], 2);
    k.gamma = 0.5 + 2 * rng.uniform();
    if (k.kind == KernelKind::kPolynomial) {
      k.degree = 2;
      k.coef0 = 1.0;
    }
    const double c = 0.5 + 5 * rng.uniform();

    std::vector<std::vector<double>> gram(n, std::vector<double>(n));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = d.labels[i] == 1 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < n; ++j) gram[i][j] = k(d.vectors[i], d.vectors[j]);
    }
    const auto ref = oracle::svm_dual_bruteforce(gram, y, c);
    if (!std::isfinite(ref.objective)) continue;
    const auto sol = svm_solve(d, k, c, 1e-3);
    CHECK(svm_dual_objective(d, k, sol.alpha) == doctest::Approx(ref.objective).epsilon(1e-4).scale(1));
    double eq = 0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(sol.alpha[i] >= 0);
      CHECK(sol.alpha[i] <= c);
      eq += sol.alpha[i] * y[i];
    }
    CHECK(std::abs(eq) <= 1e-3);
    ++compared;
  }
  CHECK(compared >= 100);
}

TEST_CASE("property: trained svm is dual feasible and free vectors sit on the margin") {
  auto rng = make_rng(35, RngStream::kSynth);
  for (int t = 0; t < 15; ++t) {
    const auto d = testing::blobs(rng, 40 + rng.below(40), 4, 0.2, 0.15);
    const double c = 1.0;
    const double tol = 1e-3;
    const auto k = Kernel::defaults(KernelKind::kRbf, 4);
    const auto sol = svm_solve(d, k, c, tol);
    CHECK(sol.max_violation <= tol);
    double eq = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double y = d.labels[i] == 1 ? 1.0 : -1.0;
      CHECK(sol.alpha[i] >= 0);
      CHECK(sol.alpha[i] <= c);
      eq += sol.alpha[i] * y;
    }
    CHECK(std::abs(eq) <= tol);
    const auto m = svm_train(d, k, c, tol);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (sol.alpha[i] > 1e-8 && sol.alpha[i] < c - 1e-8) {
        const double y = d.labels[i] == 1 ? 1.0 : -1.0;
        CHECK(std::abs(y * m.decision(d.vectors[i]) - 1.0) <= 2 * tol);
      }
    }
    const auto x = testing::random_vector(rng, 4);
    CHECK(svm_classify(m, x) == svm_classify(m, x));
  }
}

TEST_CASE("logistic regression examples") {
  const auto d = one_dim({-1, 1}, {0, 1});
  SUBCASE("zero iterations") {
    const auto m = lr_train(d, 0.1, 0);
    CHECK(m.weights == std::vector<double>{0.0});
    CHECK(m.bias == 0.0);
    const auto [label, p] = lr_classify(m, std::vector<double>{3});
    CHECK(p == 0.5);
    CHECK(label == 1);
  }
  SUBCASE("ln 3 logit") {
    LrModel m{{1.0}, 0.0};
    const auto [label, p] = lr_classify(m, std::vector<double>{std::log(3.0)});
    CHECK(p == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(label == 1);
  }
  SUBCASE("separable 1-d data") {
    Dataset sep;
    for (int i = 0; i < 50; ++i) {
      sep.vectors.push_back({-1});
      sep.labels.push_back(0);
      sep.vectors.push_back({1});
      sep.labels.push_back(1);
    }
    const auto m = lr_train(sep, 0.1, 500);
    for (std::size_t i = 0; i < sep.size(); ++i) CHECK(lr_classify(m, sep.vectors[i]).first == sep.labels[i]);
  }
  SUBCASE("negation flips the label") {
    auto rng = make_rng(36, RngStream::kSynth);
    for (int t = 0; t < 100; ++t) {
      LrModel m{testing::random_vector(rng, 3, -2, 2), rng.uniform(-1, 1)};
      LrModel neg = m;
      for (auto& w : neg.weights) w = -w;
      neg.bias = -neg.bias;
      const auto x = testing::random_vector(rng, 3, -2, 2);
      const auto a = lr_classify(m, x);
      const auto b = lr_classify(neg, x);
      if (a.second != 0.5) CHECK(a.first != b.first);
    }
  }
  CHECK_THROWS(lr_classify(LrModel{{1, 2}, 0}, std::vector<double>{1}));
}

TEST_CASE("logistic regression gradient matches central differences") {
  auto rng = make_rng(37, RngStream::kSynth);
  for (int t = 0; t < 20; ++t) {
    const auto d = random_dataset(rng, 5 + rng.below(20), 1 + rng.below(6));
    LrModel m{testing::random_vector(rng, d.dimension(), -1, 1), rng.uniform(-1, 1)};
    const auto g = lr_loss_gradient(m, d);
    const auto loss = [&] { return lr_loss_gradient(m, d).loss; };
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
      CHECK(oracle::relative_error(g.weights[i], oracle::central_difference(&m.weights[i], loss)) <= 1e-6);
    }
    CHECK(oracle::relative_error(g.bias, oracle::central_difference(&m.bias, loss)) <= 1e-6);
  }
}

TEST_CASE("property: logistic loss does not increase at rate 0.01") {
  auto rng = make_rng(38, RngStream::kSynth);
  for (int t = 0; t < 10; ++t) {
    const auto d = testing::blobs(rng, 100, 8, 0.1, 0.2);
    LrModel m{std::vector<double>(8, 0.0), 0.0};
    double prev = lr_loss_gradient(m, d).loss;
    for (int it = 0; it < 200; ++it) {
      lr_step(m, d, 0.01);
      const double now = lr_loss_gradient(m, d).loss;
      CHECK(now <= prev + 1e-15);
      prev = now;
    }
  }
}

TEST_CASE("logistic is stable for large arguments") {
  LrModel m{{1.0}, 0.0};
  CHECK(lr_classify(m, std::vector<double>{800}).second == 1.0);
  CHECK(lr_classify(m, std::vector<double>{-800}).second == 0.0);
  Dataset d = one_dim({-500, 500}, {1, 0});
  const auto g = lr_loss_gradient(m, d);
  CHECK(std::isfinite(g.loss));
  CHECK(g.loss == doctest::Approx(500.0));
}
