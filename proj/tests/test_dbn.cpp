#include <doctest.h>

#include <cmath>

#include "oracles/cd1_replay.hpp"
#include "oracles/finite_diff.hpp"
#include "seizure/dbn.hpp"
#include "seizure/error.hpp"
#include "seizure/evaluation.hpp"
#include "support.hpp"

using namespace seizure;

namespace {

oracle::PlainRbm to_plain(const Rbm& r) {
  oracle::PlainRbm p;
  p.w.assign(r.n_visible(), std::vector<double>(r.n_hidden()));
  for (std::size_t i = 0; i < r.n_visible(); ++i)
    for (std::size_t j = 0; j < r.n_hidden(); ++j) p.w[i][j] = r.weights(long(i), long(j));
  p.vb.assign(r.visible_bias.data(), r.visible_bias.data() + r.visible_bias.size());
  p.hb.assign(r.hidden_bias.data(), r.hidden_bias.data() + r.hidden_bias.size());
  return p;
}

double max_abs_diff(const Rbm& a, const oracle::PlainRbm& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.n_visible(); ++i)
    for (std::size_t j = 0; j < a.n_hidden(); ++j)
      m = std::max(m, std::abs(a.weights(long(i), long(j)) - b.w[i][j]));
  for (std::size_t i = 0; i < a.n_visible(); ++i) m = std::max(m, std::abs(a.visible_bias(long(i)) - b.vb[i]));
  for (std::size_t j = 0; j < a.n_hidden(); ++j) m = std::max(m, std::abs(a.hidden_bias(long(j)) - b.hb[j]));
  return m;
}

bool same(const Rbm& a, const Rbm& b) {
  return a.weights == b.weights && a.visible_bias == b.visible_bias && a.hidden_bias == b.hidden_bias;
}

// Between-class centroid distance over mean within-class spread.
double separation(const Eigen::MatrixXd& x, const std::vector<int>& y) {
  Eigen::VectorXd c[2] = {Eigen::VectorXd::Zero(x.cols()), Eigen::VectorXd::Zero(x.cols())};
  double n[2] = {0, 0};
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    c[y[std::size_t(r)]] += x.row(r).transpose();
    n[y[std::size_t(r)]] += 1;
  }
  c[0] /= n[0];
  c[1] /= n[1];
  double spread = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) spread += (x.row(r).transpose() - c[y[std::size_t(r)]]).norm();
  return (c[0] - c[1]).norm() / (spread / double(x.rows()));
}

DbnModel random_model(Rng& rng, const std::vector<std::size_t>& sizes) {
  DbnModel m;
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    Rbm r = rbm_init(sizes[l - 1], sizes[l], rng);
    for (Eigen::Index j = 0; j < r.hidden_bias.size(); ++j) r.hidden_bias(j) = rng.uniform(-0.5, 0.5);
    for (Eigen::Index i = 0; i < r.visible_bias.size(); ++i) r.visible_bias(i) = rng.uniform(-0.5, 0.5);
    m.layers.push_back(r);
  }
  m.output_weights = Eigen::MatrixXd(long(sizes.back()), 2);
  for (Eigen::Index i = 0; i < m.output_weights.size(); ++i) m.output_weights.data()[i] = rng.uniform(-1, 1);
  m.output_bias = Eigen::Vector2d(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return m;
}

}  // namespace

TEST_CASE("rbm initialisation") {
  const auto a = rbm_init(207, 500, 42);
  const auto b = rbm_init(207, 500, 42);
  CHECK(same(a, b));
  CHECK(a.visible_bias.isZero());
  CHECK(a.hidden_bias.isZero());
  const double bound = 4 * std::sqrt(6.0 / 707.0);
  CHECK(bound == doctest::Approx(0.3685).epsilon(1e-3));
  CHECK(a.weights.cwiseAbs().maxCoeff() <= bound);
  CHECK(a.weights.cwiseAbs().maxCoeff() > 0.9 * bound);
  CHECK_FALSE(same(a, rbm_init(207, 500, 43)));
  CHECK_THROWS(rbm_init(0, 5, 1));
  CHECK_THROWS(rbm_init(5, 0, 1));
}

TEST_CASE("rbm hidden probabilities") {
  Rbm zero{Eigen::MatrixXd::Zero(3, 4), Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(4)};
  CHECK(rbm_hidden_probs(zero, Eigen::VectorXd(Eigen::VectorXd::Ones(3))).isConstant(0.5));

  Rbm r{Eigen::MatrixXd::Ones(2, 1), Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(1, -1.0)};
  CHECK(rbm_hidden_probs(r, Eigen::VectorXd(Eigen::VectorXd::Ones(2)))(0) == doctest::Approx(0.73106).epsilon(1e-5));
  CHECK_THROWS(rbm_hidden_probs(r, Eigen::VectorXd(Eigen::VectorXd::Ones(3))));

  auto rng = make_rng(41, RngStream::kSynth);
  const auto big = rbm_init(10, 6, rng);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd v(10);
    for (auto& x : v) x = rng.uniform();
    const auto h = rbm_hidden_probs(big, v);
    CHECK((h.array() > 0).all());
    CHECK((h.array() < 1).all());
  }
}

TEST_CASE("CD-1 update equals the replayed algebra") {
  auto rng = make_rng(42, RngStream::kSynth);
  for (int t = 0; t < 100; ++t) {
    const std::size_t nv = 1 + rng.below(6);
    const std::size_t nh = 1 + rng.below(6);
    Rbm r = rbm_init(nv, nh, rng);
    for (auto& x : r.visible_bias) x = rng.uniform(-1, 1);
    for (auto& x : r.hidden_bias) x = rng.uniform(-1, 1);
    const std::size_t n = 1 + rng.below(8);
    Eigen::MatrixXd batch(static_cast<long>(n), static_cast<long>(nv));
    oracle::Matrix plain_batch(n, std::vector<double>(nv));
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t i = 0; i < nv; ++i) plain_batch[s][i] = batch(long(s), long(i)) = rng.uniform();
    const double rate = rng.uniform(0.01, 1.0);
    Rng sampler(rng.next());
    const auto expected = oracle::cd1(to_plain(r), plain_batch, rate, sampler);
    rbm_cd1_update(r, batch, rate, sampler);
    CHECK(max_abs_diff(r, expected) <= 1e-12);
  }
}

TEST_CASE("CD-1 with rate 0 changes nothing") {
  auto rng = make_rng(43, RngStream::kSynth);
  Rbm r = rbm_init(5, 3, rng);
  const Rbm before = r;
  Eigen::MatrixXd batch = Eigen::MatrixXd::Constant(4, 5, 0.3);
  rbm_cd1_update(r, batch, 0.0, rng);
  CHECK(same(r, before));
  CHECK_THROWS(rbm_cd1_update(r, Eigen::MatrixXd(0, 5), 0.1, rng));
  CHECK_THROWS(rbm_cd1_update(r, Eigen::MatrixXd::Zero(2, 4), 0.1, rng));
}

TEST_CASE("CD-1 lowers reconstruction error on structured patterns") {
  // Eight noisy copies of two prototypes over three visible units.
  Eigen::MatrixXd data(8, 3);
  data << 1, 1, 0, 1, 1, 0, 1, 0.9, 0, 0.9, 1, 0.1, 0, 0, 1, 0, 0, 1, 0, 0.1, 1, 0.1, 0, 0.9;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto one = dbn_pretrain({3, 2}, data, 1, 0.1, 2, seed);
    const auto many = dbn_pretrain({3, 2}, data, 25, 0.1, 2, seed);
    CHECK(rbm_reconstruction_cross_entropy(many[0], data) <
          rbm_reconstruction_cross_entropy(one[0], data));
  }
}

TEST_CASE("pretraining") {
  auto rng = make_rng(44, RngStream::kSynth);
  Eigen::MatrixXd data(30, 6);
  for (auto& x : data.reshaped()) x = rng.uniform();

  SUBCASE("zero epochs leaves the initial weights") {
    const auto stack = dbn_pretrain({6, 6}, data, 0, 0.1, 5, 9);
    auto init = make_rng(9, RngStream::kInit);
    CHECK(same(stack[0], rbm_init(6, 6, init)));
  }
  SUBCASE("deterministic per seed") {
    const auto a = dbn_pretrain({6, 5, 4}, data, 3, 0.1, 4, 2);
    const auto b = dbn_pretrain({6, 5, 4}, data, 3, 0.1, 4, 2);
    REQUIRE(a.size() == 2);
    CHECK(same(a[0], b[0]));
    CHECK(same(a[1], b[1]));
    CHECK(a[1].n_visible() == 5);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(dbn_pretrain({5, 4}, data, 1, 0.1, 4, 0), DimensionError);
    CHECK_THROWS(dbn_pretrain({6}, data, 1, 0.1, 4, 0));
    CHECK_THROWS(dbn_pretrain({6, 4}, data, 1, 0.1, 0, 0));
  }
}

TEST_CASE("first-layer features separate two clusters better than raw inputs") {
  auto rng = make_rng(45, RngStream::kSynth);
  const std::size_t n = 200;
  const std::size_t dim = 20;
  Eigen::MatrixXd x(static_cast<long>(n), static_cast<long>(dim));
  std::vector<int> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    y[r] = int(r % 2);
    for (std::size_t c = 0; c < dim; ++c) {
      // Each cluster lights up its own half of the inputs.
      const bool on = (c < dim / 2) == (y[r] == 1);
      x(long(r), long(c)) = std::clamp((on ? 0.65 : 0.35) + 0.25 * rng.normal(), 0.0, 1.0);
    }
  }
  const auto stack = dbn_pretrain({dim, 30}, x, 25, 0.05, 10, 3);
  const Eigen::MatrixXd h = rbm_hidden_probs(stack[0], x);
  CHECK(separation(h, y) > separation(x, y));
}

TEST_CASE("full-network gradient matches central differences") {
  auto rng = make_rng(46, RngStream::kSynth);
  for (int t = 0; t < 5; ++t) {
    auto m = random_model(rng, {4, 3, 2});
    Eigen::MatrixXd x(6, 4);
    for (auto& v : x.reshaped()) v = rng.uniform();
    const std::vector<int> y{0, 1, 1, 0, 1, 0};
    const auto g = dbn_loss_gradient(m, x, y);
    const auto loss = [&] { return dbn_loss_gradient(m, x, y).loss; };
    double worst = 0;
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      for (Eigen::Index i = 0; i < m.layers[l].weights.size(); ++i) {
        const double fd = oracle::central_difference(m.layers[l].weights.data() + i, loss);
        worst = std::max(worst, oracle::relative_error(g.weights[l].data()[i], fd));
      }
      for (Eigen::Index j = 0; j < m.layers[l].hidden_bias.size(); ++j) {
        const double fd = oracle::central_difference(m.layers[l].hidden_bias.data() + j, loss);
        worst = std::max(worst, oracle::relative_error(g.hidden_bias[l](j), fd));
      }
    }
    for (Eigen::Index i = 0; i < m.output_weights.size(); ++i) {
      const double fd = oracle::central_difference(m.output_weights.data() + i, loss);
      worst = std::max(worst, oracle::relative_error(g.output_weights.data()[i], fd));
    }
    for (Eigen::Index i = 0; i < 2; ++i) {
      const double fd = oracle::central_difference(m.output_bias.data() + i, loss);
      worst = std::max(worst, oracle::relative_error(g.output_bias(i), fd));
    }
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("finetuning") {
  auto rng = make_rng(47, RngStream::kSynth);
  const auto train = testing::blobs(rng, 200, 12, 0.4, 0.08);
  const auto stack = dbn_pretrain({12, 16, 8}, to_matrix(train.vectors), 5, 0.01, 10, 1);

  SUBCASE("top mode leaves the RBMs untouched") {
    FinetuneOptions o;
    o.mode = FinetuneMode::kTop;
    o.iterations = 4;
    const auto m = dbn_finetune(stack, train, o);
    CHECK(same(m.layers[0], stack[0]));
    CHECK(same(m.layers[1], stack[1]));
    CHECK_FALSE(m.output_weights.isZero());
  }
  SUBCASE("16 iterations at rate 0.1 fit separable data") {
    FinetuneOptions o;
    const auto m = dbn_finetune(stack, train, o);
    std::vector<int> pred;
    for (const auto& v : train.vectors) pred.push_back(dbn_predict(m, v).label);
    CHECK(compute_metrics(pred, train.labels).f1 >= 0.95);
    CHECK_FALSE(same(m.layers[0], stack[0]));
  }
  SUBCASE("validation keeps the best iteration") {
    FinetuneOptions o;
    o.iterations = 6;
    o.validation = &train;
    const auto m = dbn_finetune(stack, train, o);
    std::vector<int> pred;
    for (const auto& v : train.vectors) pred.push_back(dbn_predict(m, v).label);
    const double kept = compute_metrics(pred, train.labels).f1;
    for (std::size_t it = 1; it <= 6; ++it) {
      FinetuneOptions p;
      p.iterations = it;
      const auto partial = dbn_finetune(stack, train, p);
      std::vector<int> pp;
      for (const auto& v : train.vectors) pp.push_back(dbn_predict(partial, v).label);
      CHECK(kept >= compute_metrics(pp, train.labels).f1);
    }
  }
  SUBCASE("dimension mismatch") {
    auto narrow = testing::blobs(rng, 20, 5, 0.4);
    CHECK_THROWS_AS(dbn_finetune(stack, narrow, {}), DimensionError);
  }
}

TEST_CASE("prediction") {
  DbnModel zero;
  zero.layers.push_back({Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)});
  zero.output_weights = Eigen::MatrixXd::Zero(2, 2);
  zero.output_bias = Eigen::VectorXd::Zero(2);
  auto p = dbn_predict(zero, std::vector<double>{0.1, 0.2, 0.3});
  CHECK(p.probabilities[0] == 0.5);
  CHECK(p.probabilities[1] == 0.5);
  CHECK(p.label == 0);

  DbnModel nine = zero;
  nine.output_bias(0) = std::log(9.0);
  p = dbn_predict(nine, std::vector<double>{0.1, 0.2, 0.3});
  CHECK(p.probabilities[0] == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(p.probabilities[1] == doctest::Approx(0.1).epsilon(1e-13));
  CHECK(p.label == 0);

  CHECK_THROWS_AS(dbn_predict(zero, std::vector<double>{0.1}), DimensionError);

  auto rng = make_rng(48, RngStream::kSynth);
  const auto m = random_model(rng, {6, 5, 4});
  for (int t = 0; t < 200; ++t) {
    const auto x = testing::random_vector(rng, 6);
    const auto a = dbn_predict(m, x);
    const auto b = dbn_predict(m, x);
    CHECK(a.label == b.label);
    CHECK(a.probabilities == b.probabilities);
    CHECK(std::abs(a.probabilities[0] + a.probabilities[1] - 1.0) <= 1e-12);
  }
}

TEST_CASE("model validation") {
  auto rng = make_rng(49, RngStream::kSynth);
  auto m = random_model(rng, {4, 3, 2});
  CHECK_NOTHROW(m.validate());
  m.layers[1] = rbm_init(4, 2, rng);
  CHECK_THROWS_AS(m.validate(), DimensionError);
}
