#include <doctest.h>

#include <cmath>

#include "oracles/features_oracle.hpp"
#include "seizure/error.hpp"
#include "seizure/features.hpp"
#include "support.hpp"

using namespace seizure;

namespace {

std::vector<double> random_window(Rng& rng, std::size_t w) {
  std::vector<double> x(w);
  const int style = static_cast<int>(rng.below(4));
  for (std::size_t i = 0; i < w; ++i) {
    switch (style) {
      case 0:
        x[i] = rng.normal();
        break;
      case 1:  // quantized, so plateaus are common
        x[i] = std::round(rng.normal() * 2) / 2;
        break;
      case 2:
        x[i] = std::sin(0.3 * static_cast<double>(i)) + 0.1 * rng.normal();
        break;
      default:  // clamped like normalized EEG
        x[i] = std::clamp(1.5 * rng.normal(), -2.0, 2.0);
    }
  }
  return x;
}

void check_against_oracle(const std::vector<double>& x) {
  const auto got = channel_features(x).as_array();
  const auto want = oracle::features(x);
  for (std::size_t k = 0; k < 9; ++k) {
    INFO("feature " << k);
    if (want[k] == 0.0) {
      CHECK(got[k] == 0.0);
    } else {
      CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-9));
    }
  }
}

}  // namespace

TEST_CASE("peak and valley examples") {
  auto pv = detect_peaks_valleys(std::vector<double>{1, 3, 2, 4, 1});
  CHECK(pv.peaks == std::vector<std::size_t>{1, 3});
  CHECK(pv.valleys == std::vector<std::size_t>{2});

  pv = detect_peaks_valleys(std::vector<double>{1, 2, 3, 4});
  CHECK(pv.peaks.empty());
  CHECK(pv.valleys.empty());

  pv = detect_peaks_valleys(std::vector<double>{1, 2, 2, 1});
  CHECK(pv.peaks == std::vector<std::size_t>{1});
  CHECK(pv.valleys.empty());

  pv = detect_peaks_valleys(std::vector<double>{3, 3, 1, 1, 1, 4, 4});
  CHECK(pv.peaks.empty());
  CHECK(pv.valleys == std::vector<std::size_t>{2});
}

TEST_CASE("property: peaks and valleys alternate and stay off the edges") {
  auto rng = make_rng(21, RngStream::kSynth);
  for (int t = 0; t < 500; ++t) {
    const auto x = random_window(rng, 2 + rng.below(60));
    const auto pv = detect_peaks_valleys(x);
    const auto ref = oracle::find_turns(x);
    CHECK(pv.peaks == ref.peaks);
    CHECK(pv.valleys == ref.valleys);

    std::vector<std::pair<std::size_t, int>> turns;
    for (const auto k : pv.peaks) turns.emplace_back(k, 1);
    for (const auto v : pv.valleys) turns.emplace_back(v, -1);
    std::sort(turns.begin(), turns.end());
    for (std::size_t i = 0; i < turns.size(); ++i) {
      CHECK(turns[i].first >= 1);
      CHECK(turns[i].first <= x.size() - 2);
      if (i > 0) {
        CHECK(turns[i].first > turns[i - 1].first);
        CHECK(turns[i].second != turns[i - 1].second);
      }
    }
    const auto k = static_cast<long>(pv.peaks.size());
    const auto v = static_cast<long>(pv.valleys.size());
    CHECK(std::abs(k - v) <= 1);
  }
}

TEST_CASE("channel feature examples") {
  SUBCASE("ramp 1..4") {
    const auto f = channel_features(std::vector<double>{1, 2, 3, 4});
    CHECK(f.area == 2.5);
    CHECK(f.line_length == 3);
    CHECK(f.normalized_decay == 0.5);
    CHECK(f.mean_energy == 7.5);
    CHECK(f.rms == doctest::Approx(std::sqrt(7.5)));
    CHECK(f.peak_amplitude == 0);
    CHECK(f.valley_amplitude == 0);
    CHECK(f.peak_variation == 0);
  }
  SUBCASE("all zero") {
    const auto f = channel_features(std::vector<double>(256, 0.0)).as_array();
    const std::array<double, 9> want{0, 0.5, 0, 0, 0, 0, 0, 0, 0};
    CHECK(f == want);
  }
  SUBCASE("alternating 0,1") {
    const auto f = channel_features(std::vector<double>{0, 1, 0, 1, 0});
    CHECK(f.normalized_decay == 0);
    CHECK(f.line_length == 4);
  }
  SUBCASE("0,10,0,10,0") {
    const auto f = channel_features(std::vector<double>{0, 10, 0, 10, 0});
    CHECK(f.peak_amplitude == doctest::Approx(2.0));
    CHECK(f.normalized_peak_number == doctest::Approx(0.2));
    CHECK(f.peak_variation == 0);
    // The single valley sits at 0, so its mean square is 0.
    CHECK(f.valley_amplitude == 0);
  }
  CHECK_THROWS(channel_features(std::vector<double>{1}));
}

TEST_CASE("features match the literal formulas on hand-picked windows") {
  check_against_oracle({1, 2, 3, 4});
  check_against_oracle({0, 10, 0, 10, 0});
  check_against_oracle({0, 3, -1, 4, -2, 5, -3, 6, 0});
  check_against_oracle({2, 2, 2, 1, 1, 3, 3, 0, 0, 0, 5});
  check_against_oracle(std::vector<double>(16, -1.25));
}

TEST_CASE("features match the literal formulas on random windows") {
  auto rng = make_rng(22, RngStream::kSynth);
  for (int t = 0; t < 300; ++t) check_against_oracle(random_window(rng, 2 + rng.below(300)));
}

TEST_CASE("property: scale behaviour") {
  auto rng = make_rng(23, RngStream::kSynth);
  for (int t = 0; t < 200; ++t) {
    const auto x = random_window(rng, 256);
    const double c = 0.1 + 5 * rng.uniform();
    std::vector<double> cx(x);
    for (auto& v : cx) v *= c;
    const auto a = channel_features(x);
    const auto b = channel_features(cx);
    CHECK(b.line_length == doctest::Approx(c * a.line_length).epsilon(1e-12));
    CHECK(b.rms == doctest::Approx(c * a.rms).epsilon(1e-12));
    CHECK(std::sqrt(b.mean_energy) == doctest::Approx(c * std::sqrt(a.mean_energy)).epsilon(1e-12));
    CHECK(b.normalized_decay == a.normalized_decay);
    CHECK(detect_peaks_valleys(cx).peaks.size() == detect_peaks_valleys(x).peaks.size());
  }
}

TEST_CASE("property: features are finite and within their ranges") {
  auto rng = make_rng(24, RngStream::kSynth);
  for (int t = 0; t < 300; ++t) {
    const auto f = channel_features(random_window(rng, 2 + rng.below(256)));
    for (const double v : f.as_array()) CHECK(std::isfinite(v));
    CHECK(f.line_length >= 0);
    CHECK(f.mean_energy >= 0);
    CHECK(f.rms >= 0);
    CHECK(f.normalized_decay >= 0);
    CHECK(f.normalized_decay <= 0.5);
  }
}

TEST_CASE("window features are channel-major") {
  auto rng = make_rng(25, RngStream::kSynth);
  std::vector<std::vector<double>> w(23);
  for (auto& ch : w) ch = random_window(rng, 256);
  const auto v = window_features(w);
  CHECK(v.size() == 207);
  for (std::size_t c = 0; c < 23; ++c) {
    const auto f = channel_features(w[c]).as_array();
    for (std::size_t k = 0; k < 9; ++k) CHECK(v[c * 9 + k] == f[k]);
  }

  const auto one = window_features({w[0]});
  const auto f0 = channel_features(w[0]).as_array();
  CHECK(std::equal(one.begin(), one.end(), f0.begin(), f0.end()));

  const auto twin = window_features({w[3], w[3]});
  CHECK(std::equal(twin.begin(), twin.begin() + 9, twin.begin() + 9));

  CHECK_THROWS_AS(window_features({std::vector<double>(8, 0), std::vector<double>(7, 0)}),
                  DimensionError);
}

TEST_CASE("record features agree with per-window extraction") {
  auto rng = make_rng(26, RngStream::kSynth);
  std::vector<std::vector<double>> chans(3, std::vector<double>(32 * 4));
  for (auto& c : chans)
    for (auto& x : c) x = rng.normal();
  const Record rec("p", "r", chans, 32);
  const auto all = record_features(rec);
  REQUIRE(all.size() == 4);
  const auto windows = label_windows(rec, {});
  for (std::size_t s = 0; s < 4; ++s) CHECK(all[s] == window_features(windows[s].samples));
}
