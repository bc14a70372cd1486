#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "chronocast/error.hpp"
#include "chronocast/metrics.hpp"

using namespace chronocast;

namespace {

TimeSeriesFrame frame_of(const std::vector<std::pair<std::string, std::vector<double>>>& data) {
  TimeSeriesFrame frame(Frequency::Daily);
  for (const auto& [id, values] : data) {
    Series s;
    s.start = parse_timestamp("2020-01-01");
    s.target = values;
    frame.add(id, std::move(s));
  }
  return frame;
}

// Forecast frame holding one identical vector in the mean and every level.
ForecastFrame forecast_of(const TimeSeriesFrame& like,
                          const std::vector<std::vector<double>>& values,
                          std::vector<double> levels = {0.5}) {
  ForecastFrame fc;
  fc.frequency = like.frequency();
  fc.levels = std::move(levels);
  for (std::size_t i = 0; i < like.size(); ++i) {
    ForecastFrame::Block b;
    b.id = like.id(i);
    b.start = like.at(i).start;
    b.mean = values[i];
    b.quantiles.assign(fc.levels.size(), values[i]);
    fc.blocks.push_back(std::move(b));
  }
  return fc;
}

}  // namespace

TEST_CASE("mase_series hand case") {
  // (1/2)(|5-4| + |6-4|) / ((1/3)(1+1+1)) = 1.5
  const std::vector<double> history = {1, 2, 3, 4};
  const std::vector<double> holdout = {5, 6};
  const std::vector<double> forecast = {4, 4};
  auto score = mase_series(holdout, forecast, history, 1);
  REQUIRE(score.has_value());
  CHECK(*score == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("mase of a perfect forecast is zero") {
  auto holdout = frame_of({{"a", {5, 6}}});
  auto history = frame_of({{"a", {1, 2, 3, 4}}});
  auto fc = forecast_of(holdout, {{5, 6}});
  CHECK(mase(holdout, fc, history, 1) == 0.0);
}

TEST_CASE("constant history is excluded; all-excluded errors") {
  auto holdout = frame_of({{"a", {5}}});
  auto history = frame_of({{"a", {5, 5, 5, 5}}});
  auto fc = forecast_of(holdout, {{9}});
  CHECK_THROWS_AS(mase(holdout, fc, history, 1), Error);

  // a second informative series keeps the average defined
  auto holdout2 = frame_of({{"a", {5}}, {"b", {5}}});
  auto history2 = frame_of({{"a", {5, 5, 5, 5}}, {"b", {1, 2, 3, 4}}});
  auto fc2 = forecast_of(holdout2, {{9}, {4}});
  // only b counts: |5-4| / mean(|2-1|,|3-2|,|4-3|) = 1
  CHECK(mase(holdout2, fc2, history2, 1) == doctest::Approx(1.0));
}

TEST_CASE("wql_at hand cases") {
  auto holdout = frame_of({{"a", {10}}});
  CHECK(wql_at(0.5, holdout, forecast_of(holdout, {{10}}, {0.5})) == 0.0);
  // q=0.5, y=10, f=8: 2*(0.5*2)/10 = 0.2
  CHECK(wql_at(0.5, holdout, forecast_of(holdout, {{8}}, {0.5})) ==
        doctest::Approx(0.2).epsilon(1e-12));
  // q=0.9, y=10, f=12: 2*(0.1*2)/10 = 0.04
  CHECK(wql_at(0.9, holdout, forecast_of(holdout, {{12}}, {0.9})) ==
        doctest::Approx(0.04).epsilon(1e-12));

  auto zeros = frame_of({{"a", {0, 0}}});
  CHECK_THROWS_AS(wql_at(0.5, zeros, forecast_of(zeros, {{1, 1}}, {0.5})), Error);
}

TEST_CASE("mean_wql averages over levels") {
  auto holdout = frame_of({{"a", {10}}});

  ForecastFrame fc;
  fc.frequency = holdout.frequency();
  fc.levels = {0.1, 0.5, 0.9};
  ForecastFrame::Block b;
  b.id = "a";
  b.start = holdout.at(0).start;
  b.mean = {10};
  b.quantiles = {{10}, {8}, {12}};  // perfect, 0.2, 0.04
  fc.blocks.push_back(b);

  CHECK(mean_wql(QuantileLevels({0.1, 0.5, 0.9}), holdout, fc) ==
        doctest::Approx((0.0 + 0.2 + 0.04) / 3.0).epsilon(1e-12));
  CHECK(mean_wql(QuantileLevels({0.5}), holdout, fc) ==
        wql_at(0.5, holdout, fc));
  CHECK_THROWS_AS(mean_wql(QuantileLevels({0.25}), holdout, fc), Error);

  // all levels perfect
  auto perfect = forecast_of(holdout, {{10}}, {0.1, 0.5, 0.9});
  CHECK(mean_wql(QuantileLevels({0.1, 0.5, 0.9}), holdout, perfect) == 0.0);
}

TEST_CASE("wql at the median collapses to the scaled absolute error") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> val(-50.0, 50.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 20);
    std::vector<double> y(n), f(n);
    double abs_err = 0.0, abs_y = 0.0;
    for (int i = 0; i < n; ++i) {
      y[i] = val(rng);
      f[i] = val(rng);
      abs_err += std::abs(y[i] - f[i]);
      abs_y += std::abs(y[i]);
    }
    if (abs_y == 0.0) continue;
    auto holdout = frame_of({{"a", y}});
    const double got = wql_at(0.5, holdout, forecast_of(holdout, {f}, {0.5}));
    CHECK(got == doctest::Approx(abs_err / abs_y).epsilon(1e-12));
  }
}

TEST_CASE("metrics are invariant under a common positive rescaling") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> val(1.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> hist(12), hold(4), fc(4);
    for (auto& v : hist) v = val(rng);
    for (auto& v : hold) v = val(rng);
    for (auto& v : fc) v = val(rng);
    const double c = 0.01 + (rng() % 1000) / 10.0;

    auto scale = [&](std::vector<double> v) {
      for (auto& x : v) x *= c;
      return v;
    };
    auto h1 = frame_of({{"a", hold}});
    auto h2 = frame_of({{"a", scale(hold)}});
    auto hist1 = frame_of({{"a", hist}});
    auto hist2 = frame_of({{"a", scale(hist)}});
    const double m1 = mase(h1, forecast_of(h1, {fc}), hist1, 3);
    const double m2 = mase(h2, forecast_of(h2, {scale(fc)}), hist2, 3);
    CHECK(m1 == doctest::Approx(m2).epsilon(1e-10));

    const double w1 = wql_at(0.7, h1, forecast_of(h1, {fc}, {0.7}));
    const double w2 = wql_at(0.7, h2, forecast_of(h2, {scale(fc)}, {0.7}));
    CHECK(w1 == doctest::Approx(w2).epsilon(1e-10));
  }
}

TEST_CASE("rescale_errors maps to the unit interval") {
  CHECK(rescale_errors({2.0, 4.0, 6.0}) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(rescale_errors({3.0, 3.0}) == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(rescale_errors({1.0, std::nan("")}), Error);
  CHECK_THROWS_AS(rescale_errors({1.0}), Error);

  // argmin/argmax preservation
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(0.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> scores(5);
    for (auto& v : scores) v = val(rng);
    auto scaled = rescale_errors(scores);
    const auto lo = std::min_element(scores.begin(), scores.end()) - scores.begin();
    const auto hi = std::max_element(scores.begin(), scores.end()) - scores.begin();
    CHECK(scaled[lo] == 0.0);
    CHECK(scaled[hi] == doctest::Approx(1.0));
    for (double v : scaled) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("metric names parse case-insensitively") {
  CHECK(metric_from_string("mase") == EvalMetric::MASE);
  CHECK(metric_from_string("WQL") == EvalMetric::WQL);
  CHECK(metric_from_string("wQl") == EvalMetric::WQL);
  CHECK(!metric_from_string("rmse").has_value());
}
