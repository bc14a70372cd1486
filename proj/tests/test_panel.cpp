#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include "chronocast/error.hpp"
#include "chronocast/panel.hpp"
#include "chronocast/textio.hpp"

using namespace chronocast;

namespace {

TimeSeriesFrame load_text(const std::string& text, LoadOptions options = {}) {
  std::istringstream in(text);
  return load_csv(in, options);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

// Random panel on a random frequency; series lengths in [min_len, max_len].
TimeSeriesFrame random_frame(std::mt19937_64& rng, int num_series, int min_len, int max_len) {
  static const Frequency freqs[] = {Frequency::Yearly, Frequency::Quarterly, Frequency::Monthly,
                                    Frequency::Weekly, Frequency::Daily, Frequency::Hourly};
  TimeSeriesFrame frame(freqs[rng() % 6]);
  std::uniform_real_distribution<double> value(-100.0, 100.0);
  std::uniform_int_distribution<int> length(min_len, max_len);
  for (int i = 0; i < num_series; ++i) {
    Series s;
    s.start = parse_timestamp("2015-01-01");
    const int n = length(rng);
    for (int t = 0; t < n; ++t) s.target.push_back(value(rng));
    frame.add("S" + std::to_string(i), std::move(s));
  }
  return frame;
}

}  // namespace

TEST_CASE("load_csv groups the long format by id") {
  // Two ids, two rows each, same shape as the canonical input table.
  const auto frame = load_text(
      "item_id,timestamp,target\n"
      "T1,2020-03-02,23\n"
      "T1,2020-03-03,43\n"
      "T999,2020-08-30,15\n"
      "T999,2020-08-31,27\n");
  REQUIRE(frame.size() == 2);
  CHECK(frame.id(0) == "T1");
  CHECK(frame.id(1) == "T999");
  CHECK(frame.at(0).length() == 2);
  CHECK(frame.at(1).length() == 2);
  CHECK(frame.frequency() == Frequency::Daily);
  CHECK(frame.at(0).target[0] == 23.0);
  CHECK(frame.at(1).target[1] == 27.0);
}

TEST_CASE("load_csv error paths") {
  CHECK(code_of([] { load_text("item_id,timestamp,target\n"); }) == ErrorCode::EmptyData);
  CHECK(code_of([] { load_text("id,timestamp,target\nA,2020-01-01,1\n"); }) ==
        ErrorCode::MissingColumn);
  CHECK(code_of([] { load_text("item_id,timestamp,target\nA,01/02/2020,1\n"); }) ==
        ErrorCode::UnparseableTimestamp);
  CHECK(code_of([] {
          load_text(
              "item_id,timestamp,target\n"
              "A,2020-01-01,1\n"
              "A,2020-01-01,2\n");
        }) == ErrorCode::DuplicateTimestamp);
  CHECK(code_of([] {
          load_text(
              "item_id,timestamp,target\n"
              "A,2020-01-01,1\n"
              "A,2020-01-02,2\n"
              "A,2020-01-04,3\n");
        }) == ErrorCode::IrregularSpacing);
  CHECK(code_of([] {
          load_text(
              "item_id,timestamp,target\n"
              "A,2020-01-01,1\n"
              "A,2020-01-02,\n"
              "A,2020-01-03,3\n");
        }) == ErrorCode::MissingValue);
}

TEST_CASE("load_csv ten daily stamps infer frequency D") {
  // Oracle: every consecutive timestamp difference scans to exactly one day.
  std::string text = "item_id,timestamp,target\n";
  std::vector<DateTime> stamps;
  for (int d = 1; d <= 10; ++d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "2020-03-%02d", d);
    stamps.push_back(parse_timestamp(buf));
    text += "A," + std::string(buf) + "," + std::to_string(d) + "\n";
  }
  for (std::size_t i = 1; i < stamps.size(); ++i)
    REQUIRE(epoch_seconds(stamps[i]) - epoch_seconds(stamps[i - 1]) == 86400);

  const auto frame = load_text(text);
  REQUIRE(frame.size() == 1);
  CHECK(frame.at(0).length() == 10);
  CHECK(frame.frequency() == Frequency::Daily);
}

TEST_CASE("gap filling is opt-in") {
  const std::string text =
      "item_id,timestamp,target\n"
      "A,2020-01-01,1\n"
      "A,2020-01-02,2\n"
      "A,2020-01-05,5\n";
  LoadOptions opt;
  opt.regularize = true;
  const auto frame = load_text(text, opt);
  REQUIRE(frame.at(0).length() == 5);
  CHECK(frame.at(0).target == std::vector<double>{1, 2, 2, 2, 5});
}

TEST_CASE("missing-value filling forward-fills interior and drops leading gaps") {
  const std::string text =
      "item_id,timestamp,target\n"
      "A,2020-01-01,\n"
      "A,2020-01-02,2\n"
      "A,2020-01-03,\n"
      "A,2020-01-04,4\n";
  LoadOptions opt;
  opt.fill_missing = true;
  const auto frame = load_text(text, opt);
  REQUIRE(frame.at(0).length() == 3);
  CHECK(frame.at(0).start == parse_timestamp("2020-01-02"));
  CHECK(frame.at(0).target == std::vector<double>{2, 2, 4});
}

TEST_CASE("covariate roles are mapped from extra columns") {
  LoadOptions opt;
  opt.known_covariates = {"promo"};
  opt.static_covariates = {"region"};
  const auto frame = load_text(
      "item_id,timestamp,target,promo,temp,region\n"
      "A,2020-01-01,1,0,20.5,north\n"
      "A,2020-01-02,2,1,21.0,north\n",
      opt);
  const Series& s = frame.at(0);
  CHECK(s.known_covariates.at("promo") == std::vector<double>{0, 1});
  CHECK(s.past_covariates.at("temp") == std::vector<double>{20.5, 21.0});
  CHECK(std::get<std::string>(s.static_covariates.at("region")) == "north");
}

TEST_CASE("infer_frequency snaps the modal difference") {
  auto stamps = [](const char* start, Frequency f, int n) {
    std::vector<DateTime> out;
    DateTime t = parse_timestamp(start);
    for (int i = 0; i < n; ++i) out.push_back(add_steps(t, f, i));
    return out;
  };
  CHECK(infer_frequency({stamps("2020-01-01", Frequency::Hourly, 30)}).frequency ==
        Frequency::Hourly);
  CHECK(infer_frequency({stamps("2020-01-01", Frequency::Hourly, 30)}).season == 24);
  CHECK(infer_frequency({stamps("2020-01-31", Frequency::Monthly, 24)}).frequency ==
        Frequency::Monthly);
  CHECK(infer_frequency({stamps("2020-01-31", Frequency::Monthly, 24)}).season == 12);
  CHECK(infer_frequency({stamps("2020-03-01", Frequency::Quarterly, 9)}).frequency ==
        Frequency::Quarterly);
  CHECK(infer_frequency({stamps("1995-01-01", Frequency::Yearly, 9)}).frequency ==
        Frequency::Yearly);
  CHECK(infer_frequency({stamps("2020-01-06", Frequency::Weekly, 9)}).frequency ==
        Frequency::Weekly);

  // 90-minute spacing matches no alias
  std::vector<DateTime> odd;
  for (const char* t : {"2020-01-01T00:00:00", "2020-01-01T01:30:00", "2020-01-01T03:00:00",
                        "2020-01-01T04:30:00", "2020-01-01T06:00:00"})
    odd.push_back(parse_timestamp(t));
  CHECK_THROWS_AS(infer_frequency({odd}), Error);
  try {
    infer_frequency({odd});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AmbiguousFrequency);
  }

  // a single point with no frequency cannot be inferred
  CHECK_THROWS_AS(infer_frequency({{parse_timestamp("2020-01-01")}}), Error);
}

TEST_CASE("split_last keeps the tail as holdout") {
  std::mt19937_64 rng(7);
  auto frame = random_frame(rng, 3, 10, 10);
  auto [train, holdout] = split_last(frame, 3);
  CHECK(train.at(0).length() == 7);
  CHECK(holdout.at(0).length() == 3);
  CHECK(holdout.at(0).start == train.forecast_start(0));

  // h = T is rejected
  CHECK(code_of([&] { split_last(frame, 10); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("split_last hand-sized lengths") {
  // Oracle: index slicing by hand — lengths {30, 48} with h=8 leave {22, 40}.
  TimeSeriesFrame frame(Frequency::Daily);
  for (auto [id, n] : {std::pair{"a", 30}, {"b", 48}}) {
    Series s;
    s.start = parse_timestamp("2020-01-01");
    for (int t = 0; t < n; ++t) s.target.push_back(t);
    frame.add(id, std::move(s));
  }
  auto [train, holdout] = split_last(frame, 8);
  CHECK(train.at(0).length() == 22);
  CHECK(train.at(1).length() == 40);
  CHECK(holdout.at(0).length() == 8);
  CHECK(holdout.at(1).length() == 8);
}

TEST_CASE("split concatenation reproduces the input exactly") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    auto frame = random_frame(rng, 4, 5, 40);
    const int h = 1 + static_cast<int>(rng() % 4);
    if (frame.min_length() <= static_cast<std::size_t>(h)) continue;
    auto [train, holdout] = split_last(frame, h);
    for (std::size_t i = 0; i < frame.size(); ++i) {
      std::vector<double> joined = train.at(i).target;
      joined.insert(joined.end(), holdout.at(i).target.begin(), holdout.at(i).target.end());
      CHECK(joined == frame.at(i).target);
    }
  }
}

TEST_CASE("slice_windows walks back one horizon per window") {
  TimeSeriesFrame frame(Frequency::Daily);
  Series s;
  s.start = parse_timestamp("2020-01-01");
  for (int t = 0; t < 30; ++t) s.target.push_back(t);
  frame.add("a", std::move(s));

  auto windows = slice_windows(frame, 5, 2);
  REQUIRE(windows.size() == 2);
  CHECK(windows[0].train.at(0).length() == 25);
  CHECK(windows[1].train.at(0).length() == 20);
  CHECK(windows[0].validation.at(0).length() == 5);
  CHECK(windows[1].validation.at(0).target.front() == 20.0);
}

TEST_CASE("slice_windows excludes short series per window only") {
  TimeSeriesFrame frame(Frequency::Daily);
  for (auto [id, n] : {std::pair{"short", 12}, {"long", 40}}) {
    Series s;
    s.start = parse_timestamp("2020-01-01");
    for (int t = 0; t < n; ++t) s.target.push_back(t);
    frame.add(id, std::move(s));
  }
  auto windows = slice_windows(frame, 10, 2);
  REQUIRE(windows.size() == 2);
  CHECK(windows[0].train.size() == 2);   // both series fit window 1
  CHECK(windows[1].train.size() == 1);   // only the long one fits window 2
  CHECK(windows[1].train.id(0) == "long");

  TimeSeriesFrame tiny(Frequency::Daily);
  Series t;
  t.start = parse_timestamp("2020-01-01");
  t.target = {1, 2, 3};
  tiny.add("t", std::move(t));
  CHECK(code_of([&] { slice_windows(tiny, 10, 1); }) == ErrorCode::NoValidWindows);
}

TEST_CASE("slice_windows with one window equals split_last") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    auto frame = random_frame(rng, 3, 8, 30);
    const int h = 1 + static_cast<int>(rng() % 5);
    if (frame.min_length() <= static_cast<std::size_t>(h)) continue;
    auto windows = slice_windows(frame, h, 1);
    auto [train, holdout] = split_last(frame, h);
    REQUIRE(windows.size() == 1);
    for (std::size_t i = 0; i < frame.size(); ++i) {
      CHECK(windows[0].train.at(i).target == train.at(i).target);
      CHECK(windows[0].validation.at(i).target == holdout.at(i).target);
    }
  }
}

TEST_CASE("frequency inference is permutation-invariant") {
  auto stamps = [](Frequency f, const char* start, int n) {
    std::vector<DateTime> out;
    for (int i = 0; i < n; ++i) out.push_back(add_steps(parse_timestamp(start), f, i));
    return out;
  };
  std::vector<std::vector<DateTime>> groups = {
      stamps(Frequency::Monthly, "2019-01-01", 24),
      stamps(Frequency::Monthly, "2020-06-01", 6),
      stamps(Frequency::Monthly, "2017-10-01", 13),
  };
  const auto base = infer_frequency(groups).frequency;
  std::vector<std::vector<DateTime>> permuted = {groups[2], groups[0], groups[1]};
  CHECK(infer_frequency(permuted).frequency == base);
}

TEST_CASE("write_csv round-trips through load_csv") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    auto frame = random_frame(rng, 3, 4, 20);
    std::ostringstream out;
    write_csv(frame, out);
    LoadOptions opt;
    opt.frequency = frame.frequency();
    auto again = load_text(out.str(), opt);
    std::ostringstream out2;
    write_csv(again, out2);
    CHECK(out.str() == out2.str());  // fixed-point after one formatting pass
    REQUIRE(again.size() == frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
      CHECK(again.id(i) == frame.id(i));
      CHECK(again.at(i).length() == frame.at(i).length());
    }
  }
}
