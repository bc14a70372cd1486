#include <doctest.h>

#include "chronocast/error.hpp"
#include "chronocast/timegrid.hpp"

using namespace chronocast;

TEST_CASE("seasonality follows the frequency map") {
  CHECK(seasonality(Frequency::Yearly) == 1);
  CHECK(seasonality(Frequency::Quarterly) == 4);
  CHECK(seasonality(Frequency::Monthly) == 12);
  CHECK(seasonality(Frequency::Weekly) == 1);
  CHECK(seasonality(Frequency::Daily) == 7);
  CHECK(seasonality(Frequency::Hourly) == 24);
}

TEST_CASE("timestamp parsing accepts dates and datetimes") {
  DateTime d = parse_timestamp("2020-03-02");
  CHECK(d.year == 2020);
  CHECK(d.month == 3);
  CHECK(d.day == 2);
  CHECK(d.hour == 0);

  DateTime t = parse_timestamp("2020-03-02T13:45:10");
  CHECK(t.hour == 13);
  CHECK(t.minute == 45);
  CHECK(t.second == 10);
  CHECK(parse_timestamp("2020-03-02 13:45").minute == 45);

  CHECK_THROWS_AS(parse_timestamp("02/03/2020"), Error);
  CHECK_THROWS_AS(parse_timestamp("2020-13-01"), Error);
  CHECK_THROWS_AS(parse_timestamp("2020-02-30"), Error);
  CHECK_THROWS_AS(parse_timestamp("2020-3-2"), Error);
}

TEST_CASE("formatting round-trips") {
  CHECK(format_timestamp(parse_timestamp("2021-12-31"), Frequency::Daily) == "2021-12-31");
  CHECK(format_timestamp(parse_timestamp("2021-12-31T05:00:00"), Frequency::Hourly) ==
        "2021-12-31T05:00:00");
}

TEST_CASE("epoch seconds agree with known values") {
  CHECK(epoch_seconds(parse_timestamp("1970-01-01")) == 0);
  CHECK(epoch_seconds(parse_timestamp("1970-01-02")) == 86400);
  CHECK(epoch_seconds(parse_timestamp("2000-03-01")) == 951868800);  // leap year
}

TEST_CASE("calendar stepping clamps month ends and regenerates stably") {
  const DateTime jan31 = parse_timestamp("2020-01-31");
  CHECK(add_steps(jan31, Frequency::Monthly, 1) == parse_timestamp("2020-02-29"));
  // measured from the start, not cumulatively: the 31st comes back in March
  CHECK(add_steps(jan31, Frequency::Monthly, 2) == parse_timestamp("2020-03-31"));
  CHECK(add_steps(jan31, Frequency::Monthly, 12) == parse_timestamp("2021-01-31"));
  CHECK(add_steps(jan31, Frequency::Quarterly, 1) == parse_timestamp("2020-04-30"));
  CHECK(add_steps(jan31, Frequency::Yearly, 1) == parse_timestamp("2021-01-31"));
  CHECK(add_steps(parse_timestamp("2020-02-29"), Frequency::Yearly, 1) ==
        parse_timestamp("2021-02-28"));
}

TEST_CASE("fixed-duration stepping crosses day and month boundaries") {
  CHECK(add_steps(parse_timestamp("2020-02-28"), Frequency::Daily, 2) ==
        parse_timestamp("2020-03-01"));
  CHECK(add_steps(parse_timestamp("2020-01-01"), Frequency::Weekly, 5) ==
        parse_timestamp("2020-02-05"));
  CHECK(add_steps(parse_timestamp("2020-12-31T23:00:00"), Frequency::Hourly, 2) ==
        parse_timestamp("2021-01-01T01:00:00"));
  CHECK(add_steps(parse_timestamp("2020-06-15"), Frequency::Daily, -15) ==
        parse_timestamp("2020-05-31"));
}
