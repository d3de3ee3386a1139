#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "walkcast/dataio.hpp"
#include "walkcast/errors.hpp"
#include "walkcast/synth.hpp"

using namespace walkcast;

namespace {

const std::string kHeader = "Date,Open,High,Low,Close,Adj Close,Volume\n";

std::string one_row(const std::string& date, const std::string& fields) {
  return kHeader + date + "," + fields + "\n";
}

}  // namespace

TEST_CASE("date: ISO parsing, formatting, ordering") {
  auto d = dataio::Date::parse_iso("2014-12-29");
  CHECK(d.year == 2014);
  CHECK(d.month == 12);
  CHECK(d.day == 29);
  CHECK(d.iso() == "2014-12-29");
  CHECK(dataio::Date{2014, 12, 29} < dataio::Date{2015, 1, 2});
  CHECK_THROWS_AS((void)dataio::Date::parse_iso("2014/12/29"), ValidationError);
  CHECK_THROWS_AS((void)dataio::Date::parse_iso("2014-13-01"), ValidationError);
}

TEST_CASE("parse: minimal well-formed file yields one record, zero drops") {
  auto result = dataio::parse_ohlcv_csv(
      one_row("2020-01-06", "100,110,90,105,105,5000"));
  CHECK(result.records.size() == 1);
  CHECK(result.rows_read == 1);
  CHECK(result.rows_dropped_null == 0);
  const auto& r = result.records[0];
  CHECK(r.date.iso() == "2020-01-06");
  CHECK(r.open == 100.0);
  CHECK(r.high == 110.0);
  CHECK(r.low == 90.0);
  CHECK(r.close == 105.0);
  CHECK(r.volume == 5000.0);
}

TEST_CASE("parse: null open drops the row and counts it") {
  auto result = dataio::parse_ohlcv_csv(
      one_row("2020-01-06", "null,110,90,105,105,5000"));
  CHECK(result.records.empty());
  CHECK(result.rows_read == 1);
  CHECK(result.rows_dropped_null == 1);
}

TEST_CASE("parse: empty numeric field is treated like null") {
  auto result = dataio::parse_ohlcv_csv(one_row("2020-01-06", "100,110,90,,105,5000"));
  CHECK(result.records.empty());
  CHECK(result.rows_dropped_null == 1);
}

TEST_CASE("parse: malformed header rejected") {
  CHECK_THROWS_AS(
      (void)dataio::parse_ohlcv_csv("Date,Open,High,Low,Close,Volume\n"),
      ValidationError);
}

TEST_CASE("parse: unparseable field names the line number") {
  std::string text = kHeader + "2020-01-06,100,110,90,105,105,5000\n" +
                     "2020-01-07,abc,110,90,105,105,5000\n";
  try {
    (void)dataio::parse_ohlcv_csv(text);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("parse: duplicate date is a hard error naming the date") {
  std::string text = kHeader + "2020-01-06,100,110,90,105,105,5000\n" +
                     "2020-01-06,101,111,91,106,106,5100\n";
  try {
    (void)dataio::parse_ohlcv_csv(text);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("2020-01-06") != std::string::npos);
  }
}

TEST_CASE("parse: invariant violations are rejected") {
  // low > high
  CHECK_THROWS_AS((void)dataio::parse_ohlcv_csv(
                      one_row("2020-01-06", "100,90,95,96,96,5000")),
                  ValidationError);
  // non-positive price
  CHECK_THROWS_AS((void)dataio::parse_ohlcv_csv(
                      one_row("2020-01-06", "0,110,90,105,105,5000")),
                  ValidationError);
  // negative volume
  CHECK_THROWS_AS((void)dataio::parse_ohlcv_csv(
                      one_row("2020-01-06", "100,110,90,105,105,-1")),
                  ValidationError);
}

TEST_CASE("parse: out-of-order input is sorted ascending by date") {
  std::string text = kHeader + "2020-01-07,101,111,91,106,106,5100\n" +
                     "2020-01-06,100,110,90,105,105,5000\n";
  auto result = dataio::parse_ohlcv_csv(text);
  REQUIRE(result.records.size() == 2);
  CHECK(result.records[0].date.iso() == "2020-01-06");
  CHECK(result.records[1].date.iso() == "2020-01-07");
}

TEST_CASE("synthetic calendar: 1460 weekday rows span the reference window") {
  synth::SynthConfig config;
  config.kind = synth::Kind::sine;
  config.days = 1460;
  auto records = synth::generate_ohlcv(config);
  REQUIRE(records.size() == 1460);
  CHECK(records.front().date.iso() == "2014-12-29");
  CHECK(records.back().date.iso() == "2020-07-31");
  for (std::size_t i = 1; i < records.size(); ++i) {
    CHECK(records[i - 1].date < records[i].date);
  }
}

TEST_CASE("round-trip: write then parse returns the identical sequence") {
  synth::SynthConfig config;
  config.kind = synth::Kind::noise;
  config.days = 37;
  auto records = synth::generate_ohlcv(config);
  auto reparsed = dataio::parse_ohlcv_csv(dataio::write_ohlcv_csv(records));
  REQUIRE(reparsed.records.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(reparsed.records[i] == records[i]);
  }
}

TEST_CASE("block_into_weeks: multiples of five block cleanly") {
  synth::SynthConfig config;
  config.days = 1045;
  auto blocking = dataio::block_into_weeks(synth::generate_ohlcv(config));
  CHECK(blocking.blocks.size() == 209);
  CHECK(blocking.dropped == 0);

  config.days = 415;
  blocking = dataio::block_into_weeks(synth::generate_ohlcv(config));
  CHECK(blocking.blocks.size() == 83);
  CHECK(blocking.dropped == 0);
}

TEST_CASE("block_into_weeks: trailing remainder is dropped and counted") {
  synth::SynthConfig config;
  config.days = 7;
  auto blocking = dataio::block_into_weeks(synth::generate_ohlcv(config));
  CHECK(blocking.blocks.size() == 1);
  CHECK(blocking.dropped == 2);
}

TEST_CASE("block_into_weeks: concatenated blocks equal the input prefix") {
  synth::SynthConfig config;
  config.days = 23;  // 4 blocks + 3 dropped
  auto records = synth::generate_ohlcv(config);
  auto blocking = dataio::block_into_weeks(records);
  REQUIRE(blocking.blocks.size() == 4);
  CHECK(blocking.dropped == 3);
  std::size_t flat = 0;
  for (const auto& block : blocking.blocks) {
    CHECK(block.index == flat / 5);
    for (const auto& rec : block.records) {
      CHECK(rec == records[flat]);
      ++flat;
    }
  }
  CHECK(flat == 20);
}

TEST_CASE("split_by_date: reference window arithmetic on the 1460-day series") {
  synth::SynthConfig config;
  config.days = 1460;
  auto records = synth::generate_ohlcv(config);
  auto split = dataio::split_by_date(records, dataio::Date{2014, 12, 29},
                                     dataio::Date{2018, 12, 28},
                                     dataio::Date{2018, 12, 31},
                                     dataio::Date{2020, 7, 31});
  CHECK(split.train.size() == 1045);
  CHECK(split.test.size() == 415);
  CHECK(split.train_weeks.size() == 209);
  CHECK(split.test_weeks.size() == 83);
  CHECK(split.train_dropped == 0);
  CHECK(split.test_dropped == 0);
  CHECK(split.train.front().date.iso() == "2014-12-29");
  CHECK(split.train.back().date.iso() == "2018-12-28");
  CHECK(split.test.front().date.iso() == "2018-12-31");
  CHECK(split.test.back().date.iso() == "2020-07-31");
}

TEST_CASE("split_by_date: clean 5/5 partition at a chosen boundary") {
  synth::SynthConfig config;
  config.days = 10;
  auto records = synth::generate_ohlcv(config);
  auto boundary = records[4].date;
  auto next = records[5].date;
  auto split = dataio::split_by_date(records, records.front().date, boundary,
                                     next, records.back().date);
  CHECK(split.train.size() == 5);
  CHECK(split.test.size() == 5);
}

TEST_CASE("split_by_date: empty side is a configuration error") {
  synth::SynthConfig config;
  config.days = 10;
  auto records = synth::generate_ohlcv(config);
  CHECK_THROWS_AS((void)dataio::split_by_date(
                      records, dataio::Date{1990, 1, 1}, dataio::Date{1990, 12, 31},
                      records.front().date, records.back().date),
                  ConfigError);
}

TEST_CASE("split_by_date: partition property, no overlap and no loss inside ranges") {
  synth::SynthConfig config;
  config.days = 30;
  auto records = synth::generate_ohlcv(config);
  auto split = dataio::split_by_date(records, records[0].date, records[11].date,
                                     records[12].date, records[29].date);
  CHECK(split.train.size() + split.test.size() == records.size());
  for (const auto& tr : split.train) {
    for (const auto& te : split.test) CHECK(tr.date != te.date);
  }
  // records within either range all appear on the matching side
  std::size_t covered = 0;
  for (const auto& r : records) {
    bool in_train = !(r.date < records[0].date) && !(records[11].date < r.date);
    bool in_test = !(r.date < records[12].date) && !(records[29].date < r.date);
    if (in_train || in_test) ++covered;
  }
  CHECK(covered == records.size());
}
