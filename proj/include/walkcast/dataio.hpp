#ifndef WALKCAST_DATAIO_HPP
#define WALKCAST_DATAIO_HPP

#include <array>
#include <chrono>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace walkcast::dataio {

// Calendar date. Comparison is lexicographic (year, month, day).
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  static Date parse_iso(std::string_view text);  // "YYYY-MM-DD"
  static Date from_days(std::chrono::sys_days d);
  std::chrono::sys_days to_days() const;
  std::string iso() const;
  bool valid() const;

  auto operator<=>(const Date&) const = default;
};

// One trading day's raw quote.
struct OhlcvRecord {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double volume = 0.0;

  bool operator==(const OhlcvRecord&) const = default;
};

// Exactly five consecutive trading days, the unit of multi-step forecasting.
// Positions 0..4 carry the Mon..Fri labels.
struct WeekBlock {
  std::array<OhlcvRecord, 5> records;
  std::size_t index = 0;
};

struct WeekBlocking {
  std::vector<WeekBlock> blocks;
  std::size_t dropped = 0;  // trailing records not filling a block
};

struct DatasetSplit {
  std::vector<OhlcvRecord> train;
  std::vector<OhlcvRecord> test;
  std::vector<WeekBlock> train_weeks;
  std::vector<WeekBlock> test_weeks;
  std::size_t train_dropped = 0;
  std::size_t test_dropped = 0;
};

struct ParseResult {
  std::vector<OhlcvRecord> records;  // sorted ascending by date
  std::size_t rows_read = 0;         // data rows seen (header excluded)
  std::size_t rows_dropped_null = 0;
};

inline constexpr std::string_view kCsvHeader = "Date,Open,High,Low,Close,Adj Close,Volume";

// Parses Yahoo-style daily OHLCV. Rows whose numeric fields are `null` or
// empty are dropped and counted; `Adj Close` is parsed then discarded.
// Throws ValidationError for a malformed header, an unparseable field
// (message carries the 1-based line number), an invariant violation, or a
// duplicate date.
ParseResult parse_ohlcv_csv(std::string_view text);

// Inverse of parse_ohlcv_csv up to field formatting: re-parsing the output
// yields the identical record sequence. Adj Close is written as close.
std::string write_ohlcv_csv(std::span<const OhlcvRecord> records);

// Count-based blocking: consecutive runs of five records starting at record
// zero. Calendar weeks are not consulted; exchange holidays make them
// unusable as a fixed-size unit.
WeekBlocking block_into_weeks(std::span<const OhlcvRecord> records);

// Partitions by inclusive date ranges and blocks both sides into weeks.
// Records outside both ranges are discarded. Throws ConfigError if a side
// ends up empty or the ranges are not ordered.
DatasetSplit split_by_date(std::span<const OhlcvRecord> records, Date train_start,
                           Date train_end, Date test_start, Date test_end);

}  // namespace walkcast::dataio

#endif  // WALKCAST_DATAIO_HPP
