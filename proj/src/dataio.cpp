#include "walkcast/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "walkcast/errors.hpp"

namespace walkcast::dataio {

Date Date::parse_iso(std::string_view text) {
  auto fail = [&] {
    throw ValidationError("invalid ISO date '" + std::string(text) + "'");
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail();
  Date d;
  auto num = [&](std::string_view part, int& out) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc{} || ptr != part.data() + part.size()) fail();
  };
  num(text.substr(0, 4), d.year);
  num(text.substr(5, 2), d.month);
  num(text.substr(8, 2), d.day);
  if (!d.valid()) fail();
  return d;
}

Date Date::from_days(std::chrono::sys_days sd) {
  std::chrono::year_month_day ymd{sd};
  return Date{static_cast<int>(ymd.year()), static_cast<int>(unsigned(ymd.month())),
              static_cast<int>(unsigned(ymd.day()))};
}

std::chrono::sys_days Date::to_days() const {
  return std::chrono::sys_days{std::chrono::year_month_day{
      std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
      std::chrono::day{static_cast<unsigned>(day)}}};
}

std::string Date::iso() const {
  char buf[11];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

bool Date::valid() const {
  return std::chrono::year_month_day{std::chrono::year{year},
                                     std::chrono::month{static_cast<unsigned>(month)},
                                     std::chrono::day{static_cast<unsigned>(day)}}
      .ok();
}

namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

bool is_null_field(std::string_view f) { return f.empty() || f == "null"; }

double parse_number(std::string_view f, std::size_t line_no, std::string_view what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(value))
    throw ValidationError("line " + std::to_string(line_no) + ": unparseable " +
                          std::string(what) + " '" + std::string(f) + "'");
  return value;
}

void check_record(const OhlcvRecord& r, std::size_t line_no) {
  auto bad = [&](const std::string& why) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + why +
                          " (date " + r.date.iso() + ")");
  };
  for (double p : {r.open, r.high, r.low, r.close})
    if (!(p > 0.0) || !std::isfinite(p)) bad("price must be finite and positive");
  if (r.low > r.high) bad("low exceeds high");
  if (r.volume < 0.0 || !std::isfinite(r.volume)) bad("volume must be non-negative");
}

}  // namespace

ParseResult parse_ohlcv_csv(std::string_view text) {
  ParseResult result;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::set<Date> seen_dates;

  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = strip_cr(
        nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (!header_seen) {
      if (line != kCsvHeader)
        throw ValidationError("line 1: expected header '" + std::string(kCsvHeader) +
                              "', got '" + std::string(line) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    ++result.rows_read;
    auto fields = split_fields(line);
    if (fields.size() != 7)
      throw ValidationError("line " + std::to_string(line_no) + ": expected 7 fields, got " +
                            std::to_string(fields.size()));

    bool has_null = std::any_of(fields.begin() + 1, fields.end(), is_null_field);
    if (has_null) {
      ++result.rows_dropped_null;
      continue;
    }

    OhlcvRecord r;
    try {
      r.date = Date::parse_iso(fields[0]);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    r.open = parse_number(fields[1], line_no, "Open");
    r.high = parse_number(fields[2], line_no, "High");
    r.low = parse_number(fields[3], line_no, "Low");
    r.close = parse_number(fields[4], line_no, "Close");
    parse_number(fields[5], line_no, "Adj Close");  // validated, then discarded
    r.volume = parse_number(fields[6], line_no, "Volume");
    check_record(r, line_no);

    if (!seen_dates.insert(r.date).second)
      throw ValidationError("duplicate date " + r.date.iso());
    result.records.push_back(r);
  }

  if (!header_seen) throw ValidationError("empty input: missing header row");
  std::sort(result.records.begin(), result.records.end(),
            [](const OhlcvRecord& a, const OhlcvRecord& b) { return a.date < b.date; });
  return result;
}

std::string write_ohlcv_csv(std::span<const OhlcvRecord> records) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  char buf[32];
  auto append_num = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    out.append(buf, ptr);
  };
  for (const auto& r : records) {
    out += r.date.iso();
    for (double v : {r.open, r.high, r.low, r.close, r.close}) {
      out.push_back(',');
      append_num(v);
    }
    out.push_back(',');
    append_num(r.volume);
    out.push_back('\n');
  }
  return out;
}

WeekBlocking block_into_weeks(std::span<const OhlcvRecord> records) {
  WeekBlocking result;
  std::size_t n_blocks = records.size() / 5;
  result.dropped = records.size() % 5;
  result.blocks.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    WeekBlock block;
    block.index = b;
    for (std::size_t i = 0; i < 5; ++i) {
      block.records[i] = records[b * 5 + i];
      if (i > 0 && !(block.records[i - 1].date < block.records[i].date))
        throw ValidationError("week block " + std::to_string(b) +
                              ": dates not strictly increasing at " +
                              block.records[i].date.iso());
    }
    result.blocks.push_back(std::move(block));
  }
  return result;
}

DatasetSplit split_by_date(std::span<const OhlcvRecord> records, Date train_start,
                           Date train_end, Date test_start, Date test_end) {
  if (!(train_start <= train_end) || !(test_start <= test_end))
    throw ConfigError("split_by_date: date range bounds out of order");
  if (!(train_end < test_start))
    throw ConfigError("split_by_date: train_end must precede test_start");
  for (std::size_t i = 1; i < records.size(); ++i)
    if (!(records[i - 1].date < records[i].date))
      throw ValidationError("split_by_date: records not sorted ascending at " +
                            records[i].date.iso());

  DatasetSplit split;
  for (const auto& r : records) {
    if (train_start <= r.date && r.date <= train_end)
      split.train.push_back(r);
    else if (test_start <= r.date && r.date <= test_end)
      split.test.push_back(r);
  }
  if (split.train.empty())
    throw ConfigError("split_by_date: empty train partition for [" + train_start.iso() +
                      ", " + train_end.iso() + "]");
  if (split.test.empty())
    throw ConfigError("split_by_date: empty test partition for [" + test_start.iso() +
                      ", " + test_end.iso() + "]");

  auto train_blocks = block_into_weeks(split.train);
  auto test_blocks = block_into_weeks(split.test);
  split.train_weeks = std::move(train_blocks.blocks);
  split.test_weeks = std::move(test_blocks.blocks);
  split.train_dropped = train_blocks.dropped;
  split.test_dropped = test_blocks.dropped;
  return split;
}

}  // namespace walkcast::dataio
