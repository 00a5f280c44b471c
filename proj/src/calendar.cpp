#include "hedgebot/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "hedgebot/errors.hpp"

namespace hedgebot {

namespace {

int parse_int_field(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw ParseError("bad date field in '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ParseError("expected ISO date YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const int y = parse_int_field(text, 0, 4);
  const unsigned m = static_cast<unsigned>(parse_int_field(text, 5, 2));
  const unsigned d = static_cast<unsigned>(parse_int_field(text, 8, 2));
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) {
    throw ParseError("invalid calendar date '" + std::string(text) + "'");
  }
  return Date{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

bool is_weekend(Date d) {
  const std::chrono::weekday wd{d};
  return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

std::vector<Date> weekday_calendar(Date start, std::size_t count) {
  std::vector<Date> out;
  out.reserve(count);
  Date d = start;
  while (out.size() < count) {
    if (!is_weekend(d)) out.push_back(d);
    d += std::chrono::days{1};
  }
  return out;
}

}  // namespace hedgebot
