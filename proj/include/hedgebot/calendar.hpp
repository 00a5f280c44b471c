#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace hedgebot {

using Date = std::chrono::sys_days;

// Strict ISO-8601 (YYYY-MM-DD). Throws ParseError on anything else,
// including dates that do not exist on the civil calendar.
Date parse_date(std::string_view text);

std::string format_date(Date d);

bool is_weekend(Date d);

// `count` consecutive weekdays starting at the first weekday >= start.
std::vector<Date> weekday_calendar(Date start, std::size_t count);

}  // namespace hedgebot
