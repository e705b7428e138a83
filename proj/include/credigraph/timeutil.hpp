#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace credigraph {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

// Accepts `YYYY-MM-DD`, `YYYY-MM-DDThh:mm:ssZ` and `YYYY-MM-DDThh:mm:ss.fffZ`
// (fractional seconds are truncated). Throws FormatError.
Timestamp parse_timestamp(std::string_view text);
Date parse_date(std::string_view text);

// `YYYY-MM-DDThh:mm:ssZ`
std::string format_timestamp(Timestamp t);
// `YYYY-MM-DD`
std::string format_date(Date d);

// Monday of the ISO week containing `d`.
Date iso_week_monday(Date d);

}  // namespace credigraph
