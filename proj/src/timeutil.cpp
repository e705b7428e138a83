#include "credigraph/timeutil.hpp"

#include <charconv>
#include <cstdio>

#include "credigraph/errors.hpp"

namespace credigraph {
namespace {

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    int value = 0;
    if (pos + len > text.size()) {
        throw FormatError("truncated timestamp `" + std::string(whole) + "`");
    }
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
    if (ec != std::errc{} || ptr != text.data() + pos + len) {
        throw FormatError("bad timestamp `" + std::string(whole) + "`");
    }
    return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
    if (pos >= text.size() || text[pos] != c) {
        throw FormatError("bad timestamp `" + std::string(text) + "`");
    }
}

}  // namespace

Date parse_date(std::string_view text) {
    using namespace std::chrono;
    const int y = parse_fixed(text, 0, 4, text);
    expect(text, 4, '-');
    const int m = parse_fixed(text, 5, 2, text);
    expect(text, 7, '-');
    const int d = parse_fixed(text, 8, 2, text);
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw FormatError("invalid calendar date `" + std::string(text) + "`");
    }
    return sys_days{ymd};
}

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    const Date day_part = parse_date(text.substr(0, std::min<std::size_t>(10, text.size())));
    if (text.size() == 10) {
        return Timestamp{day_part};
    }
    if (text[10] != 'T' && text[10] != ' ') {
        throw FormatError("bad timestamp `" + std::string(text) + "`");
    }
    const int hh = parse_fixed(text, 11, 2, text);
    expect(text, 13, ':');
    const int mm = parse_fixed(text, 14, 2, text);
    expect(text, 16, ':');
    const int ss = parse_fixed(text, 17, 2, text);
    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            ++pos;
        }
    }
    if (pos != text.size() && !(pos + 1 == text.size() && text[pos] == 'Z')) {
        throw FormatError("timestamp is not UTC `" + std::string(text) + "`");
    }
    if (hh > 23 || mm > 59 || ss > 60) {
        throw FormatError("bad time of day `" + std::string(text) + "`");
    }
    return Timestamp{day_part} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_date(Date d) {
    using namespace std::chrono;
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day_part = floor<days>(t);
    const hh_mm_ss tod{t - day_part};
    char buf[16];
    std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()));
    return format_date(day_part) + buf;
}

Date iso_week_monday(Date d) {
    using namespace std::chrono;
    return d - (weekday{d} - Monday);
}

}  // namespace credigraph
