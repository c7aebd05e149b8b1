#include <array>
#include <cstdio>

#include "windgrid/datetime.hpp"
#include "windgrid/errors.hpp"

namespace windgrid {

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> lengths{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) throw Error::input("month out of range: " + std::to_string(month));
    if (month == 2 && is_leap_year(year)) return 29;
    return lengths[static_cast<std::size_t>(month - 1)];
}

// Howard Hinnant's civil-calendar algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

std::int64_t epoch_minutes(const DateTime& dt) {
    return days_from_civil(dt.year, dt.month, dt.day) * 1440 + dt.hour * 60 + dt.minute;
}

DateTime datetime_from_epoch_minutes(std::int64_t minutes, int utc_offset_minutes) {
    std::int64_t days = minutes / 1440;
    std::int64_t rem = minutes % 1440;
    if (rem < 0) {
        rem += 1440;
        days -= 1;
    }
    Date d = civil_from_days(days);
    DateTime dt;
    dt.year = d.year;
    dt.month = d.month;
    dt.day = d.day;
    dt.hour = static_cast<int>(rem / 60);
    dt.minute = static_cast<int>(rem % 60);
    dt.utc_offset_minutes = utc_offset_minutes;
    return dt;
}

namespace {

bool read_int(const std::string& s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

}  // namespace

DateTime parse_datetime(const std::string& text) {
    // YYYY-MM-DD[T ]hh:mm[:ss][Z|+hh:mm|-hh:mm]
    DateTime dt;
    auto fail = [&]() -> Error { return Error::input("malformed timestamp: '" + text + "'"); };
    if (!read_int(text, 0, 4, dt.year)) throw fail();
    if (text.size() < 16 || text[4] != '-' || text[7] != '-') throw fail();
    if (!read_int(text, 5, 2, dt.month) || !read_int(text, 8, 2, dt.day)) throw fail();
    if (text[10] != 'T' && text[10] != ' ') throw fail();
    if (!read_int(text, 11, 2, dt.hour) || text[13] != ':' || !read_int(text, 14, 2, dt.minute))
        throw fail();
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        if (!read_int(text, pos + 1, 2, dt.second)) throw fail();
        pos += 3;
    }
    if (pos < text.size()) {
        char c = text[pos];
        if (c == 'Z' && pos + 1 == text.size()) {
            dt.utc_offset_minutes = 0;
        } else if ((c == '+' || c == '-') && pos + 6 == text.size() && text[pos + 3] == ':') {
            int oh = 0, om = 0;
            if (!read_int(text, pos + 1, 2, oh) || !read_int(text, pos + 4, 2, om)) throw fail();
            dt.utc_offset_minutes = (oh * 60 + om) * (c == '+' ? 1 : -1);
        } else {
            throw fail();
        }
    }
    if (dt.month < 1 || dt.month > 12 || dt.day < 1 || dt.day > days_in_month(dt.year, dt.month) ||
        dt.hour > 23 || dt.minute > 59 || dt.second > 60)
        throw fail();
    return dt;
}

std::string format_datetime(const DateTime& dt) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", dt.year, dt.month, dt.day,
                  dt.hour, dt.minute, dt.second);
    return buf;
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

}  // namespace windgrid
