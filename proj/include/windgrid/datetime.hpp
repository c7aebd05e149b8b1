#pragma once

#include <cstdint>
#include <string>

namespace windgrid {

// Calendar datetime with a recorded (not applied) UTC offset. The toolkit
// never converts between zones; timestamps are treated as a uniform local
// clock and the offset is carried through for provenance.
struct DateTime {
    int year = 1970;
    int month = 1;  // 1-12
    int day = 1;    // 1-31
    int hour = 0;
    int minute = 0;
    int second = 0;
    int utc_offset_minutes = 0;

    bool operator==(const DateTime&) const = default;
};

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);

// Days since 1970-01-01 (proleptic Gregorian), negative before the epoch.
std::int64_t days_from_civil(int year, int month, int day);
Date civil_from_days(std::int64_t days);

// Minutes since the epoch, ignoring the recorded UTC offset. The reverse
// conversion stamps the given offset onto the result without applying it.
std::int64_t epoch_minutes(const DateTime& dt);
DateTime datetime_from_epoch_minutes(std::int64_t minutes, int utc_offset_minutes = 0);

// Parses ISO-8601 timestamps: "YYYY-MM-DD[T ]hh:mm[:ss][Z|+hh:mm|-hh:mm]".
// Throws Error::input on malformed text.
DateTime parse_datetime(const std::string& text);
std::string format_datetime(const DateTime& dt);
std::string format_date(const Date& d);

}  // namespace windgrid
