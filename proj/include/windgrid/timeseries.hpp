#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "windgrid/datetime.hpp"

namespace windgrid {

enum class SeriesMode { power, speed };

inline constexpr int kSlotsPerDay = 48;
// Speed readings at or above this are sensor garbage, not weather.
inline constexpr double kMaxPlausibleSpeed = 150.0;

// Whole-day 30-minute series. Days are stored explicitly (48 values each,
// day-major) because gap repair can drop interior days; within a day the
// slot grid is uniform, across days the dates strictly increase.
struct HalfHourlySeries {
    SeriesMode mode = SeriesMode::power;
    int utc_offset_minutes = 0;
    std::vector<Date> day_dates;
    std::vector<double> values;  // day_dates.size() * 48

    std::size_t day_count() const { return day_dates.size(); }
    std::span<const double> day(std::size_t d) const {
        return {values.data() + d * kSlotsPerDay, kSlotsPerDay};
    }
    DateTime start_timestamp() const {
        DateTime dt;
        if (!day_dates.empty()) {
            dt.year = day_dates.front().year;
            dt.month = day_dates.front().month;
            dt.day = day_dates.front().day;
        }
        dt.utc_offset_minutes = utc_offset_minutes;
        return dt;
    }
};

struct GapReport {
    struct MissingInterval {
        DateTime start;
        int slots = 0;
    };
    std::vector<MissingInterval> missing;
    std::vector<Date> dropped_days;
    std::size_t repaired_count = 0;    // slots filled by interpolation
    std::size_t clamped_negative = 0;  // power-mode readings clamped to zero
    std::size_t invalid_values = 0;    // readings treated as missing
    std::size_t expected_slots = 0;    // whole-day grid size of the input span
    std::size_t retained_present = 0;  // retained slots that came from the input
};

// One grid-aligned raw sample; `missing` marks a slot invalidated upstream.
struct RawSample {
    std::int64_t minute = 0;  // epoch minutes, multiple of 30
    double value = 0.0;
    bool missing = false;
};

// Collapses grid-aligned samples into whole days. Gaps of at most
// `max_repair_slots` consecutive slots with neighbors on both sides are
// linearly interpolated; anything longer (or touching the span edge) drops
// every day it overlaps. Samples must be strictly increasing in time.
HalfHourlySeries repair_to_days(const std::vector<RawSample>& samples, SeriesMode mode,
                                int utc_offset_minutes, GapReport& report,
                                int max_repair_slots = 2);

}  // namespace windgrid
