#include "windgrid/timeseries.hpp"

#include <cmath>
#include <cstdint>

#include "windgrid/errors.hpp"

namespace windgrid {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

HalfHourlySeries repair_to_days(const std::vector<RawSample>& samples, SeriesMode mode,
                                int utc_offset_minutes, GapReport& report,
                                int max_repair_slots) {
    HalfHourlySeries out;
    out.mode = mode;
    out.utc_offset_minutes = utc_offset_minutes;
    report = GapReport{};
    if (samples.empty()) return out;

    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].minute % 30 != 0)
            throw Error::input("sample timestamp is not on the 30-minute grid");
        if (i > 0 && samples[i].minute <= samples[i - 1].minute)
            throw Error::input("samples are not strictly increasing in time");
    }

    const std::int64_t first_day = floor_div(samples.front().minute, 1440);
    const std::int64_t last_day = floor_div(samples.back().minute, 1440);
    const std::int64_t n_days = last_day - first_day + 1;
    const std::int64_t grid_start = first_day * 1440;
    const std::size_t n_slots = static_cast<std::size_t>(n_days) * kSlotsPerDay;
    report.expected_slots = n_slots;

    std::vector<double> grid(n_slots, 0.0);
    std::vector<std::uint8_t> present(n_slots, 0);

    for (const RawSample& s : samples) {
        const std::size_t idx = static_cast<std::size_t>((s.minute - grid_start) / 30);
        double v = s.value;
        bool ok = !s.missing && std::isfinite(v);
        if (ok) {
            if (mode == SeriesMode::power) {
                if (v < 0.0) {
                    v = 0.0;
                    ++report.clamped_negative;
                }
            } else {
                if (v < 0.0 || v >= kMaxPlausibleSpeed) ok = false;
            }
        }
        if (!ok && !s.missing) ++report.invalid_values;
        if (ok) {
            grid[idx] = v;
            present[idx] = 1;
        }
    }

    // Record missing runs and interpolate the short interior ones.
    std::vector<std::uint8_t> filled = present;
    for (std::size_t i = 0; i < n_slots;) {
        if (present[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n_slots && !present[j]) ++j;
        const std::size_t run = j - i;
        GapReport::MissingInterval mi;
        mi.start = datetime_from_epoch_minutes(grid_start + static_cast<std::int64_t>(i) * 30,
                                               utc_offset_minutes);
        mi.slots = static_cast<int>(run);
        report.missing.push_back(mi);
        if (run <= static_cast<std::size_t>(max_repair_slots) && i > 0 && j < n_slots) {
            const double lo = grid[i - 1];
            const double hi = grid[j];
            for (std::size_t k = i; k < j; ++k) {
                const double t =
                    static_cast<double>(k - i + 1) / static_cast<double>(run + 1);
                grid[k] = lo + (hi - lo) * t;
                filled[k] = 2;  // repaired
            }
        }
        i = j;
    }

    for (std::int64_t d = 0; d < n_days; ++d) {
        const std::size_t base = static_cast<std::size_t>(d) * kSlotsPerDay;
        const DateTime day_start = datetime_from_epoch_minutes(
            grid_start + d * 1440, utc_offset_minutes);
        const Date date{day_start.year, day_start.month, day_start.day};
        const bool leap_day = (date.month == 2 && date.day == 29);
        bool complete = true;
        for (int s = 0; s < kSlotsPerDay && complete; ++s)
            if (!filled[base + s]) complete = false;
        if (!complete || leap_day) {
            report.dropped_days.push_back(date);
            continue;
        }
        out.day_dates.push_back(date);
        for (int s = 0; s < kSlotsPerDay; ++s) {
            out.values.push_back(grid[base + s]);
            if (filled[base + s] == 2)
                ++report.repaired_count;
            else
                ++report.retained_present;
        }
    }
    return out;
}

}  // namespace windgrid
