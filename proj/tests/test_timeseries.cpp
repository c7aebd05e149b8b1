#include <doctest.h>

#include <limits>
#include <utility>
#include <vector>

#include "windgrid/datetime.hpp"
#include "windgrid/errors.hpp"
#include "windgrid/timeseries.hpp"

using namespace windgrid;

namespace {

// Grid-aligned samples for `days` whole days starting at `start`, valued by
// a callback; slots listed in `omit` are left out of the stream entirely.
std::vector<RawSample> make_samples(Date start, int days, double (*value)(int slot),
                                    const std::vector<int>& omit = {}) {
    std::vector<RawSample> out;
    const std::int64_t base = days_from_civil(start.year, start.month, start.day) * 24 * 60;
    for (int s = 0; s < days * kSlotsPerDay; ++s) {
        bool skip = false;
        for (int o : omit) skip = skip || (o == s);
        if (skip) continue;
        out.push_back({base + 30 * s, value(s), false});
    }
    return out;
}

double ramp(int s) { return 100.0 + s; }

}  // namespace

TEST_CASE("clean input collapses into whole days untouched") {
    GapReport rep;
    auto samples = make_samples({2010, 3, 1}, 3, ramp);
    HalfHourlySeries s = repair_to_days(samples, SeriesMode::power, 0, rep);
    CHECK(s.day_count() == 3);
    CHECK(s.day_dates.front() == Date{2010, 3, 1});
    CHECK(s.day_dates.back() == Date{2010, 3, 3});
    CHECK(s.values.size() == 3 * 48);
    CHECK(s.day(1)[0] == 100.0 + 48);
    CHECK(rep.repaired_count == 0);
    CHECK(rep.dropped_days.empty());
    CHECK(rep.retained_present == 3 * 48);
}

TEST_CASE("short interior gaps are linearly interpolated") {
    GapReport rep;
    // Slots 58 and 59 missing: neighbors are 157 (slot 57) and 160 (slot 60).
    auto samples = make_samples({2010, 3, 1}, 2, ramp, {58, 59});
    HalfHourlySeries s = repair_to_days(samples, SeriesMode::power, 0, rep);
    CHECK(s.day_count() == 2);
    CHECK(rep.repaired_count == 2);
    REQUIRE(rep.missing.size() == 1);
    CHECK(rep.missing[0].slots == 2);
    CHECK(s.day(1)[10] == doctest::Approx(158.0).epsilon(1e-14));
    CHECK(s.day(1)[11] == doctest::Approx(159.0).epsilon(1e-14));
}

TEST_CASE("gaps beyond the repair budget drop the days they touch") {
    GapReport rep;
    auto samples = make_samples({2010, 3, 1}, 3, ramp, {50, 51, 52});
    HalfHourlySeries s = repair_to_days(samples, SeriesMode::power, 0, rep);
    CHECK(s.day_count() == 2);  // middle day lost
    CHECK(s.day_dates[0] == Date{2010, 3, 1});
    CHECK(s.day_dates[1] == Date{2010, 3, 3});
    REQUIRE(rep.dropped_days.size() == 1);
    CHECK(rep.dropped_days[0] == Date{2010, 3, 2});
    CHECK(rep.repaired_count == 0);

    // A gap spanning midnight removes both neighbors.
    GapReport rep2;
    auto spanning = make_samples({2010, 3, 1}, 3, ramp, {46, 47, 48, 49});
    HalfHourlySeries s2 = repair_to_days(spanning, SeriesMode::power, 0, rep2);
    CHECK(s2.day_count() == 1);
    CHECK(s2.day_dates[0] == Date{2010, 3, 3});
    CHECK(rep2.dropped_days.size() == 2);
}

TEST_CASE("gaps touching the span edge cannot be interpolated") {
    GapReport rep;
    auto samples = make_samples({2010, 3, 1}, 2, ramp, {0});
    HalfHourlySeries s = repair_to_days(samples, SeriesMode::power, 0, rep);
    CHECK(s.day_count() == 1);
    CHECK(s.day_dates[0] == Date{2010, 3, 2});
}

TEST_CASE("upstream-flagged and implausible readings count as missing") {
    GapReport rep;
    auto samples = make_samples({2010, 3, 1}, 2, ramp);
    samples[20].missing = true;  // single slot: repairable
    HalfHourlySeries s = repair_to_days(samples, SeriesMode::power, 0, rep);
    CHECK(s.day_count() == 2);
    CHECK(rep.repaired_count == 1);
    CHECK(s.day(0)[20] == doctest::Approx(120.0).epsilon(1e-14));

    // Speed-mode plausibility: NaN and >= 150 m/s are sensor garbage.
    GapReport rep2;
    auto speed = make_samples({2010, 3, 1}, 1, [](int) { return 7.5; });
    speed[5].value = 200.0;
    speed[9].value = std::numeric_limits<double>::quiet_NaN();
    HalfHourlySeries s2 = repair_to_days(speed, SeriesMode::speed, 0, rep2);
    CHECK(rep2.invalid_values == 2);
    CHECK(rep2.repaired_count == 2);
    CHECK(s2.day(0)[5] == doctest::Approx(7.5));
}

TEST_CASE("negative power readings clamp to zero instead of dropping data") {
    GapReport rep;
    auto samples = make_samples({2010, 3, 1}, 1, ramp);
    samples[7].value = -4.0;
    HalfHourlySeries s = repair_to_days(samples, SeriesMode::power, 0, rep);
    CHECK(rep.clamped_negative == 1);
    CHECK(s.day(0)[7] == 0.0);
}

TEST_CASE("time ordering violations are rejected as input errors") {
    auto samples = make_samples({2010, 3, 1}, 1, ramp);
    std::swap(samples[3], samples[4]);
    GapReport rep;
    CHECK_THROWS_AS(repair_to_days(samples, SeriesMode::power, 0, rep), Error);
    try {
        GapReport r2;
        repair_to_days(samples, SeriesMode::power, 0, r2);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::input);
    }
}

TEST_CASE("calendar helpers agree with known anchors") {
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(2000, 3, 1) == 11017);
    CHECK(civil_from_days(11017) == Date{2000, 3, 1});
    CHECK(is_leap_year(2000));
    CHECK_FALSE(is_leap_year(1900));
    CHECK(days_in_month(2024, 2) == 29);
    CHECK(days_in_month(2023, 2) == 28);

    DateTime dt = parse_datetime("2013-06-05 14:30:00");
    CHECK(dt.hour == 14);
    CHECK(epoch_minutes(dt) % 30 == 0);
    CHECK(datetime_from_epoch_minutes(epoch_minutes(dt)) == dt);
    CHECK(format_date({2013, 6, 5}) == "2013-06-05");
    CHECK_THROWS_AS(parse_datetime("2013-13-05 00:00"), Error);
}
