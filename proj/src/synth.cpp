#include "windgrid/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "windgrid/errors.hpp"
#include "windgrid/manifest.hpp"
#include "windgrid/rng.hpp"
#include "windgrid/seasons.hpp"

namespace windgrid {

namespace {

// Walks every non-leap-day date of the span and appends one generated day per
// call to `day_value(season, slot)`; z carries the AR(1) state across days.
template <typename F>
HalfHourlySeries generate_series(SeriesMode mode, int first_year, int year_count, F&& slot_value) {
    if (year_count <= 0) throw Error::input("synthetic span must cover at least one year");
    HalfHourlySeries series;
    series.mode = mode;
    for (int year = first_year; year < first_year + year_count; ++year) {
        for (int month = 1; month <= 12; ++month) {
            const int ndays = days_in_month(year, month);
            const Season season = season_of_month(month);
            for (int day = 1; day <= ndays; ++day) {
                if (month == 2 && day == 29) continue;
                series.day_dates.push_back({year, month, day});
                for (int h = 0; h < kSlotsPerDay; ++h)
                    series.values.push_back(slot_value(season, h));
            }
        }
    }
    return series;
}

double diurnal(int h, int peak_slot, double amp) {
    return 1.0 + amp * std::cos(2.0 * std::numbers::pi * static_cast<double>(h - peak_slot) /
                                static_cast<double>(kSlotsPerDay));
}

}  // namespace

HalfHourlySeries synth_wind_power(std::uint64_t seed, int first_year, int year_count,
                                  const SynthWindParams& params) {
    // Fold the starting year into the stream index so disjoint year ranges
    // (training vs held-out) draw uncorrelated noise from the same seed.
    SplitMix64 rng =
        SplitMix64::substream(seed, (static_cast<std::uint64_t>(first_year) << 8) | 1u);
    double z = rng.next_normal();  // stationary unit AR(1) state
    const double step = std::sqrt(1.0 - params.ar_rho * params.ar_rho);
    return generate_series(SeriesMode::power, first_year, year_count, [&](Season s, int h) {
        z = params.ar_rho * z + step * rng.next_normal();
        const int si = static_cast<int>(s);
        const double sigma = params.log_sigma[si];
        const double noise = std::exp(sigma * z - 0.5 * sigma * sigma);
        return params.level_mw[si] * diurnal(h, params.peak_slot[si], params.diurnal_amp[si]) *
               noise;
    });
}

HalfHourlySeries synth_wind_speed(std::uint64_t seed, int first_year, int year_count,
                                  const SynthSpeedParams& params) {
    SplitMix64 rng =
        SplitMix64::substream(seed, (static_cast<std::uint64_t>(first_year) << 8) | 2u);
    double z = rng.next_normal();
    const double step = std::sqrt(1.0 - params.ar_rho * params.ar_rho);
    return generate_series(SeriesMode::speed, first_year, year_count, [&](Season s, int h) {
        z = params.ar_rho * z + step * rng.next_normal();
        const double sigma = params.log_sigma;
        const double noise = std::exp(sigma * z - 0.5 * sigma * sigma);
        return params.base_ms * params.season_scale[static_cast<int>(s)] *
               diurnal(h, params.peak_slot, params.diurnal_amp) * noise;
    });
}

void write_series_csv(const HalfHourlySeries& series, const std::string& path) {
    std::string text = "timestamp,value\n";
    text.reserve(series.values.size() * 32 + 32);
    char buf[64];
    for (std::size_t d = 0; d < series.day_count(); ++d) {
        const Date& date = series.day_dates[d];
        for (int h = 0; h < kSlotsPerDay; ++h) {
            std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d,%.6f\n", date.year,
                          date.month, date.day, h / 2, (h % 2) * 30,
                          series.values[d * kSlotsPerDay + static_cast<std::size_t>(h)]);
            text += buf;
        }
    }
    write_text_atomic(path, text);
}

}  // namespace windgrid
