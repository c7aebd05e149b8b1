#include "windgrid/wind_profiles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "windgrid/errors.hpp"
#include "windgrid/kernels.hpp"

namespace windgrid {

NormalizedDays normalize_days(const HalfHourlySeries& power, double reference_floor) {
    if (power.mode != SeriesMode::power)
        throw Error::input("day normalization requires a power series");
    if (reference_floor <= 0.0) throw Error::input("reference floor must be positive");
    if (power.day_count() == 0) throw Error::input("day normalization requires a non-empty series");

    NormalizedDays out;
    out.reference_floor = reference_floor;
    for (std::size_t d = 0; d < power.day_count(); ++d) {
        const std::span<const double> day = power.day(d);
        if (day[0] < reference_floor) {
            out.excluded_days.push_back(power.day_dates[d]);
            continue;
        }
        NormalizedDay nd;
        nd.date = power.day_dates[d];
        nd.reference = day[0];
        for (int h = 0; h < kSlotsPerDay; ++h) {
            nd.actual[h] = day[h];
            nd.values[h] = day[h] / nd.reference;
        }
        out.by_season[static_cast<int>(season_of_month(nd.date.month))].push_back(nd);
    }
    for (auto& days : out.by_season)
        std::sort(days.begin(), days.end(),
                  [](const NormalizedDay& a, const NormalizedDay& b) { return a.date < b.date; });
    return out;
}

NormativeSeason build_normative_season(Season season, const std::vector<NormalizedDay>& days,
                                       const std::vector<int>& training_years) {
    if (training_years.size() < 2)
        throw Error::input(std::string("normative season ") + season_name(season) +
                           " requires at least 2 training years, got " +
                           std::to_string(training_years.size()));

    // Align across years by day-of-season index, truncated to the shortest
    // year so the slot grid is dense.
    std::map<int, std::vector<const NormalizedDay*>> by_year;
    for (const NormalizedDay& d : days) by_year[d.date.year].push_back(&d);
    std::size_t n_days = 0;
    bool first = true;
    for (int year : training_years) {
        const auto it = by_year.find(year);
        if (it == by_year.end() || it->second.empty())
            throw Error::input(std::string("training year ") + std::to_string(year) +
                               " has no retained days for season " + season_name(season));
        if (first || it->second.size() < n_days) n_days = it->second.size();
        first = false;
    }

    NormativeSeason out;
    out.season = season;
    out.day_count = static_cast<int>(n_days);
    out.years = training_years;
    const std::size_t n_slots = n_days * kSlotsPerDay;
    out.mean.resize(n_slots);
    out.representative.resize(n_slots);
    out.chosen_year.resize(n_slots);
    out.min_dev.resize(n_slots);
    out.max_dev.resize(n_slots);

    const double n_years = static_cast<double>(training_years.size());
    for (std::size_t d = 0; d < n_days; ++d) {
        for (int h = 0; h < kSlotsPerDay; ++h) {
            const std::size_t j = d * kSlotsPerDay + static_cast<std::size_t>(h);
            double sum = 0.0;
            for (int year : training_years) sum += by_year[year][d]->values[h];
            const double mean = sum / n_years;

            double best_abs = 0.0, best_value = 0.0, lo = 0.0, hi = 0.0;
            int best_year = 0;
            bool first_year = true;
            for (int year : training_years) {
                const double v = by_year[year][d]->values[h];
                const double dev = v - mean;
                if (first_year || std::abs(dev) < best_abs) {
                    best_abs = std::abs(dev);
                    best_value = v;
                    best_year = year;
                }
                if (first_year || dev < lo) lo = dev;
                if (first_year || dev > hi) hi = dev;
                first_year = false;
            }
            out.mean[j] = mean;
            out.representative[j] = best_value;
            out.chosen_year[j] = best_year;
            out.min_dev[j] = std::max(0.0, -lo);
            out.max_dev[j] = std::max(0.0, hi);
        }
    }
    return out;
}

NormativeDayProfile build_normative_day(const NormativeSeason& season_model,
                                        const std::vector<NormalizedDay>& days) {
    NormativeDayProfile out;
    out.season = season_model.season;
    out.day_count = season_model.day_count;
    out.retained_days = static_cast<int>(days.size());
    if (season_model.day_count == 0)
        throw Error::input(std::string("normative season ") +
                           season_name(season_model.season) + " has no aligned days");

    const int n_days = season_model.day_count;
    for (int h = 0; h < kSlotsPerDay; ++h) {
        double sum = 0.0;
        for (int d = 0; d < n_days; ++d)
            sum += season_model.representative[static_cast<std::size_t>(d) * kSlotsPerDay +
                                               static_cast<std::size_t>(h)];
        const double mean = sum / static_cast<double>(n_days);

        double best_abs = 0.0, best_value = 0.0, lo = 0.0, hi = 0.0;
        int best_day = 0, lo_day = 0, hi_day = 0;
        bool first = true;
        for (int d = 0; d < n_days; ++d) {
            const std::size_t j = static_cast<std::size_t>(d) * kSlotsPerDay +
                                  static_cast<std::size_t>(h);
            const double v = season_model.representative[j];
            const double dev = v - mean;
            if (first || std::abs(dev) < best_abs) {
                best_abs = std::abs(dev);
                best_value = v;
                best_day = d;
            }
            if (first || dev < lo) {
                lo = dev;
                lo_day = d;
            }
            if (first || dev > hi) {
                hi = dev;
                hi_day = d;
            }
            first = false;
        }
        out.mean[h] = mean;
        out.representative[h] = best_value;
        out.chosen_day[h] = best_day;
        out.min_dev[h] = std::max(0.0, -lo);
        out.max_dev[h] = std::max(0.0, hi);
        // Net envelope: widen each side by the across-year deviation at the
        // seasonal slot of the day that produced that side's extreme.
        const std::size_t lo_j = static_cast<std::size_t>(lo_day) * kSlotsPerDay +
                                 static_cast<std::size_t>(h);
        const std::size_t hi_j = static_cast<std::size_t>(hi_day) * kSlotsPerDay +
                                 static_cast<std::size_t>(h);
        out.net_min[h] = out.min_dev[h] + season_model.min_dev[lo_j];
        out.net_max[h] = out.max_dev[h] + season_model.max_dev[hi_j];
    }

    // Actual-scale statistics over every retained day of the season.
    double total = 0.0, mn = 0.0, mx = 0.0;
    bool first = true;
    std::array<double, kSlotsPerDay> slot_sum{};
    for (const NormalizedDay& d : days) {
        total += kernels::sum(d.actual.data(), d.actual.size());
        const auto [dmin, dmax] = kernels::minmax(d.actual.data(), d.actual.size());
        if (first || dmin < mn) mn = dmin;
        if (first || dmax > mx) mx = dmax;
        first = false;
        for (int h = 0; h < kSlotsPerDay; ++h) slot_sum[h] += d.actual[h];
    }
    if (!days.empty()) {
        const double n = static_cast<double>(days.size());
        out.actual_mean = total / (n * kSlotsPerDay);
        out.actual_min = mn;
        out.actual_max = mx;
        for (int h = 0; h < kSlotsPerDay; ++h) out.actual_slot_mean[h] = slot_sum[h] / n;
    }
    return out;
}

SeasonalWindModel build_seasonal_model(const HalfHourlySeries& power, double reference_floor) {
    const NormalizedDays normalized = normalize_days(power, reference_floor);

    // Training years = calendar years contributing at least one retained day.
    std::vector<int> years;
    for (const auto& days : normalized.by_season)
        for (const NormalizedDay& d : days)
            if (std::find(years.begin(), years.end(), d.date.year) == years.end())
                years.push_back(d.date.year);
    std::sort(years.begin(), years.end());

    SeasonalWindModel model;
    model.reference_floor = reference_floor;
    model.excluded_days = normalized.excluded_days.size();
    for (Season s : all_seasons) {
        const auto& days = normalized.season(s);
        const NormativeSeason ns = build_normative_season(s, days, years);
        model.seasons[static_cast<int>(s)] = build_normative_day(ns, days);
        model.training_days += days.size();
    }
    model.first_year = years.front();
    model.last_year = years.back();
    return model;
}

HalfHourlySeries speed_to_power(const HalfHourlySeries& speed, const TurbineCurve& curve) {
    if (speed.mode != SeriesMode::speed)
        throw Error::input("turbine conversion requires a speed series");
    if (!(0.0 < curve.v_ci && curve.v_ci < curve.v_r && curve.v_r < curve.v_co) ||
        curve.rated <= 0.0)
        throw Error::input("turbine curve requires 0 < v_ci < v_r < v_co and positive rating");
    HalfHourlySeries out;
    out.mode = SeriesMode::power;
    out.utc_offset_minutes = speed.utc_offset_minutes;
    out.day_dates = speed.day_dates;
    out.values.resize(speed.values.size());
    kernels::turbine_power(speed.values.data(), out.values.data(), speed.values.size(),
                           curve.v_ci, curve.v_r, curve.v_co, curve.rated);
    return out;
}

AnnualProfile build_annual_profile(const HalfHourlySeries& speed, const TurbineCurve& curve,
                                   double reference_floor, std::size_t min_days) {
    if (speed.mode != SeriesMode::speed)
        throw Error::input("annual wind profile requires a speed series");
    AnnualProfile profile;
    profile.curve = curve;
    profile.reference_floor = reference_floor;
    profile.weibull = fit_weibull(speed.values);

    const HalfHourlySeries power = speed_to_power(speed, curve);
    std::array<double, kSlotsPerDay> sum{};
    std::size_t used = 0;
    for (std::size_t d = 0; d < power.day_count(); ++d) {
        const std::span<const double> day = power.day(d);
        if (day[0] < reference_floor) {
            ++profile.excluded_days;
            continue;
        }
        for (int h = 0; h < kSlotsPerDay; ++h) sum[h] += day[h] / day[0];
        ++used;
    }
    profile.day_count = used;
    if (used < min_days)
        throw Error::input("annual wind profile requires at least " + std::to_string(min_days) +
                           " usable days, got " + std::to_string(used));
    for (int h = 0; h < kSlotsPerDay; ++h)
        profile.pn[h] = sum[h] / static_cast<double>(used);
    return profile;
}

OutlierReport detect_outliers(const SeasonalWindModel& model, const HalfHourlySeries& holdout) {
    OutlierReport report;
    const NormalizedDays normalized = normalize_days(holdout, model.reference_floor);
    report.excluded_days = normalized.excluded_days.size();
    for (Season s : all_seasons) {
        const NormativeDayProfile& norm = model.season(s);
        std::array<double, kSlotsPerDay> lower{}, upper{};
        for (int h = 0; h < kSlotsPerDay; ++h) {
            lower[h] = norm.lower_bound(h);
            upper[h] = norm.upper_bound(h);
        }
        std::int64_t count = 0;
        for (const NormalizedDay& d : normalized.season(s)) {
            count += static_cast<std::int64_t>(kernels::count_outside(
                d.values.data(), lower.data(), upper.data(), d.values.size()));
            for (int h = 0; h < kSlotsPerDay; ++h) {
                if (d.values[h] > upper[h]) {
                    report.records.push_back({s, d.date, h, d.values[h], upper[h], true});
                } else if (d.values[h] < lower[h]) {
                    report.records.push_back({s, d.date, h, d.values[h], lower[h], false});
                }
            }
            report.evaluated[static_cast<int>(s)] += kSlotsPerDay;
        }
        report.outliers[static_cast<int>(s)] = count;
    }
    // The vectorized count and the record list must agree slot for slot.
    std::int64_t total = 0;
    for (Season s : all_seasons) total += report.outliers[static_cast<int>(s)];
    if (total != static_cast<std::int64_t>(report.records.size()))
        throw Error::integrity("outlier count does not match outlier record list");
    return report;
}

}  // namespace windgrid
