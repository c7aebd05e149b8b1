#include "windgrid/load_profiles.hpp"

#include <cmath>

#include "windgrid/errors.hpp"

namespace windgrid {

namespace {

constexpr double kHoursPerSlot = 0.5;

bool month_in_season(int month, Season season) { return season_of_month(month) == season; }

// Shapes are fractions of the sector's daily peak: strictly positive with the
// peak slot exactly 1.
void validate_shape(const std::vector<double>& shape, Sector sector, Season season) {
    double peak = 0.0;
    for (double v : shape) {
        if (v <= 0.0)
            throw Error::input(std::string(sector_name(sector)) + "/" + season_name(season) +
                               " shape must be strictly positive at every slot");
        if (v > peak) peak = v;
    }
    if (peak != 1.0)
        throw Error::input(std::string(sector_name(sector)) + "/" + season_name(season) +
                           " shape must peak at exactly 1");
}

}  // namespace

double seasonal_daily_energy(const MonthlyEnergyTable& table, Sector sector, Season season) {
    double mwh = 0.0;
    double days = 0.0;
    for (const auto& [key, value] : table.rows()) {
        const auto& [year, month, sec] = key;
        if (sec != static_cast<int>(sector)) continue;
        if (!month_in_season(month, season)) continue;
        mwh += value;
        days += static_cast<double>(days_in_month(year, month));
    }
    if (days == 0.0)
        throw Error::input(std::string("no ") + sector_name(sector) +
                           " energy rows for season " + season_name(season));
    return mwh / days;
}

std::array<double, kSlotsPerDay> scale_shape_to_mw(const std::vector<double>& shape,
                                                   double daily_mwh) {
    if (shape.size() != static_cast<std::size_t>(kSlotsPerDay))
        throw Error::input("shape must have exactly 48 slots");
    double area = 0.0;  // per-unit energy under the curve, in hours
    for (double v : shape) area += v * kHoursPerSlot;
    if (area <= 0.0) throw Error::input("shape has zero area under the curve");
    const double scale = daily_mwh / area;
    std::array<double, kSlotsPerDay> mw{};
    for (int h = 0; h < kSlotsPerDay; ++h) mw[h] = shape[h] * scale;
    return mw;
}

SystemLoadModel build_load_model(const MonthlyEnergyTable& energy, const ShapeTable& shapes,
                                 const LoadRatioTable& ratios) {
    SystemLoadModel model;

    for (Sector sector : all_sectors)
        for (Season season : all_seasons)
            model.daily_energy_mwh[static_cast<int>(sector)][static_cast<int>(season)] =
                seasonal_daily_energy(energy, sector, season);

    for (Season season : all_seasons)
        validate_shape(shapes.get(Sector::residential, season), Sector::residential, season);
    validate_shape(shapes.get(Sector::commercial, Season::summer), Sector::commercial,
                   Season::summer);
    validate_shape(shapes.get(Sector::industrial, Season::summer), Sector::industrial,
                   Season::summer);

    // Commercial and industrial anchor on the measured summer curve.
    const std::array<double, kSlotsPerDay> commercial_summer = scale_shape_to_mw(
        shapes.get(Sector::commercial, Season::summer),
        model.daily_energy_mwh[static_cast<int>(Sector::commercial)][static_cast<int>(
            Season::summer)]);
    const std::array<double, kSlotsPerDay> industrial_summer = scale_shape_to_mw(
        shapes.get(Sector::industrial, Season::summer),
        model.daily_energy_mwh[static_cast<int>(Sector::industrial)][static_cast<int>(
            Season::summer)]);
    const double commercial_base = 1.0 + ratios.ratio(Sector::commercial, Season::summer);
    const double industrial_base = 1.0 + ratios.ratio(Sector::industrial, Season::summer);

    for (Season season : all_seasons) {
        SeasonalLoadProfile& p = model.seasons[static_cast<int>(season)];
        p.season = season;

        p.residential_mw = scale_shape_to_mw(
            shapes.get(Sector::residential, season),
            model.daily_energy_mwh[static_cast<int>(Sector::residential)][static_cast<int>(
                season)]);

        if (season == Season::summer) {
            p.commercial_mw = commercial_summer;
            p.industrial_mw = industrial_summer;
        } else {
            const double cf =
                (1.0 + ratios.ratio(Sector::commercial, season)) / commercial_base;
            const double inf =
                (1.0 + ratios.ratio(Sector::industrial, season)) / industrial_base;
            for (int h = 0; h < kSlotsPerDay; ++h) {
                p.commercial_mw[h] = commercial_summer[h] * cf;
                p.industrial_mw[h] = industrial_summer[h] * inf;
            }
        }

        for (int h = 0; h < kSlotsPerDay; ++h) {
            p.total_mw[h] = p.residential_mw[h] + p.commercial_mw[h] + p.industrial_mw[h];
            p.daily_energy_mwh += p.total_mw[h] * kHoursPerSlot;
            if (p.total_mw[h] > p.total_mw[p.peak_slot]) p.peak_slot = h;
        }
        p.peak_mw = p.total_mw[p.peak_slot];
        if (p.peak_mw <= 0.0)
            throw Error::input(std::string("season ") + season_name(season) +
                               " composes to a zero load curve");
        // The ratio is taken first so the peak slot lands on exactly 100.
        for (int h = 0; h < kSlotsPerDay; ++h)
            p.percent_of_peak[h] = 100.0 * (p.total_mw[h] / p.peak_mw);
    }

    model.annual = annual_from_seasons(model.seasons);
    return model;
}

AnnualLoadProfile annual_from_seasons(const std::array<SeasonalLoadProfile, 4>& seasons) {
    AnnualLoadProfile a;
    for (int h = 0; h < kSlotsPerDay; ++h) {
        double sum = 0.0;
        for (const SeasonalLoadProfile& p : seasons) sum += p.total_mw[h];
        a.total_mw[h] = sum / 4.0;
        if (a.total_mw[h] > a.total_mw[a.peak_slot]) a.peak_slot = h;
    }
    a.peak_mw = a.total_mw[a.peak_slot];
    if (a.peak_mw <= 0.0) throw Error::input("annual load curve has a non-positive peak");
    for (int h = 0; h < kSlotsPerDay; ++h)
        a.percent_of_peak[h] = 100.0 * (a.total_mw[h] / a.peak_mw);
    return a;
}

}  // namespace windgrid
