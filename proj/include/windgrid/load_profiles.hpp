#pragma once

#include <array>

#include "windgrid/ingest.hpp"
#include "windgrid/seasons.hpp"
#include "windgrid/timeseries.hpp"

namespace windgrid {

// One season's composed normative-day load.
struct SeasonalLoadProfile {
    Season season = Season::winter;
    std::array<double, kSlotsPerDay> residential_mw{};
    std::array<double, kSlotsPerDay> commercial_mw{};
    std::array<double, kSlotsPerDay> industrial_mw{};
    std::array<double, kSlotsPerDay> total_mw{};
    std::array<double, kSlotsPerDay> percent_of_peak{};  // 100 at the peak slot
    double peak_mw = 0.0;
    int peak_slot = 0;
    double daily_energy_mwh = 0.0;  // integral of total_mw over the day
};

// Per-slot mean of the four seasonal curves, renormalized to its own peak;
// drives season-independent studies.
struct AnnualLoadProfile {
    std::array<double, kSlotsPerDay> total_mw{};
    std::array<double, kSlotsPerDay> percent_of_peak{};
    double peak_mw = 0.0;
    int peak_slot = 0;
};

struct SystemLoadModel {
    std::array<SeasonalLoadProfile, 4> seasons;
    AnnualLoadProfile annual;
    // Seasonal average daily energy by sector (MWh), as derived from the
    // monthly table; kept for reporting.
    std::array<std::array<double, 4>, 3> daily_energy_mwh{};  // [sector][season]

    const SeasonalLoadProfile& season(Season s) const { return seasons[static_cast<int>(s)]; }
};

// Average daily energy (MWh) for a sector over a season: the sum of that
// season's monthly energies across all years in the table divided by the sum
// of the month lengths. Throws Error::input when the table has no rows for
// the pair.
double seasonal_daily_energy(const MonthlyEnergyTable& table, Sector sector, Season season);

// Scales a per-unit daily shape so its half-hour integral equals daily_mwh.
std::array<double, kSlotsPerDay> scale_shape_to_mw(const std::vector<double>& shape,
                                                   double daily_mwh);

// Per-slot mean of the four seasonal totals, renormalized to its own peak.
AnnualLoadProfile annual_from_seasons(const std::array<SeasonalLoadProfile, 4>& seasons);

// Composes the full system load model:
//   - residential: per-season shape scaled by per-season daily energy;
//   - commercial/industrial: summer shape scaled by summer daily energy,
//     extended to the other seasons by the (1 + ratio_s) / (1 + ratio_summer)
//     load-ratio factor.
SystemLoadModel build_load_model(const MonthlyEnergyTable& energy, const ShapeTable& shapes,
                                 const LoadRatioTable& ratios);

}  // namespace windgrid
