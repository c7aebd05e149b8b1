#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "windgrid/dispatch.hpp"
#include "windgrid/network.hpp"
#include "windgrid/powerflow.hpp"
#include "windgrid/timeseries.hpp"
#include "windgrid/wind_profiles.hpp"

namespace windgrid {

// Wind trajectory variant driving the scaled injections: the representative
// day, or its lower/upper envelope edge.
enum class WindMode { mean = 0, vmin = 1, vmax = 2 };

inline constexpr std::array<WindMode, 3> all_wind_modes{WindMode::mean, WindMode::vmin,
                                                        WindMode::vmax};

const char* wind_mode_name(WindMode m);
WindMode wind_mode_from_name(const std::string& name);

// season_focused runs one scan per season against that season's dispatch and
// wind envelope; season_independent runs a single scan against the annual
// dispatch and the season-independent wind profile.
enum class ScanApproach { season_focused = 0, season_independent = 1 };

const char* scan_approach_name(ScanApproach a);
ScanApproach scan_approach_from_name(const std::string& name);

struct ScanConfig {
    int selections = 100;           // Monte-Carlo wind placements
    double penetration = 0.5;       // target wind share of generation capacity
    double penetration_tol = 0.05;  // acceptance band half-width
    std::uint64_t seed = 0;
    std::vector<WindMode> modes{WindMode::mean, WindMode::vmin, WindMode::vmax};
    double band_low = 0.94;    // absolute voltage criterion, p.u.
    double band_high = 1.06;
    double relative_tol = 0.05;  // relative criterion, fraction of base voltage
    PFOptions pf;
    int threads = 1;
};

// One random placement of wind conversion across generator buses.
struct WindSelection {
    std::vector<int> buses;                 // selected bus ids, ascending
    std::vector<std::uint8_t> is_wind_gen;  // per generator, case order
    double capacity_mw = 0.0;               // in-service Pmax on selected buses
    double fraction = 0.0;                  // capacity_mw / system capacity
};

// Draws selection `selection_index` from the seed's sub-stream: buses are
// added in random order, draws that would overshoot the band are skipped, and
// the walk stops the first time the capacity fraction enters
// [penetration - tol, penetration + tol]. After 1000 failed shuffles the walk
// restarts once on a reseeded stream; a second failure raises Error::input.
// penetration == 0 disables wind and returns an empty selection.
WindSelection select_wind_buses(const NetworkCase& net, const ScanConfig& cfg,
                                int selection_index);

// Per-slot injection scale factors for the season-focused path. For each mode
// the factor is that season's trajectory value weighted by the season's
// actual-power statistic, normalized per slot by the across-season mean (mean
// mode), maximum (max mode) or minimum (min mode) of the same product.
// A vanishing normalizer raises Error::input naming the slot and season.
struct SeasonalScaleFactors {
    // factor[mode][season][slot]
    std::array<std::array<std::array<double, kSlotsPerDay>, 4>, 3> factor{};
};

SeasonalScaleFactors build_seasonal_scale_factors(const SeasonalWindModel& model);

// Everything the scan consumes besides the case and the config. The schedules
// provide the no-wind dispatch, the per-slot load factors and the warm-start
// voltages; season-focused scans require `wind` and all four seasonal
// schedules, season-independent scans require `annual_wind` and the annual
// schedule.
struct ScanData {
    const SeasonalWindModel* wind = nullptr;
    const AnnualProfile* annual_wind = nullptr;
    std::array<const DispatchSchedule*, 4> seasonal_schedules{};
    const DispatchSchedule* annual_schedule = nullptr;
};

// Violation tallies for one (season, mode) block of selections * 48 cases.
struct ScanGroup {
    std::string season;  // "winter".."fall", or "annual"
    WindMode mode = WindMode::mean;
    std::int64_t cases = 0;     // attempted power flows
    std::int64_t solved = 0;    // converged power flows
    std::int64_t diverged = 0;  // excluded from every tally
    std::vector<std::int64_t> relative_count;  // per bus, case order
    std::vector<std::int64_t> absolute_count;  // per bus, case order
};

struct ViolationReport {
    ScanApproach approach = ScanApproach::season_focused;
    std::uint64_t seed = 0;
    int selections = 0;
    double penetration = 0.0;
    double penetration_tol = 0.0;
    double band_low = 0.0;
    double band_high = 0.0;
    double relative_tol = 0.0;
    std::vector<int> bus_ids;          // case order
    std::vector<double> base_vm;       // solved 100%-load base voltages, p.u.
    std::vector<WindSelection> picks;  // per selection index
    std::vector<ScanGroup> groups;
    std::int64_t total_solved = 0;
    std::int64_t total_diverged = 0;
};

// Runs the Monte-Carlo voltage scan. Every (selection, slot) case solves a
// fixed-injection power flow with wind-bus outputs scaled by the mode's
// factor and loads at the schedule's slot percentage; a case that fails the
// warm start is retried flat, and only then counted diverged. A bus violates
// the relative criterion when |V - Vbase| exceeds relative_tol * Vbase, and
// the absolute criterion when V leaves [band_low, band_high]; boundary values
// do not violate. The same selections are reused for every season and mode.
ViolationReport run_scan(const NetworkCase& net, ScanApproach approach, const ScanData& data,
                         const ScanConfig& cfg);

// One bus in the final vulnerability order.
struct RankedBus {
    int bus = 0;
    std::string group;  // "both", "relative-only" or "absolute-only"
    double wv = 0.0;    // composite weight; lower = more vulnerable
    int alpha1 = 0;            // rank by pooled mean-mode relative count (1 = worst)
    double pv1 = 0.0;          // pooled mean-mode relative violating fraction
    std::int64_t count1 = 0;
    int alpha2 = 0;            // rank by pooled min/max-mode absolute count
    double pv2 = 0.0;
    std::int64_t count2 = 0;
};

struct VulnerabilityRanking {
    std::vector<RankedBus> entries;  // most vulnerable first; rank = index + 1
    std::int64_t mean_cases = 0;     // pooled mean-mode solved cases
    std::int64_t extreme_cases = 0;  // pooled min/max-mode solved cases
};

// Pools the report's mean-mode relative counts (probability pv1, rank alpha1)
// and min/max-mode absolute counts (pv2, alpha2). Buses violating under both
// pools are ordered first by ascending wv = alpha1/pv1 + alpha2/pv2; buses
// violating under a single pool follow, ordered by their one defined term.
// Count ties rank the lower bus id first; buses with no violations at all are
// left out.
VulnerabilityRanking rank_vulnerability(const ViolationReport& report);

}  // namespace windgrid
