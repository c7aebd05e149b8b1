#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "windgrid/seasons.hpp"
#include "windgrid/timeseries.hpp"

namespace windgrid {

inline constexpr double kDefaultReferenceFloor = 1.0;  // MW

// One retained day, normalized by its first-slot value; slot 0 is exactly 1.
struct NormalizedDay {
    Date date;
    double reference = 0.0;                     // MW value of the first slot
    std::array<double, kSlotsPerDay> values{};  // per-unit of reference
    std::array<double, kSlotsPerDay> actual{};  // MW
};

// Days normalized per-day and grouped by season. Days whose first-slot value
// falls below the reference floor are excluded and listed.
struct NormalizedDays {
    std::array<std::vector<NormalizedDay>, 4> by_season;
    std::vector<Date> excluded_days;
    double reference_floor = kDefaultReferenceFloor;

    const std::vector<NormalizedDay>& season(Season s) const {
        return by_season[static_cast<int>(s)];
    }
};

NormalizedDays normalize_days(const HalfHourlySeries& power,
                              double reference_floor = kDefaultReferenceFloor);

// Across-year statistics on the season's slot grid. Years are aligned by
// day-of-season index and truncated to the shortest year's day count N, so
// every vector is dense with length N*48. Deviations from the across-year
// mean are stored as non-negative magnitudes.
struct NormativeSeason {
    Season season = Season::winter;
    int day_count = 0;  // N after truncation
    std::vector<int> years;
    std::vector<double> mean;            // MP, per seasonal slot j
    std::vector<double> representative;  // NP: the year value closest to MP
    std::vector<int> chosen_year;
    std::vector<double> min_dev;  // |most negative deviation across years|
    std::vector<double> max_dev;  // most positive deviation across years
};

// Requires >= 2 training years and every training year to contribute at
// least one day of the season (coverage).
NormativeSeason build_normative_season(Season season, const std::vector<NormalizedDay>& days,
                                       const std::vector<int>& training_years);

// The per-season normative day: across-day mean and representative profiles
// plus the net envelope, where each side's across-day deviation is widened by
// the across-year deviation of the day that produced it.
struct NormativeDayProfile {
    Season season = Season::winter;
    int day_count = 0;  // N days entering the envelope
    std::array<double, kSlotsPerDay> mean{};            // MDP
    std::array<double, kSlotsPerDay> representative{};  // NORMP
    std::array<int, kSlotsPerDay> chosen_day{};
    std::array<double, kSlotsPerDay> net_max{};  // NETMAXV >= max_dev
    std::array<double, kSlotsPerDay> net_min{};  // NETMINV >= min_dev
    std::array<double, kSlotsPerDay> max_dev{};  // MAXVP, across days only
    std::array<double, kSlotsPerDay> min_dev{};  // MINVP magnitude
    // Actual-scale statistics over all retained days of the season.
    std::array<double, kSlotsPerDay> actual_slot_mean{};
    double actual_mean = 0.0;  // MW
    double actual_max = 0.0;
    double actual_min = 0.0;
    int retained_days = 0;  // includes days beyond the truncated N

    double upper_bound(int h) const { return representative[h] + net_max[h]; }
    double lower_bound(int h) const { return representative[h] - net_min[h]; }
};

NormativeDayProfile build_normative_day(const NormativeSeason& season_model,
                                        const std::vector<NormalizedDay>& days);

struct SeasonalWindModel {
    std::array<NormativeDayProfile, 4> seasons;
    double reference_floor = kDefaultReferenceFloor;
    int first_year = 0;
    int last_year = 0;
    std::size_t training_days = 0;
    std::size_t excluded_days = 0;

    const NormativeDayProfile& season(Season s) const { return seasons[static_cast<int>(s)]; }
};

SeasonalWindModel build_seasonal_model(const HalfHourlySeries& power,
                                       double reference_floor = kDefaultReferenceFloor);

// ---- model-based annual path ----

struct WeibullFit {
    double shape = 0.0;  // k
    double scale = 0.0;  // lambda, m/s
    std::size_t sample_count = 0;
    std::size_t zero_count = 0;  // non-positive samples removed
};

// Maximum-likelihood Weibull fit over the positive finite samples. Throws
// Error::input for fewer than `min_samples` usable samples, Error::numerical
// when the likelihood has no interior optimum (e.g. all samples equal).
WeibullFit fit_weibull(std::span<const double> samples, std::size_t min_samples = 100);

struct TurbineCurve {
    double v_ci = 3.0;     // cut-in, m/s
    double v_r = 12.5;     // rated, m/s
    double v_co = 25.0;    // cut-out, m/s
    double rated = 100.0;  // MW
};

// Converts a speed series to a power series through the turbine curve.
HalfHourlySeries speed_to_power(const HalfHourlySeries& speed, const TurbineCurve& curve);

inline constexpr std::size_t kMinAnnualDays = 300;

struct AnnualProfile {
    std::array<double, kSlotsPerDay> pn{};  // season-independent per-unit profile
    WeibullFit weibull;
    TurbineCurve curve;
    double reference_floor = kDefaultReferenceFloor;
    std::size_t day_count = 0;      // days entering the average
    std::size_t excluded_days = 0;  // reference-floor exclusions
};

AnnualProfile build_annual_profile(const HalfHourlySeries& speed, const TurbineCurve& curve,
                                   double reference_floor = kDefaultReferenceFloor,
                                   std::size_t min_days = kMinAnnualDays);

// ---- hold-out validation ----

struct OutlierRecord {
    Season season = Season::winter;
    Date date;
    int slot = 0;
    double value = 0.0;
    double bound = 0.0;  // the envelope edge that was crossed
    bool above = false;
};

struct OutlierReport {
    std::array<std::int64_t, 4> outliers{};
    std::array<std::int64_t, 4> evaluated{};
    std::vector<OutlierRecord> records;
    std::size_t excluded_days = 0;

    double percent(Season s) const {
        const auto i = static_cast<int>(s);
        return evaluated[i] == 0 ? 0.0
                                 : 100.0 * static_cast<double>(outliers[i]) /
                                       static_cast<double>(evaluated[i]);
    }
};

// Normalizes hold-out days exactly like training and counts values strictly
// outside the closed envelope [NORMP - NETMINV, NORMP + NETMAXV].
OutlierReport detect_outliers(const SeasonalWindModel& model, const HalfHourlySeries& holdout);

}  // namespace windgrid
