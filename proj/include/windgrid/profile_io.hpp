#pragma once

#include <string>
#include <vector>

#include "windgrid/load_profiles.hpp"
#include "windgrid/scan.hpp"
#include "windgrid/wind_profiles.hpp"

// Persistence for every pipeline artifact. JSON documents are schema-tagged
// and round-trip doubles exactly; CSVs are plot/report data with a fixed
// number format, so identical inputs produce byte-identical files. All file
// writes go through write_text_atomic.

namespace windgrid {

// ---- seasonal wind model: one JSON document per season ----

std::string wind_profile_filename(Season s);  // e.g. "wind_profile_winter.json"
std::string wind_profile_to_json(const SeasonalWindModel& model, Season s);
// Fills one season of `model` plus the shared metadata fields; the metadata
// must agree across the four documents.
void wind_profile_from_json(const std::string& text, const std::string& source,
                            SeasonalWindModel& model);
// Returns the four paths written, winter first.
std::vector<std::string> save_wind_model(const SeasonalWindModel& model, const std::string& dir);
SeasonalWindModel load_wind_model(const std::string& dir);

// ---- season-independent wind profile ----

std::string annual_profile_to_json(const AnnualProfile& profile);
AnnualProfile annual_profile_from_json(const std::string& text, const std::string& source);
void save_annual_profile(const AnnualProfile& profile, const std::string& path);
AnnualProfile load_annual_profile(const std::string& path);

// ---- system load model: one JSON document per season ----

std::string load_profile_filename(Season s);
std::string load_profile_to_json(const SystemLoadModel& model, Season s);
void load_profile_from_json(const std::string& text, const std::string& source,
                            SystemLoadModel& model);
std::vector<std::string> save_load_model(const SystemLoadModel& model, const std::string& dir);
SystemLoadModel load_load_model(const std::string& dir);

// ---- plot CSVs ----

// slot,representative,lower,upper — the three-line envelope of one season.
void write_envelope_csv(const NormativeDayProfile& profile, const std::string& path);
// slot + one actual-MW slot-mean column per season.
void write_actual_mean_csv(const SeasonalWindModel& model, const std::string& path);
// slot + one percent-of-peak column per season.
void write_load_percent_csv(const SystemLoadModel& model, const std::string& path);
// slot + one composed-MW column per season.
void write_load_mw_csv(const SystemLoadModel& model, const std::string& path);
// bus + its share (percent) of all pooled envelope-edge absolute violations.
void write_violation_share_csv(const ViolationReport& report, const std::string& path);

// ---- hold-out validation artifacts ----

// season,date,slot,value,bound,kind — one row per outlying slot.
void write_outlier_records_csv(const OutlierReport& report, const std::string& path);
// season,outlier_percent — exactly four rows.
void write_outlier_summary_csv(const OutlierReport& report, const std::string& path);
std::string outlier_summary_to_json(const OutlierReport& report);

// ---- scan artifacts ----

// bus,season,criterion,mode,count,total,fraction — every bus of every group
// under both criteria; total is the group's converged case count.
void write_violation_csv(const ViolationReport& report, const std::string& path);
// Rebuilds the tallies from the CSV (metadata that the CSV does not carry,
// such as the selections, is left defaulted).
ViolationReport read_violation_csv(const std::string& path);

// rank,bus,wv,alpha1,pv1,alpha2,pv2,group — most vulnerable first.
void write_ranking_csv(const VulnerabilityRanking& ranking, const std::string& path);
VulnerabilityRanking read_ranking_csv(const std::string& path);

// bus,season_focused_count,season_independent_count — buses the
// season-focused scan flags that the season-independent scan misses.
void write_comparison_csv(const ViolationReport& focused, const ViolationReport& independent,
                          const std::string& path);

}  // namespace windgrid
