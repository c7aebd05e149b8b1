#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "windgrid/seasons.hpp"
#include "windgrid/timeseries.hpp"

namespace windgrid {

enum class Sector { residential = 0, commercial = 1, industrial = 2 };
inline constexpr std::array<Sector, 3> all_sectors{Sector::residential, Sector::commercial,
                                                   Sector::industrial};
const char* sector_name(Sector s);
Sector sector_from_name(const std::string& name);  // throws Error::input

struct WindSeriesResult {
    HalfHourlySeries series;
    GapReport gaps;
};

// Reads a `timestamp,value` CSV into whole repaired days. Throws Error::input
// for malformed rows (with line numbers), non-monotone timestamps, or inputs
// that yield zero complete days.
WindSeriesResult parse_wind_series(std::istream& in, SeriesMode mode,
                                   const std::string& source_name, int max_repair_slots = 2);
WindSeriesResult load_wind_series(const std::string& path, SeriesMode mode,
                                  int max_repair_slots = 2);

// Monthly sector energy, keyed by (year, month, sector).
class MonthlyEnergyTable {
  public:
    void insert(int year, int month, Sector sector, double mwh);  // duplicate -> input error
    bool has(int year, int month, Sector sector) const;
    double mwh(int year, int month, Sector sector) const;  // absent -> input error
    std::vector<int> years() const;
    bool empty() const { return rows_.empty(); }

    const std::map<std::tuple<int, int, int>, double>& rows() const { return rows_; }

  private:
    std::map<std::tuple<int, int, int>, double> rows_;
};

// Reads a `year,month,sector,mwh` CSV.
MonthlyEnergyTable parse_demand_table(std::istream& in, const std::string& source_name);
MonthlyEnergyTable load_demand_table(const std::string& path);

// Per-unit daily shapes, 48 slots per (sector, season).
class ShapeTable {
  public:
    void set(Sector sector, Season season, std::vector<double> slots);
    bool has(Sector sector, Season season) const;
    const std::vector<double>& get(Sector sector, Season season) const;  // absent -> input error

  private:
    std::map<std::pair<int, int>, std::vector<double>> shapes_;
};

// Reads a `sector,season,slot,value` CSV; every (sector, season) pair that
// appears must cover all 48 slots exactly once.
ShapeTable parse_shape_table(std::istream& in, const std::string& source_name);
ShapeTable load_shape_table(const std::string& path);

// Seasonal load-growth ratios for the curve-extension step, keyed by sector.
class LoadRatioTable {
  public:
    void set(Sector sector, Season season, double ratio);
    bool has(Sector sector, Season season) const;
    double ratio(Sector sector, Season season) const;  // absent -> input error

  private:
    std::map<std::pair<int, int>, double> ratios_;
};

// Reads a `sector,season,ratio` CSV; ratios must be non-negative.
LoadRatioTable parse_load_ratio_table(std::istream& in, const std::string& source_name);
LoadRatioTable load_load_ratio_table(const std::string& path);

}  // namespace windgrid
