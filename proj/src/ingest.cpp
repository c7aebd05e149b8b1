#include "windgrid/ingest.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <sstream>
#include <tuple>

#include "windgrid/errors.hpp"

namespace windgrid {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

[[noreturn]] void fail(const std::string& src, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << src << ":" << line << ": " << what;
    throw Error::input(os.str());
}

double parse_number(const std::string& field, const std::string& src, std::size_t line,
                    const char* what) {
    if (field.empty()) fail(src, line, std::string("empty ") + what);
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + field.size())
        fail(src, line, std::string("malformed ") + what + ": '" + field + "'");
    return v;
}

long parse_integer(const std::string& field, const std::string& src, std::size_t line,
                   const char* what) {
    if (field.empty()) fail(src, line, std::string("empty ") + what);
    const char* begin = field.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end != begin + field.size())
        fail(src, line, std::string("malformed ") + what + ": '" + field + "'");
    return v;
}

// Reads the next non-blank line; strips a trailing CR. Returns false at EOF.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) return true;
    }
    return false;
}

void expect_header(std::istream& in, const std::string& src, std::size_t& lineno,
                   std::initializer_list<const char*> names) {
    std::string line;
    if (!next_line(in, line, lineno)) fail(src, lineno == 0 ? 1 : lineno, "empty input");
    const std::vector<std::string> fields = split_csv(line);
    bool ok = fields.size() == names.size();
    if (ok) {
        std::size_t i = 0;
        for (const char* name : names)
            if (lower(fields[i++]) != name) ok = false;
    }
    if (!ok) {
        std::ostringstream os;
        os << "unexpected header '" << line << "' (expected";
        const char* sep = " ";
        for (const char* name : names) {
            os << sep << name;
            sep = ",";
        }
        os << ")";
        fail(src, lineno, os.str());
    }
}

std::ifstream open_or_fail(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error::input("cannot open '" + path + "'");
    return f;
}

}  // namespace

const char* sector_name(Sector s) {
    switch (s) {
        case Sector::residential: return "residential";
        case Sector::commercial: return "commercial";
        case Sector::industrial: return "industrial";
    }
    return "?";
}

Sector sector_from_name(const std::string& name) {
    const std::string n = lower(trim(name));
    for (Sector s : all_sectors)
        if (n == sector_name(s)) return s;
    throw Error::input("unknown sector '" + name + "'");
}

WindSeriesResult parse_wind_series(std::istream& in, SeriesMode mode,
                                   const std::string& source_name, int max_repair_slots) {
    std::size_t lineno = 0;
    expect_header(in, source_name, lineno, {"timestamp", "value"});

    std::vector<RawSample> samples;
    std::string line;
    int utc_offset = 0;
    bool first = true;
    while (next_line(in, line, lineno)) {
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != 2) fail(source_name, lineno, "expected 2 fields");
        DateTime dt;
        try {
            dt = parse_datetime(fields[0]);
        } catch (const Error& e) {
            fail(source_name, lineno, e.what());
        }
        if (dt.minute % 30 != 0 || dt.second != 0)
            fail(source_name, lineno, "timestamp is not on the 30-minute grid");
        if (first) {
            utc_offset = dt.utc_offset_minutes;
            first = false;
        }
        RawSample s;
        s.minute = epoch_minutes(dt);
        if (!samples.empty() && s.minute <= samples.back().minute)
            fail(source_name, lineno, "timestamps are not strictly increasing");
        if (fields[1].empty()) {
            s.missing = true;
        } else {
            s.value = parse_number(fields[1], source_name, lineno, "value");
        }
        samples.push_back(s);
    }
    if (samples.empty()) throw Error::input(source_name + ": no data rows");

    WindSeriesResult result;
    result.series = repair_to_days(samples, mode, utc_offset, result.gaps, max_repair_slots);
    if (result.series.day_count() == 0)
        throw Error::input(source_name + ": no complete days after gap repair");
    return result;
}

WindSeriesResult load_wind_series(const std::string& path, SeriesMode mode,
                                  int max_repair_slots) {
    std::ifstream f = open_or_fail(path);
    return parse_wind_series(f, mode, path, max_repair_slots);
}

void MonthlyEnergyTable::insert(int year, int month, Sector sector, double mwh) {
    const auto key = std::make_tuple(year, month, static_cast<int>(sector));
    if (rows_.count(key)) {
        std::ostringstream os;
        os << "duplicate energy row for " << year << "-" << month << " "
           << sector_name(sector);
        throw Error::input(os.str());
    }
    rows_[key] = mwh;
}

bool MonthlyEnergyTable::has(int year, int month, Sector sector) const {
    return rows_.count(std::make_tuple(year, month, static_cast<int>(sector))) > 0;
}

double MonthlyEnergyTable::mwh(int year, int month, Sector sector) const {
    const auto it = rows_.find(std::make_tuple(year, month, static_cast<int>(sector)));
    if (it == rows_.end()) {
        std::ostringstream os;
        os << "no energy row for " << year << "-" << month << " " << sector_name(sector);
        throw Error::input(os.str());
    }
    return it->second;
}

std::vector<int> MonthlyEnergyTable::years() const {
    std::vector<int> ys;
    for (const auto& [key, mwh] : rows_) {
        const int y = std::get<0>(key);
        if (ys.empty() || ys.back() != y) ys.push_back(y);
    }
    return ys;
}

MonthlyEnergyTable parse_demand_table(std::istream& in, const std::string& source_name) {
    std::size_t lineno = 0;
    expect_header(in, source_name, lineno, {"year", "month", "sector", "mwh"});
    MonthlyEnergyTable table;
    std::string line;
    while (next_line(in, line, lineno)) {
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != 4) fail(source_name, lineno, "expected 4 fields");
        const long year = parse_integer(fields[0], source_name, lineno, "year");
        if (year < 1900 || year > 2200) fail(source_name, lineno, "year out of range");
        const long month = parse_integer(fields[1], source_name, lineno, "month");
        if (month < 1 || month > 12) fail(source_name, lineno, "month out of range");
        Sector sector;
        try {
            sector = sector_from_name(fields[2]);
        } catch (const Error& e) {
            fail(source_name, lineno, e.what());
        }
        const double mwh = parse_number(fields[3], source_name, lineno, "mwh");
        if (!std::isfinite(mwh) || mwh < 0.0)
            fail(source_name, lineno, "mwh must be finite and non-negative");
        if (table.has(static_cast<int>(year), static_cast<int>(month), sector))
            fail(source_name, lineno, "duplicate (year, month, sector) row");
        table.insert(static_cast<int>(year), static_cast<int>(month), sector, mwh);
    }
    if (table.empty()) throw Error::input(source_name + ": no data rows");
    return table;
}

MonthlyEnergyTable load_demand_table(const std::string& path) {
    std::ifstream f = open_or_fail(path);
    return parse_demand_table(f, path);
}

void ShapeTable::set(Sector sector, Season season, std::vector<double> slots) {
    if (slots.size() != static_cast<std::size_t>(kSlotsPerDay))
        throw Error::input("shape must have exactly 48 slots");
    shapes_[{static_cast<int>(sector), static_cast<int>(season)}] = std::move(slots);
}

bool ShapeTable::has(Sector sector, Season season) const {
    return shapes_.count({static_cast<int>(sector), static_cast<int>(season)}) > 0;
}

const std::vector<double>& ShapeTable::get(Sector sector, Season season) const {
    const auto it = shapes_.find({static_cast<int>(sector), static_cast<int>(season)});
    if (it == shapes_.end())
        throw Error::input(std::string("no shape for ") + sector_name(sector) + "/" +
                           season_name(season));
    return it->second;
}

ShapeTable parse_shape_table(std::istream& in, const std::string& source_name) {
    std::size_t lineno = 0;
    expect_header(in, source_name, lineno, {"sector", "season", "slot", "value"});
    std::map<std::pair<int, int>, std::vector<double>> partial;
    std::map<std::pair<int, int>, std::vector<std::uint8_t>> seen;
    std::string line;
    while (next_line(in, line, lineno)) {
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != 4) fail(source_name, lineno, "expected 4 fields");
        Sector sector;
        Season season;
        try {
            sector = sector_from_name(fields[0]);
            season = season_from_name(fields[1]);
        } catch (const Error& e) {
            fail(source_name, lineno, e.what());
        }
        const long slot = parse_integer(fields[2], source_name, lineno, "slot");
        if (slot < 0 || slot >= kSlotsPerDay) fail(source_name, lineno, "slot out of range");
        const double value = parse_number(fields[3], source_name, lineno, "value");
        if (!std::isfinite(value) || value < 0.0)
            fail(source_name, lineno, "value must be finite and non-negative");
        const std::pair<int, int> key{static_cast<int>(sector), static_cast<int>(season)};
        auto& vec = partial[key];
        auto& mask = seen[key];
        if (vec.empty()) {
            vec.assign(kSlotsPerDay, 0.0);
            mask.assign(kSlotsPerDay, 0);
        }
        if (mask[static_cast<std::size_t>(slot)])
            fail(source_name, lineno, "duplicate (sector, season, slot) row");
        vec[static_cast<std::size_t>(slot)] = value;
        mask[static_cast<std::size_t>(slot)] = 1;
    }
    ShapeTable table;
    for (auto& [key, vec] : partial) {
        const auto& mask = seen[key];
        for (int s = 0; s < kSlotsPerDay; ++s)
            if (!mask[static_cast<std::size_t>(s)]) {
                std::ostringstream os;
                os << source_name << ": shape " << sector_name(static_cast<Sector>(key.first))
                   << "/" << season_name(static_cast<Season>(key.second)) << " is missing slot "
                   << s;
                throw Error::input(os.str());
            }
        table.set(static_cast<Sector>(key.first), static_cast<Season>(key.second),
                  std::move(vec));
    }
    return table;
}

ShapeTable load_shape_table(const std::string& path) {
    std::ifstream f = open_or_fail(path);
    return parse_shape_table(f, path);
}

void LoadRatioTable::set(Sector sector, Season season, double ratio) {
    ratios_[{static_cast<int>(sector), static_cast<int>(season)}] = ratio;
}

bool LoadRatioTable::has(Sector sector, Season season) const {
    return ratios_.count({static_cast<int>(sector), static_cast<int>(season)}) > 0;
}

double LoadRatioTable::ratio(Sector sector, Season season) const {
    const auto it = ratios_.find({static_cast<int>(sector), static_cast<int>(season)});
    if (it == ratios_.end())
        throw Error::input(std::string("no load ratio for ") + sector_name(sector) + "/" +
                           season_name(season));
    return it->second;
}

LoadRatioTable parse_load_ratio_table(std::istream& in, const std::string& source_name) {
    std::size_t lineno = 0;
    expect_header(in, source_name, lineno, {"sector", "season", "ratio"});
    LoadRatioTable table;
    std::string line;
    while (next_line(in, line, lineno)) {
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != 3) fail(source_name, lineno, "expected 3 fields");
        Sector sector;
        Season season;
        try {
            sector = sector_from_name(fields[0]);
            season = season_from_name(fields[1]);
        } catch (const Error& e) {
            fail(source_name, lineno, e.what());
        }
        const double ratio = parse_number(fields[2], source_name, lineno, "ratio");
        if (!std::isfinite(ratio) || ratio < 0.0)
            fail(source_name, lineno, "ratio must be finite and non-negative");
        if (table.has(sector, season))
            fail(source_name, lineno, "duplicate (sector, season) row");
        table.set(sector, season, ratio);
    }
    return table;
}

LoadRatioTable load_load_ratio_table(const std::string& path) {
    std::ifstream f = open_or_fail(path);
    return parse_load_ratio_table(f, path);
}

}  // namespace windgrid
