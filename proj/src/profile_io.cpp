#include "windgrid/profile_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "windgrid/datetime.hpp"
#include "windgrid/errors.hpp"
#include "windgrid/manifest.hpp"

namespace windgrid {

namespace {

using json = nlohmann::json;

// Fixed CSV number format: enough digits to plot and compare, short enough to
// read. JSON documents keep full precision through nlohmann's round-trip
// double serialization.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json to_json_array(const std::array<double, kSlotsPerDay>& a) {
    json arr = json::array();
    for (double v : a) arr.push_back(v);
    return arr;
}

json to_json_array(const std::array<int, kSlotsPerDay>& a) {
    json arr = json::array();
    for (int v : a) arr.push_back(v);
    return arr;
}

json parse_doc(const std::string& text, const std::string& source, const char* schema) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error::input(source + ": malformed JSON");
    if (doc.value("schema", "") != schema)
        throw Error::input(source + ": schema mismatch (expected " + schema + ")");
    return doc;
}

std::array<double, kSlotsPerDay> array48(const json& doc, const char* key,
                                         const std::string& source) {
    if (!doc.contains(key) || !doc[key].is_array() ||
        doc[key].size() != static_cast<std::size_t>(kSlotsPerDay))
        throw Error::input(source + ": field '" + key + "' must be an array of 48 numbers");
    std::array<double, kSlotsPerDay> out{};
    for (int h = 0; h < kSlotsPerDay; ++h) out[h] = doc[key][static_cast<std::size_t>(h)];
    return out;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    for (;;) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string::npos) {
            out.push_back(line.substr(begin));
            return out;
        }
        out.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
}

// Reads a CSV written by this module: a fixed header then data rows.
std::vector<std::vector<std::string>> read_csv(const std::string& path, const char* header,
                                               std::size_t columns) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error::input(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header)
        throw Error::input(path + ": unexpected header '" + line + "' (expected '" + header +
                           "')");
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_row(line);
        if (fields.size() != columns)
            throw Error::input(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(columns) + " fields, got " +
                               std::to_string(fields.size()));
        rows.push_back(std::move(fields));
    }
    return rows;
}

double to_double(const std::string& field, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw Error::input(context + ": malformed number '" + field + "'");
    }
}

long long to_int(const std::string& field, const std::string& context) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw Error::input(context + ": malformed integer '" + field + "'");
    }
}

}  // namespace

// ---- seasonal wind model ----

std::string wind_profile_filename(Season s) {
    return std::string("wind_profile_") + season_name(s) + ".json";
}

std::string wind_profile_to_json(const SeasonalWindModel& model, Season s) {
    const NormativeDayProfile& p = model.season(s);
    json doc;
    doc["schema"] = "wind-profile/1";
    doc["season"] = season_name(s);
    doc["reference_floor"] = model.reference_floor;
    doc["first_year"] = model.first_year;
    doc["last_year"] = model.last_year;
    doc["training_days"] = model.training_days;
    doc["excluded_days"] = model.excluded_days;
    doc["day_count"] = p.day_count;
    doc["retained_days"] = p.retained_days;
    doc["representative"] = to_json_array(p.representative);
    doc["mean"] = to_json_array(p.mean);
    doc["net_min"] = to_json_array(p.net_min);
    doc["net_max"] = to_json_array(p.net_max);
    doc["min_dev"] = to_json_array(p.min_dev);
    doc["max_dev"] = to_json_array(p.max_dev);
    doc["chosen_day"] = to_json_array(p.chosen_day);
    doc["actual_slot_mean"] = to_json_array(p.actual_slot_mean);
    doc["actual_mean"] = p.actual_mean;
    doc["actual_max"] = p.actual_max;
    doc["actual_min"] = p.actual_min;
    return doc.dump(2) + "\n";
}

void wind_profile_from_json(const std::string& text, const std::string& source,
                            SeasonalWindModel& model) {
    const json doc = parse_doc(text, source, "wind-profile/1");
    const Season s = season_from_name(doc.value("season", ""));
    NormativeDayProfile& p = model.seasons[static_cast<int>(s)];
    p.season = s;
    p.day_count = doc.value("day_count", 0);
    p.retained_days = doc.value("retained_days", 0);
    p.representative = array48(doc, "representative", source);
    p.mean = array48(doc, "mean", source);
    p.net_min = array48(doc, "net_min", source);
    p.net_max = array48(doc, "net_max", source);
    p.min_dev = array48(doc, "min_dev", source);
    p.max_dev = array48(doc, "max_dev", source);
    p.actual_slot_mean = array48(doc, "actual_slot_mean", source);
    if (doc.contains("chosen_day")) {
        const json& arr = doc["chosen_day"];
        if (!arr.is_array() || arr.size() != static_cast<std::size_t>(kSlotsPerDay))
            throw Error::input(source + ": field 'chosen_day' must be an array of 48 integers");
        for (int h = 0; h < kSlotsPerDay; ++h)
            p.chosen_day[h] = arr[static_cast<std::size_t>(h)];
    }
    p.actual_mean = doc.value("actual_mean", 0.0);
    p.actual_max = doc.value("actual_max", 0.0);
    p.actual_min = doc.value("actual_min", 0.0);

    model.reference_floor = doc.value("reference_floor", kDefaultReferenceFloor);
    model.first_year = doc.value("first_year", 0);
    model.last_year = doc.value("last_year", 0);
    model.training_days = doc.value("training_days", std::size_t{0});
    model.excluded_days = doc.value("excluded_days", std::size_t{0});
}

std::vector<std::string> save_wind_model(const SeasonalWindModel& model, const std::string& dir) {
    std::vector<std::string> paths;
    for (Season s : all_seasons) {
        const std::string path = dir + "/" + wind_profile_filename(s);
        write_text_atomic(path, wind_profile_to_json(model, s));
        paths.push_back(path);
    }
    return paths;
}

SeasonalWindModel load_wind_model(const std::string& dir) {
    SeasonalWindModel model;
    bool first = true;
    double floor = 0.0;
    int fy = 0, ly = 0;
    for (Season s : all_seasons) {
        const std::string path = dir + "/" + wind_profile_filename(s);
        wind_profile_from_json(read_text_file(path), path, model);
        if (first) {
            floor = model.reference_floor;
            fy = model.first_year;
            ly = model.last_year;
            first = false;
        } else if (floor != model.reference_floor || fy != model.first_year ||
                   ly != model.last_year) {
            throw Error::input(path + ": metadata disagrees with the other season documents");
        }
    }
    return model;
}

// ---- season-independent wind profile ----

std::string annual_profile_to_json(const AnnualProfile& profile) {
    json doc;
    doc["schema"] = "annual-wind-profile/1";
    doc["pn"] = to_json_array(profile.pn);
    doc["weibull"] = {{"shape", profile.weibull.shape},
                      {"scale", profile.weibull.scale},
                      {"sample_count", profile.weibull.sample_count},
                      {"zero_count", profile.weibull.zero_count}};
    doc["turbine"] = {{"cut_in", profile.curve.v_ci},
                      {"rated_speed", profile.curve.v_r},
                      {"cut_out", profile.curve.v_co},
                      {"rated_mw", profile.curve.rated}};
    doc["reference_floor"] = profile.reference_floor;
    doc["day_count"] = profile.day_count;
    doc["excluded_days"] = profile.excluded_days;
    return doc.dump(2) + "\n";
}

AnnualProfile annual_profile_from_json(const std::string& text, const std::string& source) {
    const json doc = parse_doc(text, source, "annual-wind-profile/1");
    AnnualProfile profile;
    profile.pn = array48(doc, "pn", source);
    if (doc.contains("weibull")) {
        const json& w = doc["weibull"];
        profile.weibull.shape = w.value("shape", 0.0);
        profile.weibull.scale = w.value("scale", 0.0);
        profile.weibull.sample_count = w.value("sample_count", std::size_t{0});
        profile.weibull.zero_count = w.value("zero_count", std::size_t{0});
    }
    if (doc.contains("turbine")) {
        const json& t = doc["turbine"];
        profile.curve.v_ci = t.value("cut_in", profile.curve.v_ci);
        profile.curve.v_r = t.value("rated_speed", profile.curve.v_r);
        profile.curve.v_co = t.value("cut_out", profile.curve.v_co);
        profile.curve.rated = t.value("rated_mw", profile.curve.rated);
    }
    profile.reference_floor = doc.value("reference_floor", kDefaultReferenceFloor);
    profile.day_count = doc.value("day_count", std::size_t{0});
    profile.excluded_days = doc.value("excluded_days", std::size_t{0});
    return profile;
}

void save_annual_profile(const AnnualProfile& profile, const std::string& path) {
    write_text_atomic(path, annual_profile_to_json(profile));
}

AnnualProfile load_annual_profile(const std::string& path) {
    return annual_profile_from_json(read_text_file(path), path);
}

// ---- system load model ----

std::string load_profile_filename(Season s) {
    return std::string("load_profile_") + season_name(s) + ".json";
}

std::string load_profile_to_json(const SystemLoadModel& model, Season s) {
    const SeasonalLoadProfile& p = model.season(s);
    json doc;
    doc["schema"] = "load-profile/1";
    doc["season"] = season_name(s);
    doc["residential_mw"] = to_json_array(p.residential_mw);
    doc["commercial_mw"] = to_json_array(p.commercial_mw);
    doc["industrial_mw"] = to_json_array(p.industrial_mw);
    doc["total_mw"] = to_json_array(p.total_mw);
    doc["percent_of_peak"] = to_json_array(p.percent_of_peak);
    doc["peak_mw"] = p.peak_mw;
    doc["peak_slot"] = p.peak_slot;
    doc["daily_energy_mwh"] = p.daily_energy_mwh;
    json sector;
    for (Sector sec : all_sectors)
        sector[sector_name(sec)] =
            model.daily_energy_mwh[static_cast<int>(sec)][static_cast<int>(s)];
    doc["sector_daily_energy_mwh"] = sector;
    return doc.dump(2) + "\n";
}

void load_profile_from_json(const std::string& text, const std::string& source,
                            SystemLoadModel& model) {
    const json doc = parse_doc(text, source, "load-profile/1");
    const Season s = season_from_name(doc.value("season", ""));
    SeasonalLoadProfile& p = model.seasons[static_cast<int>(s)];
    p.season = s;
    p.residential_mw = array48(doc, "residential_mw", source);
    p.commercial_mw = array48(doc, "commercial_mw", source);
    p.industrial_mw = array48(doc, "industrial_mw", source);
    p.total_mw = array48(doc, "total_mw", source);
    p.percent_of_peak = array48(doc, "percent_of_peak", source);
    p.peak_mw = doc.value("peak_mw", 0.0);
    p.peak_slot = doc.value("peak_slot", 0);
    p.daily_energy_mwh = doc.value("daily_energy_mwh", 0.0);
    if (doc.contains("sector_daily_energy_mwh")) {
        const json& sector = doc["sector_daily_energy_mwh"];
        for (Sector sec : all_sectors)
            if (sector.contains(sector_name(sec)))
                model.daily_energy_mwh[static_cast<int>(sec)][static_cast<int>(s)] =
                    sector[sector_name(sec)];
    }
}

std::vector<std::string> save_load_model(const SystemLoadModel& model, const std::string& dir) {
    std::vector<std::string> paths;
    for (Season s : all_seasons) {
        const std::string path = dir + "/" + load_profile_filename(s);
        write_text_atomic(path, load_profile_to_json(model, s));
        paths.push_back(path);
    }
    return paths;
}

SystemLoadModel load_load_model(const std::string& dir) {
    SystemLoadModel model;
    for (Season s : all_seasons) {
        const std::string path = dir + "/" + load_profile_filename(s);
        load_profile_from_json(read_text_file(path), path, model);
    }
    model.annual = annual_from_seasons(model.seasons);
    return model;
}

// ---- plot CSVs ----

void write_envelope_csv(const NormativeDayProfile& profile, const std::string& path) {
    std::string text = "slot,representative,lower,upper\n";
    for (int h = 0; h < kSlotsPerDay; ++h) {
        text += std::to_string(h);
        text += ',';
        text += fmt(profile.representative[h]);
        text += ',';
        text += fmt(profile.lower_bound(h));
        text += ',';
        text += fmt(profile.upper_bound(h));
        text += '\n';
    }
    write_text_atomic(path, text);
}

void write_actual_mean_csv(const SeasonalWindModel& model, const std::string& path) {
    std::string text = "slot,winter_mw,spring_mw,summer_mw,fall_mw\n";
    for (int h = 0; h < kSlotsPerDay; ++h) {
        text += std::to_string(h);
        for (Season s : all_seasons) {
            text += ',';
            text += fmt(model.season(s).actual_slot_mean[h]);
        }
        text += '\n';
    }
    write_text_atomic(path, text);
}

void write_load_percent_csv(const SystemLoadModel& model, const std::string& path) {
    std::string text = "slot,winter_pct,spring_pct,summer_pct,fall_pct\n";
    for (int h = 0; h < kSlotsPerDay; ++h) {
        text += std::to_string(h);
        for (Season s : all_seasons) {
            text += ',';
            text += fmt(model.season(s).percent_of_peak[h]);
        }
        text += '\n';
    }
    write_text_atomic(path, text);
}

void write_load_mw_csv(const SystemLoadModel& model, const std::string& path) {
    std::string text = "slot,winter_mw,spring_mw,summer_mw,fall_mw\n";
    for (int h = 0; h < kSlotsPerDay; ++h) {
        text += std::to_string(h);
        for (Season s : all_seasons) {
            text += ',';
            text += fmt(model.season(s).total_mw[h]);
        }
        text += '\n';
    }
    write_text_atomic(path, text);
}

void write_violation_share_csv(const ViolationReport& report, const std::string& path) {
    // Pool the envelope-edge (min/max mode) absolute-band counts; a report
    // without envelope modes falls back to every group.
    const std::size_t n = report.bus_ids.size();
    std::vector<std::int64_t> count(n, 0);
    bool any_extreme = false;
    for (const ScanGroup& g : report.groups)
        if (g.mode != WindMode::mean) any_extreme = true;
    for (const ScanGroup& g : report.groups) {
        if (any_extreme && g.mode == WindMode::mean) continue;
        for (std::size_t i = 0; i < n; ++i) count[i] += g.absolute_count[i];
    }
    std::int64_t total = 0;
    for (std::int64_t c : count) total += c;

    std::string text = "bus,violation_share_pct\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double share =
            total == 0 ? 0.0
                       : 100.0 * static_cast<double>(count[i]) / static_cast<double>(total);
        text += std::to_string(report.bus_ids[i]);
        text += ',';
        text += fmt(share);
        text += '\n';
    }
    write_text_atomic(path, text);
}

// ---- hold-out validation artifacts ----

void write_outlier_records_csv(const OutlierReport& report, const std::string& path) {
    std::string text = "season,date,slot,value,bound,kind\n";
    for (const OutlierRecord& r : report.records) {
        text += season_name(r.season);
        text += ',';
        text += format_date(r.date);
        text += ',';
        text += std::to_string(r.slot);
        text += ',';
        text += fmt(r.value);
        text += ',';
        text += fmt(r.bound);
        text += ',';
        text += r.above ? "above" : "below";
        text += '\n';
    }
    write_text_atomic(path, text);
}

void write_outlier_summary_csv(const OutlierReport& report, const std::string& path) {
    std::string text = "season,outlier_percent\n";
    for (Season s : all_seasons) {
        text += season_name(s);
        text += ',';
        text += fmt(report.percent(s));
        text += '\n';
    }
    write_text_atomic(path, text);
}

std::string outlier_summary_to_json(const OutlierReport& report) {
    json doc;
    doc["schema"] = "outlier-report/1";
    json seasons = json::array();
    for (Season s : all_seasons) {
        const int i = static_cast<int>(s);
        seasons.push_back({{"season", season_name(s)},
                           {"evaluated", report.evaluated[i]},
                           {"outliers", report.outliers[i]},
                           {"percent", report.percent(s)}});
    }
    doc["seasons"] = seasons;
    doc["excluded_days"] = report.excluded_days;
    return doc.dump(2) + "\n";
}

// ---- scan artifacts ----

void write_violation_csv(const ViolationReport& report, const std::string& path) {
    std::string text = "bus,season,criterion,mode,count,total,fraction\n";
    char buf[160];
    for (const ScanGroup& g : report.groups) {
        for (int criterion = 0; criterion < 2; ++criterion) {
            const std::vector<std::int64_t>& counts =
                criterion == 0 ? g.relative_count : g.absolute_count;
            for (std::size_t i = 0; i < report.bus_ids.size(); ++i) {
                const double fraction =
                    g.solved == 0 ? 0.0
                                  : static_cast<double>(counts[i]) /
                                        static_cast<double>(g.solved);
                std::snprintf(buf, sizeof buf, "%d,%s,%s,%s,%" PRId64 ",%" PRId64 ",%s\n",
                              report.bus_ids[i], g.season.c_str(),
                              criterion == 0 ? "relative" : "absolute",
                              wind_mode_name(g.mode), counts[i], g.solved,
                              fmt(fraction).c_str());
                text += buf;
            }
        }
    }
    write_text_atomic(path, text);
}

ViolationReport read_violation_csv(const std::string& path) {
    const auto rows = read_csv(path, "bus,season,criterion,mode,count,total,fraction", 7);
    ViolationReport report;
    std::map<int, std::size_t> bus_index;
    std::map<std::string, std::size_t> group_index;

    for (const auto& row : rows) {
        const int bus = static_cast<int>(to_int(row[0], path));
        if (!bus_index.contains(bus)) {
            bus_index[bus] = report.bus_ids.size();
            report.bus_ids.push_back(bus);
        }
        const std::string key = row[1] + "|" + row[3];
        if (!group_index.contains(key)) {
            group_index[key] = report.groups.size();
            ScanGroup g;
            g.season = row[1];
            g.mode = wind_mode_from_name(row[3]);
            report.groups.push_back(std::move(g));
        }
        ScanGroup& g = report.groups[group_index[key]];
        const std::size_t i = bus_index[bus];
        auto& counts = row[2] == "relative"   ? g.relative_count
                       : row[2] == "absolute" ? g.absolute_count
                                              : throw Error::input(path + ": unknown criterion '" +
                                                                   row[2] + "'");
        if (counts.size() <= i) counts.resize(i + 1, 0);
        counts[i] = to_int(row[4], path);
        g.solved = to_int(row[5], path);
    }
    for (ScanGroup& g : report.groups) {
        g.relative_count.resize(report.bus_ids.size(), 0);
        g.absolute_count.resize(report.bus_ids.size(), 0);
        g.cases = g.solved;
        report.total_solved += g.solved;
    }
    report.approach = report.groups.size() == 1 && report.groups[0].season == "annual"
                          ? ScanApproach::season_independent
                          : ScanApproach::season_focused;
    return report;
}

void write_ranking_csv(const VulnerabilityRanking& ranking, const std::string& path) {
    std::string text = "rank,bus,wv,alpha1,pv1,alpha2,pv2,group\n";
    char buf[160];
    for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
        const RankedBus& e = ranking.entries[i];
        std::snprintf(buf, sizeof buf, "%zu,%d,%s,%d,%s,%d,%s,%s\n", i + 1, e.bus,
                      fmt(e.wv).c_str(), e.alpha1, fmt(e.pv1).c_str(), e.alpha2,
                      fmt(e.pv2).c_str(), e.group.c_str());
        text += buf;
    }
    write_text_atomic(path, text);
}

VulnerabilityRanking read_ranking_csv(const std::string& path) {
    const auto rows = read_csv(path, "rank,bus,wv,alpha1,pv1,alpha2,pv2,group", 8);
    VulnerabilityRanking ranking;
    for (const auto& row : rows) {
        RankedBus e;
        e.bus = static_cast<int>(to_int(row[1], path));
        e.wv = to_double(row[2], path);
        e.alpha1 = static_cast<int>(to_int(row[3], path));
        e.pv1 = to_double(row[4], path);
        e.alpha2 = static_cast<int>(to_int(row[5], path));
        e.pv2 = to_double(row[6], path);
        e.group = row[7];
        ranking.entries.push_back(std::move(e));
    }
    return ranking;
}

void write_comparison_csv(const ViolationReport& focused, const ViolationReport& independent,
                          const std::string& path) {
    if (focused.bus_ids != independent.bus_ids)
        throw Error::input("comparison requires reports over the same case");
    const std::size_t n = focused.bus_ids.size();
    const auto pooled = [n](const ViolationReport& r) {
        std::vector<std::int64_t> total(n, 0);
        for (const ScanGroup& g : r.groups)
            for (std::size_t i = 0; i < n; ++i)
                total[i] += g.relative_count[i] + g.absolute_count[i];
        return total;
    };
    const std::vector<std::int64_t> f = pooled(focused);
    const std::vector<std::int64_t> a = pooled(independent);

    std::string text = "bus,season_focused_count,season_independent_count\n";
    char buf[96];
    for (std::size_t i = 0; i < n; ++i) {
        if (f[i] > 0 && a[i] == 0) {
            std::snprintf(buf, sizeof buf, "%d,%" PRId64 ",%" PRId64 "\n", focused.bus_ids[i],
                          f[i], a[i]);
            text += buf;
        }
    }
    write_text_atomic(path, text);
}

}  // namespace windgrid
