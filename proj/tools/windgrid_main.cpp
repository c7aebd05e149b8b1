// windgrid: seasonal wind/load profile construction and Monte-Carlo voltage
// violation scanning on a transmission test case.
//
// Subcommands form a pipeline over a shared output directory:
//   gen-data       write seeded synthetic wind measurement CSVs
//   build-wind     normative-day wind profiles (+ annual profile from speeds)
//   validate-wind  hold-out envelope validation of the wind profiles
//   build-load     seasonal system load profiles
//   scan           dispatch schedules + voltage-violation Monte Carlo
//   report         human-readable summary from the scan manifest
//
// Exit codes: 0 success, 2 input error, 3 numerical failure, 4 integrity error.

#include <algorithm>
#include <array>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "windgrid/case_io.hpp"
#include "windgrid/dispatch.hpp"
#include "windgrid/errors.hpp"
#include "windgrid/ingest.hpp"
#include "windgrid/load_profiles.hpp"
#include "windgrid/manifest.hpp"
#include "windgrid/network.hpp"
#include "windgrid/profile_io.hpp"
#include "windgrid/scan.hpp"
#include "windgrid/synth.hpp"
#include "windgrid/wind_profiles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace windgrid;

// ---------------------------------------------------------------------------
// configuration

struct SynthPlan {
    int train_first = 2007;
    int train_years = 5;
    int test_first = 2012;
    int test_years = 4;
};

struct AppConfig {
    std::string case_path = "data/case118.m";
    std::string demand_path = "data/demand_default.csv";
    std::string shapes_path = "data/shapes_default.csv";
    std::string ratios_path = "data/load_ratios_default.csv";
    // Wind measurement CSVs; empty means the gen-data defaults under --out.
    std::string wind_train_path;
    std::string wind_test_path;
    std::string wind_speed_path;
    double reference_floor = kDefaultReferenceFloor;
    TurbineCurve turbine;
    ScanConfig scan;
    SynthPlan synth;
};

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }))
            throw Error::input("config: unknown key '" + key + "' in " + where);
    }
}

std::string resolve_path(const fs::path& base, const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (base / p).lexically_normal().string();
}

AppConfig load_config(const std::string& path) {
    AppConfig cfg;
    if (path.empty()) return cfg;
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error::input(path + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) throw Error::input(path + ": config must be a JSON object");
    expect_keys(doc, "the top level",
                {"schema", "data", "wind", "scan", "synth"});
    if (doc.value("schema", "pipeline-config/1") != "pipeline-config/1")
        throw Error::input(path + ": unsupported config schema");

    const fs::path base = fs::path(path).parent_path();
    if (doc.contains("data")) {
        const json& d = doc["data"];
        expect_keys(d, "data", {"case", "demand", "shapes", "load_ratios", "wind_train",
                                "wind_test", "wind_speed"});
        const auto pick = [&](const char* key, std::string& out) {
            if (d.contains(key)) out = resolve_path(base, d[key].get<std::string>());
        };
        pick("case", cfg.case_path);
        pick("demand", cfg.demand_path);
        pick("shapes", cfg.shapes_path);
        pick("load_ratios", cfg.ratios_path);
        pick("wind_train", cfg.wind_train_path);
        pick("wind_test", cfg.wind_test_path);
        pick("wind_speed", cfg.wind_speed_path);
    }
    if (doc.contains("wind")) {
        const json& w = doc["wind"];
        expect_keys(w, "wind", {"reference_floor", "turbine"});
        cfg.reference_floor = w.value("reference_floor", cfg.reference_floor);
        if (w.contains("turbine")) {
            const json& t = w["turbine"];
            expect_keys(t, "wind.turbine", {"cut_in", "rated_speed", "cut_out", "rated_mw"});
            cfg.turbine.v_ci = t.value("cut_in", cfg.turbine.v_ci);
            cfg.turbine.v_r = t.value("rated_speed", cfg.turbine.v_r);
            cfg.turbine.v_co = t.value("cut_out", cfg.turbine.v_co);
            cfg.turbine.rated = t.value("rated_mw", cfg.turbine.rated);
        }
    }
    if (doc.contains("scan")) {
        const json& s = doc["scan"];
        expect_keys(s, "scan", {"selections", "penetration", "penetration_tol", "modes",
                                "band", "relative_tol", "threads", "pf"});
        cfg.scan.selections = s.value("selections", cfg.scan.selections);
        cfg.scan.penetration = s.value("penetration", cfg.scan.penetration);
        cfg.scan.penetration_tol = s.value("penetration_tol", cfg.scan.penetration_tol);
        cfg.scan.relative_tol = s.value("relative_tol", cfg.scan.relative_tol);
        cfg.scan.threads = s.value("threads", cfg.scan.threads);
        if (s.contains("band")) {
            if (!s["band"].is_array() || s["band"].size() != 2)
                throw Error::input(path + ": scan.band must be [low, high]");
            cfg.scan.band_low = s["band"][0].get<double>();
            cfg.scan.band_high = s["band"][1].get<double>();
        }
        if (s.contains("modes")) {
            cfg.scan.modes.clear();
            for (const json& m : s["modes"])
                cfg.scan.modes.push_back(wind_mode_from_name(m.get<std::string>()));
        }
        if (s.contains("pf")) {
            const json& p = s["pf"];
            expect_keys(p, "scan.pf",
                        {"tol", "max_iter", "enforce_q_limits", "max_qlimit_rounds"});
            cfg.scan.pf.tol = p.value("tol", cfg.scan.pf.tol);
            cfg.scan.pf.max_iter = p.value("max_iter", cfg.scan.pf.max_iter);
            cfg.scan.pf.enforce_q_limits =
                p.value("enforce_q_limits", cfg.scan.pf.enforce_q_limits);
            cfg.scan.pf.max_qlimit_rounds =
                p.value("max_qlimit_rounds", cfg.scan.pf.max_qlimit_rounds);
        }
    }
    if (doc.contains("synth")) {
        const json& s = doc["synth"];
        expect_keys(s, "synth", {"train_first", "train_years", "test_first", "test_years"});
        cfg.synth.train_first = s.value("train_first", cfg.synth.train_first);
        cfg.synth.train_years = s.value("train_years", cfg.synth.train_years);
        cfg.synth.test_first = s.value("test_first", cfg.synth.test_first);
        cfg.synth.test_years = s.value("test_years", cfg.synth.test_years);
    }
    return cfg;
}

// Effective paths for the wind measurement CSVs: explicit config/flag values
// win; otherwise the gen-data locations under the output directory.
struct WindPaths {
    std::string train;
    std::string test;
    std::string speed;
};

WindPaths wind_paths(const AppConfig& cfg, const std::string& out) {
    WindPaths p;
    const fs::path data = fs::path(out) / "data";
    p.train = cfg.wind_train_path.empty() ? (data / "wind_train.csv").string()
                                          : cfg.wind_train_path;
    p.test = cfg.wind_test_path.empty() ? (data / "wind_test.csv").string()
                                        : cfg.wind_test_path;
    p.speed = cfg.wind_speed_path.empty() ? (data / "wind_speed.csv").string()
                                          : cfg.wind_speed_path;
    return p;
}

std::string profiles_dir(const std::string& out) { return (fs::path(out) / "profiles").string(); }
std::string plots_dir(const std::string& out) { return (fs::path(out) / "plots").string(); }
std::string reports_dir(const std::string& out) { return (fs::path(out) / "reports").string(); }
std::string validation_dir(const std::string& out) {
    return (fs::path(out) / "validation").string();
}
std::string annual_profile_path(const std::string& out) {
    return (fs::path(profiles_dir(out)) / "annual_wind_profile.json").string();
}
std::string manifest_path(const std::string& out) {
    return (fs::path(out) / "manifest.json").string();
}

void note(const std::string& line) { std::cout << line << "\n"; }

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// gen-data

int cmd_gen_data(const AppConfig& cfg, const std::string& out, std::uint64_t seed) {
    const SynthPlan& plan = cfg.synth;
    if (plan.train_years < 1 || plan.test_years < 1)
        throw Error::input("synthetic data needs at least one train and one test year");
    const fs::path dir = fs::path(out) / "data";

    const SynthWindParams power_params;
    const auto train =
        synth_wind_power(seed, plan.train_first, plan.train_years, power_params);
    const auto test = synth_wind_power(seed, plan.test_first, plan.test_years, power_params);
    const SynthSpeedParams speed_params;
    const auto speed = synth_wind_speed(seed, plan.train_first, plan.train_years, speed_params);

    const std::string train_path = (dir / "wind_train.csv").string();
    const std::string test_path = (dir / "wind_test.csv").string();
    const std::string speed_path = (dir / "wind_speed.csv").string();
    write_series_csv(train, train_path);
    write_series_csv(test, test_path);
    write_series_csv(speed, speed_path);

    char buf[160];
    std::snprintf(buf, sizeof(buf), "wrote %s (%d-%d, %zu days)", train_path.c_str(),
                  plan.train_first, plan.train_first + plan.train_years - 1,
                  train.day_count());
    note(buf);
    std::snprintf(buf, sizeof(buf), "wrote %s (%d-%d, %zu days)", test_path.c_str(),
                  plan.test_first, plan.test_first + plan.test_years - 1, test.day_count());
    note(buf);
    std::snprintf(buf, sizeof(buf), "wrote %s (%d-%d, %zu days)", speed_path.c_str(),
                  plan.train_first, plan.train_first + plan.train_years - 1,
                  speed.day_count());
    note(buf);
    return 0;
}

// ---------------------------------------------------------------------------
// build-wind

// Restricts a repaired series to days whose calendar year lies in [a, b].
HalfHourlySeries filter_years(const HalfHourlySeries& in, int a, int b) {
    HalfHourlySeries out;
    out.mode = in.mode;
    out.utc_offset_minutes = in.utc_offset_minutes;
    for (std::size_t d = 0; d < in.day_count(); ++d) {
        if (in.day_dates[d].year < a || in.day_dates[d].year > b) continue;
        out.day_dates.push_back(in.day_dates[d]);
        const auto day = in.day(d);
        out.values.insert(out.values.end(), day.begin(), day.end());
    }
    if (out.day_dates.empty())
        throw Error::input("no measurement days fall inside the requested years " +
                           std::to_string(a) + "-" + std::to_string(b));
    return out;
}

std::pair<int, int> parse_year_range(const std::string& text) {
    const auto dash = text.find('-');
    if (dash == std::string::npos)
        throw Error::input("year range must look like 2007-2011, got '" + text + "'");
    try {
        const int a = std::stoi(text.substr(0, dash));
        const int b = std::stoi(text.substr(dash + 1));
        if (a > b) throw Error::input("year range is reversed: '" + text + "'");
        return {a, b};
    } catch (const std::logic_error&) {
        throw Error::input("year range must look like 2007-2011, got '" + text + "'");
    }
}

int cmd_build_wind(const AppConfig& cfg, const std::string& out, const std::string& years) {
    const WindPaths paths = wind_paths(cfg, out);

    note("reading " + paths.train);
    WindSeriesResult raw = load_wind_series(paths.train, SeriesMode::power);
    if (!raw.gaps.missing.empty() || raw.gaps.repaired_count > 0) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "gap repair: %zu slots interpolated, %zu days dropped",
                      raw.gaps.repaired_count, raw.gaps.dropped_days.size());
        note(buf);
    }
    HalfHourlySeries power = std::move(raw.series);
    if (!years.empty()) {
        const auto [a, b] = parse_year_range(years);
        power = filter_years(power, a, b);
    }

    const SeasonalWindModel model = build_seasonal_model(power, cfg.reference_floor);
    for (const std::string& p : save_wind_model(model, profiles_dir(out)))
        note("wrote " + p);

    const fs::path plots = plots_dir(out);
    for (Season s : all_seasons) {
        const std::string p =
            (plots / (std::string("wind_envelope_") + season_name(s) + ".csv")).string();
        write_envelope_csv(model.season(s), p);
        note("wrote " + p);
    }
    const std::string mean_csv = (plots / "wind_actual_mean.csv").string();
    write_actual_mean_csv(model, mean_csv);
    note("wrote " + mean_csv);

    // The season-independent profile comes from the speed record when one is
    // available; the scan's season-independent approach requires it.
    if (fs::exists(paths.speed)) {
        note("reading " + paths.speed);
        const WindSeriesResult speed = load_wind_series(paths.speed, SeriesMode::speed);
        const AnnualProfile annual =
            build_annual_profile(speed.series, cfg.turbine, cfg.reference_floor);
        save_annual_profile(annual, annual_profile_path(out));
        note("wrote " + annual_profile_path(out));
        char buf[160];
        std::snprintf(buf, sizeof(buf), "weibull fit: shape %.4f, scale %.4f m/s (%zu samples)",
                      annual.weibull.shape, annual.weibull.scale,
                      annual.weibull.sample_count);
        note(buf);
    } else if (!cfg.wind_speed_path.empty()) {
        throw Error::input("wind speed CSV not found: " + paths.speed);
    } else {
        note("no speed record at " + paths.speed + "; skipped the season-independent profile");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// validate-wind

int cmd_validate_wind(const AppConfig& cfg, const std::string& out,
                      const std::string& test_override) {
    const WindPaths paths = wind_paths(cfg, out);
    const std::string test_path = test_override.empty() ? paths.test : test_override;

    const SeasonalWindModel model = load_wind_model(profiles_dir(out));
    note("reading " + test_path);
    const WindSeriesResult holdout = load_wind_series(test_path, SeriesMode::power);
    const OutlierReport report = detect_outliers(model, holdout.series);

    const fs::path dir = validation_dir(out);
    const std::string records = (dir / "outlier_records.csv").string();
    const std::string summary = (dir / "outlier_summary.csv").string();
    write_outlier_records_csv(report, records);
    write_outlier_summary_csv(report, summary);
    write_text_atomic((dir / "outlier_summary.json").string(),
                      outlier_summary_to_json(report));
    note("wrote " + records);
    note("wrote " + summary);

    for (Season s : all_seasons) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-7s %6.3f%% outliers (%" PRId64 " of %" PRId64 ")",
                      season_name(s), report.percent(s),
                      report.outliers[static_cast<int>(s)],
                      report.evaluated[static_cast<int>(s)]);
        note(buf);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// build-load

int cmd_build_load(const AppConfig& cfg, const std::string& out) {
    note("reading " + cfg.demand_path);
    const MonthlyEnergyTable energy = load_demand_table(cfg.demand_path);
    note("reading " + cfg.shapes_path);
    const ShapeTable shapes = load_shape_table(cfg.shapes_path);
    note("reading " + cfg.ratios_path);
    const LoadRatioTable ratios = load_load_ratio_table(cfg.ratios_path);

    const SystemLoadModel model = build_load_model(energy, shapes, ratios);
    for (const std::string& p : save_load_model(model, profiles_dir(out)))
        note("wrote " + p);

    const fs::path plots = plots_dir(out);
    const std::string pct = (plots / "load_percent.csv").string();
    const std::string mw = (plots / "load_mw.csv").string();
    write_load_percent_csv(model, pct);
    write_load_mw_csv(model, mw);
    note("wrote " + pct);
    note("wrote " + mw);

    for (Season s : all_seasons) {
        const SeasonalLoadProfile& p = model.season(s);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-7s peak %.1f MW at slot %d, %.0f MWh/day",
                      season_name(s), p.peak_mw, p.peak_slot, p.daily_energy_mwh);
        note(buf);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// scan

json scan_config_snapshot(const AppConfig& cfg, const std::string& approach,
                          std::uint64_t seed) {
    json modes = json::array();
    for (WindMode m : cfg.scan.modes) modes.push_back(wind_mode_name(m));
    return json{{"approach", approach},
                {"seed", seed},
                {"selections", cfg.scan.selections},
                {"penetration", cfg.scan.penetration},
                {"penetration_tol", cfg.scan.penetration_tol},
                {"modes", modes},
                {"band", {cfg.scan.band_low, cfg.scan.band_high}},
                {"relative_tol", cfg.scan.relative_tol},
                {"threads", cfg.scan.threads},
                {"pf", {{"tol", cfg.scan.pf.tol},
                        {"max_iter", cfg.scan.pf.max_iter},
                        {"enforce_q_limits", cfg.scan.pf.enforce_q_limits},
                        {"max_qlimit_rounds", cfg.scan.pf.max_qlimit_rounds}}},
                {"case", cfg.case_path}};
}

int cmd_scan(const AppConfig& cfg, const std::string& out, std::uint64_t seed,
             const std::string& approach) {
    const bool run_focused = approach == "season-focused" || approach == "both";
    const bool run_independent = approach == "season-independent" || approach == "both";
    if (!run_focused && !run_independent)
        throw Error::input("unknown approach: " + approach +
                           " (expected season-focused, season-independent or both)");

    ScanConfig scan_cfg = cfg.scan;
    scan_cfg.seed = seed;

    PipelineManifest manifest;
    manifest.created = utc_timestamp();
    manifest.seed = seed;
    manifest.config = scan_config_snapshot(cfg, approach, seed).dump(2) + "\n";
    const fs::path out_base = fs::absolute(out);
    const auto rel_to_out = [&](const std::string& p) {
        return fs::relative(fs::absolute(p), out_base).generic_string();
    };
    const auto add_input = [&](const std::string& role, const std::string& p) {
        manifest_add(manifest.inputs, role, p, p);
    };
    const auto add_output = [&](const std::string& role, const std::string& p) {
        manifest_add(manifest.outputs, role, p, rel_to_out(p));
    };

    note("reading " + cfg.case_path);
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> warnings;
    const NetworkCase net = import_case(cfg.case_path, &warnings);
    for (const std::string& w : warnings) note("note: " + w);
    add_input("network-case", cfg.case_path);

    ScanData data;
    SeasonalWindModel wind;
    AnnualProfile annual_wind;
    SystemLoadModel load = load_load_model(profiles_dir(out));
    for (Season s : all_seasons)
        add_input(std::string("load-profile-") + season_name(s),
                  (fs::path(profiles_dir(out)) / load_profile_filename(s)).string());
    if (run_focused) {
        wind = load_wind_model(profiles_dir(out));
        data.wind = &wind;
        for (Season s : all_seasons)
            add_input(std::string("wind-profile-") + season_name(s),
                      (fs::path(profiles_dir(out)) / wind_profile_filename(s)).string());
    }
    if (run_independent) {
        annual_wind = load_annual_profile(annual_profile_path(out));
        data.annual_wind = &annual_wind;
        add_input("annual-wind-profile", annual_profile_path(out));
    }
    manifest.stages.push_back({"load-inputs", seconds_since(t0)});

    // Dispatch schedules, one per driving profile.
    const auto t1 = std::chrono::steady_clock::now();
    std::array<DispatchSchedule, 4> seasonal_schedules;
    DispatchSchedule annual_schedule;
    if (run_focused) {
        for (Season s : all_seasons) {
            const int si = static_cast<int>(s);
            note(std::string("dispatching the ") + season_name(s) + " schedule");
            seasonal_schedules[si] = build_dispatch_schedule(
                net, season_name(s), load.seasons[si].percent_of_peak);
            data.seasonal_schedules[si] = &seasonal_schedules[si];
        }
    }
    if (run_independent) {
        note("dispatching the annual schedule");
        annual_schedule =
            build_dispatch_schedule(net, "annual", load.annual.percent_of_peak);
        data.annual_schedule = &annual_schedule;
    }
    manifest.stages.push_back({"dispatch-schedules", seconds_since(t1)});

    const fs::path reports = reports_dir(out);
    std::optional<ViolationReport> focused;
    std::optional<ViolationReport> independent;

    if (run_focused) {
        note("scanning (season-focused)");
        const auto t = std::chrono::steady_clock::now();
        focused = run_scan(net, ScanApproach::season_focused, data, scan_cfg);
        manifest.stages.push_back({"scan-season-focused", seconds_since(t)});
        const std::string p = (reports / "violations_season_focused.csv").string();
        write_violation_csv(*focused, p);
        add_output("violations-season-focused", p);
        note("wrote " + p);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "  %" PRId64 " cases solved, %" PRId64 " diverged",
                      focused->total_solved, focused->total_diverged);
        note(buf);
    }
    if (run_independent) {
        note("scanning (season-independent)");
        const auto t = std::chrono::steady_clock::now();
        independent = run_scan(net, ScanApproach::season_independent, data, scan_cfg);
        manifest.stages.push_back({"scan-season-independent", seconds_since(t)});
        const std::string p = (reports / "violations_season_independent.csv").string();
        write_violation_csv(*independent, p);
        add_output("violations-season-independent", p);
        note("wrote " + p);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "  %" PRId64 " cases solved, %" PRId64 " diverged",
                      independent->total_solved, independent->total_diverged);
        note(buf);
    }

    if (focused) {
        const VulnerabilityRanking ranking = rank_vulnerability(*focused);
        const std::string p = (reports / "vulnerability_ranking.csv").string();
        write_ranking_csv(ranking, p);
        add_output("vulnerability-ranking", p);
        note("wrote " + p);

        const std::string fig = (fs::path(plots_dir(out)) / "violation_share.csv").string();
        write_violation_share_csv(*focused, fig);
        add_output("violation-share", fig);
        note("wrote " + fig);
    }
    if (focused && independent) {
        const std::string p = (reports / "approach_comparison.csv").string();
        write_comparison_csv(*focused, *independent, p);
        add_output("approach-comparison", p);
        note("wrote " + p);
    }

    save_manifest(manifest, manifest_path(out));
    note("wrote " + manifest_path(out));
    return 0;
}

// ---------------------------------------------------------------------------
// report

const ManifestFile* find_output(const PipelineManifest& m, const std::string& role) {
    for (const ManifestFile& f : m.outputs)
        if (f.role == role) return &f;
    return nullptr;
}

int cmd_report(const std::string& out, const std::string& manifest_override) {
    const std::string mpath =
        manifest_override.empty() ? manifest_path(out) : manifest_override;
    const PipelineManifest manifest = load_manifest(mpath);
    const std::string base = fs::path(mpath).parent_path().string();
    verify_manifest(manifest, base);
    note("manifest verified: " + mpath);

    const auto resolve = [&](const ManifestFile& f) {
        const fs::path p(f.path);
        return p.is_absolute() ? p.string() : (fs::path(base) / p).string();
    };

    std::string md;
    md += "# Voltage violation scan summary\n\n";
    md += "- tool version: " + manifest.tool_version + "\n";
    md += "- created: " + manifest.created + "\n";
    md += "- seed: " + std::to_string(manifest.seed) + "\n\n";

    const ManifestFile* focused = find_output(manifest, "violations-season-focused");
    const ManifestFile* independent = find_output(manifest, "violations-season-independent");
    std::int64_t grand_total = 0;

    if (focused) {
        const ViolationReport rep = read_violation_csv(resolve(*focused));
        md += "## Season-focused scan\n\n";
        md += "Relative criterion (each bus against its own base voltage), representative"
              " trajectory:\n\n";
        md += "| season | violations | solved cases |\n";
        md += "|--------|-----------:|-------------:|\n";
        for (Season s : all_seasons) {
            std::int64_t count = 0, solved = 0;
            for (const ScanGroup& g : rep.groups) {
                if (g.season != season_name(s) || g.mode != WindMode::mean) continue;
                solved += g.solved;
                for (std::int64_t c : g.relative_count) count += c;
            }
            md += "| " + std::string(season_name(s)) + " | " + std::to_string(count) +
                  " | " + std::to_string(solved) + " |\n";
            grand_total += count;
        }
        std::int64_t extreme = 0;
        for (const ScanGroup& g : rep.groups) {
            if (g.mode == WindMode::mean) continue;
            for (std::int64_t c : g.absolute_count) extreme += c;
        }
        md += "\nEnvelope-edge trajectories put " + std::to_string(extreme) +
              " solved-case voltages outside the absolute band.\n\n";
        grand_total += extreme;
    }
    if (independent) {
        const ViolationReport rep = read_violation_csv(resolve(*independent));
        std::int64_t count = 0, solved = 0;
        for (const ScanGroup& g : rep.groups) {
            solved += g.solved;
            for (std::int64_t c : g.relative_count) count += c;
        }
        md += "## Season-independent scan\n\n";
        md += std::to_string(count) + " relative-criterion violations over " +
              std::to_string(solved) + " solved cases.\n\n";
        grand_total += count;
    }

    const ManifestFile* ranking_file = find_output(manifest, "vulnerability-ranking");
    if (ranking_file) {
        const VulnerabilityRanking ranking = read_ranking_csv(resolve(*ranking_file));
        md += "## Most vulnerable buses\n\n";
        if (ranking.entries.empty()) {
            md += "No ranked buses.\n\n";
        } else {
            md += "| rank | bus | weight | caught by |\n";
            md += "|-----:|----:|-------:|-----------|\n";
            char buf[96];
            const std::size_t top = std::min<std::size_t>(10, ranking.entries.size());
            for (std::size_t i = 0; i < top; ++i) {
                const RankedBus& rb = ranking.entries[i];
                std::snprintf(buf, sizeof(buf), "| %zu | %d | %.6g | %s |\n", i + 1, rb.bus,
                              rb.wv, rb.group.c_str());
                md += buf;
            }
            md += "\n";
        }
    }
    if (grand_total == 0) md += "No violations detected.\n";

    const std::string path = (fs::path(reports_dir(out)) / "summary.md").string();
    write_text_atomic(path, md);
    note("wrote " + path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seasonal wind/load profiling and voltage-violation scanning"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out = "out";
    std::uint64_t seed = 1;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out, "output directory (default: out)");
    app.add_option("--seed", seed, "master seed for all randomness (default: 1)");

    CLI::App* gen = app.add_subcommand("gen-data", "write seeded synthetic wind CSVs");
    int train_first = -1, train_years = -1, test_first = -1, test_years = -1;
    gen->add_option("--train-first", train_first, "first training year");
    gen->add_option("--train-years", train_years, "number of training years");
    gen->add_option("--test-first", test_first, "first hold-out year");
    gen->add_option("--test-years", test_years, "number of hold-out years");

    CLI::App* bw = app.add_subcommand("build-wind", "build seasonal wind profiles");
    std::string wind_override, speed_override, years;
    bw->add_option("--wind", wind_override, "training wind power CSV");
    bw->add_option("--wind-speed", speed_override, "wind speed CSV for the annual profile");
    bw->add_option("--years", years, "restrict training to a year range, e.g. 2007-2011");
    double floor_override = -1.0;
    bw->add_option("--floor", floor_override, "reference floor in MW");

    CLI::App* vw = app.add_subcommand("validate-wind", "hold-out envelope validation");
    std::string test_override;
    vw->add_option("--test", test_override, "hold-out wind power CSV");

    app.add_subcommand("build-load", "compose seasonal load profiles");

    CLI::App* sc = app.add_subcommand("scan", "run the voltage-violation Monte Carlo");
    std::string approach = "season-focused";
    int selections = -1, threads = -1;
    double penetration = -1.0, penetration_tol = -1.0, pf_tol = -1.0;
    int pf_max_iter = -1;
    std::vector<std::string> mode_names;
    std::string case_override;
    sc->add_option("--approach", approach,
                   "season-focused, season-independent or both (default: season-focused)");
    sc->add_option("--selections", selections, "Monte-Carlo selections per group");
    sc->add_option("--penetration", penetration, "wind capacity fraction target");
    sc->add_option("--penetration-tol", penetration_tol, "penetration band half-width");
    sc->add_option("--modes", mode_names, "wind modes (mean, min, max)")->delimiter(',');
    sc->add_option("--threads", threads, "worker threads for the cell solves");
    sc->add_option("--pf-tol", pf_tol, "power-flow mismatch tolerance, p.u.");
    sc->add_option("--pf-max-iter", pf_max_iter, "power-flow iteration budget");
    sc->add_option("--case", case_override, "network case file");

    CLI::App* rp = app.add_subcommand("report", "render a summary from the scan manifest");
    std::string manifest_override;
    rp->add_option("--manifest", manifest_override, "manifest path (default: <out>/manifest.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        AppConfig cfg = load_config(config_path);
        if (train_first > 0) cfg.synth.train_first = train_first;
        if (train_years > 0) cfg.synth.train_years = train_years;
        if (test_first > 0) cfg.synth.test_first = test_first;
        if (test_years > 0) cfg.synth.test_years = test_years;
        if (!wind_override.empty()) cfg.wind_train_path = wind_override;
        if (!speed_override.empty()) cfg.wind_speed_path = speed_override;
        if (!test_override.empty()) cfg.wind_test_path = test_override;
        if (floor_override >= 0.0) cfg.reference_floor = floor_override;
        if (selections > 0) cfg.scan.selections = selections;
        if (penetration >= 0.0) cfg.scan.penetration = penetration;
        if (penetration_tol >= 0.0) cfg.scan.penetration_tol = penetration_tol;
        if (threads > 0) cfg.scan.threads = threads;
        if (pf_tol > 0.0) cfg.scan.pf.tol = pf_tol;
        if (pf_max_iter > 0) cfg.scan.pf.max_iter = pf_max_iter;
        if (!case_override.empty()) cfg.case_path = case_override;
        if (!mode_names.empty()) {
            cfg.scan.modes.clear();
            for (const std::string& m : mode_names)
                cfg.scan.modes.push_back(wind_mode_from_name(m));
        }

        if (app.got_subcommand("gen-data")) return cmd_gen_data(cfg, out, seed);
        if (app.got_subcommand("build-wind")) return cmd_build_wind(cfg, out, years);
        if (app.got_subcommand("validate-wind"))
            return cmd_validate_wind(cfg, out, test_override);
        if (app.got_subcommand("build-load")) return cmd_build_load(cfg, out);
        if (app.got_subcommand("scan")) return cmd_scan(cfg, out, seed, approach);
        if (app.got_subcommand("report")) return cmd_report(out, manifest_override);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const windgrid::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case windgrid::ErrorKind::input: return 2;
            case windgrid::ErrorKind::numerical: return 3;
            case windgrid::ErrorKind::integrity: return 4;
        }
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
