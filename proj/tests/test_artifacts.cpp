#include <doctest.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "windgrid/errors.hpp"
#include "windgrid/ingest.hpp"
#include "windgrid/load_profiles.hpp"
#include "windgrid/manifest.hpp"
#include "windgrid/profile_io.hpp"
#include "windgrid/synth.hpp"
#include "windgrid/wind_profiles.hpp"

#include "test_helpers.hpp"

using namespace windgrid;

TEST_CASE("fnv-1a hashes match the published test vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(hash_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
}

TEST_CASE("atomic writes leave no temporaries and land complete") {
    namespace fs = std::filesystem;
    const std::string dir = testutil::scratch_dir("atomic");
    const std::string path = dir + "/out.txt";
    write_text_atomic(path, "first");
    write_text_atomic(path, "second");
    CHECK(read_text_file(path) == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
    CHECK(entries == 1);

    // Missing parents are created; an unwritable target (parent is a file)
    // must throw instead of silently dropping the payload.
    write_text_atomic(dir + "/made/on/demand/x.txt", "y");
    CHECK(read_text_file(dir + "/made/on/demand/x.txt") == "y");
    CHECK_THROWS_AS(write_text_atomic(path + "/x.txt", "y"), Error);
    CHECK_THROWS_AS(read_text_file(dir + "/absent.txt"), Error);
}

TEST_CASE("seasonal wind model survives a save/load round trip bit-exactly") {
    SeasonalWindModel model = build_seasonal_model(synth_wind_power(21, 2007, 2));
    const std::string dir = testutil::scratch_dir("wind-model");
    const std::vector<std::string> written = save_wind_model(model, dir);
    REQUIRE(written.size() == 4);
    CHECK(written[0].find("wind_profile_winter.json") != std::string::npos);

    SeasonalWindModel back = load_wind_model(dir);
    CHECK(back.first_year == model.first_year);
    CHECK(back.last_year == model.last_year);
    CHECK(back.reference_floor == model.reference_floor);
    CHECK(back.training_days == model.training_days);
    CHECK(back.excluded_days == model.excluded_days);
    for (Season s : all_seasons) {
        const auto& a = model.season(s);
        const auto& b = back.season(s);
        CHECK(a.day_count == b.day_count);
        CHECK(a.retained_days == b.retained_days);
        CHECK(a.actual_mean == b.actual_mean);
        CHECK(a.actual_min == b.actual_min);
        CHECK(a.actual_max == b.actual_max);
        for (int h = 0; h < kSlotsPerDay; ++h) {
            CHECK(a.representative[h] == b.representative[h]);
            CHECK(a.mean[h] == b.mean[h]);
            CHECK(a.net_min[h] == b.net_min[h]);
            CHECK(a.net_max[h] == b.net_max[h]);
            CHECK(a.min_dev[h] == b.min_dev[h]);
            CHECK(a.max_dev[h] == b.max_dev[h]);
            CHECK(a.actual_slot_mean[h] == b.actual_slot_mean[h]);
            CHECK(a.chosen_day[h] == b.chosen_day[h]);
        }
    }

    SUBCASE("a missing season is an input error") {
        std::filesystem::remove(dir + "/" + wind_profile_filename(Season::summer));
        CHECK_THROWS_AS(load_wind_model(dir), Error);
    }
}

TEST_CASE("annual wind profile round trip") {
    AnnualProfile p;
    for (int h = 0; h < kSlotsPerDay; ++h) p.pn[h] = 1.0 + 0.01 * h;
    p.pn[0] = 1.0;
    p.weibull = {2.0312345678901234, 8.125, 17520, 3};
    p.day_count = 361;
    p.excluded_days = 4;
    p.reference_floor = 1.0;

    const std::string dir = testutil::scratch_dir("annual");
    save_annual_profile(p, dir + "/annual.json");
    AnnualProfile back = load_annual_profile(dir + "/annual.json");
    CHECK(back.weibull.shape == p.weibull.shape);
    CHECK(back.weibull.scale == p.weibull.scale);
    CHECK(back.weibull.sample_count == p.weibull.sample_count);
    CHECK(back.day_count == p.day_count);
    CHECK(back.excluded_days == p.excluded_days);
    for (int h = 0; h < kSlotsPerDay; ++h) CHECK(back.pn[h] == p.pn[h]);
    CHECK(back.curve.v_ci == p.curve.v_ci);
    CHECK(back.curve.rated == p.curve.rated);

    SUBCASE("malformed documents are rejected") {
        write_text_atomic(dir + "/annual.json", "{\"schema\": \"nope\"}");
        CHECK_THROWS_AS(load_annual_profile(dir + "/annual.json"), Error);
    }
}

TEST_CASE("system load model round trip from the bundled tables") {
    SystemLoadModel model =
        build_load_model(load_demand_table(std::string(WINDGRID_DATA_DIR) + "/demand_default.csv"),
                         load_shape_table(std::string(WINDGRID_DATA_DIR) + "/shapes_default.csv"),
                         load_load_ratio_table(std::string(WINDGRID_DATA_DIR) +
                                               "/load_ratios_default.csv"));
    const std::string dir = testutil::scratch_dir("load-model");
    const auto written = save_load_model(model, dir);
    REQUIRE(written.size() == 4);
    SystemLoadModel back = load_load_model(dir);

    for (Season s : all_seasons) {
        const auto& a = model.season(s);
        const auto& b = back.season(s);
        CHECK(a.peak_mw == b.peak_mw);
        CHECK(a.peak_slot == b.peak_slot);
        CHECK(a.daily_energy_mwh == b.daily_energy_mwh);
        for (int h = 0; h < kSlotsPerDay; ++h) {
            CHECK(a.total_mw[h] == b.total_mw[h]);
            CHECK(a.percent_of_peak[h] == b.percent_of_peak[h]);
            CHECK(a.residential_mw[h] == b.residential_mw[h]);
        }
    }
    for (int h = 0; h < kSlotsPerDay; ++h)
        CHECK(model.annual.percent_of_peak[h] == back.annual.percent_of_peak[h]);
    for (int sec = 0; sec < 3; ++sec)
        for (int s = 0; s < 4; ++s)
            CHECK(model.daily_energy_mwh[sec][s] == back.daily_energy_mwh[sec][s]);
}

TEST_CASE("violation report and ranking CSVs round trip their tallies") {
    ViolationReport report;
    report.approach = ScanApproach::season_focused;
    report.seed = 7;
    report.selections = 2;
    report.bus_ids = {1, 2, 3, 4};
    report.base_vm = {1.0, 0.99, 1.01, 1.0};
    for (const char* season : {"winter", "spring", "summer", "fall"}) {
        for (WindMode m : all_wind_modes) {
            ScanGroup g;
            g.season = season;
            g.mode = m;
            g.cases = 96;
            g.solved = 95;
            g.diverged = 1;
            g.relative_count = {0, 5, 17, 0};
            g.absolute_count = {1, 0, 3, 0};
            report.groups.push_back(g);
        }
    }
    const std::string dir = testutil::scratch_dir("violations");
    write_violation_csv(report, dir + "/v.csv");
    ViolationReport back = read_violation_csv(dir + "/v.csv");
    CHECK(back.bus_ids == report.bus_ids);
    REQUIRE(back.groups.size() == report.groups.size());
    for (std::size_t i = 0; i < back.groups.size(); ++i) {
        CHECK(back.groups[i].season == report.groups[i].season);
        CHECK(back.groups[i].mode == report.groups[i].mode);
        CHECK(back.groups[i].solved == report.groups[i].solved);
        CHECK(back.groups[i].relative_count == report.groups[i].relative_count);
        CHECK(back.groups[i].absolute_count == report.groups[i].absolute_count);
    }

    VulnerabilityRanking ranking = rank_vulnerability(report);
    write_ranking_csv(ranking, dir + "/rank.csv");
    VulnerabilityRanking rback = read_ranking_csv(dir + "/rank.csv");
    REQUIRE(rback.entries.size() == ranking.entries.size());
    for (std::size_t i = 0; i < rback.entries.size(); ++i) {
        CHECK(rback.entries[i].bus == ranking.entries[i].bus);
        CHECK(rback.entries[i].group == ranking.entries[i].group);
        CHECK(rback.entries[i].alpha1 == ranking.entries[i].alpha1);
        CHECK(rback.entries[i].alpha2 == ranking.entries[i].alpha2);
    }

    SUBCASE("comparison output lists focused-only buses") {
        ViolationReport independent = report;
        independent.approach = ScanApproach::season_independent;
        independent.groups.clear();
        ScanGroup g;
        g.season = "annual";
        g.mode = WindMode::mean;
        g.cases = 96;
        g.solved = 96;
        g.relative_count = {0, 9, 0, 0};  // misses buses 1 and 3
        g.absolute_count = {0, 0, 0, 0};
        independent.groups.push_back(g);

        write_comparison_csv(report, independent, dir + "/cmp.csv");
        const std::string text = testutil::read_file(dir + "/cmp.csv");
        CHECK(text.find("bus,season_focused_count,season_independent_count\n") == 0);
        CHECK(text.find("\n1,") != std::string::npos);
        CHECK(text.find("\n3,") != std::string::npos);
        CHECK(text.find("\n2,") == std::string::npos);  // caught by both

        ViolationReport mismatched = independent;
        mismatched.bus_ids = {1, 2, 3};
        CHECK_THROWS_AS(write_comparison_csv(report, mismatched, dir + "/cmp2.csv"), Error);
    }
}

TEST_CASE("outlier artifacts carry one row per flagged slot and four summary rows") {
    OutlierReport rep;
    rep.outliers = {2, 0, 0, 1};
    rep.evaluated = {96, 96, 48, 48};
    rep.records.push_back({Season::winter, {2012, 1, 3}, 5, 2.5, 1.5, true});
    rep.records.push_back({Season::winter, {2012, 1, 4}, 7, 0.25, 0.5, false});
    rep.records.push_back({Season::fall, {2012, 10, 2}, 40, 3.0, 2.0, true});

    const std::string dir = testutil::scratch_dir("outliers");
    write_outlier_records_csv(rep, dir + "/records.csv");
    write_outlier_summary_csv(rep, dir + "/summary.csv");

    const std::string records = testutil::read_file(dir + "/records.csv");
    CHECK(records.find("season,date,slot,value,bound,kind") == 0);
    CHECK(records.find("winter,2012-01-03,5,") != std::string::npos);
    CHECK(records.find("above") != std::string::npos);
    CHECK(records.find("below") != std::string::npos);

    const std::string summary = testutil::read_file(dir + "/summary.csv");
    CHECK(summary.find("winter") != std::string::npos);
    CHECK(summary.find("fall") != std::string::npos);

    const std::string json = outlier_summary_to_json(rep);
    CHECK(json.find("winter") != std::string::npos);
}

TEST_CASE("manifests verify their outputs and detect tampering") {
    const std::string dir = testutil::scratch_dir("manifest");
    write_text_atomic(dir + "/a.csv", "x,y\n1,2\n");
    write_text_atomic(dir + "/b.csv", "p\n3\n");

    PipelineManifest m;
    m.seed = 7;
    m.config = "{}";
    m.created = utc_timestamp();
    manifest_add(m.outputs, "table-a", dir + "/a.csv", "a.csv");
    manifest_add(m.outputs, "table-b", dir + "/b.csv", "b.csv");
    m.stages.push_back({"scan", 1.25});
    save_manifest(m, dir + "/manifest.json");

    PipelineManifest back = load_manifest(dir + "/manifest.json");
    CHECK(back.seed == 7);
    CHECK(back.tool_version == kToolkitVersion);
    REQUIRE(back.outputs.size() == 2);
    CHECK(back.outputs[0].role == "table-a");
    CHECK(back.outputs[0].path == "a.csv");
    CHECK(back.outputs[0].bytes == 8);
    verify_manifest(back, dir);

    SUBCASE("modified output") {
        write_text_atomic(dir + "/b.csv", "p\n4\n");
        try {
            verify_manifest(back, dir);
            FAIL("expected integrity failure");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::integrity);
            CHECK(std::string(e.what()).find("b.csv") != std::string::npos);
        }
    }
    SUBCASE("missing output") {
        std::filesystem::remove(dir + "/a.csv");
        try {
            verify_manifest(back, dir);
            FAIL("expected integrity failure");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::integrity);
        }
    }
    SUBCASE("malformed manifest document") {
        CHECK_THROWS_AS(manifest_from_json("{\"bad\": true}", "m.json"), Error);
    }
}
