#include <doctest.h>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "windgrid/case_io.hpp"
#include "windgrid/errors.hpp"
#include "windgrid/profile_io.hpp"
#include "windgrid/scan.hpp"

#include "test_helpers.hpp"

using namespace windgrid;

namespace {

// A seasonal wind model with unit representatives and hand-set statistics,
// which makes every scale factor an explicit ratio.
SeasonalWindModel factor_fixture() {
    SeasonalWindModel m;
    const std::array<double, 4> mean{100.0, 200.0, 300.0, 200.0};
    const std::array<double, 4> mx{150.0, 250.0, 350.0, 250.0};
    const std::array<double, 4> mn{50.0, 150.0, 250.0, 150.0};
    for (int s = 0; s < 4; ++s) {
        NormativeDayProfile& p = m.seasons[s];
        p.season = static_cast<Season>(s);
        p.day_count = 1;
        for (int h = 0; h < kSlotsPerDay; ++h) {
            p.representative[h] = 1.0;
            p.mean[h] = 1.0;
            p.net_max[h] = 0.2;
            p.net_min[h] = 0.1;
        }
        p.actual_mean = mean[s];
        p.actual_max = mx[s];
        p.actual_min = mn[s];
        p.retained_days = 1;
    }
    m.first_year = 2007;
    m.last_year = 2008;
    m.training_days = 4;
    return m;
}

ViolationReport ranking_fixture() {
    ViolationReport r;
    r.approach = ScanApproach::season_focused;
    r.bus_ids = {3, 5, 9, 12, 14};
    r.base_vm = {1.0, 1.0, 1.0, 1.0, 1.0};

    ScanGroup mean_grp;
    mean_grp.season = "winter";
    mean_grp.mode = WindMode::mean;
    mean_grp.cases = 40;
    mean_grp.solved = 40;
    mean_grp.relative_count = {4, 20, 10, 4, 0};
    // Absolute counts under the mean trajectory must not leak into either pool.
    mean_grp.absolute_count = {9, 9, 9, 9, 9};
    r.groups.push_back(mean_grp);

    ScanGroup extreme_grp;
    extreme_grp.season = "summer";
    extreme_grp.mode = WindMode::vmin;
    extreme_grp.cases = 20;
    extreme_grp.solved = 20;
    // Relative counts under an envelope-edge trajectory are likewise ignored.
    extreme_grp.relative_count = {7, 7, 7, 7, 7};
    extreme_grp.absolute_count = {0, 8, 10, 0, 6};
    r.groups.push_back(extreme_grp);

    r.total_solved = 60;
    return r;
}

}  // namespace

TEST_CASE("seasonal scale factors normalize trajectory-weighted power") {
    SeasonalWindModel m = factor_fixture();
    SeasonalScaleFactors f = build_seasonal_scale_factors(m);

    const int kMean = static_cast<int>(WindMode::mean);
    const int kMin = static_cast<int>(WindMode::vmin);
    const int kMax = static_cast<int>(WindMode::vmax);
    for (int h = 0; h < kSlotsPerDay; ++h) {
        // Mean mode: season means {100,200,300,200} over their average 200.
        CHECK(f.factor[kMean][0][h] == 0.5);
        CHECK(f.factor[kMean][1][h] == 1.0);
        CHECK(f.factor[kMean][2][h] == 1.5);
        CHECK(f.factor[kMean][3][h] == 1.0);
        // Max mode: upper edge 1.2 * {150,250,350,250} over the largest.
        CHECK(f.factor[kMax][2][h] == 1.0);
        CHECK(f.factor[kMax][0][h] == doctest::Approx(150.0 / 350.0).epsilon(1e-14));
        CHECK(f.factor[kMax][1][h] == doctest::Approx(250.0 / 350.0).epsilon(1e-14));
        // Min mode: lower edge 0.9 * {50,150,250,150} over the smallest.
        CHECK(f.factor[kMin][0][h] == 1.0);
        CHECK(f.factor[kMin][1][h] == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(f.factor[kMin][2][h] == doctest::Approx(5.0).epsilon(1e-14));
        // Every max-mode factor stays at or below one, min-mode at or above.
        for (int s = 0; s < 4; ++s) {
            CHECK(f.factor[kMax][s][h] <= 1.0);
            CHECK(f.factor[kMin][s][h] >= 1.0);
        }
    }

    SUBCASE("a vanishing normalizer is a typed input error") {
        m.seasons[0].actual_min = 0.0;  // zero lower edge in every slot
        try {
            build_seasonal_scale_factors(m);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::input);
            CHECK(std::string(e.what()).find("min") != std::string::npos);
        }
    }
}

TEST_CASE("vulnerability weights combine rank over probability per criterion") {
    VulnerabilityRanking rank = rank_vulnerability(ranking_fixture());
    CHECK(rank.mean_cases == 40);
    CHECK(rank.extreme_cases == 20);
    REQUIRE(rank.entries.size() == 5);

    // Bus 5: relative rank 1 of fraction 0.5, absolute rank 2 of 0.4 -> 7.
    // Bus 9: relative rank 2 of 0.25, absolute rank 1 of 0.5 -> 10.
    const RankedBus& first = rank.entries[0];
    CHECK(first.bus == 5);
    CHECK(first.group == "both");
    CHECK(first.alpha1 == 1);
    CHECK(first.pv1 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(first.count1 == 20);
    CHECK(first.alpha2 == 2);
    CHECK(first.pv2 == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(first.wv == 1.0 / (20.0 / 40.0) + 2.0 / (8.0 / 20.0));
    CHECK(first.wv == doctest::Approx(7.0).epsilon(1e-12));

    const RankedBus& second = rank.entries[1];
    CHECK(second.bus == 9);
    CHECK(second.group == "both");
    CHECK(second.wv == 2.0 / (10.0 / 40.0) + 1.0 / (10.0 / 20.0));
    CHECK(second.wv == doctest::Approx(10.0).epsilon(1e-12));

    // Single-criterion buses follow, ordered by their one term: bus 14
    // (absolute rank 3 of 0.3 -> 10) ahead of buses 3 and 12 (relative
    // rank 3 and 4 of 0.1 -> 30 and 40). The count tie between buses 3 and
    // 12 resolves to the lower id.
    CHECK(rank.entries[2].bus == 14);
    CHECK(rank.entries[2].group == "absolute-only");
    CHECK(rank.entries[2].wv == doctest::Approx(3.0 / (6.0 / 20.0)).epsilon(1e-12));
    CHECK(rank.entries[3].bus == 3);
    CHECK(rank.entries[3].group == "relative-only");
    CHECK(rank.entries[3].alpha1 == 3);
    CHECK(rank.entries[4].bus == 12);
    CHECK(rank.entries[4].alpha1 == 4);

    SUBCASE("pooling requires both criteria to be present") {
        ViolationReport only_mean = ranking_fixture();
        only_mean.groups.resize(1);
        try {
            rank_vulnerability(only_mean);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::input);
            CHECK(std::string(e.what()).find("min/max") != std::string::npos);
        }

        ViolationReport only_extreme = ranking_fixture();
        only_extreme.groups.erase(only_extreme.groups.begin());
        CHECK_THROWS_AS(rank_vulnerability(only_extreme), Error);
    }
}

TEST_CASE("wind selections are seed-deterministic and hit the capacity band") {
    NetworkCase net = import_case(std::string(WINDGRID_DATA_DIR) + "/case118.m");
    ScanConfig cfg;
    cfg.selections = 8;
    cfg.penetration = 0.5;
    cfg.penetration_tol = 0.05;
    cfg.seed = 7;

    double capacity = 0.0;
    for (const Generator& g : net.generators)
        if (g.in_service) capacity += g.pmax;

    WindSelection a = select_wind_buses(net, cfg, 3);
    WindSelection b = select_wind_buses(net, cfg, 3);
    CHECK(a.buses == b.buses);
    CHECK(a.capacity_mw == b.capacity_mw);
    REQUIRE_FALSE(a.buses.empty());
    CHECK(a.fraction >= 0.45);
    CHECK(a.fraction <= 0.55);
    CHECK(a.fraction == doctest::Approx(a.capacity_mw / capacity).epsilon(1e-12));
    for (std::size_t i = 1; i < a.buses.size(); ++i) REQUIRE(a.buses[i - 1] < a.buses[i]);

    // The marker vector matches the bus list.
    double marked = 0.0;
    for (std::size_t g = 0; g < net.generators.size(); ++g) {
        if (!a.is_wind_gen[g]) continue;
        bool listed = false;
        for (int bus : a.buses) listed = listed || bus == net.generators[g].bus;
        CHECK(listed);
        marked += net.generators[g].pmax;
    }
    CHECK(marked == doctest::Approx(a.capacity_mw).epsilon(1e-12));

    WindSelection other = select_wind_buses(net, cfg, 4);
    CHECK(a.buses != other.buses);

    SUBCASE("zero penetration disables wind") {
        cfg.penetration = 0.0;
        WindSelection none = select_wind_buses(net, cfg, 0);
        CHECK(none.buses.empty());
        CHECK(none.fraction == 0.0);
    }
}

TEST_CASE("scan accounting, determinism and the zero-wind invariant") {
    NetworkCase net = testutil::small_grid_case();
    SeasonalWindModel wind = factor_fixture();

    std::array<double, 48> percent{};
    for (int h = 0; h < 48; ++h) percent[h] = 70.0 + h / 2.0;  // 70 .. 93.5
    DispatchSchedule sched = build_dispatch_schedule(net, "any", percent);
    ScanData data;
    data.wind = &wind;
    for (auto& p : data.seasonal_schedules) p = &sched;

    ScanConfig cfg;
    cfg.selections = 2;
    cfg.penetration = 0.5;
    cfg.penetration_tol = 0.05;
    cfg.seed = 11;
    cfg.threads = 1;

    ViolationReport r1 = run_scan(net, ScanApproach::season_focused, data, cfg);
    CHECK(r1.bus_ids == std::vector<int>{1, 2, 3, 4});
    REQUIRE(r1.groups.size() == 12);  // 4 seasons x 3 modes
    std::int64_t solved = 0, diverged = 0;
    for (const ScanGroup& g : r1.groups) {
        CHECK(g.cases == 2 * 48);
        CHECK(g.solved + g.diverged == g.cases);
        CHECK(g.relative_count.size() == 4);
        solved += g.solved;
        diverged += g.diverged;
    }
    CHECK(r1.total_solved == solved);
    CHECK(r1.total_diverged == diverged);
    CHECK(r1.picks.size() == 2);

    SUBCASE("identical runs serialize to identical bytes") {
        ViolationReport r2 = run_scan(net, ScanApproach::season_focused, data, cfg);
        const std::string dir = testutil::scratch_dir("scan-determinism");
        write_violation_csv(r1, dir + "/a.csv");
        write_violation_csv(r2, dir + "/b.csv");
        CHECK(testutil::read_file(dir + "/a.csv") == testutil::read_file(dir + "/b.csv"));
    }

    SUBCASE("worker count does not change the tallies") {
        ScanConfig threaded = cfg;
        threaded.threads = 3;
        ViolationReport r3 = run_scan(net, ScanApproach::season_focused, data, threaded);
        REQUIRE(r3.groups.size() == r1.groups.size());
        for (std::size_t i = 0; i < r1.groups.size(); ++i) {
            CHECK(r3.groups[i].relative_count == r1.groups[i].relative_count);
            CHECK(r3.groups[i].absolute_count == r1.groups[i].absolute_count);
            CHECK(r3.groups[i].solved == r1.groups[i].solved);
        }
    }

    SUBCASE("without wind, the trajectory mode cannot matter") {
        ScanConfig nowind = cfg;
        nowind.penetration = 0.0;
        ViolationReport r0 = run_scan(net, ScanApproach::season_focused, data, nowind);
        REQUIRE(r0.groups.size() == 12);
        // Groups arrive season-major; all three modes of a season must agree.
        for (int s = 0; s < 4; ++s) {
            const ScanGroup& mean_g = r0.groups[3 * s];
            for (int m = 1; m < 3; ++m) {
                CHECK(r0.groups[3 * s + m].relative_count == mean_g.relative_count);
                CHECK(r0.groups[3 * s + m].absolute_count == mean_g.absolute_count);
            }
        }
    }

    SUBCASE("the season-independent path runs one annual group") {
        AnnualProfile annual;
        annual.pn.fill(1.1);
        annual.pn[0] = 1.0;
        annual.day_count = 310;
        ScanData idata;
        idata.annual_wind = &annual;
        idata.annual_schedule = &sched;
        ViolationReport ri = run_scan(net, ScanApproach::season_independent, idata, cfg);
        REQUIRE(ri.groups.size() == 1);
        CHECK(ri.groups[0].season == "annual");
        CHECK(ri.groups[0].mode == WindMode::mean);
        CHECK(ri.groups[0].cases == 2 * 48);
    }

    SUBCASE("missing inputs are reported as argument errors") {
        ScanData empty;
        CHECK_THROWS_AS(run_scan(net, ScanApproach::season_focused, empty, cfg), Error);
        ScanData noannual;
        noannual.annual_schedule = &sched;
        CHECK_THROWS_AS(run_scan(net, ScanApproach::season_independent, noannual, cfg), Error);
    }
}
