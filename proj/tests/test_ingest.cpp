#include <doctest.h>

#include <sstream>
#include <string>

#include "windgrid/errors.hpp"
#include "windgrid/ingest.hpp"

using namespace windgrid;

namespace {

std::string wind_day_csv() {
    std::string text = "timestamp,value\n";
    for (int s = 0; s < 48; ++s) {
        char row[64];
        std::snprintf(row, sizeof row, "2011-04-02 %02d:%02d:00,%.1f\n", s / 2, (s % 2) * 30,
                      50.0 + s);
        text += row;
    }
    return text;
}

template <typename Fn>
std::string input_error_message(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::input);
        return e.what();
    }
    FAIL("expected an input error");
    return {};
}

}  // namespace

TEST_CASE("wind series parsing reads a clean day") {
    std::istringstream in(wind_day_csv());
    WindSeriesResult r = parse_wind_series(in, SeriesMode::power, "wind.csv");
    CHECK(r.series.day_count() == 1);
    CHECK(r.series.day_dates[0] == Date{2011, 4, 2});
    CHECK(r.series.day(0)[0] == 50.0);
    CHECK(r.series.day(0)[47] == 97.0);
    CHECK(r.gaps.repaired_count == 0);
}

TEST_CASE("wind series parsing reports malformed rows with their line number") {
    std::string text = wind_day_csv();
    text += "2011-04-03 00:00:00,not-a-number\n";
    std::istringstream in(text);
    const std::string msg =
        input_error_message([&] { parse_wind_series(in, SeriesMode::power, "wind.csv"); });
    CHECK(msg.find("wind.csv") != std::string::npos);
    CHECK(msg.find("50") != std::string::npos);  // offending line 50
}

TEST_CASE("wind series parsing rejects structural problems") {
    SUBCASE("wrong header") {
        std::istringstream in("time,power\n2011-04-02 00:00:00,5\n");
        const std::string msg =
            input_error_message([&] { parse_wind_series(in, SeriesMode::power, "w.csv"); });
        CHECK(msg.find("header") != std::string::npos);
    }
    SUBCASE("off-grid timestamp") {
        std::istringstream in("timestamp,value\n2011-04-02 00:17:00,5\n");
        input_error_message([&] { parse_wind_series(in, SeriesMode::power, "w.csv"); });
    }
    SUBCASE("backwards timestamps") {
        std::string text = "timestamp,value\n";
        text += "2011-04-02 01:00:00,5\n";
        text += "2011-04-02 00:30:00,5\n";
        std::istringstream in(text);
        input_error_message([&] { parse_wind_series(in, SeriesMode::power, "w.csv"); });
    }
    SUBCASE("no complete day survives") {
        std::istringstream in("timestamp,value\n2011-04-02 00:00:00,5\n");
        input_error_message([&] { parse_wind_series(in, SeriesMode::power, "w.csv"); });
    }
}

TEST_CASE("demand table parsing validates rows and duplicates") {
    std::istringstream in(
        "year,month,sector,mwh\n"
        "2010,1,residential,930.5\n"
        "2010,1,commercial,600\n"
        "2010,2,residential,840\n");
    MonthlyEnergyTable t = parse_demand_table(in, "demand.csv");
    CHECK(t.mwh(2010, 1, Sector::residential) == 930.5);
    CHECK(t.has(2010, 1, Sector::commercial));
    CHECK_FALSE(t.has(2010, 3, Sector::residential));
    CHECK(t.years() == std::vector<int>{2010});

    SUBCASE("duplicate row") {
        std::istringstream dup(
            "year,month,sector,mwh\n"
            "2010,1,residential,930.5\n"
            "2010,1,residential,931\n");
        const std::string msg =
            input_error_message([&] { parse_demand_table(dup, "demand.csv"); });
        CHECK(msg.find("duplicate") != std::string::npos);
    }
    SUBCASE("bad month") {
        std::istringstream bad("year,month,sector,mwh\n2010,13,residential,1\n");
        input_error_message([&] { parse_demand_table(bad, "demand.csv"); });
    }
    SUBCASE("unknown sector") {
        std::istringstream bad("year,month,sector,mwh\n2010,1,agriculture,1\n");
        input_error_message([&] { parse_demand_table(bad, "demand.csv"); });
    }
    SUBCASE("negative energy") {
        std::istringstream bad("year,month,sector,mwh\n2010,1,residential,-5\n");
        input_error_message([&] { parse_demand_table(bad, "demand.csv"); });
    }
}

TEST_CASE("shape table parsing requires complete 48-slot coverage") {
    std::string good = "sector,season,slot,value\n";
    for (int s = 0; s < 48; ++s)
        good += "residential,winter," + std::to_string(s) + ",0.5\n";
    std::istringstream in(good);
    ShapeTable t = parse_shape_table(in, "shapes.csv");
    REQUIRE(t.has(Sector::residential, Season::winter));
    CHECK(t.get(Sector::residential, Season::winter).size() == 48);
    CHECK(t.get(Sector::residential, Season::winter)[13] == 0.5);

    SUBCASE("missing slot") {
        std::string partial = "sector,season,slot,value\n";
        for (int s = 0; s < 47; ++s)
            partial += "residential,winter," + std::to_string(s) + ",0.5\n";
        std::istringstream bad(partial);
        const std::string msg = input_error_message([&] { parse_shape_table(bad, "s.csv"); });
        CHECK(msg.find("residential") != std::string::npos);
    }
    SUBCASE("duplicate slot") {
        std::string dup = good + "residential,winter,7,0.5\n";
        std::istringstream bad(dup);
        input_error_message([&] { parse_shape_table(bad, "s.csv"); });
    }
    SUBCASE("slot out of range") {
        std::istringstream bad("sector,season,slot,value\nresidential,winter,48,0.5\n");
        input_error_message([&] { parse_shape_table(bad, "s.csv"); });
    }
}

TEST_CASE("load ratio table parsing") {
    std::istringstream in(
        "sector,season,ratio\n"
        "commercial,winter,0.35\n"
        "commercial,summer,0.2\n");
    LoadRatioTable t = parse_load_ratio_table(in, "lr.csv");
    CHECK(t.ratio(Sector::commercial, Season::winter) == 0.35);
    CHECK_FALSE(t.has(Sector::industrial, Season::winter));

    std::istringstream neg("sector,season,ratio\ncommercial,winter,-0.1\n");
    input_error_message([&] { parse_load_ratio_table(neg, "lr.csv"); });

    std::istringstream dup(
        "sector,season,ratio\ncommercial,winter,0.1\ncommercial,winter,0.2\n");
    input_error_message([&] { parse_load_ratio_table(dup, "lr.csv"); });
}

TEST_CASE("sector names round-trip and reject unknowns") {
    for (Sector s : all_sectors) CHECK(sector_from_name(sector_name(s)) == s);
    CHECK_THROWS_AS(sector_from_name("municipal"), Error);
}
