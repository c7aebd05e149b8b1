#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "windgrid/dispatch.hpp"
#include "windgrid/errors.hpp"

#include "test_helpers.hpp"

using namespace windgrid;

TEST_CASE("economic dispatch equalizes incremental cost across free units") {
    NetworkCase net = testutil::small_grid_case();  // c2 = 0.01 / 0.02, equal c1
    DispatchResult r = dispatch_opf(net, 100.0);
    REQUIRE(r.flow.converged);
    CHECK(r.demand_mw == 100.0);

    // Equal marginal cost: 0.02 * pg1 = 0.04 * pg2, so pg1 = 2 * pg2.
    CHECK(r.pg[0] == doctest::Approx(2.0 * r.pg[1]).epsilon(1e-4));
    // Energy balance: generation covers demand plus the converged losses.
    CHECK(r.pg[0] + r.pg[1] == doctest::Approx(r.demand_mw + r.losses_mw).epsilon(1e-6));
    // The marginal price equals each free unit's incremental cost.
    CHECK(r.lambda == doctest::Approx(2.0 * 0.01 * r.pg[0] + 20.0).epsilon(1e-4));
    CHECK(r.lambda == doctest::Approx(2.0 * 0.02 * r.pg[1] + 20.0).epsilon(1e-4));
    CHECK(r.loss_rounds >= 1);
}

TEST_CASE("identical units split the demand evenly") {
    NetworkCase net = testutil::small_grid_case();
    net.costs[1] = net.costs[0];
    DispatchResult r = dispatch_opf(net, 100.0);
    CHECK(r.pg[0] == doctest::Approx(r.pg[1]).epsilon(1e-4));
}

TEST_CASE("saturated units pin at their limit and the rest pick up the slack") {
    NetworkCase net = testutil::small_grid_case();
    net.generators[0].pmax = 20.0;  // the cheap unit saturates
    DispatchResult r = dispatch_opf(net, 100.0);
    CHECK(r.pg[0] == doctest::Approx(20.0).epsilon(1e-8));
    CHECK(r.pg[1] == doctest::Approx(r.demand_mw + r.losses_mw - 20.0).epsilon(1e-5));
    // The marginal unit is now the expensive one.
    CHECK(r.lambda == doctest::Approx(2.0 * 0.02 * r.pg[1] + 20.0).epsilon(1e-4));
}

TEST_CASE("dispatch scales monotonically with demand") {
    NetworkCase net = testutil::small_grid_case();
    DispatchResult lo = dispatch_opf(net, 60.0);
    DispatchResult hi = dispatch_opf(net, 120.0);
    CHECK(lo.demand_mw == 60.0);
    CHECK(hi.demand_mw == 120.0);
    CHECK(hi.lambda > lo.lambda);
    CHECK(hi.pg[0] + hi.pg[1] > lo.pg[0] + lo.pg[1]);
}

TEST_CASE("dispatch failures and bad fractions raise typed errors") {
    NetworkCase net = testutil::small_grid_case();
    SUBCASE("load fraction domain") {
        CHECK_THROWS_AS(dispatch_opf(net, 0.0), Error);
        CHECK_THROWS_AS(dispatch_opf(net, -5.0), Error);
        CHECK_THROWS_AS(dispatch_opf(net, 150.0001), Error);
    }
    SUBCASE("demand above total capacity") {
        net.generators[0].pmax = 30.0;
        net.generators[1].pmax = 30.0;
        try {
            dispatch_opf(net, 100.0);
            FAIL("expected failure");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::numerical);
        }
    }
}

TEST_CASE("load scaling follows the base case or an explicit allocation") {
    NetworkCase net = testutil::small_grid_case();
    std::vector<double> pd, qd;

    scaled_loads(net, 50.0, {}, pd, qd);
    CHECK(pd == std::vector<double>{0.0, 0.0, 30.0, 20.0});
    CHECK(qd == std::vector<double>{0.0, 0.0, 7.5, 5.0});

    // An explicit allocation redistributes the same total demand.
    scaled_loads(net, 100.0, {0.0, 0.0, 0.3, 0.7}, pd, qd);
    CHECK(pd[2] == doctest::Approx(30.0).epsilon(1e-12));
    CHECK(pd[3] == doctest::Approx(70.0).epsilon(1e-12));
    // Reactive demand keeps each bus's base power factor: qd = pd * qd0/pd0.
    CHECK(qd[2] == doctest::Approx(30.0 * 15.0 / 60.0).epsilon(1e-12));
    CHECK(qd[3] == doctest::Approx(70.0 * 10.0 / 40.0).epsilon(1e-12));

    SUBCASE("allocation weights must sum to one") {
        CHECK_THROWS_AS(scaled_loads(net, 100.0, {0.5, 0.0, 0.0, 0.0}, pd, qd), Error);
    }
    SUBCASE("allocation size must match the bus count") {
        CHECK_THROWS_AS(scaled_loads(net, 100.0, {1.0}, pd, qd), Error);
    }
}

TEST_CASE("slot schedules dispatch every half hour and stay warm") {
    NetworkCase net = testutil::small_grid_case();
    std::array<double, 48> percent{};
    percent.fill(80.0);
    percent[30] = 100.0;

    DispatchSchedule sched = build_dispatch_schedule(net, "winter", percent);
    CHECK(sched.label == "winter");
    REQUIRE(sched.pg.size() == 48);
    REQUIRE(sched.vm.size() == 48);
    CHECK(sched.vm[0].size() == net.buses.size());
    CHECK(sched.percent_of_peak[30] == 100.0);

    // Identical driving values produce identical dispatch decisions.
    CHECK(sched.pg[0][0] == doctest::Approx(sched.pg[1][0]).epsilon(1e-9));
    CHECK(sched.load_mw[0] == doctest::Approx(80.0).epsilon(1e-9));
    CHECK(sched.load_mw[30] == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(sched.pd_factor[30] == doctest::Approx(1.0).epsilon(1e-12));
    // The peak slot needs more generation than the shoulder slots.
    CHECK(sched.pg[30][0] + sched.pg[30][1] > sched.pg[0][0] + sched.pg[0][1]);

    SUBCASE("a slot outside the load-fraction domain names itself") {
        percent[17] = 0.0;
        try {
            build_dispatch_schedule(net, "winter", percent);
            FAIL("expected failure");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("17") != std::string::npos);
        }
    }
}
