#pragma once

// Shared fixtures for the unit tests: hand-sized network cases with known
// solutions, direct builders for half-hourly series, and scratch directories
// under the test binary's working directory.

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "windgrid/network.hpp"
#include "windgrid/rng.hpp"
#include "windgrid/timeseries.hpp"

namespace testutil {

// Slack (bus 1, V=1.0) feeding a load bus over a lossless reactance of
// 0.1 p.u. With a 50 MW / 0 MVAr load the receiving-end magnitude solves
// u^2 - u + 0.0025 = 0, u = |V|^2, giving |V| = 0.9987460731103327.
inline windgrid::NetworkCase two_bus_case(double pd_mw = 50.0, double qd_mvar = 0.0) {
    windgrid::NetworkCase net;
    net.name = "two-bus";
    net.base_mva = 100.0;
    windgrid::Bus slack;
    slack.id = 1;
    slack.type = windgrid::BusType::slack;
    slack.base_kv = 138.0;
    windgrid::Bus load;
    load.id = 2;
    load.type = windgrid::BusType::pq;
    load.pd = pd_mw;
    load.qd = qd_mvar;
    load.base_kv = 138.0;
    net.buses = {slack, load};
    windgrid::Branch line;
    line.from = 1;
    line.to = 2;
    line.r = 0.0;
    line.x = 0.1;
    net.branches = {line};
    windgrid::Generator gen;
    gen.bus = 1;
    gen.vs = 1.0;
    gen.pmax = 500.0;
    gen.qmax = 300.0;
    gen.qmin = -300.0;
    net.generators = {gen};
    return net;
}

// Four buses in a ring, two dispatchable generators with distinct quadratic
// costs (c2 = 0.01 / 0.02, equal c1), 100 MW of base load. At an interior
// equal-incremental-cost optimum pg1 = 2 * pg2.
inline windgrid::NetworkCase small_grid_case() {
    windgrid::NetworkCase net;
    net.name = "small-grid";
    net.base_mva = 100.0;
    auto bus = [](int id, windgrid::BusType t, double pd, double qd) {
        windgrid::Bus b;
        b.id = id;
        b.type = t;
        b.pd = pd;
        b.qd = qd;
        b.base_kv = 138.0;
        return b;
    };
    net.buses = {bus(1, windgrid::BusType::slack, 0.0, 0.0),
                 bus(2, windgrid::BusType::pv, 0.0, 0.0),
                 bus(3, windgrid::BusType::pq, 60.0, 15.0),
                 bus(4, windgrid::BusType::pq, 40.0, 10.0)};
    auto line = [](int f, int t, double r, double x) {
        windgrid::Branch br;
        br.from = f;
        br.to = t;
        br.r = r;
        br.x = x;
        br.b = 0.02;
        return br;
    };
    net.branches = {line(1, 2, 0.01, 0.06), line(1, 3, 0.02, 0.08), line(2, 4, 0.02, 0.08),
                    line(3, 4, 0.01, 0.06)};
    auto gen = [](int bus_id, double pmax) {
        windgrid::Generator g;
        g.bus = bus_id;
        g.vs = 1.0;
        g.pmax = pmax;
        g.qmax = 80.0;
        g.qmin = -80.0;
        return g;
    };
    net.generators = {gen(1, 150.0), gen(2, 150.0)};
    net.costs = {{0.01, 20.0, 0.0}, {0.02, 20.0, 0.0}};
    return net;
}

// Day-major series builder. Slot 0 of every appended day carries `reference`
// (a power of two, so later per-day normalization is bit-exact) and the rest
// carry reference * shape[h].
inline void append_day(windgrid::HalfHourlySeries& series, int year, int month, int day,
                       const std::array<double, 48>& shape, double reference = 8.0) {
    series.day_dates.push_back({year, month, day});
    for (int h = 0; h < 48; ++h)
        series.values.push_back(h == 0 ? reference : reference * shape[h]);
}

inline std::array<double, 48> flat_shape(double v) {
    std::array<double, 48> s{};
    s.fill(v);
    return s;
}

// Fresh per-test scratch directory under the working directory.
inline std::string scratch_dir(const std::string& name) {
    namespace fs = std::filesystem;
    fs::path p = fs::path("scratch") / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

// Inverse-CDF Weibull sampler on the toolkit's own uniform stream.
inline std::vector<double> weibull_samples(double k, double lambda, std::size_t n,
                                           std::uint64_t seed) {
    windgrid::SplitMix64 rng(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_unit();
        out[i] = lambda * std::pow(-std::log1p(-u), 1.0 / k);
    }
    return out;
}

}  // namespace testutil
