#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "windgrid/timeseries.hpp"

namespace windgrid {

// Synthetic measurement generator used for bundled demos and self-contained
// tests: a seasonal sinusoidal daily shape multiplied by stationary lognormal
// AR(1) noise, fully determined by the seed. Leap days are not generated, so
// the synthetic calendar matches the repaired-series convention directly.

// Season-indexed arrays run winter, spring, summer, fall.
// The seasonal spread is deliberately modest: scan scenarios rescale network
// wind injections by ratios of these seasonal envelopes, and a spread much
// wider than ~25% around the mean drives the most pessimistic scenarios into
// genuine voltage collapse on the bundled network.
struct SynthWindParams {
    std::array<double, 4> level_mw{300.0, 330.0, 345.0, 310.0};  // daily mean scale
    std::array<double, 4> diurnal_amp{0.27, 0.30, 0.32, 0.28};   // sinusoid amplitude
    std::array<int, 4> peak_slot{20, 26, 30, 24};                // slot of the diurnal crest
    std::array<double, 4> log_sigma{0.11, 0.14, 0.15, 0.12};     // stationary log-noise std
    double ar_rho = 0.995;  // AR(1) coefficient per 30-minute step
};

HalfHourlySeries synth_wind_power(std::uint64_t seed, int first_year, int year_count,
                                  const SynthWindParams& params = {});

struct SynthSpeedParams {
    double base_ms = 8.5;
    std::array<double, 4> season_scale{0.95, 1.05, 1.10, 0.95};
    double diurnal_amp = 0.20;
    int peak_slot = 28;
    double log_sigma = 0.30;
    double ar_rho = 0.99;
};

HalfHourlySeries synth_wind_speed(std::uint64_t seed, int first_year, int year_count,
                                  const SynthSpeedParams& params = {});

// Writes a series as a `timestamp,value` CSV readable by the wind ingester.
void write_series_csv(const HalfHourlySeries& series, const std::string& path);

}  // namespace windgrid
