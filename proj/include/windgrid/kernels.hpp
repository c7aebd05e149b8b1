#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>

// Data-parallel inner loops used across the toolkit. Every kernel has a
// scalar reference implementation and, on x86-64 with AVX2+FMA, a vector
// variant selected once at startup; force_backend() overrides the choice
// (equivalence tests run both). Vector reductions reassociate, so sums may
// differ from the scalar path by rounding only.

namespace windgrid::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_available(Backend b);
// Throws Error::input if the backend is not available on this CPU.
void force_backend(Backend b);
std::string backend_name(Backend b);

double sum(std::span<const double> x);

// {min, max}; requires non-empty input.
std::pair<double, double> minmax(std::span<const double> x);

double max_abs(std::span<const double> x);

// Count of elements strictly outside the closed band [lo, hi] (elementwise
// bounds). Boundary values are inside.
std::size_t count_outside(std::span<const double> x, std::span<const double> lo,
                          std::span<const double> hi);
std::size_t count_outside(std::span<const double> x, double lo, double hi);

// counts[i] += (x[i] outside [lo[i], hi[i]]); the accumulation form the
// violation scan uses to build per-bus tallies across cases.
void accumulate_outside(std::span<const double> x, std::span<const double> lo,
                        std::span<const double> hi, std::span<std::int64_t> counts);

// Piecewise wind-turbine curve applied to a speed array: 0 at/below cut_in
// and at/above cut_out, rated on [rated_speed, cut_out), linear ramp between.
void turbine_power(std::span<const double> speed_ms, std::span<double> out_mw,
                   double cut_in, double rated_speed, double cut_out, double rated_mw);

// Power sums for the Weibull profile likelihood: given log-samples and a
// shift m, returns s0 = sum(exp(k*(lx-m))) and s1 = sum(exp(k*(lx-m))*lx).
// The shift (normally max(lx)*k/k = max lx) keeps exp() in range; the
// s1/s0 ratio consumed by the fit is shift-invariant.
struct PowerSums {
    double s0 = 0.0;
    double s1 = 0.0;
};
PowerSums weibull_power_sums(std::span<const double> log_x, double k, double shift);

// Pointer-and-length forms of the same kernels, for callers holding raw
// buffers.
inline double sum(const double* x, std::size_t n) { return sum(std::span(x, n)); }
inline std::pair<double, double> minmax(const double* x, std::size_t n) {
    return minmax(std::span(x, n));
}
inline double max_abs(const double* x, std::size_t n) { return max_abs(std::span(x, n)); }
inline std::size_t count_outside(const double* x, const double* lo, const double* hi,
                                 std::size_t n) {
    return count_outside(std::span(x, n), std::span(lo, n), std::span(hi, n));
}
inline void turbine_power(const double* speed_ms, double* out_mw, std::size_t n, double cut_in,
                          double rated_speed, double cut_out, double rated_mw) {
    turbine_power(std::span(speed_ms, n), std::span(out_mw, n), cut_in, rated_speed, cut_out,
                  rated_mw);
}
inline PowerSums weibull_power_sums(const double* log_x, std::size_t n, double k, double shift) {
    return weibull_power_sums(std::span(log_x, n), k, shift);
}

// Implementation tables; tests reach the variants directly through these.
namespace detail {

struct KernelTable {
    double (*sum)(const double*, std::size_t);
    void (*minmax)(const double*, std::size_t, double*, double*);
    double (*max_abs)(const double*, std::size_t);
    std::size_t (*count_outside)(const double*, const double*, const double*, std::size_t);
    std::size_t (*count_outside_const)(const double*, double, double, std::size_t);
    void (*accumulate_outside)(const double*, const double*, const double*, std::int64_t*,
                               std::size_t);
    void (*turbine_power)(const double*, double*, std::size_t, double, double, double, double);
    void (*weibull_power_sums)(const double*, std::size_t, double, double, double*, double*);
};

extern const KernelTable scalar_table;
const KernelTable* avx2_table();  // nullptr when unsupported at build or run time

}  // namespace detail

}  // namespace windgrid::kernels
