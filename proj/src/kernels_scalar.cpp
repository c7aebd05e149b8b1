#include <cmath>
#include <cstddef>
#include <cstdint>

#include "windgrid/kernels.hpp"

// Reference implementations. These define the semantics the vector variants
// are equivalence-tested against.

namespace windgrid::kernels::detail {

namespace {

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void minmax_scalar(const double* x, std::size_t n, double* mn, double* mx) {
    double lo = x[0], hi = x[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (x[i] < lo) lo = x[i];
        if (x[i] > hi) hi = x[i];
    }
    *mn = lo;
    *mx = hi;
}

double max_abs_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

std::size_t count_outside_scalar(const double* x, const double* lo, const double* hi,
                                 std::size_t n) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += (x[i] < lo[i]) | (x[i] > hi[i]);
    return c;
}

std::size_t count_outside_const_scalar(const double* x, double lo, double hi, std::size_t n) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += (x[i] < lo) | (x[i] > hi);
    return c;
}

void accumulate_outside_scalar(const double* x, const double* lo, const double* hi,
                               std::int64_t* counts, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        counts[i] += static_cast<std::int64_t>((x[i] < lo[i]) | (x[i] > hi[i]));
}

void turbine_power_scalar(const double* ws, double* out, std::size_t n, double v_ci, double v_r,
                          double v_co, double rated) {
    // Division, not a reciprocal multiply: the ramp must hit `rated` exactly
    // at v_r ((v_r-v_ci)/(v_r-v_ci) == 1.0).
    const double ramp = v_r - v_ci;
    for (std::size_t i = 0; i < n; ++i) {
        double p = rated * ((ws[i] - v_ci) / ramp);
        if (p < 0.0) p = 0.0;
        if (p > rated) p = rated;
        out[i] = (ws[i] < v_co) ? p : 0.0;
    }
}

void weibull_power_sums_scalar(const double* lx, std::size_t n, double k, double shift,
                               double* s0, double* s1) {
    double a0 = 0.0, a1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = std::exp(k * (lx[i] - shift));
        a0 += w;
        a1 += w * lx[i];
    }
    *s0 = a0;
    *s1 = a1;
}

}  // namespace

const KernelTable scalar_table = {
    sum_scalar,
    minmax_scalar,
    max_abs_scalar,
    count_outside_scalar,
    count_outside_const_scalar,
    accumulate_outside_scalar,
    turbine_power_scalar,
    weibull_power_sums_scalar,
};

}  // namespace windgrid::kernels::detail
