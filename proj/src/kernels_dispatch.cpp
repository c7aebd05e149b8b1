#include <atomic>

#include "windgrid/errors.hpp"
#include "windgrid/kernels.hpp"

namespace windgrid::kernels {

namespace {

struct Dispatch {
    const detail::KernelTable* table;
    Backend backend;

    Dispatch() {
        if (const detail::KernelTable* t = detail::avx2_table()) {
            table = t;
            backend = Backend::avx2;
        } else {
            table = &detail::scalar_table;
            backend = Backend::scalar;
        }
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

bool backend_available(Backend b) {
    return b == Backend::scalar || detail::avx2_table() != nullptr;
}

void force_backend(Backend b) {
    if (!backend_available(b))
        throw Error::input("kernel backend not available on this CPU: " + backend_name(b));
    Dispatch& d = dispatch();
    d.backend = b;
    d.table = (b == Backend::avx2) ? detail::avx2_table() : &detail::scalar_table;
}

std::string backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

double sum(std::span<const double> x) { return dispatch().table->sum(x.data(), x.size()); }

std::pair<double, double> minmax(std::span<const double> x) {
    if (x.empty()) throw Error::input("minmax on empty range");
    double lo, hi;
    dispatch().table->minmax(x.data(), x.size(), &lo, &hi);
    return {lo, hi};
}

double max_abs(std::span<const double> x) { return dispatch().table->max_abs(x.data(), x.size()); }

std::size_t count_outside(std::span<const double> x, std::span<const double> lo,
                          std::span<const double> hi) {
    return dispatch().table->count_outside(x.data(), lo.data(), hi.data(), x.size());
}

std::size_t count_outside(std::span<const double> x, double lo, double hi) {
    return dispatch().table->count_outside_const(x.data(), lo, hi, x.size());
}

void accumulate_outside(std::span<const double> x, std::span<const double> lo,
                        std::span<const double> hi, std::span<std::int64_t> counts) {
    dispatch().table->accumulate_outside(x.data(), lo.data(), hi.data(), counts.data(), x.size());
}

void turbine_power(std::span<const double> speed_ms, std::span<double> out_mw, double cut_in,
                   double rated_speed, double cut_out, double rated_mw) {
    dispatch().table->turbine_power(speed_ms.data(), out_mw.data(), speed_ms.size(), cut_in,
                                    rated_speed, cut_out, rated_mw);
}

PowerSums weibull_power_sums(std::span<const double> log_x, double k, double shift) {
    PowerSums s;
    dispatch().table->weibull_power_sums(log_x.data(), log_x.size(), k, shift, &s.s0, &s.s1);
    return s;
}

}  // namespace windgrid::kernels
