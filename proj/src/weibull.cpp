#include <algorithm>
#include <cmath>
#include <vector>

#include "windgrid/errors.hpp"
#include "windgrid/kernels.hpp"
#include "windgrid/wind_profiles.hpp"

namespace windgrid {

namespace {

// Profile-likelihood score whose root is the ML shape parameter:
//   g(k) = 1/k + mean(ln x) - sum(x^k ln x) / sum(x^k)
// Power sums are evaluated with the max-log shift so x^k never overflows;
// the shift cancels in the ratio.
double score(double k, const std::vector<double>& log_x, double mean_log, double max_log) {
    const kernels::PowerSums sums =
        kernels::weibull_power_sums(log_x.data(), log_x.size(), k, max_log);
    return 1.0 / k + mean_log - sums.s1 / sums.s0;
}

}  // namespace

WeibullFit fit_weibull(std::span<const double> samples, std::size_t min_samples) {
    std::vector<double> log_x;
    log_x.reserve(samples.size());
    for (double v : samples)
        if (std::isfinite(v) && v > 0.0) log_x.push_back(std::log(v));
    if (log_x.size() < min_samples)
        throw Error::input("weibull fit requires at least " + std::to_string(min_samples) +
                           " positive samples, got " + std::to_string(log_x.size()));

    const auto [lo_log, hi_log] = kernels::minmax(log_x.data(), log_x.size());
    if (lo_log == hi_log)
        throw Error::numerical("weibull fit is degenerate: all samples are equal");
    const double mean_log = kernels::sum(log_x.data(), log_x.size()) /
                            static_cast<double>(log_x.size());
    const double max_log = hi_log;

    // g is strictly decreasing in k: bracket a sign change, then bisect.
    double k_lo = 1e-3;
    double g_lo = score(k_lo, log_x, mean_log, max_log);
    if (g_lo <= 0.0) throw Error::numerical("weibull fit found no interior optimum");
    double k_hi = 1.0;
    double g_hi = score(k_hi, log_x, mean_log, max_log);
    while (g_hi > 0.0) {
        k_hi *= 2.0;
        if (k_hi > 1e4) throw Error::numerical("weibull fit found no interior optimum");
        g_hi = score(k_hi, log_x, mean_log, max_log);
    }

    for (int it = 0; it < 200; ++it) {
        const double k_mid = 0.5 * (k_lo + k_hi);
        if ((k_hi - k_lo) <= 1e-10 * k_mid) break;
        const double g_mid = score(k_mid, log_x, mean_log, max_log);
        if (g_mid > 0.0) {
            k_lo = k_mid;
            g_lo = g_mid;
        } else {
            k_hi = k_mid;
            g_hi = g_mid;
        }
    }
    const double k = 0.5 * (k_lo + k_hi);

    // lambda = (sum(x^k) / n)^(1/k); with s0 = sum(exp(k (lx - m))) the log
    // of the power sum is log(s0) + k m.
    const kernels::PowerSums sums =
        kernels::weibull_power_sums(log_x.data(), log_x.size(), k, max_log);
    const double log_lambda =
        (std::log(sums.s0) + k * max_log - std::log(static_cast<double>(log_x.size()))) / k;

    WeibullFit fit;
    fit.shape = k;
    fit.scale = std::exp(log_lambda);
    fit.sample_count = log_x.size();
    fit.zero_count = samples.size() - log_x.size();
    if (!std::isfinite(fit.shape) || !std::isfinite(fit.scale) || fit.scale <= 0.0)
        throw Error::numerical("weibull fit did not converge to finite parameters");
    return fit;
}

}  // namespace windgrid
