#include <cmath>
#include <cstddef>
#include <cstdint>

#include "windgrid/kernels.hpp"

// AVX2+FMA variants. Tails fall back to the scalar formulas; reductions use
// split accumulators, so results may differ from the reference path by
// reassociation rounding only (the equivalence tests pin the tolerance).

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace windgrid::kernels::detail {

namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_min_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_min_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

void minmax_avx2(const double* x, std::size_t n, double* mn, double* mx) {
    double lo, hi;
    std::size_t i = 0;
    if (n >= 4) {
        __m256d vlo = _mm256_loadu_pd(x);
        __m256d vhi = vlo;
        for (i = 4; i + 4 <= n; i += 4) {
            __m256d v = _mm256_loadu_pd(x + i);
            vlo = _mm256_min_pd(vlo, v);
            vhi = _mm256_max_pd(vhi, v);
        }
        lo = hmin(vlo);
        hi = hmax(vhi);
    } else {
        lo = hi = x[0];
        i = 1;
    }
    for (; i < n; ++i) {
        if (x[i] < lo) lo = x[i];
        if (x[i] > hi) hi = x[i];
    }
    *mn = lo;
    *mx = hi;
}

double max_abs_avx2(const double* x, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(x + i));
        vm = _mm256_max_pd(vm, v);
    }
    double m = hmax(vm);
    for (; i < n; ++i) {
        double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

std::size_t count_outside_avx2(const double* x, const double* lo, const double* hi,
                               std::size_t n) {
    std::size_t c = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d below = _mm256_cmp_pd(v, _mm256_loadu_pd(lo + i), _CMP_LT_OQ);
        __m256d above = _mm256_cmp_pd(v, _mm256_loadu_pd(hi + i), _CMP_GT_OQ);
        c += static_cast<std::size_t>(
            _mm_popcnt_u32(static_cast<unsigned>(_mm256_movemask_pd(_mm256_or_pd(below, above)))));
    }
    for (; i < n; ++i) c += (x[i] < lo[i]) | (x[i] > hi[i]);
    return c;
}

std::size_t count_outside_const_avx2(const double* x, double lo, double hi, std::size_t n) {
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    std::size_t c = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d below = _mm256_cmp_pd(v, vlo, _CMP_LT_OQ);
        __m256d above = _mm256_cmp_pd(v, vhi, _CMP_GT_OQ);
        c += static_cast<std::size_t>(
            _mm_popcnt_u32(static_cast<unsigned>(_mm256_movemask_pd(_mm256_or_pd(below, above)))));
    }
    for (; i < n; ++i) c += (x[i] < lo) | (x[i] > hi);
    return c;
}

void accumulate_outside_avx2(const double* x, const double* lo, const double* hi,
                             std::int64_t* counts, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d below = _mm256_cmp_pd(v, _mm256_loadu_pd(lo + i), _CMP_LT_OQ);
        __m256d above = _mm256_cmp_pd(v, _mm256_loadu_pd(hi + i), _CMP_GT_OQ);
        __m256i mask = _mm256_castpd_si256(_mm256_or_pd(below, above));  // -1 per hit
        __m256i acc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(counts + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(counts + i),
                            _mm256_sub_epi64(acc, mask));
    }
    for (; i < n; ++i) counts[i] += static_cast<std::int64_t>((x[i] < lo[i]) | (x[i] > hi[i]));
}

void turbine_power_avx2(const double* ws, double* out, std::size_t n, double v_ci, double v_r,
                        double v_co, double rated) {
    const __m256d vci = _mm256_set1_pd(v_ci);
    const __m256d vco = _mm256_set1_pd(v_co);
    const __m256d vrated = _mm256_set1_pd(rated);
    const __m256d vramp = _mm256_set1_pd(v_r - v_ci);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(ws + i);
        __m256d p = _mm256_mul_pd(vrated, _mm256_div_pd(_mm256_sub_pd(v, vci), vramp));
        p = _mm256_min_pd(_mm256_max_pd(p, zero), vrated);
        __m256d running = _mm256_cmp_pd(v, vco, _CMP_LT_OQ);
        _mm256_storeu_pd(out + i, _mm256_and_pd(p, running));
    }
    const double ramp = v_r - v_ci;
    for (; i < n; ++i) {
        double p = rated * ((ws[i] - v_ci) / ramp);
        if (p < 0.0) p = 0.0;
        if (p > rated) p = rated;
        out[i] = (ws[i] < v_co) ? p : 0.0;
    }
}

// exp() on 4 doubles, Cephes-style rational approximation with two-part
// ln(2) argument reduction; ~2 ulp over the clamped domain.
__m256d exp_pd(__m256d x) {
    const __m256d max_x = _mm256_set1_pd(709.782712893384);
    const __m256d min_x = _mm256_set1_pd(-708.396418532264);
    __m256d underflow = _mm256_cmp_pd(x, min_x, _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, min_x), max_x);

    const __m256d log2e = _mm256_set1_pd(1.44269504088896340736);
    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);

    __m256d rr = _mm256_mul_pd(r, r);
    __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
    p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300e-2));
    p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910e-1));
    p = _mm256_mul_pd(p, r);
    __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
    q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192e-3));
    q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766e-1));
    q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.0));
    __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

    // scale by 2^n through the exponent field; n is within [-1022, 1024]
    __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    __m256d scale =
        _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52));
    e = _mm256_mul_pd(e, scale);
    return _mm256_andnot_pd(underflow, e);
}

void weibull_power_sums_avx2(const double* lx, std::size_t n, double k, double shift,
                             double* s0, double* s1) {
    const __m256d vk = _mm256_set1_pd(k);
    const __m256d vshift = _mm256_set1_pd(shift);
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(lx + i);
        __m256d w = exp_pd(_mm256_mul_pd(vk, _mm256_sub_pd(v, vshift)));
        a0 = _mm256_add_pd(a0, w);
        a1 = _mm256_fmadd_pd(w, v, a1);
    }
    double r0 = hsum(a0), r1 = hsum(a1);
    for (; i < n; ++i) {
        double w = std::exp(k * (lx[i] - shift));
        r0 += w;
        r1 += w * lx[i];
    }
    *s0 = r0;
    *s1 = r1;
}

const KernelTable avx2_table_v = {
    sum_avx2,
    minmax_avx2,
    max_abs_avx2,
    count_outside_avx2,
    count_outside_const_avx2,
    accumulate_outside_avx2,
    turbine_power_avx2,
    weibull_power_sums_avx2,
};

}  // namespace

const KernelTable* avx2_table() {
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &avx2_table_v;
    return nullptr;
}

}  // namespace windgrid::kernels::detail

#else  // non-x86 or AVX2 not enabled for this TU

namespace windgrid::kernels::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace windgrid::kernels::detail

#endif
