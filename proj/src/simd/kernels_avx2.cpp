// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// is only entered after the dispatcher has checked the CPU feature bits.

#include "rsfp/simd/kernels.hpp"

#if defined(RSFP_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsfp::simd {
namespace {

// exp(x) for x <= 0. Cody-Waite reduction x = n ln2 + r, |r| <= ln2/2, then a
// degree-13 Taylor polynomial (truncation error below 1e-17 relative).
// Arguments below -708 flush to zero.
inline __m256d exp_nonpositive(__m256d x) {
    const __m256d lo = _mm256_set1_pd(-708.0);
    const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    x = _mm256_max_pd(x, lo);

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    // 2^n via the exponent field; n is an integer in [-1022, 0].
    const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
    const __m256i ni = _mm256_castpd_si256(_mm256_add_pd(n, magic));
    const __m256i bias = _mm256_set1_epi64x(1023);
    const __m256i biased = _mm256_add_epi64(_mm256_sub_epi64(ni, _mm256_castpd_si256(magic)), bias);
    const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(biased, 52));

    return _mm256_andnot_pd(underflow, _mm256_mul_pd(p, scale));
}

inline double hsum(__m256d v) {
    alignas(32) double t[4];
    _mm256_store_pd(t, v);
    return (t[0] + t[1]) + (t[2] + t[3]);
}

void gauss_accumulate(const double* x, std::size_t n, double mean, double inv_two_var,
                      double weight, double* out) {
    const __m256d vm = _mm256_set1_pd(mean);
    const __m256d vk = _mm256_set1_pd(-inv_two_var);
    const __m256d vw = _mm256_set1_pd(weight);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vm);
        const __m256d e = exp_nonpositive(_mm256_mul_pd(_mm256_mul_pd(d, d), vk));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vw, e, _mm256_loadu_pd(out + i)));
    }
    for (; i < n; ++i) {
        const double d = x[i] - mean;
        out[i] += weight * std::exp(-d * d * inv_two_var);
    }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

inline double stencil_point(const double* p, std::size_t n, std::size_t i, double x0, double dx,
                            double slope, double offset, double adv, double dif) {
    const double left = i > 0 ? p[i - 1] : 0.0;
    const double right = i + 1 < n ? p[i + 1] : 0.0;
    const double xl = x0 + (static_cast<double>(i) - 1.0) * dx;
    const double xr = x0 + (static_cast<double>(i) + 1.0) * dx;
    const double flux = (slope * xr + offset) * right - (slope * xl + offset) * left;
    return -adv * flux + dif * (right - 2.0 * p[i] + left);
}

void drift_diffusion(const double* p, double* out, std::size_t n, double x0, double dx,
                     double slope, double offset, double diffusivity) {
    const double adv = 1.0 / (2.0 * dx);
    const double dif = diffusivity / (dx * dx);
    if (n < 6) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = stencil_point(p, n, i, x0, dx, slope, offset, adv, dif);
        return;
    }
    out[0] = stencil_point(p, n, 0, x0, dx, slope, offset, adv, dif);

    const __m256d vadv = _mm256_set1_pd(-adv);
    const __m256d vdif = _mm256_set1_pd(dif);
    const __m256d vslope = _mm256_set1_pd(slope);
    const __m256d voff = _mm256_set1_pd(offset);
    const __m256d vx0 = _mm256_set1_pd(x0);
    const __m256d vdx = _mm256_set1_pd(dx);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

    std::size_t i = 1;
    for (; i + 4 <= n - 1; i += 4) {
        const __m256d pl = _mm256_loadu_pd(p + i - 1);
        const __m256d pc = _mm256_loadu_pd(p + i);
        const __m256d pr = _mm256_loadu_pd(p + i + 1);
        const __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane);
        const __m256d xl = _mm256_fmadd_pd(_mm256_sub_pd(idx, _mm256_set1_pd(1.0)), vdx, vx0);
        const __m256d xr = _mm256_fmadd_pd(_mm256_add_pd(idx, _mm256_set1_pd(1.0)), vdx, vx0);
        const __m256d fr = _mm256_mul_pd(_mm256_fmadd_pd(vslope, xr, voff), pr);
        const __m256d fl = _mm256_mul_pd(_mm256_fmadd_pd(vslope, xl, voff), pl);
        const __m256d lap = _mm256_add_pd(_mm256_fnmadd_pd(two, pc, pr), pl);
        const __m256d r = _mm256_fmadd_pd(vdif, lap, _mm256_mul_pd(vadv, _mm256_sub_pd(fr, fl)));
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) out[i] = stencil_point(p, n, i, x0, dx, slope, offset, adv, dif);
}

void fourier_synthesis(const double* re, const double* im, std::size_t nmu, double mu0,
                       double dmu, const double* x, std::size_t nx, double* out) {
    std::size_t j = 0;
    alignas(32) double ac[4], as[4], rc[4], rs[4];
    for (; j + 4 <= nx; j += 4) {
        for (int l = 0; l < 4; ++l) {
            rc[l] = std::cos(dmu * x[j + l]);
            rs[l] = std::sin(dmu * x[j + l]);
        }
        const __m256d vrc = _mm256_load_pd(rc);
        const __m256d vrs = _mm256_load_pd(rs);
        __m256d zc = _mm256_setzero_pd(), zs = _mm256_setzero_pd(), acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < nmu; ++k) {
            if (k % kAnchorStride == 0) {
                const double mu = mu0 + static_cast<double>(k) * dmu;
                for (int l = 0; l < 4; ++l) {
                    const double phase = mu * x[j + l];
                    ac[l] = std::cos(phase);
                    as[l] = std::sin(phase);
                }
                zc = _mm256_load_pd(ac);
                zs = _mm256_load_pd(as);
            } else {
                const __m256d nc = _mm256_fmsub_pd(zc, vrc, _mm256_mul_pd(zs, vrs));
                const __m256d ns = _mm256_fmadd_pd(zc, vrs, _mm256_mul_pd(zs, vrc));
                zc = nc;
                zs = ns;
            }
            acc = _mm256_fmadd_pd(_mm256_set1_pd(re[k]), zc, acc);
            acc = _mm256_fnmadd_pd(_mm256_set1_pd(im[k]), zs, acc);
        }
        _mm256_storeu_pd(out + j, acc);
    }
    if (j < nx) detail::scalar_table().fourier_synthesis(re, im, nmu, mu0, dmu, x + j, nx - j, out + j);
}

double sum(const double* x, std::size_t n) {
    __m256d a = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) a = _mm256_add_pd(a, _mm256_loadu_pd(x + i));
    double s = hsum(a);
    for (; i < n; ++i) s += x[i];
    return s;
}

double abs_diff_sum(const double* a, const double* b, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
    double s = hsum(acc);
    for (; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

double abs_diff_max(const double* a, const double* b, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
    alignas(32) double t[4];
    _mm256_store_pd(t, acc);
    double m = std::max(std::max(t[0], t[1]), std::max(t[2], t[3]));
    for (; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double min(const double* x, std::size_t n) {
    __m256d acc = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(x + i));
    alignas(32) double t[4];
    _mm256_store_pd(t, acc);
    double m = std::min(std::min(t[0], t[1]), std::min(t[2], t[3]));
    for (; i < n; ++i) m = std::min(m, x[i]);
    return m;
}

constexpr KernelTable kAvx2{
    gauss_accumulate, axpy, drift_diffusion, fourier_synthesis, sum, abs_diff_sum, abs_diff_max, min,
};

}  // namespace

const KernelTable* detail::avx2_table() { return &kAvx2; }

}  // namespace rsfp::simd

#else

namespace rsfp::simd {
const KernelTable* detail::avx2_table() { return nullptr; }
}  // namespace rsfp::simd

#endif
