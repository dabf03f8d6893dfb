#include "rsfp/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsfp::simd {
namespace {

void gauss_accumulate(const double* x, std::size_t n, double mean, double inv_two_var,
                      double weight, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        out[i] += weight * std::exp(-d * d * inv_two_var);
    }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void drift_diffusion(const double* p, double* out, std::size_t n, double x0, double dx,
                     double slope, double offset, double diffusivity) {
    const double adv = 1.0 / (2.0 * dx);
    const double dif = diffusivity / (dx * dx);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? p[i - 1] : 0.0;
        const double right = i + 1 < n ? p[i + 1] : 0.0;
        const double xl = x0 + (static_cast<double>(i) - 1.0) * dx;
        const double xr = x0 + (static_cast<double>(i) + 1.0) * dx;
        const double flux = (slope * xr + offset) * right - (slope * xl + offset) * left;
        out[i] = -adv * flux + dif * (right - 2.0 * p[i] + left);
    }
}

void fourier_synthesis(const double* re, const double* im, std::size_t nmu, double mu0,
                       double dmu, const double* x, std::size_t nx, double* out) {
    for (std::size_t j = 0; j < nx; ++j) {
        const double xj = x[j];
        const double rot_c = std::cos(dmu * xj);
        const double rot_s = std::sin(dmu * xj);
        double zc = 0.0, zs = 0.0, acc = 0.0;
        for (std::size_t k = 0; k < nmu; ++k) {
            if (k % kAnchorStride == 0) {
                const double phase = (mu0 + static_cast<double>(k) * dmu) * xj;
                zc = std::cos(phase);
                zs = std::sin(phase);
            } else {
                const double nc = zc * rot_c - zs * rot_s;
                const double ns = zc * rot_s + zs * rot_c;
                zc = nc;
                zs = ns;
            }
            acc += re[k] * zc - im[k] * zs;
        }
        out[j] = acc;
    }
}

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double abs_diff_sum(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

double abs_diff_max(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double min(const double* x, std::size_t n) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = std::min(m, x[i]);
    return m;
}

constexpr KernelTable kScalar{
    gauss_accumulate, axpy, drift_diffusion, fourier_synthesis, sum, abs_diff_sum, abs_diff_max, min,
};

}  // namespace

const KernelTable& detail::scalar_table() { return kScalar; }

}  // namespace rsfp::simd
