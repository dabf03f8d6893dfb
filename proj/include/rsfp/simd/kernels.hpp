#pragma once

// Data-parallel inner loops used by the solvers.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is chosen once at runtime from the CPU
// feature bits; force_isa() pins a variant (tests and the --isa flag).

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace rsfp::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

struct KernelTable {
    // out[i] += weight * exp(-(x[i] - mean)^2 * inv_two_var)
    void (*gauss_accumulate)(const double* x, std::size_t n, double mean,
                             double inv_two_var, double weight, double* out);

    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);

    // out[i] = -(F[i+1] - F[i-1]) / (2 dx) + diffusivity * (p[i+1] - 2 p[i] + p[i-1]) / dx^2
    // with F[k] = (slope * (x0 + k dx) + offset) * p[k] and p[-1] = p[n] = 0.
    void (*drift_diffusion)(const double* p, double* out, std::size_t n, double x0,
                            double dx, double slope, double offset, double diffusivity);

    // out[j] = sum_k re[k] cos(mu_k x[j]) - im[k] sin(mu_k x[j]),  mu_k = mu0 + k dmu.
    // Phases advance by complex rotation, re-anchored with exact sin/cos every
    // kAnchorStride steps.
    void (*fourier_synthesis)(const double* re, const double* im, std::size_t nmu,
                              double mu0, double dmu, const double* x, std::size_t nx,
                              double* out);

    double (*sum)(const double* x, std::size_t n);
    double (*abs_diff_sum)(const double* a, const double* b, std::size_t n);
    double (*abs_diff_max)(const double* a, const double* b, std::size_t n);
    double (*min)(const double* x, std::size_t n);
};

inline constexpr std::size_t kAnchorStride = 32;

bool isa_available(Isa isa);

/// Best available variant, unless pinned by force_isa().
Isa active_isa();

/// Pin a variant (nullopt restores automatic selection). Throws InputError if
/// the variant is not available on this CPU.
void force_isa(std::optional<Isa> isa);

const KernelTable& kernels();
const KernelTable& kernels_for(Isa isa);

// Span front-ends over the active table.

void gauss_accumulate(std::span<const double> x, double mean, double inv_two_var,
                      double weight, std::span<double> out);
void axpy(double a, std::span<const double> x, std::span<double> y);
void drift_diffusion(std::span<const double> p, std::span<double> out, double x0, double dx,
                     double slope, double offset, double diffusivity);
void fourier_synthesis(std::span<const double> re, std::span<const double> im, double mu0,
                       double dmu, std::span<const double> x, std::span<double> out);
double sum(std::span<const double> x);
double abs_diff_sum(std::span<const double> a, std::span<const double> b);
double abs_diff_max(std::span<const double> a, std::span<const double> b);
double min(std::span<const double> x);

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
}  // namespace detail

}  // namespace rsfp::simd
