#include "rsfp/error.hpp"
#include "rsfp/simd/kernels.hpp"

#include <atomic>
#include <cassert>

namespace rsfp::simd {
namespace {

bool cpu_has_avx2() {
#if defined(RSFP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect() { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

// -1: automatic
std::atomic<int> g_forced{-1};

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

std::optional<Isa> parse_isa(std::string_view name) {
    if (name == "scalar") return Isa::scalar;
    if (name == "avx2") return Isa::avx2;
    return std::nullopt;
}

bool isa_available(Isa isa) {
    if (isa == Isa::scalar) return true;
    static const bool avx2 = cpu_has_avx2() && detail::avx2_table() != nullptr;
    return avx2;
}

Isa active_isa() {
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) return static_cast<Isa>(forced);
    static const Isa detected = detect();
    return detected;
}

void force_isa(std::optional<Isa> isa) {
    if (isa && !isa_available(*isa))
        throw InputError("instruction set '" + std::string(isa_name(*isa)) + "' is not available on this CPU");
    g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

const KernelTable& kernels_for(Isa isa) {
    if (isa == Isa::avx2 && isa_available(Isa::avx2)) return *detail::avx2_table();
    return detail::scalar_table();
}

const KernelTable& kernels() { return kernels_for(active_isa()); }

void gauss_accumulate(std::span<const double> x, double mean, double inv_two_var, double weight,
                      std::span<double> out) {
    assert(x.size() == out.size());
    kernels().gauss_accumulate(x.data(), x.size(), mean, inv_two_var, weight, out.data());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    kernels().axpy(a, x.data(), y.data(), x.size());
}

void drift_diffusion(std::span<const double> p, std::span<double> out, double x0, double dx,
                     double slope, double offset, double diffusivity) {
    assert(p.size() == out.size());
    kernels().drift_diffusion(p.data(), out.data(), p.size(), x0, dx, slope, offset, diffusivity);
}

void fourier_synthesis(std::span<const double> re, std::span<const double> im, double mu0,
                       double dmu, std::span<const double> x, std::span<double> out) {
    assert(re.size() == im.size() && x.size() == out.size());
    kernels().fourier_synthesis(re.data(), im.data(), re.size(), mu0, dmu, x.data(), x.size(), out.data());
}

double sum(std::span<const double> x) { return kernels().sum(x.data(), x.size()); }

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    return kernels().abs_diff_sum(a.data(), b.data(), a.size());
}

double abs_diff_max(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    return kernels().abs_diff_max(a.data(), b.data(), a.size());
}

double min(std::span<const double> x) { return kernels().min(x.data(), x.size()); }

}  // namespace rsfp::simd
