#include "rsfp/fd.hpp"

#include "rsfp/error.hpp"
#include "rsfp/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rsfp {

std::vector<double> FDGrid::points() const {
    std::vector<double> x(nx);
    const double h = dx();
    for (std::size_t i = 0; i < nx; ++i) x[i] = -L + static_cast<double>(i + 1) * h;
    return x;
}

double FDGrid::cfl_limit(const DiscreteModel& dm, double L, double dx) {
    double sig2 = 0.0, speed = 0.0;
    for (std::size_t i = 0; i < dm.states(); ++i) {
        sig2 = std::max(sig2, dm.sigma[i] * dm.sigma[i]);
        speed = std::max(speed, std::abs(dm.b[i]) * L + std::abs(dm.c[i]));
    }
    double limit = 0.5 * dx * dx / sig2;
    if (speed > 0.0) limit = std::min(limit, dx / speed);
    return limit;
}

namespace {

double horizon_reach(const DiscreteModel& dm, const InitialData& data, double T) {
    double reach = 0.0;
    constexpr int samples = 64;
    for (std::size_t i = 0; i < dm.states(); ++i) {
        const double b = dm.b[i], c = dm.c[i], s2 = dm.sigma[i] * dm.sigma[i];
        for (const auto& comp : data.components) {
            reach = std::max(reach, std::abs(comp.mean) + 8.0 * std::sqrt(comp.var));
            for (int k = 1; k <= samples; ++k) {
                const double t = T * k / samples;
                const double e = std::exp(b * t);
                const double g1 = b == 0.0 ? t : std::expm1(b * t) / b;
                const double g2 = b == 0.0 ? t : std::expm1(2.0 * b * t) / (2.0 * b);
                const double mean = comp.mean * e + c * g1;
                const double var = comp.var * e * e + s2 * g2;
                reach = std::max(reach, std::abs(mean) + 8.0 * std::sqrt(var));
            }
        }
    }
    return reach + 2.0;
}

}  // namespace

FDGrid make_fd_grid(const DiscreteModel& dm, const InitialData& data, double T, double dx) {
    const ValidationReport v = validate(dm);
    if (!v.ok()) throw InputError("invalid discrete model: " + v.summary());
    if (!(dx > 0.0)) throw InputError("grid spacing must be positive");
    FDGrid g;
    const double reach = horizon_reach(dm, data, T);
    g.nx = static_cast<std::size_t>(std::ceil(2.0 * reach / dx)) - 1;
    g.L = 0.5 * static_cast<double>(g.nx + 1) * dx;
    g.dt = 0.9 * FDGrid::cfl_limit(dm, g.L, dx);
    return g;
}

DensityField fd_solve(const DiscreteModel& dm, const InitialData& data, const FDGrid& grid,
                      const std::vector<double>& times, FDStats* stats) {
    const ValidationReport v = validate(dm);
    if (!v.ok()) throw InputError("invalid discrete model: " + v.summary());
    const std::size_t S = dm.states();
    if (data.cells() != S) throw InputError("initial data must have one row per state");
    if (grid.nx < 3) throw InputError("FD grid needs at least three interior points");
    if (times.empty()) throw InputError("no output times");
    for (std::size_t i = 0; i < times.size(); ++i)
        if (!(times[i] >= 0.0) || (i && times[i] < times[i - 1])) throw InputError("output times must be sorted and non-negative");
    const double dx = grid.dx();
    const double limit = FDGrid::cfl_limit(dm, grid.L, dx);
    if (!(grid.dt > 0.0) || grid.dt > limit)
        throw InputError("time step " + std::to_string(grid.dt) + " violates the CFL limit " + std::to_string(limit));

    const std::size_t n = grid.nx;
    const std::vector<double> x = grid.points();
    std::vector<double> idx(S), ones(S, 1.0);
    for (std::size_t j = 0; j < S; ++j) idx[j] = static_cast<double>(j);
    DensityField out(times, x, idx, ones, true);

    const double mollifier = 9.0 * dx * dx;
    std::vector<double> p(S * n, 0.0);
    for (std::size_t j = 0; j < S; ++j) {
        std::span<double> row(p.data() + j * n, n);
        for (std::size_t c = 0; c < data.components.size(); ++c) {
            const double w = data.weights(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
            if (w == 0.0) continue;
            const Component& comp = data.components[c];
            const double var = comp.is_delta() ? mollifier : comp.var;
            simd::gauss_accumulate(x, comp.mean, 1.0 / (2.0 * var), w / std::sqrt(2.0 * std::numbers::pi * var), row);
        }
    }

    auto rhs = [&](const std::vector<double>& in, std::vector<double>& res) {
        for (std::size_t i = 0; i < S; ++i) {
            std::span<const double> pi(in.data() + i * n, n);
            std::span<double> ri(res.data() + i * n, n);
            simd::drift_diffusion(pi, ri, x.front(), dx, dm.b[i], dm.c[i], 0.5 * dm.sigma[i] * dm.sigma[i]);
            for (std::size_t j = 0; j < S; ++j) {
                const double q = dm.Q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
                if (q != 0.0) simd::axpy(q, std::span<const double>(in.data() + j * n, n), ri);
            }
        }
    };

    std::vector<double> k1(p.size()), k2(p.size()), k3(p.size()), k4(p.size()), tmp(p.size());
    auto step = [&](double h) {
        rhs(p, k1);
        tmp = p;
        simd::axpy(0.5 * h, k1, tmp);
        rhs(tmp, k2);
        tmp = p;
        simd::axpy(0.5 * h, k2, tmp);
        rhs(tmp, k3);
        tmp = p;
        simd::axpy(h, k3, tmp);
        rhs(tmp, k4);
        simd::axpy(h / 6.0, k1, p);
        simd::axpy(h / 3.0, k2, p);
        simd::axpy(h / 3.0, k3, p);
        simd::axpy(h / 6.0, k4, p);
    };

    FDStats st;
    double t = 0.0;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const double span = times[ti] - t;
        if (span > 0.0) {
            const auto steps = static_cast<std::size_t>(std::ceil(span / grid.dt - 1e-9));
            const double h = span / static_cast<double>(steps);
            for (std::size_t k = 0; k < steps; ++k) {
                step(h);
                for (std::size_t j = 0; j < S; ++j)
                    st.leak = std::max({st.leak, std::abs(p[j * n]), std::abs(p[j * n + n - 1])});
            }
            st.steps += steps;
            if (!std::isfinite(simd::sum(p))) throw NumericalError("FD solution became non-finite");
        }
        t = times[ti];
        for (std::size_t j = 0; j < S; ++j) std::copy_n(p.data() + j * n, n, out.slice(ti, j).data());
    }
    const double m0 = out.mass(0);
    for (std::size_t ti = 1; ti < times.size(); ++ti) st.mass_drift = std::max(st.mass_drift, std::abs(out.mass(ti) - m0));
    if (stats) *stats = st;
    if (st.leak > kLeakTolerance)
        throw NumericalError("density reached the boundary (" + std::to_string(st.leak) + " at x = +-" + std::to_string(grid.L) +
                             "); enlarge L");
    return out;
}

}  // namespace rsfp
