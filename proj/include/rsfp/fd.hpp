#pragma once

#include "rsfp/density.hpp"
#include "rsfp/initial_data.hpp"
#include "rsfp/model.hpp"

#include <cstddef>
#include <vector>

namespace rsfp {

/// Interior points x_i = -L + (i + 1) dx, i < nx, with dx = 2L / (nx + 1) and
/// zero density at +-L.
struct FDGrid {
    double L = 0.0;
    std::size_t nx = 0;
    double dt = 0.0;

    double dx() const noexcept { return 2.0 * L / static_cast<double>(nx + 1); }
    std::vector<double> points() const;

    /// Largest stable step: min(0.5 dx^2 / max sigma^2, dx / max|b x + c|).
    static double cfl_limit(const DiscreteModel& dm, double L, double dx);
};

/// Grid for horizon T with spacing close to dx. L covers every initial mean
/// plus the drift and 8 standard deviations of each state's law up to T,
/// plus a margin of 2; dt is 0.9 of the CFL limit.
FDGrid make_fd_grid(const DiscreteModel& dm, const InitialData& data, double T, double dx);

struct FDStats {
    std::size_t steps = 0;
    double leak = 0.0;        // largest |p| seen at the outermost interior points
    double mass_drift = 0.0;  // max |mass(t) - mass(0)|
};

inline constexpr double kLeakTolerance = 1e-12;

/// Method of lines for the forward system of `dm`: central differences for
/// -((b x + c) p)_x + 1/2 sigma^2 p_xx, coupling through Q^T, classic RK4.
/// `data` holds one row per state; point masses are replaced by Gaussians of
/// standard deviation 3 dx. Throws InputError on a CFL violation and
/// NumericalError when density reaches the boundary.
DensityField fd_solve(const DiscreteModel& dm, const InitialData& data, const FDGrid& grid,
                      const std::vector<double>& times, FDStats* stats = nullptr);

}  // namespace rsfp
