#pragma once

#include "rsfp/density.hpp"
#include "rsfp/initial_data.hpp"
#include "rsfp/model.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rsfp {

struct MCOptions {
    std::size_t paths = 100000;
    double dt_sde = 0.01;
    std::uint64_t seed = 1;
    std::vector<double> save_times;  // multiples of dt_sde, ascending
};

/// Path states at the save times, stored [time][path]. Path k draws from its
/// own engine seeded by (seed, k), so results do not depend on how paths are
/// scheduled.
struct PathEnsemble {
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::size_t states = 0;
    double dt_sde = 0.0;
    std::vector<double> save_times;
    std::vector<double> x;
    std::vector<std::uint16_t> state;
    std::size_t unstable = 0;  // paths whose position overflowed (x stored as NaN)

    /// Fraction of paths in each state at save time ti.
    std::vector<double> occupancy(std::size_t ti) const;
};

/// Euler-Maruyama for dx = (b_i x + c_i) dt + sigma_i dW with a switch to
/// state j != i with probability Q(i, j) dt per step. `data` gives one row per
/// state; the row masses are the initial state probabilities. Throws
/// InputError when dt_sde * max|Q(i,i)| > 0.1 or the save times are not on
/// the step grid.
PathEnsemble mc_simulate(const DiscreteModel& dm, const InitialData& data, const MCOptions& options);

enum class Estimator { histogram, kde };

struct EstimateOptions {
    double lo = -10.0, hi = 10.0;
    std::size_t bins = 200;
    Estimator estimator = Estimator::histogram;
    double bandwidth = 0.0;  // kde only; 0 selects Silverman's rule per state
};

/// Per-state densities normalized so that the state masses sum to the
/// fraction of paths inside [lo, hi]. Histogram values sit at bin centres.
DensityField estimate_density(const PathEnsemble& ens, const EstimateOptions& options);

/// Seed, path count and step size as a JSON object.
std::string ensemble_meta_json(const PathEnsemble& ens);

/// Stream seed for path k: SplitMix64 applied to seed and k.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t k);

}  // namespace rsfp
