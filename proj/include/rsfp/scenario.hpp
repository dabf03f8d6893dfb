#pragma once

#include "rsfp/closed_form.hpp"
#include "rsfp/density.hpp"
#include "rsfp/initial_data.hpp"
#include "rsfp/model.hpp"
#include "rsfp/spectral.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rsfp {

enum class Solver { spectral, closed_form, fd, mc };

Solver parse_solver(const std::string& name);
std::string solver_name(Solver s);

/// Which finite system the FD and Monte-Carlo oracles integrate:
///  - cell:  the cell masses of the continuous model (generator K^T / cells);
///  - state: the discrete model as given (generator Q).
enum class OracleRates { cell, state };

struct Scenario {
    std::string name = "custom";
    ContinuousModel model;
    std::optional<DiscreteModel> discrete;  // set when the model was given by a rate matrix
    InitialData data;
    Solver solver = Solver::spectral;
    std::vector<double> times;

    double L = 0.0;               // 0: from the solution reach
    std::size_t grid_nx = 801;    // output x points (spectral, closed_form)
    double dx = 0.05;             // FD spacing
    double dt = 0.0;              // FD step, 0: 0.9 of the CFL limit
    std::size_t s_cells = 0;      // s-samples at cell midpoints, 0: model cells
    SpectralOptions spectral;
    OracleRates oracle_rates = OracleRates::cell;
    std::size_t paths = 100000;
    std::uint64_t seed = 1;
    double dt_sde = 0.01;
    std::size_t bins = 0;         // MC histogram bins, 0: 10 per unit length
    std::string out;

    std::size_t cells() const;
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

/// Parses "key = value" lines ('#' starts a comment). Lists are comma or
/// whitespace separated, optionally in brackets. Throws ConfigError with the
/// line and key on any problem.
Scenario parse_config(std::istream& in);
Scenario load_config(const std::string& path);

/// Applies "key = value" overrides on top of a scenario (same keys as the
/// config file; reported as line 0).
void apply_overrides(Scenario& sc, const std::map<std::string, std::string>& overrides);

/// "fig1", "fig2", "fig3".
Scenario preset(const std::string& name);

/// The discrete system used by the FD and Monte-Carlo oracles and its
/// initial data (one row per state, masses summing to the total mass).
DiscreteModel oracle_model(const Scenario& sc);
InitialData oracle_data(const Scenario& sc);

/// Half-width of the output domain.
double domain_half_width(const Scenario& sc);

struct RunResult {
    DensityField field;
    std::string meta_json;               // mc only
    std::vector<std::string> notes;      // diagnostics worth printing
};

RunResult run_solver(const Scenario& sc, Solver solver);

/// Two-state and four-state parameter sets recognised in a scenario, if any.
std::optional<TwoStateParams> match_two_state(const Scenario& sc);
std::optional<FourStateParams> match_four_state(const Scenario& sc);

/// t,x,s,lower,upper for the sandwich bounds of uniform Gaussian data with
/// b < 0 (two-state models only).
void write_bounds_csv(std::ostream& os, const Scenario& sc);

}  // namespace rsfp
