#pragma once

#include "rsfp/basis.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace rsfp {

/// Finite-state switching diffusion
///   dx = (b_i x + c_i) dt + sigma_i dW,   state i jumps to j at rate Q(i, j).
///
/// Q is stored in generator orientation (rows = source state, row sums zero).
/// The forward equation couples densities through Q^T:
///   p_i' = sum_j Q(j, i) p_j - ((b_i x + c_i) p_i)_x + 1/2 sigma_i^2 (p_i)_xx.
struct DiscreteModel {
    Eigen::MatrixXd Q;
    std::vector<double> b, c, sigma;

    std::size_t states() const noexcept { return static_cast<std::size_t>(Q.rows()); }

    /// Builds from the transposed (column-sum-zero) matrix q_ji, the
    /// orientation used by the forward equation.
    static DiscreteModel from_qji(const Eigen::MatrixXd& qji, std::vector<double> b, std::vector<double> c,
                                  std::vector<double> sigma);
};

/// Continuum of states s in [0,1]:
///   p_t = int K(s,xi) p(xi) dxi - ((b(s) x + c(s)) p)_x + 1/2 (R(s)^2 p)_xx.
struct ContinuousModel {
    Kernel K;
    Profile b, c, R;

    /// Number of equal cells on which K, b, c and R are all constant, or 0 if
    /// any of them is smooth.
    std::size_t common_cells() const;
};

struct ValidationIssue {
    std::string what;
    std::string where;
    double magnitude = 0.0;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const noexcept { return issues.empty(); }
    double worst() const;
    std::string summary() const;
};

inline constexpr double kRowSumTolerance = 1e-12;

ValidationReport validate(const DiscreteModel& dm);
ValidationReport validate(const ContinuousModel& cm);

/// Stepwise embedding: K(s, xi) = Q(i, j) for s in cell j, xi in cell i, and
/// b, c, R equal to the state values on each cell. Throws InputError for an
/// invalid model.
ContinuousModel discrete_to_continuous(const DiscreteModel& dm);

/// Midpoint sampling of K, b, c, R on `states` cells (exact inverse of the
/// embedding on aligned stepwise models).
DiscreteModel continuous_to_discrete(const ContinuousModel& cm, std::size_t states);

/// The finite system obeyed by the cell masses of a stepwise continuous model:
/// cell j carries mass h * int p(x, s in cell j) dx with h = 1/cells, and the
/// masses evolve under the generator h * K^T.
DiscreteModel cell_system(const ContinuousModel& cm, std::size_t cells);

}  // namespace rsfp
