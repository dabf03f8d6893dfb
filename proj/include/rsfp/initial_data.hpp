#pragma once

#include "rsfp/basis.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace rsfp {

/// Normal density N(mean, var) in x, or a point mass when var == 0.
struct Component {
    double mean = 0.0;
    double var = 0.5;

    bool is_delta() const noexcept { return var == 0.0; }

    /// Fourier transform  int e^{-i mu x} dF(x) = exp(-i mean mu - var mu^2 / 2).
    std::complex<double> transform(double mu) const;
    double density(double x) const;
};

/// Mixture weights of shared components, stepwise in s:
///   Phi(x, s) = sum_c weights(cell(s), c) * component_c(x)
/// on `weights.rows()` equal cells of [0,1]. For a discrete model the rows are
/// the states and each row is that state's density.
struct InitialData {
    std::string family;
    std::vector<Component> components;
    Eigen::MatrixXd weights;  // cells x components

    std::size_t cells() const noexcept { return static_cast<std::size_t>(weights.rows()); }
    bool has_delta() const;
    double min_var() const;  // smallest nonzero variance (0 if all deltas)
    double value(double x, double s) const;

    /// Same data with every weight multiplied by `factor`.
    InitialData scaled(double factor) const;
};

/// Default normalization: e^{-(x-m)^2}/sqrt(pi) is N(m, 1/2).
inline constexpr double kUnitGaussianVar = 0.5;

InitialData uniform_gaussian(double mean = 0.0, double var = kUnitGaussianVar);
InitialData uniform_delta(double at = 0.0);
InitialData stepwise_gaussian(const std::vector<double>& means, double var = kUnitGaussianVar);
InitialData stepwise_delta(const std::vector<double>& means);

/// Coefficients g_k(x) = int Phi(x,s) X_k(s) ds, kept as a mixture over the
/// same components: g_k = sum_c W(k, c) component_c.
struct ModeData {
    std::vector<Component> components;
    Eigen::MatrixXd W;  // modes x components
};

/// Exact projection (cell integrals of the basis). Throws InputError if the
/// data are empty.
ModeData project_initial_data(const InitialData& data, const OrthonormalBasis& basis);

/// g_hat_k(mu) = sum_c W(k, c) component_c.transform(mu).
Eigen::VectorXcd forward_transform(const ModeData& modes, double mu);

}  // namespace rsfp
