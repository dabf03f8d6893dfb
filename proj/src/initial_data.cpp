#include "rsfp/initial_data.hpp"

#include "rsfp/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rsfp {

std::complex<double> Component::transform(double mu) const {
    return std::exp(std::complex<double>(-0.5 * var * mu * mu, -mean * mu));
}

double Component::density(double x) const {
    if (is_delta()) throw InputError("a point mass has no pointwise density");
    const double d = x - mean;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

bool InitialData::has_delta() const {
    for (const auto& c : components)
        if (c.is_delta()) return true;
    return false;
}

double InitialData::min_var() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& c : components)
        if (!c.is_delta()) v = std::min(v, c.var);
    return std::isfinite(v) ? v : 0.0;
}

double InitialData::value(double x, double s) const {
    const auto row = static_cast<Eigen::Index>(cell_index(s, cells()));
    double acc = 0.0;
    for (std::size_t c = 0; c < components.size(); ++c) {
        const double w = weights(row, static_cast<Eigen::Index>(c));
        if (w != 0.0) acc += w * components[c].density(x);
    }
    return acc;
}

InitialData InitialData::scaled(double factor) const {
    InitialData out = *this;
    out.weights *= factor;
    return out;
}

namespace {

void check_var(double var) {
    if (!(var > 0.0) || !std::isfinite(var)) throw InputError("Gaussian variance must be positive and finite");
}

InitialData diagonal(std::string family, const std::vector<double>& means, double var) {
    if (means.empty()) throw InputError(family + ": at least one mean is required");
    InitialData d;
    d.family = std::move(family);
    for (double m : means) {
        if (!std::isfinite(m)) throw InputError(d.family + ": non-finite mean");
        d.components.push_back({m, var});
    }
    const auto n = static_cast<Eigen::Index>(means.size());
    d.weights = Eigen::MatrixXd::Identity(n, n);
    return d;
}

}  // namespace

InitialData uniform_gaussian(double mean, double var) {
    check_var(var);
    return diagonal("uniform_gaussian", {mean}, var);
}

InitialData uniform_delta(double at) { return diagonal("uniform_delta", {at}, 0.0); }

InitialData stepwise_gaussian(const std::vector<double>& means, double var) {
    check_var(var);
    return diagonal("stepwise_gaussian", means, var);
}

InitialData stepwise_delta(const std::vector<double>& means) { return diagonal("stepwise_delta", means, 0.0); }

ModeData project_initial_data(const InitialData& data, const OrthonormalBasis& basis) {
    if (data.cells() == 0 || data.components.empty()) throw InputError("project_initial_data: empty initial data");
    const auto cells = static_cast<Eigen::Index>(data.cells());
    Eigen::MatrixXd I(static_cast<Eigen::Index>(basis.size()), cells);
    for (std::size_t n = 0; n < basis.size(); ++n)
        for (Eigen::Index j = 0; j < cells; ++j)
            I(static_cast<Eigen::Index>(n), j) = basis.integral(n, static_cast<double>(j) / static_cast<double>(cells),
                                                                static_cast<double>(j + 1) / static_cast<double>(cells));
    return {data.components, I * data.weights};
}

Eigen::VectorXcd forward_transform(const ModeData& modes, double mu) {
    Eigen::VectorXcd phi(static_cast<Eigen::Index>(modes.components.size()));
    for (std::size_t c = 0; c < modes.components.size(); ++c) phi(static_cast<Eigen::Index>(c)) = modes.components[c].transform(mu);
    return modes.W.cast<std::complex<double>>() * phi;
}

}  // namespace rsfp
