#pragma once

#include "rsfp/basis.hpp"
#include "rsfp/model.hpp"

#include <Eigen/Dense>

#include <array>

namespace rsfp {

/// Two-state model: state 0 on s in [0, 1/2), state 1 on [1/2, 1].
/// Kernel K(s,xi) = -l1, l2 / l1, -l2 on the four quarter blocks.
struct TwoStateParams {
    double lambda1 = 1.0, lambda2 = 2.0;
    double R1 = 1.0, R2 = 2.0;
    double b1 = 0.0, b2 = 0.0;
    double c = 0.0;
    double m1 = 5.0, m2 = -5.0;

    /// lambda = (1, 2), R = (1, 2), m = (5, -5), b = (-0.5, -1), c = 1.
    static TwoStateParams reference();

    double R(double s) const;
    double b(double s) const;
    void validate() const;
    ContinuousModel model() const;
};

/// Four-state multifractal model on quarter cells; b = c = 0.
struct FourStateParams {
    double lambda1 = 0.4, lambda2 = 0.2;
    double r0 = 1.7;
    std::array<double, 4> m{-10.0, 1.0, -5.0, 10.0};

    double R2(double s) const;  // r0^2, r0 (2 - r0), r0 (2 - r0), (2 - r0)^2 on the quarters
    void validate() const;
    Eigen::Matrix4d qji() const;
    ContinuousModel model() const;
};

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Haar (or cosine) projection of the two-state kernel, N = 2.
KernelMatrix two_state_A(const TwoStateParams& p, BasisKind basis = BasisKind::haar);

/// Uniform Gaussian data e^{-x^2}/sqrt(pi), b = 0.
double uniform_gaussian_b0(const TwoStateParams& p, double t, double x, double s);

/// Sandwich bounds for uniform Gaussian data with b(s) < 0.
Bounds uniform_gaussian_bneg_bounds(const TwoStateParams& p, double t, double x, double s);

/// Lower and upper integrands J_1 <= J(eta) <= J_2 of the bounds (b(s) < 0).
struct JFunctions {
    double J1 = 0.0, J2 = 0.0;
};
JFunctions j_bounds(const TwoStateParams& p, double t, double x, double s);
double j_integrand(const TwoStateParams& p, double eta, double t, double x, double s);

/// Point mass at x = 0 for every s, b(s) < 0, t > 0.
double delta_bneg(const TwoStateParams& p, double t, double x, double s);

/// Stepwise Gaussian data (means m1, m2), b = 0. Exact for Haar; the cosine
/// basis gives the two-mode truncation only.
double stepwise_gaussian_b0(const TwoStateParams& p, double t, double x, double s, BasisKind basis = BasisKind::haar);

/// Stepwise point masses at m1, m2, b(s) < 0, t > 0.
double stepwise_delta_bneg(const TwoStateParams& p, double t, double x, double s);

/// Bounds on the t -> infinity limit for uniform Gaussian data, b(s) < 0.
Bounds steady_state_bounds(const TwoStateParams& p, double x, double s);

/// Haar projection of the four-state kernel, N = 4.
Eigen::Matrix4d four_state_A(double lambda1, double lambda2);

/// Stepwise Gaussian data on quarters, modes evolved by exp(A t).
double four_state_solution(const FourStateParams& p, double t, double x, double s);

/// Trigonometric B_0..B_3 expressions for the four-state model, kept only to
/// quantify how far they are from four_state_solution.
double four_state_trigonometric(const FourStateParams& p, double t, double x, double s);

}  // namespace rsfp
