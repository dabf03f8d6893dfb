#include "rsfp/closed_form.hpp"

#include "rsfp/error.hpp"
#include "rsfp/expm.hpp"
#include "rsfp/initial_data.hpp"
#include "rsfp/spectral.hpp"

#include <cmath>
#include <numbers>

namespace rsfp {
namespace {

constexpr double kPi = std::numbers::pi;

double normal(double x, double mean, double var) {
    const double d = x - mean;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
}

// (e^{a t} - 1) / a, equal to t at a = 0
double growth(double a, double t) { return a == 0.0 ? t : std::expm1(a * t) / a; }

Eigen::MatrixXd two_state_cells(double l1, double l2) {
    Eigen::MatrixXd K(2, 2);
    K << -l1, l2, l1, -l2;
    return K;
}

struct TwoModes {
    double A10, A11, X1;

    double k(double t) const { return A10 / A11 * std::expm1(A11 * t); }
};

TwoModes two_modes(const TwoStateParams& p, double s, BasisKind basis = BasisKind::haar) {
    const KernelMatrix A = two_state_A(p, basis);
    return {A.A(1, 0), A.A(1, 1), A.basis(1, s)};
}

void require_bneg(const TwoStateParams& p, double s) {
    if (!(p.b(s) < 0.0)) throw InputError("this solution family needs b(s) < 0");
}

}  // namespace

TwoStateParams TwoStateParams::reference() {
    TwoStateParams p;
    p.b1 = -0.5;
    p.b2 = -1.0;
    p.c = 1.0;
    return p;
}

double TwoStateParams::R(double s) const { return cell_index(s, 2) == 0 ? R1 : R2; }
double TwoStateParams::b(double s) const { return cell_index(s, 2) == 0 ? b1 : b2; }

void TwoStateParams::validate() const {
    if (!(lambda1 > 0.0 && lambda2 > 0.0)) throw InputError("switching rates must be positive");
    if (!(R1 > 0.0 && R2 > 0.0)) throw InputError("diffusion coefficients must be positive");
}

ContinuousModel TwoStateParams::model() const {
    validate();
    return {Kernel::stepwise(two_state_cells(lambda1, lambda2)), Profile::stepwise({b1, b2}), Profile::constant(c),
            Profile::stepwise({R1, R2})};
}

double FourStateParams::R2(double s) const {
    switch (cell_index(s, 4)) {
        case 0: return r0 * r0;
        case 3: return (2.0 - r0) * (2.0 - r0);
        default: return r0 * (2.0 - r0);
    }
}

void FourStateParams::validate() const {
    if (!(lambda1 > 0.0 && lambda2 > 0.0)) throw InputError("switching rates must be positive");
    if (!(r0 > 0.0 && r0 < 2.0)) throw InputError("r0 must lie in (0, 2)");
}

Eigen::Matrix4d FourStateParams::qji() const {
    const double L = lambda1 + lambda2;
    Eigen::Matrix4d q;
    q << -L, lambda1, lambda2, 0.0,
         lambda2, -L, 0.0, lambda1,
         lambda1, 0.0, -L, lambda2,
         0.0, lambda2, lambda1, -L;
    return q;
}

ContinuousModel FourStateParams::model() const {
    validate();
    std::vector<double> R(4);
    for (std::size_t j = 0; j < 4; ++j) R[j] = std::sqrt(R2((static_cast<double>(j) + 0.5) / 4.0));
    return {Kernel::stepwise(qji()), Profile::constant(0.0), Profile::constant(0.0), Profile::stepwise(R)};
}

KernelMatrix two_state_A(const TwoStateParams& p, BasisKind basis) {
    p.validate();
    return project_kernel(Kernel::stepwise(two_state_cells(p.lambda1, p.lambda2)), OrthonormalBasis(basis, 2));
}

double uniform_gaussian_b0(const TwoStateParams& p, double t, double x, double s) {
    const TwoModes m = two_modes(p, s);
    const double R = p.R(s);
    const double v = 1.0 + 2.0 * R * R * t;
    const double y = x - p.c * t;
    return (1.0 + m.k(t) * m.X1) * std::exp(-y * y / v) / std::sqrt(kPi * v);
}

namespace {

struct OU {
    double w;   // -R^2/b (1 - e^{2bt}), twice the variance added by the dynamics
    double y;   // x minus the displacement of the origin
    double e2;  // e^{2bt}
};

OU ou_terms(const TwoStateParams& p, double t, double x, double s) {
    const double b = p.b(s), R = p.R(s);
    return {2.0 * R * R * growth(2.0 * b, t), x - p.c * growth(b, t), std::exp(2.0 * b * t)};
}

}  // namespace

JFunctions j_bounds(const TwoStateParams& p, double t, double x, double s) {
    require_bneg(p, s);
    const OU o = ou_terms(p, t, x, s);
    const double y2 = o.y * o.y;
    return {std::exp(-y2 / (o.w + o.e2)) / std::sqrt(o.w + 1.0), std::exp(-y2 / (o.w + 1.0)) / std::sqrt(o.w + o.e2)};
}

double j_integrand(const TwoStateParams& p, double eta, double t, double x, double s) {
    require_bneg(p, s);
    const OU o = ou_terms(p, t, x, s);
    const double d = o.w + std::exp(2.0 * p.b(s) * (t - eta));
    return std::exp(-o.y * o.y / d) / std::sqrt(d);
}

Bounds uniform_gaussian_bneg_bounds(const TwoStateParams& p, double t, double x, double s) {
    require_bneg(p, s);
    const TwoModes m = two_modes(p, s);
    const OU o = ou_terms(p, t, x, s);
    const double B0 = std::exp(-o.y * o.y / (1.0 + o.w)) / std::sqrt(kPi * (1.0 + o.w));
    const JFunctions J = j_bounds(p, t, x, s);
    const double f = m.k(t) * m.X1 / std::sqrt(kPi);
    return {B0 + std::min(f * J.J1, f * J.J2), B0 + std::max(f * J.J1, f * J.J2)};
}

double delta_bneg(const TwoStateParams& p, double t, double x, double s) {
    require_bneg(p, s);
    if (!(t > 0.0)) throw InputError("point-mass data need t > 0");
    const TwoModes m = two_modes(p, s);
    const double b = p.b(s), R = p.R(s);
    return (1.0 + m.k(t) * m.X1) * normal(x, p.c * growth(b, t), R * R * growth(2.0 * b, t));
}

double stepwise_gaussian_b0(const TwoStateParams& p, double t, double x, double s, BasisKind basis) {
    const TwoModes m = two_modes(p, s, basis);
    const ModeData g = project_initial_data(stepwise_gaussian({p.m1, p.m2}), OrthonormalBasis(basis, 2));
    const double R = p.R(s);
    const double var = kUnitGaussianVar + R * R * t;
    double B0 = 0.0, B1 = 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
        const double G = normal(x, g.components[c].mean + p.c * t, var);
        B0 += g.W(0, static_cast<Eigen::Index>(c)) * G;
        B1 += g.W(1, static_cast<Eigen::Index>(c)) * G;
    }
    const double e = std::exp(m.A11 * t);
    return B0 + (e * B1 + m.k(t) * B0) * m.X1;
}

double stepwise_delta_bneg(const TwoStateParams& p, double t, double x, double s) {
    require_bneg(p, s);
    if (!(t > 0.0)) throw InputError("point-mass data need t > 0");
    const TwoModes m = two_modes(p, s);
    const double b = p.b(s), R = p.R(s);
    const double var = R * R * growth(2.0 * b, t);
    const double shift = p.c * growth(b, t);
    const double e = std::exp(b * t);
    const double G1 = normal(x, p.m1 * e + shift, var);
    const double G2 = normal(x, p.m2 * e + shift, var);
    const double B0 = 0.5 * (G1 + G2), B1 = 0.5 * (G1 - G2);
    return B0 + (std::exp(m.A11 * t) * B1 + m.k(t) * B0) * m.X1;
}

Bounds steady_state_bounds(const TwoStateParams& p, double x, double s) {
    require_bneg(p, s);
    const TwoModes m = two_modes(p, s);
    const double b = p.b(s), R = p.R(s);
    const double w = -R * R / b;
    const double y = x + p.c / b;
    const double B0 = std::exp(-y * y / (w + 1.0)) / std::sqrt(kPi * (w + 1.0));
    const double Qminus = std::exp(-y * y / w) / std::sqrt(kPi * (w + 1.0));
    const double Qplus = std::exp(-y * y / (w + 1.0)) / std::sqrt(kPi * w);
    const double f = -m.A10 / m.A11 * m.X1;
    return {B0 + std::min(f * Qminus, f * Qplus), B0 + std::max(f * Qminus, f * Qplus)};
}

Eigen::Matrix4d four_state_A(double lambda1, double lambda2) {
    FourStateParams p;
    p.lambda1 = lambda1;
    p.lambda2 = lambda2;
    if (!(lambda1 > 0.0 && lambda2 > 0.0)) throw InputError("switching rates must be positive");
    return project_kernel(Kernel::stepwise(p.qji()), OrthonormalBasis(BasisKind::haar, 4)).A;
}

double four_state_solution(const FourStateParams& p, double t, double x, double s) {
    p.validate();
    const OrthonormalBasis basis(BasisKind::haar, 4);
    const KernelMatrix A{four_state_A(p.lambda1, p.lambda2), basis};
    const ModeData g = project_initial_data(stepwise_gaussian({p.m[0], p.m[1], p.m[2], p.m[3]}), basis);
    const Eigen::MatrixXd C = mode_propagator(A, t) * g.W;
    const double var = kUnitGaussianVar + p.R2(s) * t;
    double acc = 0.0;
    for (Eigen::Index l = 0; l < 4; ++l) {
        const double X = basis(static_cast<std::size_t>(l), s);
        for (Eigen::Index c = 0; c < 4; ++c) acc += X * C(l, c) * normal(x, p.m[static_cast<std::size_t>(c)], var);
    }
    return acc;
}

double four_state_trigonometric(const FourStateParams& p, double t, double x, double s) {
    p.validate();
    const double v = 1.0 + 2.0 * t * p.R2(s);
    double G[4];
    for (int c = 0; c < 4; ++c) {
        const double d = x - p.m[static_cast<std::size_t>(c)];
        G[c] = std::exp(-d * d / v);
    }
    const double B0 = (G[0] + G[1] + G[2] + G[3]) / (4.0 * std::sqrt(kPi * v));
    const double a1 = (G[0] + G[1] - G[2] - G[3]) / (4.0 * std::sqrt(kPi * v));
    const double a2 = (G[0] - G[1]) / (2.0 * std::sqrt(2.0 * kPi * v));
    const double a3 = (G[2] - G[3]) / (2.0 * std::sqrt(2.0 * kPi * v));
    const double L = p.lambda1 + p.lambda2;
    const double w = (p.lambda2 - p.lambda1) / 4.0;
    const double cw = std::cos(w * t), sw = std::sin(w * t);
    const double B1 = std::numbers::sqrt2 / 2.0 * std::exp(-L * t / 4.0) * (std::numbers::sqrt2 * a1 * cw + (a2 + a3) * sw);
    const double B2 = 0.5 * (a2 - a3) * std::exp(L * t / 2.0) - 0.5 * a1 * std::exp(L * t / 4.0) * sw +
                      0.5 * (a2 - a3) * std::exp(L * t / 4.0) * cw;
    const double B3 = -0.5 * (a2 - a3) * std::exp(L * t / 2.0) - 0.5 * a1 * std::exp(L * t / 4.0) * sw +
                      0.5 * (a2 - a3) * std::exp(L * t / 4.0) * cw;
    const OrthonormalBasis basis(BasisKind::haar, 4);
    return B0 + B1 * basis(1, s) + B2 * basis(2, s) + B3 * basis(3, s);
}

}  // namespace rsfp
