#include "rsfp/closed_form.hpp"
#include "rsfp/error.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

using namespace rsfp;

namespace {

// int int f(x, s) dx ds over [-L, L] x [0, 1], trapezoid in x, midpoints in s.
template <class F>
double total_mass(F f, double L, int nx = 4001, int ns = 2) {
    double acc = 0.0;
    const double dx = 2 * L / (nx - 1);
    for (int j = 0; j < ns; ++j) {
        const double s = (j + 0.5) / ns;
        for (int i = 0; i < nx; ++i) acc += (i == 0 || i == nx - 1 ? 0.5 : 1.0) * f(-L + i * dx, s) * dx;
    }
    return acc / ns;
}

}  // namespace

TEST_CASE("two-state Haar matrix") {
    const KernelMatrix A = two_state_A(TwoStateParams{});
    CHECK(A.A(1, 0) == 0.5);
    CHECK(A.A(1, 1) == -1.5);
    const KernelMatrix C = two_state_A(TwoStateParams{}, BasisKind::cosine);
    CHECK(C.A(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(C.A(1, 0) == doctest::Approx(std::numbers::sqrt2 * (2.0 - 1.0) / std::numbers::pi).epsilon(1e-12));
    CHECK(C.A(1, 1) == doctest::Approx(-4.0 * 3.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("solutions carry unit mass") {
    const TwoStateParams p;
    CHECK(total_mass([&](double x, double s) { return uniform_gaussian_b0(p, 3.0, x, s); }, 40.0) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(total_mass([&](double x, double s) { return stepwise_gaussian_b0(p, 2.0, x, s); }, 40.0) ==
          doctest::Approx(1.0).epsilon(1e-10));
    const TwoStateParams r = TwoStateParams::reference();
    CHECK(total_mass([&](double x, double s) { return delta_bneg(r, 4.0, x, s); }, 15.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(total_mass([&](double x, double s) { return stepwise_delta_bneg(r, 0.7, x, s); }, 20.0) ==
          doctest::Approx(1.0).epsilon(1e-10));
    const FourStateParams f;
    CHECK(total_mass([&](double x, double s) { return four_state_solution(f, 5.0, x, s); }, 60.0, 6001, 4) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("initial values") {
    const TwoStateParams p;
    for (double x : {-5.5, -5.0, 0.0, 4.2})
        for (double s : {0.2, 0.8}) {
            CHECK(uniform_gaussian_b0(p, 0.0, x, s) == doctest::Approx(std::exp(-x * x) / std::sqrt(std::numbers::pi)));
            const double m = s < 0.5 ? p.m1 : p.m2;
            CHECK(stepwise_gaussian_b0(p, 0.0, x, s) == doctest::Approx(std::exp(-(x - m) * (x - m)) / std::sqrt(std::numbers::pi)));
        }
    const FourStateParams f;
    for (int j = 0; j < 4; ++j) {
        const double s = (j + 0.5) / 4;
        const double m = f.m[static_cast<std::size_t>(j)];
        CHECK(four_state_solution(f, 0.0, m + 0.3, s) == doctest::Approx(std::exp(-0.09) / std::sqrt(std::numbers::pi)).epsilon(1e-13));
    }
}

TEST_CASE("stepwise Gaussian solution matches a per-cell matrix exponential") {
    // Each cell is a Gaussian N(m_c + c t, 1/2 + R_j^2 t) mixed by exp(h K t).
    TwoStateParams p = TwoStateParams::reference();
    p.b1 = p.b2 = 0.0;
    Eigen::Matrix2d K;
    K << -p.lambda1, p.lambda2, p.lambda1, -p.lambda2;
    const double t = 1.7;
    const Eigen::Matrix2d P = (0.5 * K * t).exp();
    for (double s : {0.25, 0.75}) {
        const int j = s < 0.5 ? 0 : 1;
        const double R = p.R(s), var = 0.5 + R * R * t;
        for (double x : {-6.0, -1.0, 2.5, 7.0}) {
            double ref = 0.0;
            const double means[2] = {p.m1, p.m2};
            for (int i = 0; i < 2; ++i) {
                const double d = x - means[i] - p.c * t;
                ref += 2.0 * P(j, i) * 0.5 * std::exp(-d * d / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
            }
            CHECK(stepwise_gaussian_b0(p, t, x, s) == doctest::Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("J bounds bracket the integrand") {
    const TwoStateParams p = TwoStateParams::reference();
    for (double t : {0.3, 2.0, 20.0})
        for (double s : {0.2, 0.7})
            for (double x : {-3.0, 0.0, 1.5, 4.0}) {
                const JFunctions J = j_bounds(p, t, x, s);
                CHECK(J.J1 <= J.J2);
                for (int k = 0; k <= 50; ++k) {
                    const double J_eta = j_integrand(p, t * k / 50.0, t, x, s);
                    CHECK(J.J1 <= J_eta * (1 + 1e-14));
                    CHECK(J_eta <= J.J2 * (1 + 1e-14));
                }
            }
}

TEST_CASE("sandwich bounds are ordered and collapse for equal rates") {
    TwoStateParams p = TwoStateParams::reference();
    for (double x : {-2.0, 0.5, 3.0}) {
        const Bounds b = uniform_gaussian_bneg_bounds(p, 1.0, x, 0.3);
        CHECK(b.lower <= b.upper);
    }
    p.lambda2 = p.lambda1;
    for (double t : {0.5, 5.0})
        for (double x : {-2.0, 0.5, 3.0}) {
            const Bounds b = uniform_gaussian_bneg_bounds(p, t, x, 0.8);
            CHECK(b.lower == b.upper);
        }
}

TEST_CASE("bounds approach the steady-state bounds") {
    const TwoStateParams p = TwoStateParams::reference();
    for (double s : {0.25, 0.75})
        for (double x : {-1.0, 1.0, 2.0, 4.0}) {
            const Bounds late = uniform_gaussian_bneg_bounds(p, 200.0, x, s);
            const Bounds inf = steady_state_bounds(p, x, s);
            CHECK(std::abs(late.lower - inf.lower) < 1e-12);
            CHECK(std::abs(late.upper - inf.upper) < 1e-12);
        }
}

TEST_CASE("point-mass solutions relax to the drift equilibria") {
    const TwoStateParams p = TwoStateParams::reference();
    auto peak = [&](double s) {
        double best = -1e300, arg = 0.0;
        for (double x = -2.0; x <= 5.0; x += 1e-4) {
            const double v = delta_bneg(p, 100.0, x, s);
            if (v > best) best = v, arg = x;
        }
        return arg;
    };
    CHECK(peak(0.25) == doctest::Approx(-p.c / p.b1).epsilon(1e-3));
    CHECK(peak(0.75) == doctest::Approx(-p.c / p.b2).epsilon(1e-3));
    CHECK_THROWS_AS(delta_bneg(p, 0.0, 0.0, 0.2), InputError);
    CHECK_THROWS_AS(delta_bneg(TwoStateParams{}, 1.0, 0.0, 0.2), InputError);
}

TEST_CASE("four-state Haar matrix") {
    const FourStateParams p;
    const Eigen::Matrix4d A = four_state_A(p.lambda1, p.lambda2);

    // Brute-force projection on a midpoint grid.
    const OrthonormalBasis X(BasisKind::haar, 4);
    const Kernel K = Kernel::stepwise(p.qji());
    const int n = 64;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double s = (i + 0.5) / n, xi = (j + 0.5) / n;
                    acc += K(s, xi) * X(static_cast<std::size_t>(a), s) * X(static_cast<std::size_t>(b), xi);
                }
            CHECK(A(a, b) == doctest::Approx(acc / (n * n)).epsilon(1e-12));
        }

    // The minor's spectrum equals the non-zero spectrum of the cell generator.
    const Eigen::VectorXcd minor = Eigen::Matrix3d(A.block<3, 3>(1, 1)).eigenvalues();
    Eigen::VectorXcd cells = Eigen::Matrix4d(p.qji() / 4.0).eigenvalues();
    std::vector<std::complex<double>> a(minor.data(), minor.data() + 3), c;
    for (int i = 0; i < 4; ++i)
        if (std::abs(cells(i)) > 1e-12) c.push_back(cells(i));
    REQUIRE(c.size() == 3);
    auto order = [](std::complex<double> u, std::complex<double> v) {
        return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
    };
    std::sort(a.begin(), a.end(), order);
    std::sort(c.begin(), c.end(), order);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(a[static_cast<std::size_t>(i)] - c[static_cast<std::size_t>(i)]) < 1e-12);
        CHECK(a[static_cast<std::size_t>(i)].real() < 0.0);
    }
}

TEST_CASE("four-state solution decays in sup norm") {
    const FourStateParams p;
    for (int j = 0; j < 4; ++j) {
        const double s = (j + 0.5) / 4;
        double sup3 = 0.0, sup15 = 0.0;
        for (double x = -40.0; x <= 40.0; x += 0.01) {
            sup3 = std::max(sup3, four_state_solution(p, 3.0, x, s));
            sup15 = std::max(sup15, four_state_solution(p, 15.0, x, s));
        }
        CHECK(sup15 < sup3);
    }
}

TEST_CASE("trigonometric four-state formulas differ from the matrix exponential") {
    const FourStateParams p;
    double gap = 0.0;
    for (double x = -15.0; x <= 15.0; x += 0.5) gap = std::max(gap, std::abs(four_state_trigonometric(p, 3.0, x, 0.6) - four_state_solution(p, 3.0, x, 0.6)));
    CHECK(gap > 1e-3);
}
