#include "rsfp/closed_form.hpp"
#include "rsfp/error.hpp"
#include "rsfp/spectral.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

using namespace rsfp;

namespace {

XSGrid grid(double L, std::size_t nx, std::size_t cells) { return XSGrid::midpoints(linspace(-L, L, nx), cells); }

double max_abs_diff(const DensityField& a, const DensityField& b) {
    REQUIRE(a.values.size() == b.values.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

template <class F>
double max_diff_to(const DensityField& f, F exact) {
    double m = 0.0;
    for (std::size_t t = 0; t < f.nt(); ++t)
        for (std::size_t si = 0; si < f.ns(); ++si)
            for (std::size_t i = 0; i < f.nx(); ++i)
                m = std::max(m, std::abs(f.at(t, si, i) - exact(f.times[t], f.x[i], f.s[si])));
    return m;
}

SpectralOptions quadrature() {
    SpectralOptions o;
    o.reassembly = Reassembly::quadrature;
    return o;
}

}  // namespace

TEST_CASE("t = 0 reproduces the initial data") {
    const TwoStateParams p;
    const InitialData d = stepwise_gaussian({p.m1, p.m2});
    const SpectralResult r = spectral_solve(p.model(), d, {0.0}, grid(12.0, 241, 4), quadrature());
    CHECK(max_diff_to(r.field, [&](double, double x, double s) { return d.value(x, s); }) < 1e-10);
    CHECK(r.diag.reassembly == "quadrature");
}

TEST_CASE("mode 0 is frozen and mass is conserved when b = 0") {
    const TwoStateParams p;
    const SpectralResult r = spectral_solve(p.model(), stepwise_gaussian({p.m1, p.m2}), {0.0, 1.0, 10.0}, grid(60.0, 1201, 2),
                                            quadrature());
    CHECK(r.diag.mode0_drift == 0.0);
    CHECK(r.diag.mass_drift < 1e-8);
    CHECK(r.diag.spectral_abscissa < 0.0);
    CHECK(r.field.min_value() > -1e-8);
}

TEST_CASE("closed-form and quadrature reassembly agree") {
    SUBCASE("two states") {
        const TwoStateParams p = TwoStateParams::reference();
        TwoStateParams q = p;
        q.b1 = q.b2 = 0.0;
        const InitialData d = stepwise_gaussian({p.m1, p.m2});
        const std::vector<double> times{0.5, 3.0};
        const SpectralResult a = spectral_solve(q.model(), d, times, grid(30.0, 301, 2));
        const SpectralResult b = spectral_solve(q.model(), d, times, grid(30.0, 301, 2), quadrature());
        CHECK(a.diag.reassembly == "closed_form");
        CHECK(max_abs_diff(a.field, b.field) < 1e-8);
    }
    SUBCASE("two states with b < 0") {
        const TwoStateParams p = TwoStateParams::reference();
        const InitialData d = uniform_gaussian();
        const std::vector<double> times{0.5, 2.0, 10.0};
        const SpectralResult a = spectral_solve(p.model(), d, times, grid(12.0, 241, 2));
        const SpectralResult b = spectral_solve(p.model(), d, times, grid(12.0, 241, 2), quadrature());
        CHECK(max_abs_diff(a.field, b.field) < 1e-8);
    }
    SUBCASE("four states") {
        const FourStateParams p;
        const InitialData d = stepwise_gaussian({p.m[0], p.m[1], p.m[2], p.m[3]});
        const std::vector<double> times{0.0, 3.0, 15.0};
        const SpectralResult a = spectral_solve(p.model(), d, times, grid(40.0, 401, 4));
        const SpectralResult b = spectral_solve(p.model(), d, times, grid(40.0, 401, 4), quadrature());
        CHECK(max_abs_diff(a.field, b.field) < 1e-8);
    }
}

TEST_CASE("spectral solutions match the closed-form families") {
    SUBCASE("uniform Gaussian, b = 0") {
        const TwoStateParams p;
        const SpectralResult r = spectral_solve(p.model(), uniform_gaussian(), {0.0, 1.0, 4.0}, grid(15.0, 301, 2), quadrature());
        CHECK(max_diff_to(r.field, [&](double t, double x, double s) { return uniform_gaussian_b0(p, t, x, s); }) < 1e-8);
    }
    SUBCASE("stepwise Gaussian, b = 0") {
        TwoStateParams p = TwoStateParams::reference();
        p.b1 = p.b2 = 0.0;
        const SpectralResult r = spectral_solve(p.model(), stepwise_gaussian({p.m1, p.m2}), {0.0, 1.0, 10.0}, grid(60.0, 601, 2),
                                                quadrature());
        CHECK(max_diff_to(r.field, [&](double t, double x, double s) { return stepwise_gaussian_b0(p, t, x, s); }) < 1e-8);
    }
    SUBCASE("stepwise point masses, b < 0") {
        const TwoStateParams p = TwoStateParams::reference();
        const SpectralResult r = spectral_solve(p.model(), stepwise_delta({p.m1, p.m2}), {0.1, 0.5, 100.0}, grid(15.0, 301, 2));
        CHECK(max_diff_to(r.field, [&](double t, double x, double s) { return stepwise_delta_bneg(p, t, x, s); }) < 1e-10);
    }
    SUBCASE("uniform point mass, b < 0") {
        const TwoStateParams p = TwoStateParams::reference();
        const SpectralResult r = spectral_solve(p.model(), uniform_delta(), {0.2, 5.0}, grid(10.0, 201, 2));
        CHECK(max_diff_to(r.field, [&](double t, double x, double s) { return delta_bneg(p, t, x, s); }) < 1e-10);
    }
    SUBCASE("four states") {
        const FourStateParams p;
        const SpectralResult r = spectral_solve(p.model(), stepwise_gaussian({p.m[0], p.m[1], p.m[2], p.m[3]}), {0.0, 3.0, 15.0},
                                                grid(40.0, 401, 4), quadrature());
        CHECK(max_diff_to(r.field, [&](double t, double x, double s) { return four_state_solution(p, t, x, s); }) < 1e-8);
    }
}

TEST_CASE("galerkin coupling matches a per-cell Fourier oracle") {
    // Cell densities p_j obey, after a Fourier transform in x,
    //   d/dt p_j = sum_i h K(j,i) p_i - (i mu c_j + R_j^2 mu^2 / 2) p_j.
    TwoStateParams p;
    p.c = 0.7;
    const ContinuousModel cm = p.model();
    const std::vector<double> means{p.m1, p.m2};
    const double t = 1.5;
    const std::vector<double> xs = linspace(-14.0, 14.0, 57);

    const double h = 0.5;
    const Eigen::MatrixXd K = cm.K.cells();
    const double dmu = 0.005, mu_max = 14.0;
    std::vector<Eigen::Vector2d> oracle(xs.size(), Eigen::Vector2d::Zero());
    for (double mu = -mu_max; mu <= mu_max + 1e-12; mu += dmu) {
        Eigen::Matrix2cd M = (h * K).cast<std::complex<double>>();
        for (int j = 0; j < 2; ++j) {
            const double R = j == 0 ? p.R1 : p.R2;
            M(j, j) -= std::complex<double>(0.5 * R * R * mu * mu, mu * p.c);
        }
        Eigen::Vector2cd p0;
        for (int j = 0; j < 2; ++j) p0(j) = std::exp(std::complex<double>(-0.25 * mu * mu, -means[static_cast<std::size_t>(j)] * mu));
        const Eigen::Vector2cd pt = (M * t).exp() * p0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const std::complex<double> e = std::exp(std::complex<double>(0.0, mu * xs[i]));
            for (int j = 0; j < 2; ++j) oracle[i](j) += (pt(j) * e).real() * dmu / (2.0 * std::numbers::pi);
        }
    }

    SpectralOptions o;
    o.coupling = Coupling::galerkin;
    const SpectralResult r = spectral_solve(cm, stepwise_gaussian(means), {t}, XSGrid::midpoints(xs, 2), o);
    double err = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (int j = 0; j < 2; ++j) err = std::max(err, std::abs(r.field.at(0, static_cast<std::size_t>(j), i) - oracle[i](j)));
    CHECK(err < 1e-8);
    CHECK(r.diag.mass_drift < 1e-8);
}

TEST_CASE("galerkin and factorized coincide when R and c do not depend on s") {
    TwoStateParams p;
    p.R1 = p.R2 = 1.3;
    p.c = -0.4;
    const InitialData d = stepwise_gaussian({p.m1, p.m2});
    SpectralOptions g;
    g.coupling = Coupling::galerkin;
    const SpectralResult a = spectral_solve(p.model(), d, {0.7, 4.0}, grid(25.0, 251, 2), g);
    const SpectralResult b = spectral_solve(p.model(), d, {0.7, 4.0}, grid(25.0, 251, 2), quadrature());
    CHECK(max_abs_diff(a.field, b.field) < 1e-9);
}

TEST_CASE("unsupported combinations are rejected") {
    const TwoStateParams p = TwoStateParams::reference();
    SpectralOptions g;
    g.coupling = Coupling::galerkin;
    CHECK_THROWS_AS(spectral_solve(p.model(), uniform_gaussian(), {1.0}, grid(10.0, 101, 2), g), InputError);
    CHECK_THROWS_AS(spectral_solve(p.model(), uniform_delta(), {1.0}, grid(10.0, 101, 2), quadrature()), InputError);
    CHECK_THROWS_AS(spectral_solve(p.model(), uniform_gaussian(), {1.0, 0.5}, grid(10.0, 101, 2)), InputError);
    SpectralOptions coarse = quadrature();
    coarse.mu_max = 2.0;
    CHECK_THROWS_AS(spectral_solve(TwoStateParams{}.model(), uniform_gaussian(), {0.0}, grid(10.0, 101, 2), coarse), NumericalError);
}

TEST_CASE("mode propagator keeps mode 0 fixed") {
    const KernelMatrix A = two_state_A(TwoStateParams{});
    const Eigen::MatrixXd P = mode_propagator(A, 2.0);
    CHECK(P(0, 0) == 1.0);
    CHECK(P(0, 1) == 0.0);
    CHECK(P(1, 1) == doctest::Approx(std::exp(-3.0)));
    CHECK(P(1, 0) == doctest::Approx((0.5 / -1.5) * (std::exp(-3.0) - 1.0)));
    CHECK(spectral_abscissa(A) == doctest::Approx(-1.5));
}

TEST_CASE("default basis sizes") {
    CHECK(default_basis_size(TwoStateParams{}.model(), BasisKind::haar) == 2);
    CHECK(default_basis_size(FourStateParams{}.model(), BasisKind::haar) == 4);
    const auto g = symmetric_mu_grid(1.0, 0.25);
    CHECK(g.size() == 9);
    CHECK(g.front() == -1.0);
    CHECK(g[4] == 0.0);
}
