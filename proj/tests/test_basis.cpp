#include "rsfp/basis.hpp"
#include "rsfp/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace rsfp;

namespace {

// Random stepwise kernel with zero column sums and negative diagonal.
Eigen::MatrixXd random_q_cells(int n, unsigned seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        double col = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) col += K(j, i) = u(g);
        K(i, i) = -col;
    }
    return K;
}

// Midpoint rule with `nodes` points on [0,1].
template <class F>
double midpoint(F f, int nodes) {
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) acc += f((k + 0.5) / nodes);
    return acc / nodes;
}

}  // namespace

TEST_CASE("cell_index puts s = 1 in the last cell") {
    CHECK(cell_index(0.0, 4) == 0);
    CHECK(cell_index(0.2499, 4) == 0);
    CHECK(cell_index(0.25, 4) == 1);
    CHECK(cell_index(1.0, 4) == 3);
    CHECK_THROWS_AS(cell_index(1.5, 4), InputError);
}

TEST_CASE("Haar and cosine systems are orthonormal on 2^14 nodes") {
    for (BasisKind kind : {BasisKind::haar, BasisKind::cosine}) {
        const OrthonormalBasis X(kind, 16);
        const int nodes = 1 << 14;
        for (std::size_t n = 0; n < 16; ++n)
            for (std::size_t m = 0; m <= n; ++m) {
                const double ip = midpoint([&](double s) { return X(n, s) * X(m, s); }, nodes);
                CHECK(std::abs(ip - (n == m ? 1.0 : 0.0)) < 1e-8);
            }
    }
}

TEST_CASE("Haar functions have the documented support and sign") {
    const OrthonormalBasis X(BasisKind::haar, 8);
    CHECK(X(0, 0.7) == 1.0);
    CHECK(X(1, 0.1) == 1.0);
    CHECK(X(1, 0.9) == -1.0);
    CHECK(X(2, 0.1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(X(2, 0.3) == doctest::Approx(-std::sqrt(2.0)));
    CHECK(X(2, 0.6) == 0.0);
    CHECK(X(5, 0.26) == doctest::Approx(2.0));
    CHECK(X(5, 0.4) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(X(8, 0.5), InputError);
}

TEST_CASE("exact basis integrals agree with fine quadrature") {
    for (BasisKind kind : {BasisKind::haar, BasisKind::cosine}) {
        const OrthonormalBasis X(kind, 8);
        for (std::size_t n = 0; n < 8; ++n) {
            const double a = 0.13, b = 0.71;
            double acc = 0.0;
            const int nodes = 200000;
            for (int k = 0; k < nodes; ++k) acc += X(n, a + (b - a) * (k + 0.5) / nodes);
            CHECK(std::abs(X.integral(n, a, b) - acc * (b - a) / nodes) < 1e-5);
        }
    }
}

TEST_CASE("two-state Haar coefficients") {
    const double l1 = 1.0, l2 = 2.0;
    Eigen::MatrixXd K(2, 2);
    K << -l1, l2, l1, -l2;
    const KernelMatrix km = project_kernel(Kernel::stepwise(K), OrthonormalBasis(BasisKind::haar, 2));
    CHECK(km.A(0, 0) == 0.0);
    CHECK(km.A(0, 1) == 0.0);
    CHECK(km.A(1, 0) == 0.5);
    CHECK(km.A(1, 1) == -1.5);
}

TEST_CASE("cosine projection of a stepwise kernel matches a brute-force double integral") {
    const Eigen::MatrixXd K = random_q_cells(2, 3);
    const Kernel k = Kernel::stepwise(K);
    const OrthonormalBasis X(BasisKind::cosine, 4);
    const KernelMatrix km = project_kernel(k, X);
    const int nodes = 2000;
    for (std::size_t n = 0; n < 4; ++n)
        for (std::size_t m = 0; m < 4; ++m) {
            double acc = 0.0;
            for (int a = 0; a < nodes; ++a)
                for (int b = 0; b < nodes; ++b) {
                    const double s = (a + 0.5) / nodes, xi = (b + 0.5) / nodes;
                    acc += k(s, xi) * X(n, s) * X(m, xi);
                }
            CHECK(std::abs(km.A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)) - acc / (nodes * double(nodes))) < 1e-5);
        }
}

TEST_CASE("smooth separable kernel projects onto the expected cosine modes") {
    const Kernel k = Kernel::smooth([](double s, double xi) {
        const double pi = std::numbers::pi;
        return -std::cos(pi * s) * std::cos(pi * xi) - std::cos(2 * pi * s) * std::cos(2 * pi * xi);
    });
    CHECK(check_q_property_continuous(k).ok());
    const KernelMatrix km = project_kernel(k, OrthonormalBasis(BasisKind::cosine, 4));
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(4, 4);
    expect(1, 1) = expect(2, 2) = -0.5;
    CHECK((km.A - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Haar projection and reconstruction round-trip stepwise kernels") {
    for (int n : {2, 4, 8, 16}) {
        const Eigen::MatrixXd K = random_q_cells(n, 100 + n);
        const KernelMatrix km = project_kernel(Kernel::stepwise(K), OrthonormalBasis(BasisKind::haar, static_cast<std::size_t>(n)));
        CHECK(km.A.row(0).cwiseAbs().maxCoeff() < 1e-14);
        const Kernel back = reconstruct_kernel(km);
        REQUIRE(back.is_stepwise());
        CHECK((back.cells() - K).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("coarser Haar projections of a fine kernel are block averages") {
    const Eigen::MatrixXd K = random_q_cells(8, 5);
    const KernelMatrix km = project_kernel(Kernel::stepwise(K), OrthonormalBasis(BasisKind::haar, 2));
    const Kernel back = reconstruct_kernel(km);
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            // A coarse cell value is the mean of the 4x4 fine block.
            CHECK(back.cells()(j, i) == doctest::Approx(K.block(4 * j, 4 * i, 4, 4).mean()).epsilon(1e-12));
        }
}

TEST_CASE("q-property violations are rejected") {
    SUBCASE("non-zero column sum") {
        Eigen::MatrixXd K(2, 2);
        K << -1.0, 2.0, 1.5, -2.0;
        const QPropertyReport r = check_q_property_continuous(Kernel::stepwise(K));
        CHECK_FALSE(r.column_sums_ok);
        CHECK(r.max_column_integral == doctest::Approx(0.25));
        CHECK_THROWS_AS(project_kernel(Kernel::stepwise(K), OrthonormalBasis(BasisKind::haar, 2)), InputError);
    }
    SUBCASE("non-negative diagonal") {
        Eigen::MatrixXd K(2, 2);
        K << 0.0, 0.0, 0.0, 0.0;
        const QPropertyReport r = check_q_property_continuous(Kernel::stepwise(K));
        CHECK_FALSE(r.diagonal_ok);
        CHECK_THROWS_AS(project_kernel(Kernel::stepwise(K), OrthonormalBasis(BasisKind::haar, 2)), InputError);
    }
    SUBCASE("smooth kernel with a positive diagonal region") {
        const Kernel k = Kernel::smooth([](double s, double xi) { return std::cos(std::numbers::pi * s) * std::cos(std::numbers::pi * xi); });
        const QPropertyReport r = check_q_property_continuous(k);
        CHECK_FALSE(r.diagonal_ok);
        CHECK(r.max_diagonal == doctest::Approx(1.0));
        CHECK_FALSE(r.summary().empty());
    }
}

TEST_CASE("kernel matrix CSV") {
    Eigen::MatrixXd K(2, 2);
    K << -1.0, 2.0, 1.0, -2.0;
    const KernelMatrix km = project_kernel(Kernel::stepwise(K), OrthonormalBasis(BasisKind::haar, 2));
    std::ostringstream os;
    write_kernel_csv(os, km);
    const std::string s = os.str();
    CHECK(s.rfind("n,m,value\n", 0) == 0);
    CHECK(s.find("1,0,0.5") != std::string::npos);
    CHECK(s.find("1,1,-1.5") != std::string::npos);
}

TEST_CASE("composite Gauss-Legendre integrates piecewise polynomials exactly") {
    const QuadratureRule q = composite_gauss_legendre(0.0, 1.0, {0.3}, 20);
    double acc = 0.0;
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
        const double s = q.nodes[k];
        acc += q.weights[k] * (s < 0.3 ? std::pow(s, 9) : 2.0);
    }
    CHECK(acc == doctest::Approx(std::pow(0.3, 10) / 10 + 1.4).epsilon(1e-14));
    CHECK_THROWS_AS(composite_gauss_legendre(0.0, 1.0, {}, 7), InputError);
}
