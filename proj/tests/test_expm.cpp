#include "rsfp/error.hpp"
#include "rsfp/expm.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <random>

using namespace rsfp;

namespace {

Eigen::MatrixXd random_matrix(int n, double scale, unsigned seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> z;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = scale * z(g);
    return A;
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_CASE("real expm agrees with Eigen's MatrixFunctions") {
    for (int n : {1, 2, 4, 7}) {
        for (double scale : {1e-3, 0.5, 3.0, 20.0}) {
            const Eigen::MatrixXd A = random_matrix(n, scale, static_cast<unsigned>(n * 1000 + scale * 10));
            const Eigen::MatrixXd ref = A.exp();
            CHECK(rel_err(expm(A), ref) < 1e-11);
        }
    }
}

TEST_CASE("complex expm agrees with Eigen's MatrixFunctions") {
    for (int n : {2, 5}) {
        const Eigen::MatrixXcd A = random_matrix(n, 1.5, 9u + n).cast<std::complex<double>>() +
                                   std::complex<double>(0, 1) * random_matrix(n, 2.0, 19u + n).cast<std::complex<double>>();
        const Eigen::MatrixXcd ref = A.exp();
        CHECK((expm(A) - ref).norm() / ref.norm() < 1e-11);
    }
}

TEST_CASE("expm of generators is stochastic") {
    Eigen::MatrixXd Q(3, 3);
    Q << -2.0, 1.5, 0.5, 0.1, -0.1, 0.0, 3.0, 3.0, -6.0;
    const Eigen::MatrixXd P = expm(Eigen::MatrixXd(Q * 2.5));
    CHECK(P.minCoeff() >= 0.0);
    for (int i = 0; i < 3; ++i) CHECK(P.row(i).sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigendecomposition path matches Pade, including defective matrices") {
    const Eigen::MatrixXd A = random_matrix(4, 0.7, 77);
    CHECK(rel_err(expm_eigen(A, 1.7), Eigen::MatrixXd(A * 1.7).exp()) < 1e-10);
    Eigen::MatrixXd J(2, 2);
    J << -1.0, 1.0, 0.0, -1.0;  // Jordan block
    Eigen::MatrixXd ref(2, 2);
    ref << std::exp(-2.0), 2.0 * std::exp(-2.0), 0.0, std::exp(-2.0);
    CHECK(rel_err(expm_eigen(J, 2.0), ref) < 1e-12);
}

TEST_CASE("non-finite results raise NumericalError") {
    Eigen::MatrixXd A(1, 1);
    A(0, 0) = 1000.0;
    CHECK_THROWS_AS(expm(A), NumericalError);
    A(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(expm(A), NumericalError);
}
