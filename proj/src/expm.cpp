#include "rsfp/expm.hpp"

#include "rsfp/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace rsfp {
namespace {

constexpr double kPade13[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
                              129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
                              1323241920.0,        40840800.0,          960960.0,           16380.0,
                              182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

template <class Matrix>
Matrix pade13(const Matrix& A) {
    using Scalar = typename Matrix::Scalar;
    const auto n = A.rows();
    const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > kTheta13) squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
    const Matrix B = A / Scalar(std::ldexp(1.0, squarings));

    const Matrix I = Matrix::Identity(n, n);
    const Matrix B2 = B * B, B4 = B2 * B2, B6 = B4 * B2;
    auto c = [](int k) { return Scalar(kPade13[k]); };
    const Matrix U = B * (B6 * (c(13) * B6 + c(11) * B4 + c(9) * B2) + c(7) * B6 + c(5) * B4 + c(3) * B2 + c(1) * I);
    const Matrix V = B6 * (c(12) * B6 + c(10) * B4 + c(8) * B2) + c(6) * B6 + c(4) * B4 + c(2) * B2 + c(0) * I;
    Matrix R = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < squarings; ++k) R = R * R;
    if (!R.allFinite()) throw NumericalError("matrix exponential overflowed (1-norm " + std::to_string(norm) + ")");
    return R;
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw InputError("expm: matrix must be square");
    if (!A.allFinite()) throw NumericalError("expm: non-finite input");
    return pade13(A);
}

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& A) {
    if (A.rows() != A.cols()) throw InputError("expm: matrix must be square");
    if (!A.allFinite()) throw NumericalError("expm: non-finite input");
    return pade13(A);
}

Eigen::MatrixXd expm_eigen(const Eigen::MatrixXd& A, double t, double max_condition) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() == Eigen::Success) {
        const Eigen::MatrixXcd V = es.eigenvectors();
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
        const auto& sv = svd.singularValues();
        const double cond = sv(0) / sv(sv.size() - 1);
        if (std::isfinite(cond) && cond < max_condition) {
            const Eigen::VectorXcd d = (es.eigenvalues() * t).array().exp();
            const Eigen::MatrixXcd E = V * d.asDiagonal() * V.inverse();
            if (E.allFinite()) return E.real();
        }
    }
    return expm(Eigen::MatrixXd(A * t));
}

}  // namespace rsfp
