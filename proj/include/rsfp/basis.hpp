#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace rsfp {

/// Index of the cell containing s among `cells` equal half-open cells of
/// [0,1]; s = 1 belongs to the last cell.
std::size_t cell_index(double s, std::size_t cells);

/// Function of s on [0,1]: either piecewise constant on equal cells or a
/// smooth callable.
class Profile {
public:
    static Profile constant(double value);
    static Profile stepwise(std::vector<double> cell_values);
    static Profile smooth(std::function<double(double)> f);

    double operator()(double s) const;

    bool is_stepwise() const noexcept { return !fn_; }
    std::size_t cells() const noexcept { return values_.size(); }
    const std::vector<double>& cell_values() const noexcept { return values_; }

    /// Sup / inf over [0,1] (exact for stepwise, sampled otherwise).
    double max() const;
    double min() const;

private:
    std::vector<double> values_;
    std::function<double(double)> fn_;
};

enum class BasisKind { haar, cosine };

/// Orthonormal system X_0 = 1, X_1, ..., X_{N-1} on [0,1].
///
/// Haar: X_n for n = 2^j + k (0 <= k < 2^j) is 2^{j/2} on [k/2^j, (k+1/2)/2^j)
/// and -2^{j/2} on [(k+1/2)/2^j, (k+1)/2^j). Cosine: X_n = sqrt(2) cos(pi n s).
class OrthonormalBasis {
public:
    OrthonormalBasis(BasisKind kind, std::size_t size);

    BasisKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return size_; }

    /// X_n(s). Throws InputError for n >= size() or s outside [0,1].
    double operator()(std::size_t n, double s) const;

    /// Exact integral of X_n over [a, b] (subset of [0,1]).
    double integral(std::size_t n, double a, double b) const;

    /// Points in (0,1) where some X_n, n < size(), is discontinuous.
    std::vector<double> breakpoints() const;

private:
    BasisKind kind_;
    std::size_t size_;
};

/// K(s, xi) on [0,1]^2.
class Kernel {
public:
    /// cells(j, i) is the value for s in cell j and xi in cell i.
    static Kernel stepwise(Eigen::MatrixXd cells);
    static Kernel smooth(std::function<double(double, double)> f, std::vector<double> breakpoints = {});

    double operator()(double s, double xi) const;

    bool is_stepwise() const noexcept { return !fn_; }
    const Eigen::MatrixXd& cells() const noexcept { return cells_; }
    const std::vector<double>& breakpoints() const noexcept { return breaks_; }

private:
    Eigen::MatrixXd cells_;
    std::function<double(double, double)> fn_;
    std::vector<double> breaks_;
};

/// Generalized Fourier coefficients A_nm of a kernel in an orthonormal basis.
struct KernelMatrix {
    Eigen::MatrixXd A;
    OrthonormalBasis basis;

    /// The block of modes 1..N-1, which drives every non-frozen mode.
    Eigen::MatrixXd minor() const;
};

struct QPropertyReport {
    bool diagonal_ok = true;       // K(s,s) < 0 on the sample set
    bool column_sums_ok = true;    // |int K(s,xi) ds| <= tol
    double max_diagonal = 0.0;     // largest K(s,s) seen
    double max_diagonal_at = 0.0;  // s where it occurs
    double max_column_integral = 0.0;
    double max_column_integral_at = 0.0;

    bool ok() const noexcept { return diagonal_ok && column_sums_ok; }
    std::string summary() const;
};

inline constexpr double kQPropertyTolerance = 1e-10;

QPropertyReport check_q_property_continuous(const Kernel& k);

/// A_nm = int int K(s,xi) X_n(s) X_m(xi) ds dxi. Stepwise kernels are
/// integrated exactly; smooth kernels by composite Gauss-Legendre with 64
/// nodes per smooth piece (checked against 32 nodes). Throws InputError when
/// the kernel violates the q-property, NumericalError on non-convergence.
KernelMatrix project_kernel(const Kernel& k, const OrthonormalBasis& basis);

/// sum_{n,m} A_nm X_n(s) X_m(xi). For Haar with N = 2^k the result is the
/// exact stepwise kernel on N cells.
Kernel reconstruct_kernel(const KernelMatrix& km);

/// Row-major CSV with header "n,m,value".
void write_kernel_csv(std::ostream& os, const KernelMatrix& km);

/// Composite Gauss-Legendre rule on [a, b] split at the given breakpoints.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule composite_gauss_legendre(double a, double b, const std::vector<double>& breakpoints,
                                        int nodes_per_piece = 64);

}  // namespace rsfp
