#include "rsfp/basis.hpp"

#include "rsfp/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace rsfp {

std::size_t cell_index(double s, std::size_t cells) {
    if (cells == 0) throw InputError("cell_index: zero cells");
    if (!(s >= 0.0 && s <= 1.0)) throw InputError("cell_index: s outside [0,1]");
    const auto i = static_cast<std::size_t>(std::floor(s * static_cast<double>(cells)));
    return std::min(i, cells - 1);
}

// ---------------------------------------------------------------- Profile

Profile Profile::constant(double value) { return stepwise({value}); }

Profile Profile::stepwise(std::vector<double> cell_values) {
    if (cell_values.empty()) throw InputError("stepwise profile needs at least one cell");
    Profile p;
    p.values_ = std::move(cell_values);
    return p;
}

Profile Profile::smooth(std::function<double(double)> f) {
    if (!f) throw InputError("smooth profile needs a callable");
    Profile p;
    p.fn_ = std::move(f);
    return p;
}

double Profile::operator()(double s) const {
    if (fn_) return fn_(s);
    return values_[cell_index(s, values_.size())];
}

namespace {
constexpr int kProfileSamples = 1025;
}

double Profile::max() const {
    if (!fn_) return *std::max_element(values_.begin(), values_.end());
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kProfileSamples; ++i) m = std::max(m, fn_(i / double(kProfileSamples - 1)));
    return m;
}

double Profile::min() const {
    if (!fn_) return *std::min_element(values_.begin(), values_.end());
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kProfileSamples; ++i) m = std::min(m, fn_(i / double(kProfileSamples - 1)));
    return m;
}

// ---------------------------------------------------------------- basis

namespace {

struct HaarPiece {
    double lo, mid, hi, height;
};

HaarPiece haar_piece(std::size_t n) {
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= n) ++level;
    const double width = 1.0 / static_cast<double>(std::size_t{1} << level);
    const double k = static_cast<double>(n - (std::size_t{1} << level));
    return {k * width, (k + 0.5) * width, (k + 1.0) * width, std::sqrt(1.0 / width)};
}

double overlap(double a, double b, double lo, double hi) { return std::max(0.0, std::min(b, hi) - std::max(a, lo)); }

}  // namespace

OrthonormalBasis::OrthonormalBasis(BasisKind kind, std::size_t size) : kind_(kind), size_(size) {
    if (size == 0) throw InputError("basis size must be at least 1");
}

double OrthonormalBasis::operator()(std::size_t n, double s) const {
    if (n >= size_) throw InputError("basis index " + std::to_string(n) + " out of range (size " + std::to_string(size_) + ")");
    if (!(s >= 0.0 && s <= 1.0)) throw InputError("basis argument s outside [0,1]");
    if (n == 0) return 1.0;
    if (kind_ == BasisKind::cosine) return std::numbers::sqrt2 * std::cos(std::numbers::pi * static_cast<double>(n) * s);

    const HaarPiece h = haar_piece(n);
    const bool last = h.hi == 1.0 && s == 1.0;
    if (last || (s >= h.mid && s < h.hi)) return -h.height;
    if (s >= h.lo && s < h.mid) return h.height;
    return 0.0;
}

double OrthonormalBasis::integral(std::size_t n, double a, double b) const {
    if (n >= size_) throw InputError("basis index out of range");
    if (n == 0) return b - a;
    if (kind_ == BasisKind::cosine) {
        const double w = std::numbers::pi * static_cast<double>(n);
        return std::numbers::sqrt2 * (std::sin(w * b) - std::sin(w * a)) / w;
    }
    const HaarPiece h = haar_piece(n);
    return h.height * (overlap(a, b, h.lo, h.mid) - overlap(a, b, h.mid, h.hi));
}

std::vector<double> OrthonormalBasis::breakpoints() const {
    std::vector<double> out;
    if (kind_ == BasisKind::cosine) return out;
    for (std::size_t n = 1; n < size_; ++n) {
        const HaarPiece h = haar_piece(n);
        for (double p : {h.lo, h.mid, h.hi})
            if (p > 0.0 && p < 1.0) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------- kernel

Kernel Kernel::stepwise(Eigen::MatrixXd cells) {
    if (cells.rows() == 0 || cells.rows() != cells.cols()) throw InputError("stepwise kernel needs a non-empty square cell table");
    Kernel k;
    k.cells_ = std::move(cells);
    const auto m = static_cast<std::size_t>(k.cells_.rows());
    for (std::size_t i = 1; i < m; ++i) k.breaks_.push_back(static_cast<double>(i) / static_cast<double>(m));
    return k;
}

Kernel Kernel::smooth(std::function<double(double, double)> f, std::vector<double> breakpoints) {
    if (!f) throw InputError("smooth kernel needs a callable");
    Kernel k;
    k.fn_ = std::move(f);
    k.breaks_ = std::move(breakpoints);
    std::sort(k.breaks_.begin(), k.breaks_.end());
    return k;
}

double Kernel::operator()(double s, double xi) const {
    if (fn_) return fn_(s, xi);
    const auto m = static_cast<std::size_t>(cells_.rows());
    return cells_(static_cast<Eigen::Index>(cell_index(s, m)), static_cast<Eigen::Index>(cell_index(xi, m)));
}

Eigen::MatrixXd KernelMatrix::minor() const {
    const auto n = A.rows();
    if (n < 2) return Eigen::MatrixXd(0, 0);
    return A.bottomRightCorner(n - 1, n - 1);
}

// ---------------------------------------------------------------- quadrature

QuadratureRule composite_gauss_legendre(double a, double b, const std::vector<double>& breakpoints,
                                        int nodes_per_piece) {
    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    auto append = [&](const auto& abscissa, const auto& weights) {
        QuadratureRule rule;
        for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
            const double lo = cuts[piece], hi = cuts[piece + 1];
            const double half = 0.5 * (hi - lo), centre = 0.5 * (hi + lo);
            for (std::size_t i = 0; i < abscissa.size(); ++i) {
                for (double sign : {-1.0, 1.0}) {
                    rule.nodes.push_back(centre + sign * half * abscissa[i]);
                    rule.weights.push_back(half * weights[i]);
                }
            }
        }
        return rule;
    };

    using boost::math::quadrature::gauss;
    switch (nodes_per_piece) {
        case 64: return append(gauss<double, 64>::abscissa(), gauss<double, 64>::weights());
        case 32: return append(gauss<double, 32>::abscissa(), gauss<double, 32>::weights());
        case 20: return append(gauss<double, 20>::abscissa(), gauss<double, 20>::weights());
        default: throw InputError("composite_gauss_legendre: supported node counts are 20, 32, 64");
    }
}

// ---------------------------------------------------------------- q-property

std::string QPropertyReport::summary() const {
    std::ostringstream os;
    os.precision(6);
    os << "diagonal " << (diagonal_ok ? "ok" : "FAIL") << " (max K(s,s) = " << max_diagonal << " at s = " << max_diagonal_at
       << "); column integrals " << (column_sums_ok ? "ok" : "FAIL") << " (max |int K ds| = " << max_column_integral
       << " at xi = " << max_column_integral_at << ")";
    return os.str();
}

QPropertyReport check_q_property_continuous(const Kernel& k) {
    QPropertyReport r;
    r.max_diagonal = -std::numeric_limits<double>::infinity();

    if (k.is_stepwise()) {
        const Eigen::MatrixXd& c = k.cells();
        const auto m = c.rows();
        const double h = 1.0 / static_cast<double>(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            if (c(j, j) > r.max_diagonal) {
                r.max_diagonal = c(j, j);
                r.max_diagonal_at = (static_cast<double>(j) + 0.5) * h;
            }
            const double col = std::abs(c.col(j).sum() * h);
            if (col > r.max_column_integral) {
                r.max_column_integral = col;
                r.max_column_integral_at = (static_cast<double>(j) + 0.5) * h;
            }
        }
    } else {
        constexpr int samples = 1025;
        for (int i = 0; i < samples; ++i) {
            const double s = i / double(samples - 1);
            const double d = k(s, s);
            if (d > r.max_diagonal) {
                r.max_diagonal = d;
                r.max_diagonal_at = s;
            }
        }
        const QuadratureRule rule = composite_gauss_legendre(0.0, 1.0, k.breakpoints(), 64);
        constexpr int xi_samples = 257;
        for (int i = 0; i < xi_samples; ++i) {
            const double xi = i / double(xi_samples - 1);
            double col = 0.0;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) col += rule.weights[q] * k(rule.nodes[q], xi);
            if (std::abs(col) > r.max_column_integral) {
                r.max_column_integral = std::abs(col);
                r.max_column_integral_at = xi;
            }
        }
    }
    r.diagonal_ok = r.max_diagonal < 0.0;
    r.column_sums_ok = r.max_column_integral <= kQPropertyTolerance;
    return r;
}

// ---------------------------------------------------------------- projection

namespace {

Eigen::MatrixXd tabulate(const OrthonormalBasis& basis, const QuadratureRule& rule) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(rule.nodes.size()));
    for (std::size_t n = 0; n < basis.size(); ++n)
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q)) = basis(n, rule.nodes[q]) * rule.weights[q];
    return X;
}

Eigen::MatrixXd project_smooth(const Kernel& k, const OrthonormalBasis& basis, int nodes) {
    std::vector<double> breaks = basis.breakpoints();
    breaks.insert(breaks.end(), k.breakpoints().begin(), k.breakpoints().end());
    const QuadratureRule rule = composite_gauss_legendre(0.0, 1.0, breaks, nodes);
    const auto q = static_cast<Eigen::Index>(rule.nodes.size());
    Eigen::MatrixXd K(q, q);
    for (Eigen::Index a = 0; a < q; ++a)
        for (Eigen::Index b = 0; b < q; ++b) K(a, b) = k(rule.nodes[a], rule.nodes[b]);
    const Eigen::MatrixXd X = tabulate(basis, rule);
    return X * K * X.transpose();
}

}  // namespace

KernelMatrix project_kernel(const Kernel& k, const OrthonormalBasis& basis) {
    const QPropertyReport q = check_q_property_continuous(k);
    if (!q.ok()) throw InputError("kernel violates the q-property: " + q.summary());

    if (k.is_stepwise()) {
        const Eigen::MatrixXd& c = k.cells();
        const auto m = c.rows();
        Eigen::MatrixXd I(static_cast<Eigen::Index>(basis.size()), m);
        for (std::size_t n = 0; n < basis.size(); ++n)
            for (Eigen::Index j = 0; j < m; ++j)
                I(static_cast<Eigen::Index>(n), j) =
                    basis.integral(n, static_cast<double>(j) / static_cast<double>(m), static_cast<double>(j + 1) / static_cast<double>(m));
        Eigen::MatrixXd A = I * c * I.transpose();
        // X_0 integrates every column of a q-kernel to zero; drop the rounding residue.
        A.row(0).setZero();
        return {std::move(A), basis};
    }

    Eigen::MatrixXd fine = project_smooth(k, basis, 64);
    const Eigen::MatrixXd coarse = project_smooth(k, basis, 32);
    const double scale = std::max(1.0, fine.cwiseAbs().maxCoeff());
    if ((fine - coarse).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw NumericalError("project_kernel: Gauss-Legendre quadrature did not converge (64 vs 32 nodes differ by " +
                             std::to_string((fine - coarse).cwiseAbs().maxCoeff()) + ")");
    if (fine.row(0).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NumericalError("project_kernel: first row not zero to quadrature accuracy");
    fine.row(0).setZero();
    return {std::move(fine), basis};
}

Kernel reconstruct_kernel(const KernelMatrix& km) {
    const OrthonormalBasis basis = km.basis;
    const auto n = static_cast<std::size_t>(km.A.rows());
    const bool dyadic = basis.kind() == BasisKind::haar && n > 0 && (n & (n - 1)) == 0;
    if (dyadic) {
        Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t j = 0; j < n; ++j)
                X(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = basis(l, (static_cast<double>(j) + 0.5) / static_cast<double>(n));
        return Kernel::stepwise(X.transpose() * km.A * X);
    }
    Eigen::MatrixXd A = km.A;
    return Kernel::smooth(
        [A, basis](double s, double xi) {
            const auto N = A.rows();
            Eigen::VectorXd xs(N), xx(N);
            for (Eigen::Index l = 0; l < N; ++l) {
                xs(l) = basis(static_cast<std::size_t>(l), s);
                xx(l) = basis(static_cast<std::size_t>(l), xi);
            }
            return xs.dot(A * xx);
        },
        basis.breakpoints());
}

void write_kernel_csv(std::ostream& os, const KernelMatrix& km) {
    os << "n,m,value\n";
    char buf[64];
    for (Eigen::Index n = 0; n < km.A.rows(); ++n)
        for (Eigen::Index m = 0; m < km.A.cols(); ++m) {
            std::snprintf(buf, sizeof buf, "%.17g", km.A(n, m));
            os << n << ',' << m << ',' << buf << '\n';
        }
}

}  // namespace rsfp
