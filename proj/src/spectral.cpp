#include "rsfp/spectral.hpp"

#include "rsfp/error.hpp"
#include "rsfp/expm.hpp"
#include "rsfp/simd/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

namespace rsfp {

using cd = std::complex<double>;

XSGrid XSGrid::midpoints(std::vector<double> x, std::size_t cells) {
    XSGrid g;
    g.x = std::move(x);
    midpoint_samples(cells, g.s, g.s_weights);
    return g;
}

std::vector<double> symmetric_mu_grid(double mu_max, double dmu) {
    if (!(mu_max > 0.0) || !(dmu > 0.0)) throw InputError("mu-grid needs positive mu_max and dmu");
    const auto half = static_cast<std::size_t>(std::ceil(mu_max / dmu));
    std::vector<double> mu(2 * half + 1);
    for (std::size_t k = 0; k <= 2 * half; ++k) mu[k] = (static_cast<double>(k) - static_cast<double>(half)) * dmu;
    return mu;
}

ModeCoefficients initial_modes(const ModeData& g, const std::vector<double>& mu) {
    ModeCoefficients a;
    a.mu = mu;
    a.a.resize(g.W.rows(), static_cast<Eigen::Index>(mu.size()));
    for (std::size_t k = 0; k < mu.size(); ++k) a.a.col(static_cast<Eigen::Index>(k)) = forward_transform(g, mu[k]);
    return a;
}

Eigen::MatrixXd mode_propagator(const KernelMatrix& A, double t) {
    if (t < 0.0) throw InputError("negative time");
    Eigen::MatrixXd E = expm(Eigen::MatrixXd(A.A * t));
    E.row(0).setZero();
    E(0, 0) = 1.0;
    return E;
}

ModeCoefficients evolve_modes_b0(const KernelMatrix& A, const ModeCoefficients& a0, double t) {
    if (A.A.rows() != a0.a.rows()) throw InputError("evolve_modes_b0: mode count mismatch");
    ModeCoefficients out = a0;
    out.t = a0.t + t;
    out.a = mode_propagator(A, t).cast<cd>() * a0.a;
    return out;
}

namespace {

double expm1_over(double b, double t) { return b == 0.0 ? t : std::expm1(b * t) / b; }

/// tau -> exp(A_m tau) v via an eigendecomposition of the minor when it is
/// well conditioned, otherwise by a Pade exponential per call.
class MinorAction {
public:
    MinorAction(const Eigen::MatrixXd& Am, const Eigen::VectorXd& v) : Am_(Am), v_(v) {
        if (Am.rows() == 0) return;
        Eigen::EigenSolver<Eigen::MatrixXd> es(Am);
        if (es.info() != Eigen::Success) return;
        const Eigen::MatrixXcd V = es.eigenvectors();
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
        const auto& sv = svd.singularValues();
        if (!(sv(0) / sv(sv.size() - 1) < 1e6)) return;
        lambda_ = es.eigenvalues();
        V_ = V;
        z_ = V.partialPivLu().solve(v.cast<cd>());
        eigen_ = true;
    }

    Eigen::VectorXd operator()(double tau) const {
        if (Am_.rows() == 0) return {};
        if (!eigen_) return expm(Eigen::MatrixXd(Am_ * tau)) * v_;
        const Eigen::VectorXcd d = (lambda_ * tau).array().exp() * z_.array();
        return (V_ * d).real();
    }

private:
    Eigen::MatrixXd Am_;
    Eigen::VectorXd v_;
    bool eigen_ = false;
    Eigen::VectorXcd lambda_, z_;
    Eigen::MatrixXcd V_;
};

Eigen::MatrixXd minor_of(const Eigen::MatrixXd& A) {
    const auto n = A.rows();
    return A.bottomRightCorner(n - 1, n - 1);
}

double gk_integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &err);
}

}  // namespace

ModeCoefficients evolve_modes_bnz(const KernelMatrix& A, const ModeData& g, const std::vector<double>& mu, double t,
                                  double b, Transport transport, double eta_tolerance) {
    if (t < 0.0) throw InputError("negative time");
    const auto n = A.A.rows();
    if (g.W.rows() != n) throw InputError("evolve_modes_bnz: mode count mismatch");
    ModeCoefficients out;
    out.t = t;
    out.mu = mu;
    out.a.resize(n, static_cast<Eigen::Index>(mu.size()));
    const double scale = std::exp(b * t);

    if (transport == Transport::characteristic) {
        const Eigen::MatrixXcd E = mode_propagator(A, t).cast<cd>();
        for (std::size_t k = 0; k < mu.size(); ++k)
            out.a.col(static_cast<Eigen::Index>(k)) = E * forward_transform(g, mu[k] * scale);
        return out;
    }

    const Eigen::MatrixXd Am = minor_of(A.A);
    const Eigen::MatrixXcd Em = expm(Eigen::MatrixXd(Am * t)).cast<cd>();
    const MinorAction source(Am, A.A.col(0).tail(n - 1));
    ModeData g0{g.components, g.W.topRows(1)};
    for (std::size_t k = 0; k < mu.size(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        out.a(0, col) = forward_transform(g0, mu[k])(0);
        if (n == 1) continue;
        Eigen::VectorXcd minor = Em * forward_transform(g, mu[k] * scale).tail(n - 1);
        for (Eigen::Index l = 0; l < n - 1; ++l) {
            auto integrand = [&](double tau, bool imag) {
                const cd src = forward_transform(g0, mu[k] * std::exp(b * tau))(0);
                const double r = source(tau)(l);
                return r * (imag ? src.imag() : src.real());
            };
            const double re = gk_integrate([&](double tau) { return integrand(tau, false); }, 0.0, t, eta_tolerance);
            const double im = gk_integrate([&](double tau) { return integrand(tau, true); }, 0.0, t, eta_tolerance);
            minor(l) += cd(re, im);
        }
        out.a.col(col).tail(n - 1) = minor;
    }
    return out;
}

double spectral_abscissa(const KernelMatrix& A) {
    const Eigen::MatrixXd m = A.minor();
    if (m.rows() == 0) return -std::numeric_limits<double>::infinity();
    return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().real().maxCoeff();
}

std::size_t default_basis_size(const ContinuousModel& model, BasisKind kind) {
    const std::size_t cells = model.common_cells();
    if (kind == BasisKind::haar) return cells >= 2 && (cells & (cells - 1)) == 0 ? cells : 2;
    return std::max<std::size_t>(2, cells);
}

namespace {

struct Context {
    const ContinuousModel& model;
    const XSGrid& grid;
    const SpectralOptions& opt;
    OrthonormalBasis basis;
    KernelMatrix A;
    ModeData g;
    Eigen::MatrixXd X;  // basis values, modes x s-samples
};

/// Mean and variance of component c after time t under the drift b x + c and
/// diffusion R^2 acting on the x-law alone.
struct Law {
    double mean, var;
};

Law transported(const Component& comp, double t, double b, double c, double R) {
    const double e = std::exp(b * t);
    return {comp.mean * e + c * expm1_over(b, t), comp.var * e * e + R * R * expm1_over(2.0 * b, t)};
}

void accumulate(std::span<const double> x, const Law& law, double weight, std::span<double> out) {
    if (weight == 0.0) return;
    if (!(law.var > 0.0)) throw InputError("point-mass data has no density at t = 0");
    simd::gauss_accumulate(x, law.mean, 1.0 / (2.0 * law.var), weight / std::sqrt(2.0 * std::numbers::pi * law.var), out);
}

void closed_form_characteristic(const Context& ctx, double t, std::size_t ti, DensityField& f) {
    const Eigen::MatrixXd C = mode_propagator(ctx.A, t) * ctx.g.W;
    for (std::size_t si = 0; si < ctx.grid.s.size(); ++si) {
        const double s = ctx.grid.s[si];
        const Eigen::VectorXd w = C.transpose() * ctx.X.col(static_cast<Eigen::Index>(si));
        const double b = ctx.model.b(s), c = ctx.model.c(s), R = ctx.model.R(s);
        for (std::size_t k = 0; k < ctx.g.components.size(); ++k)
            accumulate(ctx.grid.x, transported(ctx.g.components[k], t, b, c, R), w(static_cast<Eigen::Index>(k)), f.slice(ti, si));
    }
}

void closed_form_frozen(const Context& ctx, double t, std::size_t ti, DensityField& f) {
    const auto n = ctx.A.A.rows();
    const Eigen::MatrixXd Am = minor_of(ctx.A.A);
    const Eigen::MatrixXd Cm = expm(Eigen::MatrixXd(Am * t)) * ctx.g.W.bottomRows(n - 1);
    const MinorAction source(Am, ctx.A.A.col(0).tail(n - 1));
    const auto& comps = ctx.g.components;

    for (std::size_t si = 0; si < ctx.grid.s.size(); ++si) {
        const double s = ctx.grid.s[si];
        const double b = ctx.model.b(s), c = ctx.model.c(s), R = ctx.model.R(s);
        const double shift = c * expm1_over(b, t);
        const double diff = R * R * expm1_over(2.0 * b, t);
        const Eigen::VectorXd Xs = ctx.X.col(static_cast<Eigen::Index>(si));
        auto out = f.slice(ti, si);

        for (std::size_t k = 0; k < comps.size(); ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            accumulate(ctx.grid.x, {comps[k].mean + shift, comps[k].var + diff}, ctx.g.W(0, kk), out);
            const double e = std::exp(b * t);
            accumulate(ctx.grid.x, {comps[k].mean * e + shift, comps[k].var * e * e + diff},
                       Xs.tail(n - 1).dot(Cm.col(kk)), out);
        }
        if (n == 1) continue;

        for (std::size_t xi = 0; xi < ctx.grid.x.size(); ++xi) {
            const double x = ctx.grid.x[xi];
            auto integrand = [&](double tau) {
                const double rho = Xs.tail(n - 1).dot(source(tau));
                const double e = std::exp(b * tau);
                double acc = 0.0;
                for (std::size_t k = 0; k < comps.size(); ++k) {
                    const double w0 = ctx.g.W(0, static_cast<Eigen::Index>(k));
                    if (w0 == 0.0) continue;
                    const double var = comps[k].var * e * e + diff;
                    const double d = x - (comps[k].mean * e + shift);
                    acc += w0 * std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
                }
                return rho * acc;
            };
            out[xi] += gk_integrate(integrand, 0.0, t, ctx.opt.eta_tolerance);
        }
    }
}

/// Projected multiplication operators int X_k X_l f(s) ds for f = R^2 / 2 and f = c.
void multiplication_operators(const Context& ctx, Eigen::MatrixXd& MR, Eigen::MatrixXd& Mc) {
    std::vector<double> breaks = ctx.basis.breakpoints();
    const std::size_t cells = ctx.model.common_cells();
    for (std::size_t j = 1; j < cells; ++j) breaks.push_back(static_cast<double>(j) / static_cast<double>(cells));
    const QuadratureRule rule = composite_gauss_legendre(0.0, 1.0, breaks, 20);
    const auto n = static_cast<Eigen::Index>(ctx.basis.size());
    MR = Eigen::MatrixXd::Zero(n, n);
    Mc = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd Xq(n);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = rule.nodes[q];
        for (Eigen::Index k = 0; k < n; ++k) Xq(k) = ctx.basis(static_cast<std::size_t>(k), s);
        const double R = ctx.model.R(s);
        MR += rule.weights[q] * 0.5 * R * R * Xq * Xq.transpose();
        Mc += rule.weights[q] * ctx.model.c(s) * Xq * Xq.transpose();
    }
}

struct QuadratureStats {
    double tail = 0.0;
    double imag = 0.0;
};

void synthesize(const std::vector<double>& mu, Eigen::VectorXcd F, std::span<const double> x, std::span<double> out,
                QuadratureStats& stats) {
    const auto n = F.size();
    const double peak = F.cwiseAbs().maxCoeff();
    if (peak > 0.0) {
        stats.tail = std::max(stats.tail, std::max(std::abs(F(0)), std::abs(F(n - 1))) / peak);
        for (Eigen::Index k = 0; k < n; ++k)
            stats.imag = std::max(stats.imag, std::abs(F(n - 1 - k) - std::conj(F(k))) / peak);
    }
    const double dmu = mu[1] - mu[0];
    F *= dmu / (2.0 * std::numbers::pi);
    F(0) *= 0.5;
    F(n - 1) *= 0.5;
    std::vector<double> re(static_cast<std::size_t>(n)), im(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        re[static_cast<std::size_t>(k)] = F(k).real();
        im[static_cast<std::size_t>(k)] = F(k).imag();
    }
    simd::fourier_synthesis(re, im, mu.front(), dmu, x, out);
}

void quadrature_path(const Context& ctx, const std::vector<double>& mu, double t, std::size_t ti, DensityField& f,
                     QuadratureStats& stats) {
    const auto nmu = static_cast<Eigen::Index>(mu.size());
    const auto n = ctx.A.A.rows();

    if (ctx.opt.coupling == Coupling::galerkin) {
        Eigen::MatrixXd MR, Mc;
        multiplication_operators(ctx, MR, Mc);
        Eigen::MatrixXcd a(n, nmu);
        for (Eigen::Index k = 0; k < nmu; ++k) {
            const double m = mu[static_cast<std::size_t>(k)];
            const Eigen::MatrixXcd G = ctx.A.A.cast<cd>() - (m * m) * MR.cast<cd>() - cd(0.0, m) * Mc.cast<cd>();
            a.col(k) = expm(Eigen::MatrixXcd(G * t)) * forward_transform(ctx.g, m);
        }
        for (std::size_t si = 0; si < ctx.grid.s.size(); ++si) {
            const Eigen::VectorXcd F = a.transpose() * ctx.X.col(static_cast<Eigen::Index>(si)).cast<cd>();
            synthesize(mu, F, ctx.grid.x, f.slice(ti, si), stats);
        }
        return;
    }

    std::map<double, ModeCoefficients> by_rate;
    for (std::size_t si = 0; si < ctx.grid.s.size(); ++si) {
        const double s = ctx.grid.s[si];
        const double b = ctx.model.b(s), c = ctx.model.c(s), R = ctx.model.R(s);
        auto it = by_rate.find(b);
        if (it == by_rate.end()) {
            ModeCoefficients a = b == 0.0 ? evolve_modes_b0(ctx.A, initial_modes(ctx.g, mu), t)
                                          : evolve_modes_bnz(ctx.A, ctx.g, mu, t, b, ctx.opt.transport, ctx.opt.eta_tolerance);
            it = by_rate.emplace(b, std::move(a)).first;
        }
        const double shift = c * expm1_over(b, t);
        const double diff = R * R * expm1_over(2.0 * b, t);
        Eigen::VectorXcd F = it->second.a.transpose() * ctx.X.col(static_cast<Eigen::Index>(si)).cast<cd>();
        for (Eigen::Index k = 0; k < nmu; ++k) {
            const double m = mu[static_cast<std::size_t>(k)];
            F(k) *= std::exp(cd(-0.5 * diff * m * m, -shift * m));
        }
        synthesize(mu, F, ctx.grid.x, f.slice(ti, si), stats);
    }
}

/// Period and band limit for the trapezoidal inverse transform.
void auto_mu_grid(const Context& ctx, const InitialData& data, const std::vector<double>& times, double& mu_max, double& dmu) {
    if (mu_max <= 0.0) {
        const double v = data.min_var();
        mu_max = v > 0.0 ? 12.0 / std::sqrt(2.0 * v) : 12.0;
    }
    if (dmu <= 0.0) {
        double reach = 0.0;
        for (double x : ctx.grid.x) reach = std::max(reach, std::abs(x));
        double spread = 0.0;
        for (double t : times)
            for (double s : ctx.grid.s)
                for (const auto& comp : data.components) {
                    const Law law = transported(comp, t, ctx.model.b(s), ctx.model.c(s), ctx.model.R(s));
                    spread = std::max(spread, std::abs(law.mean) + 12.0 * std::sqrt(law.var) + std::abs(comp.mean));
                }
        dmu = 2.0 * std::numbers::pi / (2.0 * (reach + spread));
    }
}

}  // namespace

SpectralResult spectral_solve(const ContinuousModel& model, const InitialData& data, const std::vector<double>& times,
                              const XSGrid& grid, const SpectralOptions& options) {
    const ValidationReport v = validate(model);
    if (!v.ok()) throw InputError("invalid model: " + v.summary());
    if (times.empty()) throw InputError("no output times");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw InputError("output times must be non-negative");
        if (i && times[i] < times[i - 1]) throw InputError("output times must be sorted");
    }
    if (grid.x.size() < 2 || grid.s.empty() || grid.s.size() != grid.s_weights.size())
        throw InputError("invalid output grid");

    const std::size_t N = options.basis_size ? options.basis_size : default_basis_size(model, options.basis);
    OrthonormalBasis basis(options.basis, N);
    Context ctx{model, grid, options, basis, project_kernel(model.K, basis), project_initial_data(data, basis), {}};
    ctx.X.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(grid.s.size()));
    for (std::size_t k = 0; k < N; ++k)
        for (std::size_t si = 0; si < grid.s.size(); ++si)
            ctx.X(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(si)) = basis(k, grid.s[si]);

    SpectralResult res{DensityField(times, grid.x, grid.s, grid.s_weights, false), ctx.A, {}};
    res.diag.basis_size = N;
    res.diag.spectral_abscissa = spectral_abscissa(ctx.A);
    if (res.diag.spectral_abscissa > 1e-10)
        throw NumericalError("kernel minor has an eigenvalue with positive real part " + std::to_string(res.diag.spectral_abscissa));

    bool any_b = false;
    for (double s : grid.s) any_b = any_b || model.b(s) != 0.0;
    if (options.coupling == Coupling::galerkin && any_b) throw InputError("galerkin coupling supports b = 0 only");

    bool quadrature = options.reassembly == Reassembly::quadrature || options.coupling == Coupling::galerkin;
    if (options.reassembly == Reassembly::closed_form && quadrature)
        throw InputError("galerkin coupling has no closed-form reassembly");
    if (quadrature && data.has_delta())
        throw InputError("the quadrature path needs decaying transforms; point-mass data use closed-form reassembly");

    double mu_max = options.mu_max, dmu = options.dmu;
    auto_mu_grid(ctx, data, times, mu_max, dmu);
    res.diag.mu_max = mu_max;
    res.diag.dmu = dmu;
    const std::vector<double> mu = symmetric_mu_grid(mu_max, dmu);
    res.diag.reassembly = quadrature ? "quadrature" : "closed_form";

    QuadratureStats stats;
    const ModeCoefficients a0 = initial_modes(ctx.g, mu);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const double t = times[ti];
        const ModeCoefficients at = evolve_modes_b0(ctx.A, a0, t);
        res.diag.mode0_drift = std::max(res.diag.mode0_drift, (at.a.row(0) - a0.a.row(0)).cwiseAbs().maxCoeff());

        if (quadrature) quadrature_path(ctx, mu, t, ti, res.field, stats);
        else if (options.transport == Transport::frozen_mode && any_b) closed_form_frozen(ctx, t, ti, res.field);
        else closed_form_characteristic(ctx, t, ti, res.field);
    }
    res.diag.tail = stats.tail;
    res.diag.imag_residue = stats.imag;
    if (quadrature && stats.tail > 1e-12)
        throw NumericalError("mu-grid too coarse: integrand at mu_max is " + std::to_string(stats.tail) + " of its peak");

    const double m0 = res.field.mass(0);
    for (std::size_t ti = 1; ti < times.size(); ++ti) res.diag.mass_drift = std::max(res.diag.mass_drift, std::abs(res.field.mass(ti) - m0));
    return res;
}

}  // namespace rsfp
