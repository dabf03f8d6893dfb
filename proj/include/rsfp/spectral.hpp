#pragma once

#include "rsfp/basis.hpp"
#include "rsfp/density.hpp"
#include "rsfp/initial_data.hpp"
#include "rsfp/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace rsfp {

/// How the s-dependent factor exp(-(R^2 mu^2 / 2 + i c mu) t) meets the
/// kernel coupling.
///  - factorized: the factor is evaluated at the output s and applied to
///    modes evolved by exp(A t) alone. Exact when R, b, c do not depend on s.
///  - galerkin: the multiplication operator is projected onto the basis and
///    exponentiated together with A for each mu (b = 0 only). Exact for
///    stepwise R, c on cells resolved by the basis.
enum class Coupling { factorized, galerkin };

/// Treatment of the transport term b mu d/dmu for b != 0 (factorized only).
///  - characteristic: every mode is carried along mu -> mu e^{b t}.
///  - frozen_mode: mode 0 stays at its initial value and drives the other
///    modes through a Duhamel integral over eta in [0, t] with the source
///    g_0(mu e^{b (t - eta)}), evaluated by adaptive Gauss-Kronrod.
enum class Transport { characteristic, frozen_mode };

enum class Reassembly { automatic, closed_form, quadrature };

struct SpectralOptions {
    BasisKind basis = BasisKind::haar;
    std::size_t basis_size = 0;  // 0: the model's cell count when it is a power of two, else 2
    Coupling coupling = Coupling::factorized;
    Transport transport = Transport::characteristic;
    Reassembly reassembly = Reassembly::automatic;
    double mu_max = 0.0;         // 0: 12 / smallest initial width
    double dmu = 0.0;            // 0: from the x-range and the spread of the solution
    double eta_tolerance = 1e-10;
};

/// Output grid: x points and s-samples with quadrature weights.
struct XSGrid {
    std::vector<double> x;
    std::vector<double> s;
    std::vector<double> s_weights;

    static XSGrid midpoints(std::vector<double> x, std::size_t cells);
};

/// a_k(t, mu) on a symmetric uniform mu-grid.
struct ModeCoefficients {
    double t = 0.0;
    std::vector<double> mu;
    Eigen::MatrixXcd a;  // modes x mu
};

std::vector<double> symmetric_mu_grid(double mu_max, double dmu);

ModeCoefficients initial_modes(const ModeData& g, const std::vector<double>& mu);

/// exp(A t) with the first row fixed to e_0 (A has a zero first row).
Eigen::MatrixXd mode_propagator(const KernelMatrix& A, double t);

/// a(t, mu) = exp(A t) a(0, mu).
ModeCoefficients evolve_modes_b0(const KernelMatrix& A, const ModeCoefficients& a0, double t);

/// Modes of the transported system at rate b (b != 0) on the grid mu.
ModeCoefficients evolve_modes_bnz(const KernelMatrix& A, const ModeData& g, const std::vector<double>& mu, double t,
                                  double b, Transport transport, double eta_tolerance = 1e-10);

/// Largest real part among the eigenvalues of the minor A[1:, 1:].
double spectral_abscissa(const KernelMatrix& A);

struct SpectralDiagnostics {
    double mode0_drift = 0.0;        // max |a_0(t) - a_0(0)| over the mu-grid (b = 0 strips)
    double spectral_abscissa = 0.0;
    double mass_drift = 0.0;         // max |mass(t) - mass(t_0)|
    double imag_residue = 0.0;       // quadrature path: conjugate-symmetry defect
    double tail = 0.0;               // quadrature path: |integrand| at mu_max relative to its max
    double mu_max = 0.0;
    double dmu = 0.0;
    std::size_t basis_size = 0;
    std::string reassembly;
};

struct SpectralResult {
    DensityField field;
    KernelMatrix A;
    SpectralDiagnostics diag;
};

/// Forward transform, mode evolution and inverse transform for every time
/// and s-sample. Throws InputError for invalid models or unsupported option
/// combinations, NumericalError when the mu-grid cannot resolve the solution
/// or the kernel minor has an eigenvalue with positive real part.
SpectralResult spectral_solve(const ContinuousModel& model, const InitialData& data, const std::vector<double>& times,
                              const XSGrid& grid, const SpectralOptions& options = {});

/// Default basis size for a model (see SpectralOptions::basis_size).
std::size_t default_basis_size(const ContinuousModel& model, BasisKind kind);

}  // namespace rsfp
