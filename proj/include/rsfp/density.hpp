#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rsfp {

/// p(t, x, s) on a rectangular grid. For discrete-state output `states` is
/// set, `s` holds the state indices and each slice is that state's density
/// (slice masses sum to the total mass).
struct DensityField {
    std::vector<double> times;
    std::vector<double> x;
    std::vector<double> s;
    std::vector<double> s_weights;  // quadrature weights in s (1 per state when discrete)
    bool states = false;
    std::vector<double> values;     // [time][s][x]

    DensityField() = default;
    DensityField(std::vector<double> times, std::vector<double> x, std::vector<double> s,
                 std::vector<double> s_weights, bool states);

    std::size_t nt() const noexcept { return times.size(); }
    std::size_t ns() const noexcept { return s.size(); }
    std::size_t nx() const noexcept { return x.size(); }

    std::span<double> slice(std::size_t t, std::size_t si);
    std::span<const double> slice(std::size_t t, std::size_t si) const;
    double& at(std::size_t t, std::size_t si, std::size_t xi) { return values[(t * ns() + si) * nx() + xi]; }
    double at(std::size_t t, std::size_t si, std::size_t xi) const { return values[(t * ns() + si) * nx() + xi]; }

    /// int p dx (trapezoid) of one slice.
    double slice_mass(std::size_t t, std::size_t si) const;
    /// sum_s w_s int p dx.
    double mass(std::size_t t) const;
    double min_value() const;
};

std::vector<double> linspace(double a, double b, std::size_t n);

/// Cell midpoints of `cells` equal cells of [0,1] with weights 1/cells.
void midpoint_samples(std::size_t cells, std::vector<double>& s, std::vector<double>& w);

/// Per-state densities of the cell masses of a continuous field: state j is
/// sum over s-samples in cell j of w_s p(t, x, s).
DensityField to_states(const DensityField& continuous, std::size_t cells);

/// CSV "t,x,s,p" (or "t,x,state,p"), 17 significant digits, followed after
/// each time slice by a "# mass,<t>,<mass>" line.
void write_csv(std::ostream& os, const DensityField& field);
void write_csv_file(const std::string& path, const DensityField& field);

enum class Norm { l1, linf };
Norm parse_norm(const std::string& name);

struct SliceError {
    double t = 0.0;
    double s = 0.0;
    double value = 0.0;
    double worst_x = 0.0;
};

struct CompareReport {
    Norm norm = Norm::linf;
    std::vector<SliceError> slices;
    double overall = 0.0;  // max over slices
    SliceError worst;

    /// Largest slice error among slices at time t.
    double at_time(double t) const;
    std::string summary() const;
};

/// Compares two fields with matching times and s-samples. The finer x grid is
/// linearly interpolated onto the coarser one over their common range.
/// Throws InputError for incompatible or disjoint grids.
CompareReport compare(const DensityField& a, const DensityField& b, Norm norm);

}  // namespace rsfp
