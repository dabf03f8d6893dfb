#include "rsfp/density.hpp"

#include "rsfp/error.hpp"
#include "rsfp/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace rsfp {

DensityField::DensityField(std::vector<double> t, std::vector<double> xs, std::vector<double> ss,
                           std::vector<double> sw, bool discrete)
    : times(std::move(t)), x(std::move(xs)), s(std::move(ss)), s_weights(std::move(sw)), states(discrete) {
    if (s.size() != s_weights.size()) throw InputError("DensityField: s and s_weights differ in length");
    values.assign(times.size() * s.size() * x.size(), 0.0);
}

std::span<double> DensityField::slice(std::size_t t, std::size_t si) {
    return {values.data() + (t * ns() + si) * nx(), nx()};
}

std::span<const double> DensityField::slice(std::size_t t, std::size_t si) const {
    return {values.data() + (t * ns() + si) * nx(), nx()};
}

namespace {

double trapezoid(std::span<const double> xs, std::span<const double> f) {
    double acc = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) acc += 0.5 * (xs[i] - xs[i - 1]) * (f[i] + f[i - 1]);
    return acc;
}

}  // namespace

double DensityField::slice_mass(std::size_t t, std::size_t si) const { return trapezoid(x, slice(t, si)); }

double DensityField::mass(std::size_t t) const {
    double m = 0.0;
    for (std::size_t si = 0; si < ns(); ++si) m += s_weights[si] * slice_mass(t, si);
    return m;
}

double DensityField::min_value() const { return values.empty() ? 0.0 : simd::min(values); }

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n < 2) throw InputError("linspace needs at least two points");
    std::vector<double> v(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + static_cast<double>(i) * h;
    v.back() = b;
    return v;
}

void midpoint_samples(std::size_t cells, std::vector<double>& s, std::vector<double>& w) {
    s.resize(cells);
    w.assign(cells, 1.0 / static_cast<double>(cells));
    for (std::size_t j = 0; j < cells; ++j) s[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(cells);
}

DensityField to_states(const DensityField& f, std::size_t cells) {
    if (f.states) return f;
    std::vector<double> idx(cells), ones(cells, 1.0);
    for (std::size_t j = 0; j < cells; ++j) idx[j] = static_cast<double>(j);
    DensityField out(f.times, f.x, idx, ones, true);
    std::vector<std::size_t> hits(cells, 0);
    for (std::size_t si = 0; si < f.ns(); ++si) {
        const std::size_t j = std::min(cells - 1, static_cast<std::size_t>(f.s[si] * static_cast<double>(cells)));
        ++hits[j];
        for (std::size_t t = 0; t < f.nt(); ++t) simd::axpy(f.s_weights[si], f.slice(t, si), out.slice(t, j));
    }
    for (std::size_t j = 0; j < cells; ++j)
        if (hits[j] == 0) throw InputError("to_states: no s-sample in cell " + std::to_string(j));
    return out;
}

void write_csv(std::ostream& os, const DensityField& f) {
    os << (f.states ? "t,x,state,p\n" : "t,x,s,p\n");
    char buf[128];
    for (std::size_t t = 0; t < f.nt(); ++t) {
        for (std::size_t si = 0; si < f.ns(); ++si) {
            const auto row = f.slice(t, si);
            for (std::size_t i = 0; i < f.nx(); ++i) {
                if (f.states)
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g\n", f.times[t], f.x[i], static_cast<int>(f.s[si]), row[i]);
                else
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", f.times[t], f.x[i], f.s[si], row[i]);
                os << buf;
            }
        }
        std::snprintf(buf, sizeof buf, "# mass,%.17g,%.17g\n", f.times[t], f.mass(t));
        os << buf;
    }
}

void write_csv_file(const std::string& path, const DensityField& field) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(out, field);
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

Norm parse_norm(const std::string& name) {
    if (name == "l1" || name == "L1") return Norm::l1;
    if (name == "linf" || name == "Linf" || name == "inf") return Norm::linf;
    throw InputError("unknown norm '" + name + "' (expected l1 or linf)");
}

double CompareReport::at_time(double t) const {
    double v = 0.0;
    for (const auto& s : slices)
        if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, std::abs(t))) v = std::max(v, s.value);
    return v;
}

std::string CompareReport::summary() const {
    std::ostringstream os;
    os.precision(6);
    os << (norm == Norm::l1 ? "L1" : "Linf") << " = " << overall << " (worst at t = " << worst.t << ", s = " << worst.s
       << ", x = " << worst.worst_x << ")";
    return os.str();
}

namespace {

std::vector<double> interpolate(std::span<const double> xs, std::span<const double> f, std::span<const double> at) {
    std::vector<double> out(at.size());
    for (std::size_t k = 0; k < at.size(); ++k) {
        const double x = at[k];
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
        i = std::min(i, xs.size() - 2);
        const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
        out[k] = (1.0 - w) * f[i] + w * f[i + 1];
    }
    return out;
}

}  // namespace

CompareReport compare(const DensityField& a, const DensityField& b, Norm norm) {
    if (a.nt() != b.nt()) throw InputError("compare: fields have different numbers of time slices");
    for (std::size_t t = 0; t < a.nt(); ++t)
        if (std::abs(a.times[t] - b.times[t]) > 1e-12 * std::max(1.0, std::abs(a.times[t])))
            throw InputError("compare: time slices differ");
    if (a.ns() != b.ns()) throw InputError("compare: fields have different s-samples (convert continuous output to states first)");
    for (std::size_t si = 0; si < a.ns(); ++si)
        if (std::abs(a.s[si] - b.s[si]) > 1e-12) throw InputError("compare: s-samples differ");
    if (a.nx() < 2 || b.nx() < 2) throw InputError("compare: x grids need at least two points");

    const bool a_coarse = a.nx() <= b.nx();
    const DensityField& coarse = a_coarse ? a : b;
    const DensityField& fine = a_coarse ? b : a;
    const double lo = std::max(coarse.x.front(), fine.x.front());
    const double hi = std::min(coarse.x.back(), fine.x.back());
    if (!(lo < hi)) throw InputError("compare: x grids are disjoint");
    std::vector<double> xs;
    std::size_t first = 0;
    for (std::size_t i = 0; i < coarse.nx(); ++i)
        if (coarse.x[i] >= lo - 1e-12 && coarse.x[i] <= hi + 1e-12) {
            if (xs.empty()) first = i;
            xs.push_back(coarse.x[i]);
        }
    if (xs.size() < 2) throw InputError("compare: overlap too small");

    CompareReport rep;
    rep.norm = norm;
    for (std::size_t t = 0; t < a.nt(); ++t) {
        for (std::size_t si = 0; si < a.ns(); ++si) {
            const auto c = coarse.slice(t, si).subspan(first, xs.size());
            const std::vector<double> f = interpolate(fine.x, fine.slice(t, si), xs);
            std::vector<double> d(xs.size());
            std::size_t arg = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                d[i] = std::abs(c[i] - f[i]);
                if (d[i] > d[arg]) arg = i;
            }
            SliceError e{a.times[t], a.s[si], 0.0, xs[arg]};
            e.value = norm == Norm::linf ? d[arg] : trapezoid(xs, d);
            rep.slices.push_back(e);
            if (e.value >= rep.overall) {
                rep.overall = e.value;
                rep.worst = e;
            }
        }
    }
    return rep;
}

}  // namespace rsfp
