#include "rsfp/scenario.hpp"

#include "rsfp/error.hpp"
#include "rsfp/fd.hpp"
#include "rsfp/monte_carlo.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <ostream>
#include <sstream>

namespace rsfp {

Solver parse_solver(const std::string& name) {
    if (name == "spectral") return Solver::spectral;
    if (name == "closed_form") return Solver::closed_form;
    if (name == "fd") return Solver::fd;
    if (name == "mc") return Solver::mc;
    throw InputError("unknown solver '" + name + "' (spectral, closed_form, fd, mc)");
}

std::string solver_name(Solver s) {
    switch (s) {
        case Solver::spectral: return "spectral";
        case Solver::closed_form: return "closed_form";
        case Solver::fd: return "fd";
        case Solver::mc: return "mc";
    }
    return "?";
}

std::size_t Scenario::cells() const {
    if (s_cells) return s_cells;
    std::size_t n = model.common_cells();
    if (n == 0) n = 16;
    return std::lcm(n, std::max<std::size_t>(1, data.cells()));
}

// ------------------------------------------------------------------ parsing

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

struct Raw {
    int line;
    std::string key, value;
};

std::vector<double> numbers(const Raw& r) {
    std::string v = r.value;
    for (char& ch : v)
        if (ch == ',' || ch == '[' || ch == ']' || ch == ';') ch = ' ';
    std::istringstream is(v);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) {
        errno = 0;
        char* end = nullptr;
        const double d = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(d))
            throw ConfigError(r.line, r.key, "'" + tok + "' is not a finite number");
        out.push_back(d);
    }
    if (out.empty()) throw ConfigError(r.line, r.key, "expected at least one number");
    return out;
}

double number(const Raw& r) {
    const auto v = numbers(r);
    if (v.size() != 1) throw ConfigError(r.line, r.key, "expected a single number");
    return v[0];
}

std::size_t count(const Raw& r) {
    const double d = number(r);
    if (d < 0.0 || d != std::floor(d) || d > 1e12) throw ConfigError(r.line, r.key, "expected a non-negative integer");
    return static_cast<std::size_t>(d);
}

/// Model pieces collected before the model is assembled.
struct Draft {
    std::optional<std::size_t> states;
    std::optional<Raw> Q, qji, haar;
    std::string kernel = "rates";
    std::optional<Raw> b, c, sigma;
    std::string family;
    std::optional<Raw> means;
    double var = kUnitGaussianVar;
    std::optional<Raw> family_raw;
};

Eigen::MatrixXd square(const Raw& r, std::size_t n) {
    const auto v = numbers(r);
    if (v.size() != n * n)
        throw ConfigError(r.line, r.key, "expected " + std::to_string(n * n) + " entries for a " + std::to_string(n) + "x" +
                                             std::to_string(n) + " matrix, got " + std::to_string(v.size()));
    Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i * n + j];
    return M;
}

std::vector<double> per_state(const std::optional<Raw>& r, std::size_t n, double fallback, const char* key) {
    if (!r) return std::vector<double>(n, fallback);
    auto v = numbers(*r);
    if (v.size() == 1) v.assign(n, v[0]);
    if (v.size() != n) throw ConfigError(r->line, key, "expected 1 or " + std::to_string(n) + " values");
    return v;
}

void assemble(Scenario& sc, Draft& d, int last_line) {
    if (d.kernel == "haar_coeffs") {
        if (!d.haar) throw ConfigError(last_line, "haar_coeffs", "kernel = haar_coeffs needs a haar_coeffs matrix");
        const auto v = numbers(*d.haar);
        const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v.size()))));
        if (n * n != v.size() || n < 2 || (n & (n - 1)) != 0)
            throw ConfigError(d.haar->line, "haar_coeffs", "expected an N x N matrix with N a power of two");
        if (d.states && *d.states != n) throw ConfigError(d.haar->line, "haar_coeffs", "size does not match states");
        const KernelMatrix km{square(*d.haar, n), OrthonormalBasis(BasisKind::haar, n)};
        const Kernel K = reconstruct_kernel(km);
        const DiscreteModel dm = DiscreteModel::from_qji(K.cells(), per_state(d.b, n, 0.0, "b"),
                                                         per_state(d.c, n, 0.0, "c"), per_state(d.sigma, n, 1.0, "sigma"));
        const ValidationReport rep = validate(dm);
        if (!rep.ok()) throw InputError("line " + std::to_string(d.haar->line) + " [haar_coeffs]: reconstructed kernel is invalid: " + rep.summary());
        sc.discrete = dm;
        sc.model = discrete_to_continuous(dm);
    } else if (d.kernel == "rates") {
        if (d.Q && d.qji) throw ConfigError(d.qji->line, "qji", "give either Q or qji, not both");
        const std::optional<Raw>& src = d.Q ? d.Q : d.qji;
        if (!src) throw ConfigError(last_line, "Q", "missing rate matrix (Q or qji)");
        std::size_t n = d.states.value_or(0);
        if (!n) n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(numbers(*src).size()))));
        const Eigen::MatrixXd M = square(*src, n);
        DiscreteModel dm{d.Q ? M : Eigen::MatrixXd(M.transpose()), per_state(d.b, n, 0.0, "b"), per_state(d.c, n, 0.0, "c"),
                         per_state(d.sigma, n, 1.0, "sigma")};
        const ValidationReport rep = validate(dm);
        if (!rep.ok()) throw InputError("line " + std::to_string(src->line) + " [" + src->key + "]: " + rep.summary());
        sc.discrete = dm;
        sc.model = discrete_to_continuous(dm);
    } else {
        throw ConfigError(last_line, "kernel", "unknown kernel kind '" + d.kernel + "' (rates or haar_coeffs)");
    }

    const std::size_t n = sc.discrete->states();
    const std::string fam = d.family.empty() ? "stepwise_gaussian" : d.family;
    const int fl = d.family_raw ? d.family_raw->line : last_line;
    std::vector<double> means;
    if (d.means) means = numbers(*d.means);
    try {
        if (fam == "uniform_gaussian") sc.data = uniform_gaussian(means.empty() ? 0.0 : means.at(0), d.var);
        else if (fam == "uniform_delta") sc.data = uniform_delta(means.empty() ? 0.0 : means.at(0));
        else if (fam == "stepwise_gaussian" || fam == "stepwise_delta") {
            if (means.size() != n) throw ConfigError(d.means ? d.means->line : fl, "means", "expected one mean per state");
            sc.data = fam == "stepwise_gaussian" ? stepwise_gaussian(means, d.var) : stepwise_delta(means);
        } else {
            throw ConfigError(fl, "data", "unknown data family '" + fam + "'");
        }
    } catch (const InputError& e) {
        throw ConfigError(fl, "data", e.what());
    }
}

using Setter = std::function<void(Scenario&, Draft&, const Raw&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"name", [](Scenario& s, Draft&, const Raw& r) { s.name = r.value; }},
        {"states", [](Scenario&, Draft& d, const Raw& r) { d.states = count(r); }},
        {"Q", [](Scenario&, Draft& d, const Raw& r) { d.Q = r; }},
        {"qji", [](Scenario&, Draft& d, const Raw& r) { d.qji = r; }},
        {"kernel", [](Scenario&, Draft& d, const Raw& r) { d.kernel = r.value; }},
        {"haar_coeffs", [](Scenario&, Draft& d, const Raw& r) { d.haar = r; }},
        {"b", [](Scenario&, Draft& d, const Raw& r) { d.b = r; }},
        {"c", [](Scenario&, Draft& d, const Raw& r) { d.c = r; }},
        {"sigma", [](Scenario&, Draft& d, const Raw& r) { d.sigma = r; }},
        {"data", [](Scenario&, Draft& d, const Raw& r) { d.family = r.value; d.family_raw = r; }},
        {"means", [](Scenario&, Draft& d, const Raw& r) { d.means = r; }},
        {"var", [](Scenario&, Draft& d, const Raw& r) { d.var = number(r); }},
        {"solver", [](Scenario& s, Draft&, const Raw& r) {
             try { s.solver = parse_solver(r.value); } catch (const InputError& e) { throw ConfigError(r.line, r.key, e.what()); }
         }},
        {"times", [](Scenario& s, Draft&, const Raw& r) {
             s.times = numbers(r);
             for (std::size_t i = 0; i < s.times.size(); ++i)
                 if (s.times[i] < 0.0 || (i && s.times[i] < s.times[i - 1]))
                     throw ConfigError(r.line, r.key, "times must be non-negative and ascending");
         }},
        {"L", [](Scenario& s, Draft&, const Raw& r) { s.L = number(r); }},
        {"grid_nx", [](Scenario& s, Draft&, const Raw& r) { s.grid_nx = count(r); }},
        {"dx", [](Scenario& s, Draft&, const Raw& r) { s.dx = number(r); }},
        {"dt", [](Scenario& s, Draft&, const Raw& r) { s.dt = number(r); }},
        {"s_cells", [](Scenario& s, Draft&, const Raw& r) { s.s_cells = count(r); }},
        {"mu_max", [](Scenario& s, Draft&, const Raw& r) { s.spectral.mu_max = number(r); }},
        {"dmu", [](Scenario& s, Draft&, const Raw& r) { s.spectral.dmu = number(r); }},
        {"basis", [](Scenario& s, Draft&, const Raw& r) {
             if (r.value == "haar") s.spectral.basis = BasisKind::haar;
             else if (r.value == "cosine") s.spectral.basis = BasisKind::cosine;
             else throw ConfigError(r.line, r.key, "expected haar or cosine");
         }},
        {"basis_size", [](Scenario& s, Draft&, const Raw& r) { s.spectral.basis_size = count(r); }},
        {"coupling", [](Scenario& s, Draft&, const Raw& r) {
             if (r.value == "factorized") s.spectral.coupling = Coupling::factorized;
             else if (r.value == "galerkin") s.spectral.coupling = Coupling::galerkin;
             else throw ConfigError(r.line, r.key, "expected factorized or galerkin");
         }},
        {"transport", [](Scenario& s, Draft&, const Raw& r) {
             if (r.value == "characteristic") s.spectral.transport = Transport::characteristic;
             else if (r.value == "frozen_mode") s.spectral.transport = Transport::frozen_mode;
             else throw ConfigError(r.line, r.key, "expected characteristic or frozen_mode");
         }},
        {"reassembly", [](Scenario& s, Draft&, const Raw& r) {
             if (r.value == "auto") s.spectral.reassembly = Reassembly::automatic;
             else if (r.value == "closed_form") s.spectral.reassembly = Reassembly::closed_form;
             else if (r.value == "quadrature") s.spectral.reassembly = Reassembly::quadrature;
             else throw ConfigError(r.line, r.key, "expected auto, closed_form or quadrature");
         }},
        {"oracle_rates", [](Scenario& s, Draft&, const Raw& r) {
             if (r.value == "cell") s.oracle_rates = OracleRates::cell;
             else if (r.value == "state") s.oracle_rates = OracleRates::state;
             else throw ConfigError(r.line, r.key, "expected cell or state");
         }},
        {"paths", [](Scenario& s, Draft&, const Raw& r) { s.paths = count(r); }},
        {"seed", [](Scenario& s, Draft&, const Raw& r) {
             const std::string v = trim(r.value);
             char* end = nullptr;
             errno = 0;
             const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
             if (v.empty() || *end != '\0' || errno == ERANGE || v[0] == '-') throw ConfigError(r.line, r.key, "expected an unsigned 64-bit integer");
             s.seed = u;
         }},
        {"dt_sde", [](Scenario& s, Draft&, const Raw& r) { s.dt_sde = number(r); }},
        {"bins", [](Scenario& s, Draft&, const Raw& r) { s.bins = count(r); }},
        {"out", [](Scenario& s, Draft&, const Raw& r) { s.out = r.value; }},
    };
    return table;
}

bool is_model_key(const std::string& k) {
    static const char* keys[] = {"states", "Q", "qji", "kernel", "haar_coeffs", "b", "c", "sigma", "data", "means", "var"};
    return std::find(std::begin(keys), std::end(keys), k) != std::end(keys);
}

void positive_checks(const Scenario& sc) {
    if (sc.times.empty()) throw ConfigError(0, "times", "at least one output time is required");
    if (!(sc.dx > 0.0)) throw ConfigError(0, "dx", "must be positive");
    if (sc.dt < 0.0) throw ConfigError(0, "dt", "must be non-negative");
    if (sc.L < 0.0) throw ConfigError(0, "L", "must be non-negative");
    if (sc.grid_nx < 2) throw ConfigError(0, "grid_nx", "must be at least 2");
    if (!(sc.dt_sde > 0.0)) throw ConfigError(0, "dt_sde", "must be positive");
}

}  // namespace

Scenario parse_config(std::istream& in) {
    Scenario sc;
    Draft d;
    std::string line;
    int ln = 0;
    bool any_model = false;
    while (std::getline(in, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(ln, trim(line), "expected 'key = value'");
        Raw r{ln, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
        if (r.value.empty()) throw ConfigError(ln, r.key, "missing value");
        const auto it = setters().find(r.key);
        if (it == setters().end()) throw ConfigError(ln, r.key, "unknown key");
        it->second(sc, d, r);
        any_model = any_model || is_model_key(r.key);
    }
    if (!any_model) throw ConfigError(ln, "Q", "no model given");
    assemble(sc, d, ln);
    positive_checks(sc);
    return sc;
}

Scenario load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    return parse_config(in);
}

void apply_overrides(Scenario& sc, const std::map<std::string, std::string>& overrides) {
    Draft unused;
    for (const auto& [k, v] : overrides) {
        if (is_model_key(k)) throw ConfigError(0, k, "model keys cannot be overridden from the command line");
        const auto it = setters().find(k);
        if (it == setters().end()) throw ConfigError(0, k, "unknown key");
        it->second(sc, unused, Raw{0, k, v});
    }
    positive_checks(sc);
}

// ------------------------------------------------------------------ presets

Scenario preset(const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.solver = Solver::closed_form;
    if (name == "fig1" || name == "fig2") {
        TwoStateParams p = TwoStateParams::reference();
        if (name == "fig1") p.b1 = p.b2 = 0.0;
        const ContinuousModel cm = p.model();
        sc.discrete = continuous_to_discrete(cm, 2);
        sc.model = cm;
        if (name == "fig1") {
            sc.data = stepwise_gaussian({p.m1, p.m2});
            sc.times = {0.0, 1.0, 10.0};
        } else {
            sc.data = stepwise_delta({p.m1, p.m2});
            sc.times = {0.1, 0.5, 100.0};
        }
        sc.grid_nx = name == "fig1" ? 1201 : 601;
    } else if (name == "fig3") {
        const FourStateParams p;
        const ContinuousModel cm = p.model();
        sc.discrete = continuous_to_discrete(cm, 4);
        sc.model = cm;
        sc.data = stepwise_gaussian({p.m[0], p.m[1], p.m[2], p.m[3]});
        sc.times = {0.0, 3.0, 15.0};
        sc.grid_nx = 1201;
    } else {
        throw InputError("unknown preset '" + name + "' (fig1, fig2, fig3)");
    }
    return sc;
}

// ------------------------------------------------------------------ oracles

DiscreteModel oracle_model(const Scenario& sc) {
    const std::size_t cells = sc.model.common_cells();
    if (cells == 0) throw InputError("the FD and Monte-Carlo oracles need a stepwise model");
    if (sc.oracle_rates == OracleRates::state) {
        if (!sc.discrete) throw InputError("oracle_rates = state needs a model given by a rate matrix");
        return *sc.discrete;
    }
    return cell_system(sc.model, cells);
}

InitialData oracle_data(const Scenario& sc) {
    const std::size_t cells = sc.model.common_cells();
    if (cells == 0) throw InputError("the FD and Monte-Carlo oracles need a stepwise model");
    if (cells % sc.data.cells() != 0) throw InputError("initial data cells do not align with the model cells");
    InitialData d = sc.data;
    d.weights.resize(static_cast<Eigen::Index>(cells), sc.data.weights.cols());
    const std::size_t rep = cells / sc.data.cells();
    for (std::size_t j = 0; j < cells; ++j) d.weights.row(static_cast<Eigen::Index>(j)) = sc.data.weights.row(static_cast<Eigen::Index>(j / rep));
    return d.scaled(1.0 / static_cast<double>(cells));
}

double domain_half_width(const Scenario& sc) {
    if (sc.L > 0.0) return sc.L;
    if (sc.model.common_cells() == 0) throw InputError("set L explicitly for smooth models");
    return make_fd_grid(oracle_model(sc), oracle_data(sc), sc.horizon(), sc.dx).L;
}

// ------------------------------------------------------------------ closed forms

std::optional<TwoStateParams> match_two_state(const Scenario& sc) {
    const ContinuousModel& m = sc.model;
    if (!m.K.is_stepwise() || m.K.cells().rows() != 2) return std::nullopt;
    if (!m.R.is_stepwise() || !m.b.is_stepwise() || !m.c.is_stepwise()) return std::nullopt;
    const Eigen::MatrixXd& K = m.K.cells();
    TwoStateParams p;
    p.lambda1 = -K(0, 0);
    p.lambda2 = -K(1, 1);
    if (K(0, 1) != p.lambda2 || K(1, 0) != p.lambda1) return std::nullopt;
    if (m.c.max() != m.c.min()) return std::nullopt;
    p.c = m.c.max();
    p.R1 = m.R(0.25);
    p.R2 = m.R(0.75);
    p.b1 = m.b(0.25);
    p.b2 = m.b(0.75);
    if (m.R.cells() > 2 || m.b.cells() > 2) {
        for (double s : {0.0, 0.49, 0.5, 1.0})
            if (m.R(s) != p.R(s) || m.b(s) != p.b(s)) return std::nullopt;
    }
    if (sc.data.cells() == 2 && sc.data.components.size() == 2) {
        p.m1 = sc.data.components[0].mean;
        p.m2 = sc.data.components[1].mean;
    }
    return p;
}

std::optional<FourStateParams> match_four_state(const Scenario& sc) {
    const ContinuousModel& m = sc.model;
    if (!m.K.is_stepwise() || m.K.cells().rows() != 4 || !m.R.is_stepwise()) return std::nullopt;
    if (m.b.max() != 0.0 || m.b.min() != 0.0 || m.c.max() != 0.0 || m.c.min() != 0.0) return std::nullopt;
    FourStateParams p;
    p.lambda1 = m.K.cells()(0, 1);
    p.lambda2 = m.K.cells()(0, 2);
    p.r0 = m.R(0.125);
    if (!(p.lambda1 > 0.0 && p.lambda2 > 0.0 && p.r0 > 0.0 && p.r0 < 2.0)) return std::nullopt;
    if ((m.K.cells() - Eigen::MatrixXd(p.qji())).cwiseAbs().maxCoeff() > 1e-15) return std::nullopt;
    for (int j = 0; j < 4; ++j) {
        const double s = (j + 0.5) / 4.0;
        if (std::abs(m.R(s) * m.R(s) - p.R2(s)) > 1e-12) return std::nullopt;
    }
    if (sc.data.cells() != 4 || sc.data.components.size() != 4) return std::nullopt;
    for (std::size_t c = 0; c < 4; ++c) p.m[c] = sc.data.components[c].mean;
    return p;
}

namespace {

bool unit_gaussians(const InitialData& d) {
    for (const auto& c : d.components)
        if (c.var != kUnitGaussianVar) return false;
    return true;
}

bool identity_weights(const InitialData& d) {
    return d.weights.rows() == d.weights.cols() && d.weights.isIdentity(0.0);
}

using PointFn = std::function<double(double t, double x, double s)>;

PointFn closed_form_for(const Scenario& sc, std::string& label) {
    const auto fam = sc.data.family;
    if (auto p = match_two_state(sc)) {
        const bool b0 = p->b1 == 0.0 && p->b2 == 0.0;
        const bool bneg = p->b1 < 0.0 && p->b2 < 0.0;
        const TwoStateParams q = *p;
        const BasisKind basis = sc.spectral.basis;
        if (fam == "uniform_gaussian" && b0 && sc.data.components[0].mean == 0.0 && unit_gaussians(sc.data)) {
            label = "uniform_gaussian_b0";
            return [q](double t, double x, double s) { return uniform_gaussian_b0(q, t, x, s); };
        }
        if (fam == "uniform_delta" && bneg && sc.data.components[0].mean == 0.0) {
            label = "delta_bneg";
            return [q](double t, double x, double s) { return delta_bneg(q, t, x, s); };
        }
        if (fam == "stepwise_gaussian" && b0 && unit_gaussians(sc.data) && identity_weights(sc.data) && sc.data.cells() == 2) {
            label = "stepwise_gaussian_b0";
            return [q, basis](double t, double x, double s) { return stepwise_gaussian_b0(q, t, x, s, basis); };
        }
        if (fam == "stepwise_delta" && bneg && identity_weights(sc.data) && sc.data.cells() == 2) {
            label = "stepwise_delta_bneg";
            return [q](double t, double x, double s) { return stepwise_delta_bneg(q, t, x, s); };
        }
        if (fam == "uniform_gaussian" && bneg)
            throw InputError("uniform Gaussian data with b < 0 have bounds only; use the bounds output");
    }
    if (auto p = match_four_state(sc)) {
        if (fam == "stepwise_gaussian" && unit_gaussians(sc.data) && identity_weights(sc.data)) {
            label = "four_state_solution";
            const FourStateParams q = *p;
            return [q](double t, double x, double s) { return four_state_solution(q, t, x, s); };
        }
    }
    throw InputError("no closed-form solution family matches this scenario");
}

}  // namespace

void write_bounds_csv(std::ostream& os, const Scenario& sc) {
    const auto p = match_two_state(sc);
    if (!p || sc.data.family != "uniform_gaussian" || !(p->b1 < 0.0 && p->b2 < 0.0))
        throw InputError("bounds are available for two-state uniform Gaussian data with b < 0 only");
    const std::vector<double> x = linspace(-domain_half_width(sc), domain_half_width(sc), sc.grid_nx);
    std::vector<double> s, w;
    midpoint_samples(sc.cells(), s, w);
    os << "t,x,s,lower,upper\n";
    char buf[160];
    for (double t : sc.times)
        for (double si : s)
            for (double xi : x) {
                const Bounds bd = uniform_gaussian_bneg_bounds(*p, t, xi, si);
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", t, xi, si, bd.lower, bd.upper);
                os << buf;
            }
}

RunResult run_solver(const Scenario& sc, Solver solver) {
    if (sc.times.empty()) throw InputError("no output times");
    RunResult res;
    const double L = domain_half_width(sc);
    auto fmt = [](const char* label, double v) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s = %.6g", label, v);
        return std::string(buf);
    };

    switch (solver) {
        case Solver::spectral: {
            const XSGrid grid = XSGrid::midpoints(linspace(-L, L, sc.grid_nx), sc.cells());
            SpectralResult r = spectral_solve(sc.model, sc.data, sc.times, grid, sc.spectral);
            res.field = std::move(r.field);
            res.notes.push_back("reassembly = " + r.diag.reassembly);
            res.notes.push_back(fmt("basis size", static_cast<double>(r.diag.basis_size)));
            res.notes.push_back(fmt("mode-0 drift", r.diag.mode0_drift));
            res.notes.push_back(fmt("mass drift", r.diag.mass_drift));
            res.notes.push_back(fmt("spectral abscissa", r.diag.spectral_abscissa));
            break;
        }
        case Solver::closed_form: {
            std::string label;
            const PointFn f = closed_form_for(sc, label);
            std::vector<double> s, w;
            midpoint_samples(sc.cells(), s, w);
            res.field = DensityField(sc.times, linspace(-L, L, sc.grid_nx), s, w, false);
            for (std::size_t ti = 0; ti < sc.times.size(); ++ti)
                for (std::size_t si = 0; si < s.size(); ++si) {
                    auto row = res.field.slice(ti, si);
                    for (std::size_t xi = 0; xi < row.size(); ++xi) row[xi] = f(sc.times[ti], res.field.x[xi], s[si]);
                }
            res.notes.push_back("closed form = " + label);
            break;
        }
        case Solver::fd: {
            const DiscreteModel dm = oracle_model(sc);
            const InitialData data = oracle_data(sc);
            FDGrid g = make_fd_grid(dm, data, sc.horizon(), sc.dx);
            if (sc.L > 0.0) {
                g.nx = static_cast<std::size_t>(std::ceil(2.0 * sc.L / sc.dx)) - 1;
                g.L = 0.5 * static_cast<double>(g.nx + 1) * sc.dx;
                g.dt = 0.9 * FDGrid::cfl_limit(dm, g.L, g.dx());
            }
            if (sc.dt > 0.0) g.dt = sc.dt;
            FDStats st;
            res.field = fd_solve(dm, data, g, sc.times, &st);
            res.notes.push_back(fmt("dx", g.dx()));
            res.notes.push_back(fmt("dt", g.dt));
            res.notes.push_back(fmt("L", g.L));
            res.notes.push_back(fmt("mass drift", st.mass_drift));
            res.notes.push_back(fmt("boundary leak", st.leak));
            break;
        }
        case Solver::mc: {
            MCOptions o;
            o.paths = sc.paths;
            o.dt_sde = sc.dt_sde;
            o.seed = sc.seed;
            o.save_times = sc.times;
            const PathEnsemble ens = mc_simulate(oracle_model(sc), oracle_data(sc), o);
            EstimateOptions eo;
            eo.lo = -L;
            eo.hi = L;
            eo.bins = sc.bins ? sc.bins : std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(20.0 * L)));
            res.field = estimate_density(ens, eo);
            res.meta_json = ensemble_meta_json(ens);
            res.notes.push_back(fmt("unstable paths", static_cast<double>(ens.unstable)));
            break;
        }
    }
    return res;
}

}  // namespace rsfp
