// rsfp: command-line front end.
//
//   rsfp solve       --config FILE | --preset figN   [--solver S] [--out FILE] [--bounds FILE]
//   rsfp compare     --config FILE | --preset figN   --a S --b S [--norm linf|l1] [--tol V]
//   rsfp reproduce-fig {1|2|3} [--out FILE]
//   rsfp validate    --config FILE | --preset figN
//
// Settings are applied in this order, later ones winning: preset or config
// file, --set key=value, then the dedicated flags (--seed, --grid-nx, ...).
//
// Exit status: 0 ok, 1 validation failure, 2 numerical tolerance failure,
// 3 I/O or parse error.

#include "rsfp/density.hpp"
#include "rsfp/error.hpp"
#include "rsfp/scenario.hpp"
#include "rsfp/simd/kernels.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace {

enum Exit { kOk = 0, kValidation = 1, kTolerance = 2, kIo = 3 };

struct Common {
    std::string config;
    std::string preset;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid_nx;
    std::optional<double> mu_max;
    std::optional<std::size_t> paths;
    std::string out;
};

void add_common(CLI::App* app, Common& c, bool scenario_source = true) {
    if (scenario_source) {
        auto* cfg = app->add_option("--config", c.config, "scenario file (key = value lines)")->check(CLI::ExistingFile);
        auto* pre = app->add_option("--preset", c.preset, "built-in scenario: fig1, fig2, fig3");
        cfg->excludes(pre);
        pre->excludes(cfg);
    }
    app->add_option("--set", c.sets, "override a scenario key, KEY=VALUE (repeatable)");
    app->add_option("--seed", c.seed, "Monte-Carlo seed");
    app->add_option("--grid-nx", c.grid_nx, "output x points");
    app->add_option("--mu-max", c.mu_max, "spectral cutoff in mu");
    app->add_option("--paths", c.paths, "Monte-Carlo paths");
    app->add_option("--out", c.out, "output CSV (default: stdout)");
}

rsfp::Scenario load(const Common& c) {
    rsfp::Scenario sc;
    if (!c.preset.empty()) sc = rsfp::preset(c.preset);
    else if (!c.config.empty()) sc = rsfp::load_config(c.config);
    else throw CLI::RequiredError("--config or --preset");

    std::map<std::string, std::string> ov;
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw rsfp::ConfigError(0, kv, "--set expects KEY=VALUE");
        ov[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (c.seed) ov["seed"] = std::to_string(*c.seed);
    if (c.grid_nx) ov["grid_nx"] = std::to_string(*c.grid_nx);
    if (c.paths) ov["paths"] = std::to_string(*c.paths);
    if (c.mu_max) {
        std::ostringstream os;
        os.precision(17);
        os << *c.mu_max;
        ov["mu_max"] = os.str();
    }
    if (!ov.empty()) rsfp::apply_overrides(sc, ov);
    if (!c.out.empty()) sc.out = c.out;
    return sc;
}

void emit(const rsfp::Scenario& sc, const rsfp::RunResult& r) {
    for (const auto& n : r.notes) std::cerr << "  " << n << "\n";
    if (sc.out.empty()) {
        rsfp::write_csv(std::cout, r.field);
        if (!r.meta_json.empty()) std::cerr << r.meta_json;
        return;
    }
    rsfp::write_csv_file(sc.out, r.field);
    std::cerr << "wrote " << sc.out << "\n";
    if (!r.meta_json.empty()) {
        const std::string meta = sc.out + ".meta.json";
        std::ofstream os(meta, std::ios::binary);
        if (!(os << r.meta_json)) throw std::ios_base::failure("cannot write " + meta);
        std::cerr << "wrote " << meta << "\n";
    }
}

int cmd_validate(const rsfp::Scenario& sc) {
    bool ok = true;
    const rsfp::ValidationReport cont = rsfp::validate(sc.model);
    std::cout << "continuous model: " << (cont.ok() ? "ok" : cont.summary()) << "\n";
    ok = ok && cont.ok();
    if (sc.discrete) {
        const rsfp::ValidationReport disc = rsfp::validate(*sc.discrete);
        std::cout << "rate matrix:      " << (disc.ok() ? "ok" : disc.summary()) << "\n";
        ok = ok && disc.ok();
    }
    const rsfp::QPropertyReport q = rsfp::check_q_property_continuous(sc.model.K);
    std::cout << "q-property:       " << (q.ok() ? "ok" : q.summary()) << "\n";
    ok = ok && q.ok();
    if (sc.model.common_cells() > 0 && cont.ok()) {
        const rsfp::DiscreteModel cells = rsfp::oracle_model(sc);
        const rsfp::ValidationReport cr = rsfp::validate(cells);
        std::cout << "cell system:      " << (cr.ok() ? "ok" : cr.summary()) << " (" << cells.states() << " cells)\n";
        ok = ok && cr.ok();
    }
    const double total = sc.data.weights.sum() / static_cast<double>(sc.data.cells());
    std::printf("initial mass:     %.17g\n", total);
    return ok ? kOk : kValidation;
}

rsfp::DensityField as_states(const rsfp::Scenario& sc, const rsfp::DensityField& f) {
    if (f.states) return f;
    const std::size_t cells = sc.model.common_cells();
    if (cells == 0) throw rsfp::InputError("state comparison needs a stepwise model");
    return rsfp::to_states(f, cells);
}

int cmd_compare(const rsfp::Scenario& sc, rsfp::Solver a, rsfp::Solver b, rsfp::Norm norm, std::optional<double> tol) {
    const rsfp::RunResult ra = rsfp::run_solver(sc, a);
    const rsfp::RunResult rb = rsfp::run_solver(sc, b);
    const bool mixed = ra.field.states != rb.field.states;
    const rsfp::CompareReport rep = mixed ? rsfp::compare(as_states(sc, ra.field), as_states(sc, rb.field), norm)
                                          : rsfp::compare(ra.field, rb.field, norm);
    std::cout << rsfp::solver_name(a) << " vs " << rsfp::solver_name(b) << "\n" << rep.summary() << "\n";
    if (tol) {
        const bool pass = rep.overall <= *tol;
        std::printf("%s: %.6e %s %.6e\n", pass ? "PASS" : "FAIL", rep.overall, pass ? "<=" : ">", *tol);
        return pass ? kOk : kTolerance;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral solver for Fokker-Planck equations with a continuum of switching states"};
    app.fallthrough();
    app.require_subcommand(1);
    std::string isa;
    app.add_option("--isa", isa, "kernel variant: scalar or avx2 (default: best available)");

    Common solve_c, cmp_c, fig_c, val_c;

    auto* solve = app.add_subcommand("solve", "run one solver and write the density CSV");
    add_common(solve, solve_c);
    std::string solver_flag, bounds_path;
    solve->add_option("--solver", solver_flag, "spectral, closed_form, fd or mc (default: from the scenario)");
    solve->add_option("--bounds", bounds_path, "also write t,x,s,lower,upper to this file");

    auto* cmp = app.add_subcommand("compare", "run two solvers and report their distance");
    add_common(cmp, cmp_c);
    std::string sa, sb, norm_name = "linf";
    std::optional<double> tol;
    cmp->add_option("--a", sa, "first solver")->required();
    cmp->add_option("--b", sb, "second solver")->required();
    cmp->add_option("--norm", norm_name, "linf or l1");
    cmp->add_option("--tol", tol, "fail (exit 2) when the overall error exceeds this");

    auto* fig = app.add_subcommand("reproduce-fig", "write the density CSV of a built-in figure scenario");
    add_common(fig, fig_c, false);
    int fig_no = 0;
    fig->add_option("figure", fig_no, "1, 2 or 3")->required()->check(CLI::IsMember({1, 2, 3}));

    auto* val = app.add_subcommand("validate", "check the q-property and model invariants");
    add_common(val, val_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kIo;
    }

    try {
        if (!isa.empty()) {
            const auto v = rsfp::simd::parse_isa(isa);
            if (!v) throw rsfp::ConfigError(0, "--isa", "expected scalar or avx2");
            rsfp::simd::force_isa(*v);
        }
        if (*solve) {
            rsfp::Scenario sc = load(solve_c);
            const rsfp::Solver s = solver_flag.empty() ? sc.solver : rsfp::parse_solver(solver_flag);
            emit(sc, rsfp::run_solver(sc, s));
            if (!bounds_path.empty()) {
                std::ofstream os(bounds_path, std::ios::binary);
                if (!os) throw std::ios_base::failure("cannot write " + bounds_path);
                rsfp::write_bounds_csv(os, sc);
                if (!os) throw std::ios_base::failure("cannot write " + bounds_path);
            }
            return kOk;
        }
        if (*cmp) {
            const rsfp::Scenario sc = load(cmp_c);
            return cmd_compare(sc, rsfp::parse_solver(sa), rsfp::parse_solver(sb), rsfp::parse_norm(norm_name), tol);
        }
        if (*fig) {
            fig_c.preset = "fig" + std::to_string(fig_no);
            const rsfp::Scenario sc = load(fig_c);
            emit(sc, rsfp::run_solver(sc, sc.solver));
            return kOk;
        }
        if (*val) return cmd_validate(load(val_c));
    } catch (const rsfp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kIo;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const rsfp::InputError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const rsfp::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kTolerance;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    return kOk;
}
