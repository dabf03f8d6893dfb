#include "rsfp/monte_carlo.hpp"

#include "rsfp/error.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rsfp {

std::vector<double> PathEnsemble::occupancy(std::size_t ti) const {
    std::vector<double> occ(states, 0.0);
    const std::uint16_t* st = state.data() + ti * paths;
    for (std::size_t k = 0; k < paths; ++k) occ[st[k]] += 1.0;
    for (double& o : occ) o /= static_cast<double>(paths);
    return occ;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit(boost::random::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

std::size_t pick(const std::vector<double>& cumulative, double u) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t k) { return splitmix64(splitmix64(seed) ^ k); }

PathEnsemble mc_simulate(const DiscreteModel& dm, const InitialData& data, const MCOptions& opt) {
    const ValidationReport v = validate(dm);
    if (!v.ok()) throw InputError("invalid discrete model: " + v.summary());
    const std::size_t S = dm.states();
    if (S > std::numeric_limits<std::uint16_t>::max()) throw InputError("too many states");
    if (data.cells() != S) throw InputError("initial data must have one row per state");
    if (opt.paths == 0) throw InputError("at least one path is required");
    if (!(opt.dt_sde > 0.0)) throw InputError("dt_sde must be positive");
    if (opt.save_times.empty()) throw InputError("no save times");
    double max_rate = 0.0;
    for (std::size_t i = 0; i < S; ++i) max_rate = std::max(max_rate, -dm.Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
    if (opt.dt_sde * max_rate > 0.1)
        throw InputError("dt_sde * max|q_ii| = " + std::to_string(opt.dt_sde * max_rate) + " exceeds 0.1");

    std::vector<std::size_t> save_steps;
    for (double t : opt.save_times) {
        const double n = t / opt.dt_sde;
        const double r = std::round(n);
        if (t < 0.0 || std::abs(n - r) > 1e-6 * std::max(1.0, n))
            throw InputError("save time " + std::to_string(t) + " is not a multiple of dt_sde");
        if (!save_steps.empty() && static_cast<std::size_t>(r) < save_steps.back()) throw InputError("save times must be ascending");
        save_steps.push_back(static_cast<std::size_t>(r));
    }

    // initial state probabilities and per-state component choice
    std::vector<double> state_cdf(S);
    std::vector<std::vector<double>> comp_cdf(S);
    double total = 0.0;
    for (std::size_t j = 0; j < S; ++j) {
        double row = 0.0;
        for (std::size_t c = 0; c < data.components.size(); ++c) {
            const double w = data.weights(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
            if (w < 0.0) throw InputError("initial weights must be non-negative for sampling");
            row += w;
            comp_cdf[j].push_back(row);
        }
        for (double& c : comp_cdf[j]) c = row > 0.0 ? c / row : 1.0;
        total += row;
        state_cdf[j] = total;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InputError("initial state masses sum to " + std::to_string(total) + ", not 1");

    // switching table: leave state i with probability -q_ii dt, then choose j by q_ij / -q_ii
    std::vector<double> leave(S);
    std::vector<std::vector<double>> dest_cdf(S);
    std::vector<std::vector<std::uint16_t>> dest(S);
    for (std::size_t i = 0; i < S; ++i) {
        const double out = -dm.Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        leave[i] = out * opt.dt_sde;
        double acc = 0.0;
        for (std::size_t j = 0; j < S; ++j) {
            const double q = dm.Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (j == i || q <= 0.0) continue;
            acc += q / out;
            dest_cdf[i].push_back(acc);
            dest[i].push_back(static_cast<std::uint16_t>(j));
        }
    }

    PathEnsemble ens;
    ens.seed = opt.seed;
    ens.paths = opt.paths;
    ens.states = S;
    ens.dt_sde = opt.dt_sde;
    ens.save_times = opt.save_times;
    ens.x.assign(opt.paths * save_steps.size(), 0.0);
    ens.state.assign(opt.paths * save_steps.size(), 0);

    const double dt = opt.dt_sde, sqdt = std::sqrt(dt);
    std::vector<double> drift_b(S), drift_c(S), vol(S);
    for (std::size_t i = 0; i < S; ++i) {
        drift_b[i] = dm.b[i] * dt;
        drift_c[i] = dm.c[i] * dt;
        vol[i] = dm.sigma[i] * sqdt;
    }

    for (std::size_t k = 0; k < opt.paths; ++k) {
        boost::random::mt19937_64 eng(path_seed(opt.seed, k));
        boost::random::normal_distribution<double> normal;

        std::size_t s = pick(state_cdf, unit(eng) * total);
        const Component& comp = data.components[pick(comp_cdf[s], unit(eng))];
        double x = comp.mean + (comp.is_delta() ? 0.0 : std::sqrt(comp.var) * normal(eng));
        bool broken = false;

        std::size_t step = 0;
        for (std::size_t si = 0; si < save_steps.size(); ++si) {
            for (; step < save_steps[si]; ++step) {
                x += drift_b[s] * x + drift_c[s] + vol[s] * normal(eng);
                const double u = unit(eng);
                if (u < leave[s]) s = dest[s][pick(dest_cdf[s], u / leave[s])];
            }
            if (!broken && !(std::abs(x) < 1e150)) broken = true;
            ens.x[si * opt.paths + k] = broken ? std::numeric_limits<double>::quiet_NaN() : x;
            ens.state[si * opt.paths + k] = static_cast<std::uint16_t>(s);
        }
        if (broken) ++ens.unstable;
    }
    return ens;
}

DensityField estimate_density(const PathEnsemble& ens, const EstimateOptions& opt) {
    if (ens.paths == 0) throw InputError("empty ensemble");
    if (!(opt.hi > opt.lo) || opt.bins < 2) throw InputError("invalid histogram range");
    const double width = (opt.hi - opt.lo) / static_cast<double>(opt.bins);
    std::vector<double> centres(opt.bins), idx(ens.states), ones(ens.states, 1.0);
    for (std::size_t b = 0; b < opt.bins; ++b) centres[b] = opt.lo + (static_cast<double>(b) + 0.5) * width;
    for (std::size_t j = 0; j < ens.states; ++j) idx[j] = static_cast<double>(j);
    DensityField f(ens.save_times, centres, idx, ones, true);
    const double N = static_cast<double>(ens.paths);

    for (std::size_t ti = 0; ti < ens.save_times.size(); ++ti) {
        const double* xs = ens.x.data() + ti * ens.paths;
        const std::uint16_t* st = ens.state.data() + ti * ens.paths;

        if (opt.estimator == Estimator::histogram) {
            for (std::size_t k = 0; k < ens.paths; ++k) {
                if (!(xs[k] >= opt.lo && xs[k] < opt.hi)) continue;
                const auto b = std::min(opt.bins - 1, static_cast<std::size_t>((xs[k] - opt.lo) / width));
                f.at(ti, st[k], b) += 1.0 / (N * width);
            }
            continue;
        }

        // binned Gaussian KDE on a grid 8x finer than the output
        const std::size_t fine = opt.bins * 8;
        const double fw = (opt.hi - opt.lo) / static_cast<double>(fine);
        for (std::size_t j = 0; j < ens.states; ++j) {
            std::vector<double> counts(fine, 0.0);
            double n = 0.0, mean = 0.0, m2 = 0.0;
            for (std::size_t k = 0; k < ens.paths; ++k) {
                if (st[k] != j || !std::isfinite(xs[k])) continue;
                n += 1.0;
                const double d = xs[k] - mean;
                mean += d / n;
                m2 += d * (xs[k] - mean);
                if (xs[k] >= opt.lo && xs[k] < opt.hi)
                    counts[std::min(fine - 1, static_cast<std::size_t>((xs[k] - opt.lo) / fw))] += 1.0;
            }
            if (n < 2.0) continue;
            double h = opt.bandwidth;
            if (h <= 0.0) h = 1.06 * std::sqrt(m2 / (n - 1.0)) * std::pow(n, -0.2);
            h = std::max(h, fw);
            const auto reach = static_cast<std::ptrdiff_t>(std::ceil(6.0 * h / fw));
            auto row = f.slice(ti, j);
            for (std::size_t b = 0; b < opt.bins; ++b) {
                const double x = centres[b];
                const auto centre = static_cast<std::ptrdiff_t>((x - opt.lo) / fw);
                double acc = 0.0;
                for (std::ptrdiff_t q = std::max<std::ptrdiff_t>(0, centre - reach);
                     q < std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(fine), centre + reach + 1); ++q) {
                    if (counts[static_cast<std::size_t>(q)] == 0.0) continue;
                    const double d = (x - (opt.lo + (static_cast<double>(q) + 0.5) * fw)) / h;
                    acc += counts[static_cast<std::size_t>(q)] * std::exp(-0.5 * d * d);
                }
                row[b] = acc / (N * h * std::sqrt(2.0 * std::numbers::pi));
            }
        }
    }
    return f;
}

std::string ensemble_meta_json(const PathEnsemble& ens) {
    nlohmann::ordered_json j;
    j["seed"] = ens.seed;
    j["paths"] = ens.paths;
    j["dt_sde"] = ens.dt_sde;
    j["states"] = ens.states;
    j["save_times"] = ens.save_times;
    j["unstable_paths"] = ens.unstable;
    j["engine"] = "mt19937_64, per-path seed splitmix64(splitmix64(seed) ^ path)";
    j["scheme"] = "euler-maruyama, first-order switching";
    return j.dump(2) + "\n";
}

}  // namespace rsfp
