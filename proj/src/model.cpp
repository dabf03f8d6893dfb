#include "rsfp/model.hpp"

#include "rsfp/error.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace rsfp {

DiscreteModel DiscreteModel::from_qji(const Eigen::MatrixXd& qji, std::vector<double> b, std::vector<double> c,
                                      std::vector<double> sigma) {
    return {qji.transpose(), std::move(b), std::move(c), std::move(sigma)};
}

std::size_t ContinuousModel::common_cells() const {
    if (!K.is_stepwise() || !b.is_stepwise() || !c.is_stepwise() || !R.is_stepwise()) return 0;
    std::size_t n = static_cast<std::size_t>(K.cells().rows());
    for (std::size_t m : {b.cells(), c.cells(), R.cells()}) n = std::lcm(n, m);
    return n;
}

double ValidationReport::worst() const {
    double w = 0.0;
    for (const auto& i : issues) w = std::max(w, i.magnitude);
    return w;
}

std::string ValidationReport::summary() const {
    if (ok()) return "ok";
    std::ostringstream os;
    os.precision(6);
    for (std::size_t k = 0; k < issues.size(); ++k) {
        if (k) os << "; ";
        os << issues[k].what << " at " << issues[k].where << " (magnitude " << issues[k].magnitude << ")";
    }
    return os.str();
}

ValidationReport validate(const DiscreteModel& dm) {
    ValidationReport r;
    const auto n = dm.Q.rows();
    if (n == 0 || dm.Q.cols() != n) {
        r.issues.push_back({"Q must be a non-empty square matrix", "Q", 1.0});
        return r;
    }
    auto pos = [](Eigen::Index i, Eigen::Index j) {
        return "Q(" + std::to_string(i) + "," + std::to_string(j) + ")";
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double q = dm.Q(i, j);
            if (!std::isfinite(q)) r.issues.push_back({"non-finite rate", pos(i, j), std::numeric_limits<double>::infinity()});
            else if (i != j && q < 0.0) r.issues.push_back({"negative off-diagonal rate", pos(i, j), -q});
        }
        if (!(dm.Q(i, i) < 0.0))
            r.issues.push_back({"diagonal rate must be negative", pos(i, i), std::abs(dm.Q(i, i))});
        const double row = dm.Q.row(i).sum();
        if (std::abs(row) > kRowSumTolerance * std::max(1.0, dm.Q.row(i).cwiseAbs().maxCoeff()))
            r.issues.push_back({"rates out of state " + std::to_string(i) + " do not sum to zero", "row " + std::to_string(i),
                                std::abs(row)});
    }
    const auto states = static_cast<std::size_t>(n);
    for (auto [name, vec] : {std::pair{"b", &dm.b}, std::pair{"c", &dm.c}, std::pair{"sigma", &dm.sigma}}) {
        if (vec->size() != states)
            r.issues.push_back({std::string(name) + " has " + std::to_string(vec->size()) + " entries, expected " +
                                    std::to_string(states),
                                name, 1.0});
    }
    for (std::size_t i = 0; i < dm.sigma.size(); ++i)
        if (!(dm.sigma[i] > 0.0)) r.issues.push_back({"sigma must be positive", "sigma[" + std::to_string(i) + "]", std::abs(dm.sigma[i])});
    for (std::size_t i = 0; i < std::min(dm.b.size(), dm.c.size()); ++i)
        if (!std::isfinite(dm.b[i]) || !std::isfinite(dm.c[i]))
            r.issues.push_back({"non-finite drift", "state " + std::to_string(i), std::numeric_limits<double>::infinity()});
    return r;
}

ValidationReport validate(const ContinuousModel& cm) {
    ValidationReport r;
    const QPropertyReport q = check_q_property_continuous(cm.K);
    std::ostringstream at;
    if (!q.diagonal_ok) {
        at << "s = " << q.max_diagonal_at;
        r.issues.push_back({"kernel diagonal K(s,s) must be negative", at.str(), std::max(0.0, q.max_diagonal)});
    }
    if (!q.column_sums_ok) {
        at.str("");
        at << "xi = " << q.max_column_integral_at;
        r.issues.push_back({"kernel column integral must vanish", at.str(), q.max_column_integral});
    }
    if (!(cm.R.min() > 0.0)) r.issues.push_back({"diffusion R(s) must be positive", "R", std::abs(cm.R.min())});
    return r;
}

ContinuousModel discrete_to_continuous(const DiscreteModel& dm) {
    const ValidationReport v = validate(dm);
    if (!v.ok()) throw InputError("invalid discrete model: " + v.summary());
    return {Kernel::stepwise(dm.Q.transpose()), Profile::stepwise(dm.b), Profile::stepwise(dm.c), Profile::stepwise(dm.sigma)};
}

DiscreteModel continuous_to_discrete(const ContinuousModel& cm, std::size_t states) {
    if (states < 2) throw InputError("continuous_to_discrete needs at least two states");
    const auto n = static_cast<Eigen::Index>(states);
    auto mid = [states](Eigen::Index i) { return (static_cast<double>(i) + 0.5) / static_cast<double>(states); };
    DiscreteModel dm;
    dm.Q.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) dm.Q(i, j) = cm.K(mid(j), mid(i));
    for (Eigen::Index i = 0; i < n; ++i) {
        dm.b.push_back(cm.b(mid(i)));
        dm.c.push_back(cm.c(mid(i)));
        dm.sigma.push_back(cm.R(mid(i)));
    }
    return dm;
}

DiscreteModel cell_system(const ContinuousModel& cm, std::size_t cells) {
    const std::size_t common = cm.common_cells();
    if (common == 0 || cells % common != 0)
        throw InputError("cell_system needs a stepwise model aligned with " + std::to_string(cells) + " cells");
    DiscreteModel dm = continuous_to_discrete(cm, cells);
    dm.Q /= static_cast<double>(cells);
    return dm;
}

}  // namespace rsfp
