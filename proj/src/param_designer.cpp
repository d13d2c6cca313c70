#include "acsens/param_designer.hpp"

#include <gsl/gsl_qrng.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "acsens/csv.hpp"
#include "acsens/tradeoff.hpp"
#include "simplex.hpp"

namespace acsens {

namespace {

std::vector<std::vector<double>> halton_points(std::size_t dim, std::size_t count, std::uint64_t offset) {
    std::vector<std::vector<double>> out;
    if (dim == 0) {
        out.assign(count, {});
        return out;
    }
    std::unique_ptr<gsl_qrng, void (*)(gsl_qrng*)> q(gsl_qrng_alloc(gsl_qrng_halton, static_cast<unsigned>(dim)),
                                                     gsl_qrng_free);
    if (!q) throw InvalidParameter("too many free parameters for the start sequence");
    std::vector<double> v(dim);
    for (std::uint64_t k = 0; k < offset; ++k) gsl_qrng_get(q.get(), v.data());
    for (std::size_t k = 0; k < count; ++k) {
        gsl_qrng_get(q.get(), v.data());
        out.push_back(v);
    }
    return out;
}

// Maps the optimiser's free coordinates to a full, admissible theta.
class Design {
public:
    Design(const ParamDesignProblem& p, const DesignOptions& opt) : p_(p), opt_(opt) {
        for (std::size_t k = 0; k < p.lower.size(); ++k)
            if (p.lower[k] < p.upper[k]) free_.push_back(k);
    }

    std::size_t dim() const { return free_.size(); }
    const std::vector<std::size_t>& free() const { return free_; }

    // Clamped theta and the squared distance the clamp moved it.
    std::vector<double> theta(const std::vector<double>& x, double* clamp2 = nullptr) const {
        std::vector<double> t(p_.lower.size());
        for (std::size_t k = 0; k < t.size(); ++k) t[k] = p_.lower[k];
        double c = 0.0;
        for (std::size_t m = 0; m < free_.size(); ++m) {
            const std::size_t k = free_[m];
            const double v = std::clamp(x[m], p_.lower[k], p_.upper[k]);
            c += (v - x[m]) * (v - x[m]);
            t[k] = v;
        }
        if (clamp2) *clamp2 = c;
        return t;
    }

    double order_violation2(const std::vector<double>& t) const {
        double s = 0.0;
        for (const auto& o : p_.order) {
            const double d = std::max(0.0, t[o.i] - t[o.j]);
            s += d * d;
        }
        return s;
    }

    MlEvaluation eval(const std::vector<double>& t) const {
        return evaluate_ml(p_.base.with_theta(t), p_.norm, opt_.search);
    }

    double penalised(const std::vector<double>& x, double rho, double gamma) const {
        double c2 = 0.0;
        const auto t = theta(x, &c2);
        try {
            const auto e = eval(t);
            const double r = e.accuracy - gamma;
            return e.sensitivity + rho * (r * r + c2 + order_violation2(t));
        } catch (const std::exception&) {
            return kInf;
        }
    }

    std::vector<double> start(const std::vector<double>& u) const {
        std::vector<double> x(free_.size());
        for (std::size_t m = 0; m < free_.size(); ++m) {
            const std::size_t k = free_[m];
            x[m] = p_.lower[k] + u[m] * (p_.upper[k] - p_.lower[k]);
        }
        // Swap components that violate an order constraint.
        auto t = theta(x);
        for (const auto& o : p_.order) {
            if (t[o.i] <= t[o.j]) continue;
            std::swap(t[o.i], t[o.j]);
            t[o.i] = std::clamp(t[o.i], p_.lower[o.i], p_.upper[o.i]);
            t[o.j] = std::clamp(t[o.j], p_.lower[o.j], p_.upper[o.j]);
        }
        for (std::size_t m = 0; m < free_.size(); ++m) x[m] = t[free_[m]];
        return x;
    }

    std::vector<double> steps(double frac) const {
        std::vector<double> s(free_.size());
        for (std::size_t m = 0; m < free_.size(); ++m) s[m] = frac * (p_.upper[free_[m]] - p_.lower[free_[m]]);
        return s;
    }

    bool on_box(const std::vector<double>& t) const {
        for (std::size_t k : free_) {
            const double tol = 1e-9 * (p_.upper[k] - p_.lower[k]);
            if (t[k] <= p_.lower[k] + tol || t[k] >= p_.upper[k] - tol) return true;
        }
        return false;
    }

    // Restore A == gamma along the free coordinate with the largest pull.
    std::vector<double> polish(std::vector<double> x, double gamma) const {
        if (free_.empty()) return x;
        std::size_t best = 0;
        double pull = -1.0;
        for (std::size_t m = 0; m < free_.size(); ++m) {
            const double h = 1e-6 * (p_.upper[free_[m]] - p_.lower[free_[m]]);
            auto up = x, dn = x;
            up[m] += h;
            dn[m] -= h;
            try {
                const double d = std::abs(eval(theta(up)).accuracy - eval(theta(dn)).accuracy) / (2 * h);
                if (d > pull) {
                    pull = d;
                    best = m;
                }
            } catch (const std::exception&) {
            }
        }
        const std::size_t k = free_[best];
        auto f = [&](double v) {
            auto z = x;
            z[best] = v;
            return eval(theta(z)).accuracy - gamma;
        };
        const auto r = detail::nearest_root(f, std::clamp(x[best], p_.lower[k], p_.upper[k]),
                                            1e-6 * (p_.upper[k] - p_.lower[k]), p_.lower[k], p_.upper[k]);
        if (r) x[best] = *r;
        return x;
    }

    double max_accuracy() const {
        double best = 0.5;
        const auto starts = halton_points(dim(), 10, opt_.sequence_offset);
        for (const auto& u : starts) {
            auto x = start(u);
            auto step = steps(0.1);
            for (double rho = opt_.rho_start; rho <= opt_.rho_end * 1.0001; rho *= 100) {
                auto obj = [&](const std::vector<double>& v) {
                    double c2 = 0.0;
                    const auto t = theta(v, &c2);
                    try {
                        return -eval(t).accuracy + rho * (c2 + order_violation2(t));
                    } catch (const std::exception&) {
                        return kInf;
                    }
                };
                x = detail::nelder_mead(obj, x, step, opt_.max_iterations, 1e-10).x;
                for (auto& s : step) s *= 0.5;
            }
            const auto t = theta(x);
            if (order_violation2(t) > 1e-20) continue;
            try {
                best = std::max(best, eval(t).accuracy);
            } catch (const std::exception&) {
            }
        }
        return best;
    }

private:
    const ParamDesignProblem& p_;
    const DesignOptions& opt_;
    std::vector<std::size_t> free_;
};

double standard_normal_density(double z) { return standard_normal_pdf(z); }

}  // namespace

void ParamDesignProblem::validate() const {
    const std::size_t n = base.theta_size();
    if (lower.size() != n || upper.size() != n)
        throw InvalidParameter("parameter box needs " + std::to_string(n) + " lower and upper bounds");
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(lower[k]) || !std::isfinite(upper[k]) || lower[k] > upper[k])
            throw InvalidParameter("empty or unbounded box for " + base.theta_names()[k]);
    }
    for (const auto& o : order)
        if (o.i >= n || o.j >= n) throw InvalidParameter("order constraint index out of range");
    if (!(gamma >= 0.5 && gamma <= 1.0)) throw InvalidParameter("gamma must lie in [0.5, 1]");
    // The lower corner must be a valid parameter vector for the families.
    (void)base.with_theta(lower);
}

nlohmann::json ParamDesignProblem::to_json() const {
    nlohmann::json ord = nlohmann::json::array();
    for (const auto& o : order) ord.push_back({o.i, o.j});
    return {{"base", base.to_json()}, {"lower", lower},       {"upper", upper},
            {"order", ord},           {"gamma", gamma},       {"norm", to_string(norm)}};
}

ParamDesignProblem ParamDesignProblem::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidParameter("design problem must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const std::vector<std::string> known{"base", "lower", "upper", "order", "gamma", "norm"};
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw InvalidParameter("unknown key '" + it.key() + "' in design problem");
    }
    for (const char* k : {"base", "lower", "upper"})
        if (!j.contains(k)) throw InvalidParameter(std::string("design problem is missing '") + k + "'");
    try {
        ParamDesignProblem p{HypothesisPair::from_json(j.at("base")),
                             j.at("lower").get<std::vector<double>>(),
                             j.at("upper").get<std::vector<double>>(),
                             {},
                             j.value("gamma", 0.9),
                             norm_from_string(j.value("norm", std::string("inf")))};
        if (j.contains("order"))
            for (const auto& o : j.at("order")) p.order.push_back({o.at(0).get<std::size_t>(), o.at(1).get<std::size_t>()});
        p.validate();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParameter(std::string("design problem: ") + e.what());
    }
}

ParamDesignProblem gaussian_design_box(double gamma, Norm norm) {
    ParamDesignProblem p{HypothesisPair(DensityModel::gaussian(0, 15), DensityModel::gaussian(20, 7.5), 0.5),
                         {0.0, 0.1, 0.0, 0.1},
                         {0.0, 15.0, 40.0, 15.0},
                         {{3, 1}},
                         gamma,
                         norm};
    return p;
}

nlohmann::json DesignOptions::to_json() const {
    return {{"multistarts", multistarts},
            {"rho_start", rho_start},
            {"rho_end", rho_end},
            {"feasibility_tolerance", feasibility_tolerance},
            {"max_iterations", max_iterations},
            {"sequence_offset", sequence_offset},
            {"start_sequence", "halton"},
            {"grid_points", search.grid_points}};
}

nlohmann::json DesignResult::to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : restarts)
        rs.push_back({{"start", r.start},
                      {"theta", r.theta},
                      {"sensitivity", r.sensitivity},
                      {"accuracy", r.accuracy},
                      {"feasible", r.feasible},
                      {"box_active", r.box_active},
                      {"message", r.message}});
    return {{"feasible", feasible},         {"theta", theta},
            {"sensitivity", sensitivity},   {"accuracy", accuracy},
            {"boundaries", boundaries},     {"max_accuracy", max_accuracy},
            {"best_restart", best_restart}, {"restarts", rs}};
}

MlEvaluation evaluate_ml(const HypothesisPair& pair, Norm norm, const SearchOptions& search) {
    const auto rep = ml_boundaries(pair, 1.0, search);
    const double anchor = 0.5 * (pair.h0().location() + pair.h1().location());
    const auto b = rep.boundary_set(anchor);
    return {accuracy(b, pair), sensitivity(b, pair, norm), rep.roots};
}

DesignResult design_params(const ParamDesignProblem& problem, const DesignOptions& opt) {
    problem.validate();
    const Design d(problem, opt);
    DesignResult res;
    res.max_accuracy = d.max_accuracy();
    if (problem.gamma > res.max_accuracy + 1e-9)
        throw InfeasibleTarget("accuracy " + format_number(problem.gamma) +
                               " is not attainable in the box (max " + format_number(res.max_accuracy) + ")");

    const auto starts = halton_points(d.dim(), opt.multistarts, opt.sequence_offset);
    double best_s = kInf;
    for (std::size_t r = 0; r < starts.size(); ++r) {
        RestartOutcome out;
        auto x = d.start(starts[r]);
        out.start = d.theta(x);
        try {
            auto step = d.steps(0.1);
            for (double rho = opt.rho_start; rho <= opt.rho_end * 1.0001; rho *= 10) {
                auto obj = [&](const std::vector<double>& v) { return d.penalised(v, rho, problem.gamma); };
                x = detail::nelder_mead(obj, x, step, opt.max_iterations, 1e-12).x;
                for (auto& s : step) s = std::max(s * 0.5, 1e-9);
            }
            x = d.polish(x, problem.gamma);
            out.theta = d.theta(x);
            const auto e = d.eval(out.theta);
            out.sensitivity = e.sensitivity;
            out.accuracy = e.accuracy;
            out.box_active = d.on_box(out.theta);
            const bool order_ok = d.order_violation2(out.theta) <= 1e-20;
            out.feasible = order_ok && std::abs(e.accuracy - problem.gamma) <= opt.feasibility_tolerance;
            if (!out.feasible)
                out.message = order_ok ? "accuracy misses target by " + format_number(std::abs(e.accuracy - problem.gamma))
                                       : "order constraint violated";
            if (out.feasible && out.sensitivity < best_s) {
                best_s = out.sensitivity;
                res.best_restart = r;
                res.feasible = true;
                res.theta = out.theta;
                res.sensitivity = e.sensitivity;
                res.accuracy = e.accuracy;
                res.boundaries = e.boundaries;
            }
        } catch (const std::exception& e) {
            out.message = std::string("inner solver failure: ") + e.what();
        }
        res.restarts.push_back(std::move(out));
    }
    return res;
}

std::vector<SweepRow> gamma_sweep(ParamDesignProblem problem, const std::vector<double>& gammas,
                                  const DesignOptions& opt) {
    if (gammas.empty()) throw InvalidParameter("gamma grid is empty");
    std::vector<SweepRow> rows;
    for (double g : gammas) {
        problem.gamma = g;
        rows.push_back({g, design_params(problem, opt)});
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const nlohmann::json& meta) {
    write_comment_header(os, meta);
    std::vector<std::string> names;
    if (!rows.empty() && !rows.front().result.restarts.empty()) {
        // Column names follow the parameter layout of the problem.
        names = meta.contains("theta_names") ? meta.at("theta_names").get<std::vector<std::string>>()
                                             : std::vector<std::string>{};
    }
    if (names.empty()) names = {"mu0", "sigma0", "mu1", "sigma1"};
    os << "gamma,sens_star";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (const auto& r : rows) {
        if (!r.result.feasible) continue;
        os << format_number(r.gamma) << ',' << format_number(r.result.sensitivity);
        for (double v : r.result.theta) os << ',' << format_number(v);
        os << '\n';
    }
}

LawValue gaussian_equal_variance_law(double delta_mu, double sigma) {
    if (!(delta_mu >= 0) || !std::isfinite(delta_mu)) throw InvalidParameter("delta_mu must be finite and >= 0");
    if (!(sigma > 0) || !std::isfinite(sigma)) throw InvalidParameter("sigma must be positive");
    const double z = delta_mu / (2 * sigma);
    return {standard_normal_cdf(z), standard_normal_density(z) / (2 * sigma), delta_mu / 2, Orientation::H0First};
}

LawValue exponential_law(double r, double lambda0) {
    if (!(r > 0) || !std::isfinite(r) || r == 1.0) throw InvalidParameter("rate ratio must be positive and != 1");
    if (!(lambda0 > 0) || !std::isfinite(lambda0)) throw InvalidParameter("lambda0 must be positive");
    // ln(r) / (r - 1), accurate near r = 1
    const double q = std::log1p(r - 1) / (r - 1);
    const double tail = std::exp(-r * q);  // r^{-r/(r-1)}
    LawValue v;
    v.boundary = q / lambda0;
    v.accuracy = 0.5 + 0.5 * std::abs(r - 1) * tail;
    v.sensitivity = q / (2 * lambda0) * tail;
    v.orientation = r > 1 ? Orientation::H1First : Orientation::H0First;
    return v;
}

}  // namespace acsens
