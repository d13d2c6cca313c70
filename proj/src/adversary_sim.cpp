#include "acsens/adversary_sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "acsens/csv.hpp"

namespace acsens {

HypothesisPair PerturbationSpec::apply(const HypothesisPair& nominal) const {
    if (!nominal.both_gaussian()) throw InvalidParameter("perturbations apply to Gaussian pairs only");
    const auto& a = nominal.h0().params();
    const auto& b = nominal.h1().params();
    const double s0 = a[1] + sigma_bar_0, s1 = b[1] + sigma_bar_1;
    if (!(s0 > 0)) throw InvalidParameter("perturbed sigma0 must be positive");
    if (!(s1 > 0)) throw InvalidParameter("perturbed sigma1 must be positive");
    return HypothesisPair(DensityModel::gaussian(a[0] + mu_bar_0, s0), DensityModel::gaussian(b[0] + mu_bar_1, s1),
                          nominal.p0());
}

nlohmann::json PerturbationSpec::to_json() const {
    return {{"mu_bar_0", mu_bar_0}, {"sigma_bar_0", sigma_bar_0}, {"mu_bar_1", mu_bar_1}, {"sigma_bar_1", sigma_bar_1}};
}

PerturbationSpec PerturbationSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidParameter("perturbation must be a JSON object");
    PerturbationSpec p;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        if (!it.value().is_number()) throw InvalidParameter("perturbation key '" + k + "' must be a number");
        const double v = it.value().get<double>();
        if (k == "mu_bar_0") p.mu_bar_0 = v;
        else if (k == "sigma_bar_0") p.sigma_bar_0 = v;
        else if (k == "mu_bar_1") p.mu_bar_1 = v;
        else if (k == "sigma_bar_1") p.sigma_bar_1 = v;
        else throw InvalidParameter("unknown key '" + k + "' in perturbation");
    }
    return p;
}

PerturbationSpec scenario(const std::string& name) {
    if (name == "s1") return {0.0, 0.0, 0.0, 3.0};
    if (name == "s2") return {1.0, 2.0, -2.0, 1.5};
    if (name == "none") return {};
    throw InvalidParameter("unknown scenario '" + name + "' (expected s1, s2 or none)");
}

nlohmann::json ExperimentOptions::to_json() const {
    return {{"n_obs", n_obs}, {"n_trials", n_trials}, {"base_seed", base_seed}, {"label_sampling", "bernoulli_p1"}};
}

nlohmann::json ExperimentReport::to_json() const {
    return {{"n_obs", n_obs},
            {"n_trials", n_trials},
            {"base_seed", base_seed},
            {"per_trial_accuracy", per_trial_accuracy},
            {"mean_accuracy", mean_accuracy},
            {"std_accuracy", std_accuracy},
            {"standard_error", standard_error},
            {"analytic_accuracy", analytic_accuracy},
            {"classifier", boundaries.to_json()},
            {"perturbation", perturbation.to_json()}};
}

void ExperimentReport::write_csv(std::ostream& os) const {
    auto meta = to_json();
    meta.erase("per_trial_accuracy");
    write_comment_header(os, meta);
    os << "trial,seed,accuracy\n";
    for (std::size_t t = 0; t < per_trial_accuracy.size(); ++t)
        os << t << ',' << base_seed + t << ',' << format_number(per_trial_accuracy[t]) << '\n';
}

double analytic_perturbed_accuracy(const HypothesisPair& nominal, const BoundarySet& b, const PerturbationSpec& pert) {
    return accuracy(b, pert.apply(nominal));
}

ExperimentReport run_experiment(const HypothesisPair& nominal, const BoundarySet& b, const PerturbationSpec& pert,
                                const ExperimentOptions& opt) {
    if (opt.n_obs == 0 || opt.n_trials == 0) throw InvalidParameter("n_obs and n_trials must be positive");
    const HypothesisPair truth = pert.apply(nominal);

    ExperimentReport r;
    r.n_obs = opt.n_obs;
    r.n_trials = opt.n_trials;
    r.base_seed = opt.base_seed;
    r.boundaries = b;
    r.perturbation = pert;
    r.per_trial_accuracy.assign(opt.n_trials, 0.0);

    auto trial = [&](std::size_t t) {
        Rng rng(opt.base_seed + t);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < opt.n_obs; ++i) {
            const Label truth_label = rng.uniform() < truth.p1() ? Label::H1 : Label::H0;
            const double x = truth.model(truth_label == Label::H1 ? 1 : 0).sample_one(rng);
            if (classify(b, x) == truth_label) ++correct;
        }
        r.per_trial_accuracy[t] = static_cast<double>(correct) / static_cast<double>(opt.n_obs);
    };

    std::size_t workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, opt.n_trials);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < opt.n_trials; t += workers) trial(t);
            });
    }

    double sum = 0.0;
    for (double a : r.per_trial_accuracy) sum += a;
    r.mean_accuracy = sum / static_cast<double>(opt.n_trials);
    double ss = 0.0;
    for (double a : r.per_trial_accuracy) ss += (a - r.mean_accuracy) * (a - r.mean_accuracy);
    r.std_accuracy = opt.n_trials > 1 ? std::sqrt(ss / static_cast<double>(opt.n_trials - 1)) : 0.0;
    r.analytic_accuracy = accuracy(b, truth);
    r.standard_error = std::sqrt(r.analytic_accuracy * (1 - r.analytic_accuracy) /
                                 static_cast<double>(opt.n_obs * opt.n_trials));
    return r;
}

}  // namespace acsens
