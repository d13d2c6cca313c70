#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "acsens/classifier.hpp"

namespace acsens {

/// Additive shifts of the Gaussian parameters chosen by the adversary.
struct PerturbationSpec {
    double mu_bar_0 = 0.0;
    double sigma_bar_0 = 0.0;
    double mu_bar_1 = 0.0;
    double sigma_bar_1 = 0.0;

    /// Shifted copy of a Gaussian pair; throws InvalidParameter on a
    /// nonpositive perturbed sigma or a non-Gaussian pair.
    HypothesisPair apply(const HypothesisPair& nominal) const;

    nlohmann::json to_json() const;
    static PerturbationSpec from_json(const nlohmann::json& j);
};

/// "s1": sigma1 widened by 3. "s2": (1, 2, -2, 1.5).
PerturbationSpec scenario(const std::string& name);

struct ExperimentOptions {
    std::size_t n_obs = 10000;
    std::size_t n_trials = 100;
    std::uint64_t base_seed = 0;
    /// 0 picks the hardware concurrency. Results do not depend on it.
    std::size_t threads = 0;

    nlohmann::json to_json() const;
};

struct ExperimentReport {
    std::size_t n_obs = 0;
    std::size_t n_trials = 0;
    std::uint64_t base_seed = 0;
    std::vector<double> per_trial_accuracy;
    double mean_accuracy = 0.0;
    /// Sample standard deviation over trials.
    double std_accuracy = 0.0;
    /// sqrt(A (1 - A) / (n_obs n_trials)) at the analytic accuracy.
    double standard_error = 0.0;
    double analytic_accuracy = 0.0;
    BoundarySet boundaries{{0.0}};
    PerturbationSpec perturbation;

    nlohmann::json to_json() const;
    /// `#` metadata lines then `trial,seed,accuracy`.
    void write_csv(std::ostream& os) const;
};

/// Accuracy of fixed boundaries on the perturbed pair.
double analytic_perturbed_accuracy(const HypothesisPair& nominal, const BoundarySet& b, const PerturbationSpec& pert);

/// Trial t uses seed base_seed + t; each observation draws its label with
/// probability p1, then x from the perturbed model of that label.
ExperimentReport run_experiment(const HypothesisPair& nominal, const BoundarySet& b, const PerturbationSpec& pert,
                                const ExperimentOptions& opt = {});

}  // namespace acsens
