#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "acsens/boundary_solver.hpp"
#include "acsens/classifier.hpp"

namespace acsens {

/// theta_i <= theta_j
struct OrderConstraint {
    std::size_t i = 0;
    std::size_t j = 0;
};

/// Admissible parameter set: a box (lower == upper pins a component) plus
/// pairwise order constraints. `base` fixes the families and the prior; its
/// parameter values are only used for pinned components' defaults.
struct ParamDesignProblem {
    HypothesisPair base;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<OrderConstraint> order;
    double gamma = 0.9;
    Norm norm = Norm::Inf;

    void validate() const;
    nlohmann::json to_json() const;
    /// {base, lower, upper, order: [[i, j], ...], gamma, norm}
    static ParamDesignProblem from_json(const nlohmann::json& j);
};

/// Gaussian design box: mu0 pinned at 0 (shift invariance), 0 <= mu1 <= 40,
/// sigma in [0.1, 15], sigma1 <= sigma0. Defaults to the 2-norm; under the
/// inf-norm the optimum is not monotone in gamma below about 0.64.
ParamDesignProblem gaussian_design_box(double gamma, Norm norm = Norm::Two);

struct DesignOptions {
    std::size_t multistarts = 30;
    double rho_start = 1e2;
    double rho_end = 1e8;
    double feasibility_tolerance = 1e-5;
    std::size_t max_iterations = 3000;
    /// Skips the first points of the Halton sequence.
    std::uint64_t sequence_offset = 1;
    SearchOptions search;

    nlohmann::json to_json() const;
};

struct RestartOutcome {
    std::vector<double> start;
    std::vector<double> theta;
    double sensitivity = 0.0;
    double accuracy = 0.0;
    bool feasible = false;
    bool box_active = false;
    std::string message;
};

struct DesignResult {
    bool feasible = false;
    std::vector<double> theta;
    double sensitivity = 0.0;
    double accuracy = 0.0;
    std::vector<double> boundaries;
    /// Largest ML accuracy found over the admissible set.
    double max_accuracy = 0.0;
    std::size_t best_restart = 0;
    std::vector<RestartOutcome> restarts;

    nlohmann::json to_json() const;
};

/// ML (eta = 1) accuracy and sensitivity as functions of theta.
struct MlEvaluation {
    double accuracy = 0.5;
    double sensitivity = 0.0;
    std::vector<double> boundaries;
};
MlEvaluation evaluate_ml(const HypothesisPair& pair, Norm norm, const SearchOptions& search = {});

/// Minimise S(y*(theta), theta) subject to A(y*(theta), theta) = gamma over the
/// admissible set. Throws InfeasibleTarget when gamma exceeds the largest
/// attainable accuracy.
DesignResult design_params(const ParamDesignProblem& problem, const DesignOptions& opt = {});

struct SweepRow {
    double gamma = 0.0;
    DesignResult result;
};
std::vector<SweepRow> gamma_sweep(ParamDesignProblem problem, const std::vector<double>& gammas,
                                  const DesignOptions& opt = {});
/// `#` metadata lines then `gamma,sens_star,mu0,sigma0,mu1,sigma1`.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const nlohmann::json& meta);

struct LawValue {
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double boundary = 0.0;
    Orientation orientation = Orientation::H0First;
};

/// Equal-variance Gaussians, p0 = p1, theta = [mu0, mu1]:
/// accuracy Phi(dmu / 2 sigma), sensitivity phi(dmu / 2 sigma) / (2 sigma).
LawValue gaussian_equal_variance_law(double delta_mu, double sigma);

/// Exponential rates lambda0 and lambda1 = r lambda0, p0 = p1, theta = lambda1.
LawValue exponential_law(double r, double lambda0);

}  // namespace acsens
