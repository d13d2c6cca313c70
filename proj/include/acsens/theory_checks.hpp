#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "acsens/boundary_solver.hpp"
#include "acsens/classifier.hpp"

namespace acsens {

/// Tolerances and finite-difference steps; all are echoed into reports.
struct TheoryCheckOptions {
    double a1_gap_tolerance = 1e-6;
    /// Ties below this fraction of the largest component are exact ties.
    double a1_tie_relative = 1e-12;
    /// Parameter / threshold step for re-solving the boundary equation.
    double resolve_step = 1e-5;
    /// Boundary step for differentiating the sensitivity (scaled by max(1,|y|)).
    double boundary_step = 1e-6;
    double a2_threshold = 1e-8;
    double a3_threshold = 1e-8;
    double nonzero_threshold = 1e-7;
    double identity_tolerance = 1e-5;
    double descent_step = 1e-3;
    SearchOptions search;

    nlohmann::json to_json() const;
};

enum class A1Verdict { Holds, Fragile, Fails };
std::string to_string(A1Verdict v);

struct A1Result {
    bool holds = false;
    A1Verdict verdict = A1Verdict::Fails;
    /// |largest| - |second largest| gradient component.
    double gap = 0.0;
    std::size_t index_j = 0;
    /// Number of components tied (within round-off) for the largest magnitude.
    std::size_t max_count = 0;
    std::vector<double> gradient;
};

struct A2Result {
    bool holds = false;
    std::size_t witness_index = 0;
    double witness_value = 0.0;
    /// w_i(y_i*) * dy_i*/dtheta_j per boundary.
    std::vector<double> products;
    std::vector<double> curvature;
    std::vector<double> boundary_derivative;
};

struct A3Result {
    bool holds = false;
    bool precondition_met = false;  // A1 holds
    double inner_product = 0.0;
    std::vector<double> boundary_eta_derivative;
    std::vector<double> sensitivity_gradient;
};

struct GradientWitness {
    Norm norm = Norm::Inf;
    /// False when the inf-norm sensitivity is not differentiable (A1 fails);
    /// `nonzero` is then withheld.
    bool verdict_available = false;
    bool nonzero = false;
    std::vector<double> sensitivity_gradient;
    double gradient_norm = 0.0;
    /// max over j, i of |LHS - RHS| in the implicit-function identity
    /// d/dy (dA/dtheta_j) = -diag(w) dy*/dtheta_j.
    double identity_residual = 0.0;
    bool identity_holds = false;
    /// Descent probe along -dS/dy.
    double probe_step = 0.0;
    double probe_sensitivity = 0.0;
    double probe_accuracy = 0.0;
    double base_sensitivity = 0.0;
    double base_accuracy = 0.0;
    bool probe_reduces = false;
};

struct AssumptionReport {
    std::vector<double> y_star;
    A1Result a1;
    A2Result a2;
    A3Result a3;
    GradientWitness witness_inf;
    GradientWitness witness_two;
    TheoryCheckOptions options;

    nlohmann::json to_json() const;
};

/// ML (eta = 1) boundaries used by every check.
BoundarySet ml_optimum(const HypothesisPair& pair, const SearchOptions& search = {});

A1Result check_a1(const HypothesisPair& pair, const TheoryCheckOptions& opt = {});
A2Result check_a2(const HypothesisPair& pair, std::size_t j, const TheoryCheckOptions& opt = {});
A3Result check_a3(const HypothesisPair& pair, const TheoryCheckOptions& opt = {});
GradientWitness gradient_witness(const HypothesisPair& pair, Norm norm = Norm::Inf,
                                 const TheoryCheckOptions& opt = {});
AssumptionReport check_assumptions(const HypothesisPair& pair, const TheoryCheckOptions& opt = {});

/// dy*/dtheta_j by central differences of re-solved eta = 1 boundaries.
std::vector<double> boundary_parameter_derivative(const HypothesisPair& pair, std::size_t j,
                                                  const TheoryCheckOptions& opt = {});
/// dy/deta at eta = 1 by central differences of re-solved boundaries.
std::vector<double> boundary_eta_derivative(const HypothesisPair& pair, const TheoryCheckOptions& opt = {});

/// dS/dy at fixed theta by finite differences. For the inf norm, a one-sided
/// difference is used on whichever side keeps the arg-max component.
std::vector<double> sensitivity_boundary_gradient(const BoundarySet& b, const HypothesisPair& pair, Norm norm,
                                                  double step = 1e-6);

}  // namespace acsens
