#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "acsens/classifier.hpp"
#include "acsens/densities.hpp"

namespace acsens {

class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RootMethod { GaussianQuadratic, GridBisection };

std::string to_string(RootMethod m);

/// Roots of p1 f1(x) - eta p0 f0(x) = 0 and the label left of the first root.
struct LikelihoodRootReport {
    std::vector<double> roots;
    RootMethod method = RootMethod::GridBisection;
    /// Which hypothesis wins on the leftmost interval.
    Orientation orientation = Orientation::H0First;
    std::vector<double> residuals;
    double eta = 1.0;
    /// Set when g has the same sign at both ends of the search interval and
    /// no root was found even though the two models differ.
    bool endpoint_sign_warning = false;

    /// Boundary set for the likelihood-ratio classifier. With no roots the
    /// whole line is one region, represented as a coincident pair.
    BoundarySet boundary_set(double anchor = 0.0) const;

    nlohmann::json to_json() const;
};

struct SearchOptions {
    std::optional<Interval> interval;
    std::size_t grid_points = 4096;
};

/// Default root-search window: the union of location +- 8 scales of both
/// models, intersected with the union of their supports.
Interval default_search_interval(const HypothesisPair& pair);

/// Closed form for two Gaussians: a x^2 + b x + c = 0.
LikelihoodRootReport ml_boundaries_gaussian(const HypothesisPair& pair, double eta);

/// Grid scan of the log-likelihood-ratio sign plus bisection refinement.
LikelihoodRootReport ml_boundaries_generic(const HypothesisPair& pair, double eta,
                                           const SearchOptions& search = {});

/// Quadratic for Gaussian pairs, grid scan otherwise.
LikelihoodRootReport ml_boundaries(const HypothesisPair& pair, double eta,
                                   const SearchOptions& search = {});

/// ML classifier with boundaries filled in.
ClassifierSpec resolve_ml(const HypothesisPair& pair, double eta, const SearchOptions& search = {});

struct LinearOptimum {
    double y = 0.0;
    Orientation orientation = Orientation::H0First;
    double accuracy = 0.0;
};

/// Best single-boundary classifier among the eta = 1 likelihood roots,
/// scanning both orientations; ties go to the smaller y.
LinearOptimum optimal_linear_boundary(const HypothesisPair& pair, const SearchOptions& search = {});

/// log(p1 f1(x)) - log(eta p0 f0(x)).
double log_likelihood_margin(const HypothesisPair& pair, double eta, double x);

}  // namespace acsens
