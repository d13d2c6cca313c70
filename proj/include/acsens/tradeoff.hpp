#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "acsens/boundary_solver.hpp"
#include "acsens/classifier.hpp"

namespace acsens {

class InfeasibleTarget : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SweepKind { MlSweep, LinearSweep, ConstrainedMin };
std::string to_string(SweepKind k);

/// Which sweep produced a point and the swept value (eta, y or zeta).
struct Provenance {
    SweepKind kind = SweepKind::MlSweep;
    double value = 0.0;

    std::string label() const;
};

struct TradeoffPoint {
    double accuracy = 0.0;
    double sensitivity = 0.0;
    BoundarySet boundaries{{0.0}};
    Provenance provenance;

    nlohmann::json to_json() const;
};

struct DroppedPoint {
    Provenance provenance;
    std::string reason;
    /// Present when the point was computed but left off the frontier.
    std::optional<TradeoffPoint> point;
};

struct TradeoffCurve {
    /// Ordered by strictly increasing accuracy.
    std::vector<TradeoffPoint> points;
    Norm norm = Norm::Inf;
    std::string pair_digest;
    std::vector<DroppedPoint> dropped;
    /// Effective configuration; echoed into every serialised form.
    nlohmann::json metadata = nlohmann::json::object();

    std::size_t boundary_count() const { return points.empty() ? 0 : points.front().boundaries.size(); }
    /// Sensitivity linearly interpolated in accuracy; nullopt outside the covered range.
    std::optional<double> sensitivity_at(double accuracy) const;

    /// `#` metadata lines, then `accuracy,sensitivity,y1,...,yn,provenance`.
    void write_csv(std::ostream& os) const;
    nlohmann::json to_json() const;
};

/// FNV-1a over the canonical JSON of the pair, as 16 hex digits.
std::string pair_digest(const HypothesisPair& pair);

/// 400 log-spaced thresholds over [1e-3, 1e3] plus eta = 1.
std::vector<double> default_eta_grid();
/// 2001 uniform points over the default search interval plus the optimal
/// single boundary.
std::vector<double> default_linear_grid(const HypothesisPair& pair);
/// `steps` uniform accuracy targets from 0.5 to the maximum accuracy.
std::vector<double> default_zeta_grid(const HypothesisPair& pair, std::size_t steps = 60);

/// Frontier branch of a swept family. Accuracy peaks somewhere along the
/// sweep; of the two monotone runs meeting at the peak, the one with lower
/// sensitivity over their common accuracy range is kept. Every other point
/// goes to `dropped`.
TradeoffCurve select_frontier(std::vector<TradeoffPoint> sweep, Norm norm, std::vector<DroppedPoint> dropped = {});

TradeoffCurve ml_curve(const HypothesisPair& pair, const std::vector<double>& eta_grid, Norm norm,
                       const SearchOptions& search = {});
TradeoffCurve linear_curve(const HypothesisPair& pair, const std::vector<double>& y_grid, Norm norm);

struct GeneralCurveOptions {
    std::size_t n_boundaries = 2;
    /// Stage-1 grid resolution per axis (n = 2).
    std::size_t grid = 600;
    /// Candidates refined in stage 2.
    std::size_t refine_candidates = 5;
    std::size_t max_iterations = 200;
    double min_step = 1e-10;
    double feasibility_tolerance = 1e-6;
    /// Rays from the ML optimum used to seed targets near the maximum.
    std::size_t rays = 16;
    /// n > 2 only.
    std::size_t restarts = 20;
    std::uint64_t seed = 1;
    SearchOptions search;

    nlohmann::json to_json() const;
};

/// Minimum sensitivity subject to accuracy == zeta over n-boundary classifiers.
TradeoffPoint constrained_minimum(const HypothesisPair& pair, double zeta, Norm norm,
                                  const GeneralCurveOptions& opt = {});

TradeoffCurve general_curve(const HypothesisPair& pair, const std::vector<double>& zeta_grid, Norm norm,
                            const GeneralCurveOptions& opt = {});

/// max over points of `lower` of S_lower - S_upper(A), over the accuracy
/// range both curves cover. Nonpositive means `lower` is on or below.
double dominance_excess(const TradeoffCurve& lower, const TradeoffCurve& upper);

/// Pairs (a, b) with A_a < A_b but S_a > S_b, i.e. lowering accuracy raised
/// sensitivity.
std::size_t count_inversions(const TradeoffCurve& curve);

}  // namespace acsens
