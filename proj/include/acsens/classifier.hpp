#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "acsens/densities.hpp"

namespace acsens {

enum class Label { H0, H1 };
enum class Orientation { H0First, H1First };
enum class Norm { Inf, Two };

std::string to_string(Orientation o);
std::string to_string(Norm n);
std::string to_string(Label l);
Orientation orientation_from_string(const std::string& s);
Norm norm_from_string(const std::string& s);
Orientation flipped(Orientation o);

class UnresolvedClassifier : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Sorted finite boundaries y_1 <= ... <= y_n (n >= 1) plus the label of
/// the leftmost interval. The outer sentinels -inf/+inf are implicit.
/// Coincident boundaries are allowed and denote an empty interval.
class BoundarySet {
public:
    BoundarySet(std::vector<double> boundaries, Orientation orientation = Orientation::H0First);

    const std::vector<double>& boundaries() const { return y_; }
    std::size_t size() const { return y_.size(); }
    double operator[](std::size_t i) const { return y_[i]; }
    Orientation orientation() const { return orientation_; }

    /// Label of interval i, where interval 0 is (-inf, y_1) and interval n
    /// is [y_n, +inf).
    Label interval_label(std::size_t i) const;
    /// Label assigned to a point lying exactly on a boundary (the closed
    /// odd-indexed intervals of the general classifier).
    Label boundary_label() const { return interval_label(1); }

    BoundarySet with_orientation(Orientation o) const { return BoundarySet(y_, o); }
    BoundarySet with_boundaries(std::vector<double> y) const { return BoundarySet(std::move(y), orientation_); }

    nlohmann::json to_json() const;

    friend bool operator==(const BoundarySet&, const BoundarySet&) = default;

private:
    std::vector<double> y_;
    Orientation orientation_;
};

struct GeneralClassifier {
    BoundarySet boundaries;
};

/// Likelihood-ratio classifier: H1 iff p1 f1(x) >= eta p0 f0(x).
/// `resolved` holds the boundaries once computed by the boundary solver.
struct MlClassifier {
    double eta = 1.0;
    std::optional<BoundarySet> resolved;
};

struct LinearClassifier {
    double y = 0.0;
    Orientation orientation = Orientation::H0First;
};

class ClassifierSpec {
public:
    using Kind = std::variant<GeneralClassifier, MlClassifier, LinearClassifier>;

    static ClassifierSpec general(BoundarySet b) { return ClassifierSpec(GeneralClassifier{std::move(b)}); }
    static ClassifierSpec ml(double eta, std::optional<BoundarySet> resolved = std::nullopt);
    static ClassifierSpec linear(double y, Orientation o = Orientation::H0First) {
        return ClassifierSpec(LinearClassifier{y, o});
    }

    const Kind& kind() const { return kind_; }
    bool is_ml() const { return std::holds_alternative<MlClassifier>(kind_); }
    /// Explicit boundaries; throws UnresolvedClassifier for an unresolved ML spec.
    BoundarySet boundary_set() const;

    nlohmann::json to_json() const;
    /// {kind:"general"|"ml"|"linear", boundaries:[...], orientation, eta}
    static ClassifierSpec from_json(const nlohmann::json& j);

private:
    explicit ClassifierSpec(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

Label classify(const BoundarySet& b, double x);
Label classify(const ClassifierSpec& spec, const HypothesisPair& pair, double x);

/// Probability of correct classification under the prior-weighted mixture.
double accuracy(const BoundarySet& b, const HypothesisPair& pair);
double accuracy(const ClassifierSpec& spec, const HypothesisPair& pair);

/// d accuracy / d theta with boundaries held fixed, theta = [theta0; theta1].
std::vector<double> accuracy_gradient(const BoundarySet& b, const HypothesisPair& pair);
std::vector<double> accuracy_gradient(const ClassifierSpec& spec, const HypothesisPair& pair);

double vector_norm(const std::vector<double>& v, Norm norm);

double sensitivity(const BoundarySet& b, const HypothesisPair& pair, Norm norm = Norm::Inf);
double sensitivity(const ClassifierSpec& spec, const HypothesisPair& pair, Norm norm = Norm::Inf);

/// d accuracy / d y_i = sign_i (p0 f0(y_i) - p1 f1(y_i)), sign_i = +1 when
/// the interval left of y_i is labelled H0.
std::vector<double> accuracy_boundary_gradient(const BoundarySet& b, const HypothesisPair& pair);

/// Diagonal of the boundary Hessian of accuracy, w_i(y_i).
std::vector<double> accuracy_boundary_curvature(const BoundarySet& b, const HypothesisPair& pair);

}  // namespace acsens
