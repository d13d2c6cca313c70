#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace acsens {

class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class CapabilityMissing : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Standard normal density.
double standard_normal_pdf(double z);

/// Standard normal CDF, Q(z) = P[Z <= z]. This is the lower-tail CDF,
/// not the upper-tail "Q-function" used in communications texts.
double standard_normal_cdf(double z);

/// Seeded generator with a fixed algorithm (mt19937_64 plus hand-written
/// transforms) so that a given seed yields the same stream on every platform.
/// std::normal_distribution is implementation-defined and is not used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1].
    double uniform_open_left() { return 1.0 - uniform(); }
    /// Marsaglia polar method.
    double standard_normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct Interval {
    double lo = -kInf;
    double hi = kInf;

    bool contains(double x) const { return x >= lo && x <= hi; }
};

enum class Family { Gaussian, Exponential, Custom };

std::string to_string(Family f);

/// User-registered density family. pdf, cdf and sampler are required.
/// Gradients are optional; when absent and `finite_difference_gradients`
/// is set, central differences with step 1e-6*max(1,|theta|) are used.
struct CustomFamily {
    using ScalarFn = std::function<double(double, std::span<const double>)>;
    using VectorFn = std::function<std::vector<double>(double, std::span<const double>)>;
    using SamplerFn = std::function<double(Rng&, std::span<const double>)>;
    using MomentFn = std::function<double(std::span<const double>)>;

    std::string name;
    std::vector<std::string> param_names;
    Interval support;
    ScalarFn pdf;
    ScalarFn cdf;
    SamplerFn sampler;
    MomentFn location;  // a central value (mean or median)
    MomentFn scale;     // a spread measure (std-dev or equivalent)
    ScalarFn pdf_dx;          // optional
    VectorFn grad_pdf;        // optional
    VectorFn grad_cdf;        // optional
    bool finite_difference_gradients = true;
};

/// Makes a custom family resolvable by name in DensityModel::from_json.
void register_family(std::shared_ptr<const CustomFamily> family);

/// A parametric scalar density. Immutable value type.
class DensityModel {
public:
    static DensityModel gaussian(double mean, double stddev);
    static DensityModel exponential(double rate);
    static DensityModel custom(std::shared_ptr<const CustomFamily> family,
                               std::vector<double> params);

    Family family() const { return family_; }
    std::string family_name() const;
    const std::vector<double>& params() const { return params_; }
    std::vector<std::string> param_names() const;
    std::size_t param_count() const { return params_.size(); }
    Interval support() const;
    bool has_gradients() const;

    /// Same family with a new parameter vector (validated).
    DensityModel with_params(std::vector<double> params) const;

    double pdf(double x) const;
    /// log pdf; -inf outside the support.
    double log_pdf(double x) const;
    /// P[X <= x]; accepts +-inf.
    double cdf(double x) const;
    /// d pdf / dx.
    double pdf_dx(double x) const;
    std::vector<double> grad_pdf_params(double x) const;
    /// d cdf / d theta. Zero at +-inf.
    std::vector<double> grad_cdf_params(double x) const;

    double location() const;
    double scale() const;

    double sample_one(Rng& rng) const;
    std::vector<double> sample(Rng& rng, std::size_t n) const;

    nlohmann::json to_json() const;
    static DensityModel from_json(const nlohmann::json& j);

    friend bool operator==(const DensityModel& a, const DensityModel& b) {
        return a.family_ == b.family_ && a.params_ == b.params_ && a.custom_ == b.custom_;
    }

private:
    DensityModel(Family f, std::vector<double> p, std::shared_ptr<const CustomFamily> c);
    void validate() const;
    std::vector<double> fd_gradient(double x, bool of_cdf) const;

    Family family_;
    std::vector<double> params_;
    std::shared_ptr<const CustomFamily> custom_;
};

/// Two hypotheses with priors. p1 is always 1 - p0.
class HypothesisPair {
public:
    HypothesisPair(DensityModel h0, DensityModel h1, double p0 = 0.5);

    const DensityModel& h0() const { return h0_; }
    const DensityModel& h1() const { return h1_; }
    const DensityModel& model(int k) const { return k == 0 ? h0_ : h1_; }
    double p0() const { return p0_; }
    double p1() const { return 1.0 - p0_; }
    double prior(int k) const { return k == 0 ? p0() : p1(); }

    /// Stacked parameter vector [theta0; theta1].
    std::vector<double> theta() const;
    std::size_t theta_size() const { return h0_.param_count() + h1_.param_count(); }
    /// Offset of hypothesis k's block inside theta().
    std::size_t theta_offset(int k) const { return k == 0 ? 0 : h0_.param_count(); }
    std::vector<std::string> theta_names() const;
    HypothesisPair with_theta(std::span<const double> theta) const;

    bool both_gaussian() const {
        return h0_.family() == Family::Gaussian && h1_.family() == Family::Gaussian;
    }

    nlohmann::json to_json() const;
    /// Strict parse: unknown keys raise InvalidParameter naming the key.
    static HypothesisPair from_json(const nlohmann::json& j);

private:
    DensityModel h0_;
    DensityModel h1_;
    double p0_;
};

}  // namespace acsens
