#include "acsens/densities.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace acsens {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

std::map<std::string, std::shared_ptr<const CustomFamily>>& registry() {
    static std::map<std::string, std::shared_ptr<const CustomFamily>> r;
    return r;
}

}  // namespace

double standard_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi));
}

double standard_normal_cdf(double z) {
    if (z == kInf) return 1.0;
    if (z == -kInf) return 0.0;
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::standard_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

std::string to_string(Family f) {
    switch (f) {
        case Family::Gaussian: return "gaussian";
        case Family::Exponential: return "exponential";
        case Family::Custom: return "custom";
    }
    return "unknown";
}

DensityModel::DensityModel(Family f, std::vector<double> p, std::shared_ptr<const CustomFamily> c)
    : family_(f), params_(std::move(p)), custom_(std::move(c)) {
    validate();
}

DensityModel DensityModel::gaussian(double mean, double stddev) {
    return DensityModel(Family::Gaussian, {mean, stddev}, nullptr);
}

DensityModel DensityModel::exponential(double rate) {
    return DensityModel(Family::Exponential, {rate}, nullptr);
}

DensityModel DensityModel::custom(std::shared_ptr<const CustomFamily> family,
                                  std::vector<double> params) {
    if (!family) throw InvalidParameter("custom density: null family");
    return DensityModel(Family::Custom, std::move(params), std::move(family));
}

void DensityModel::validate() const {
    for (double v : params_)
        if (!std::isfinite(v)) throw InvalidParameter(family_name() + ": non-finite parameter");
    switch (family_) {
        case Family::Gaussian:
            if (params_.size() != 2) throw InvalidParameter("gaussian: expects (mu, sigma)");
            if (!(params_[1] > 0.0)) throw InvalidParameter("gaussian: sigma must be > 0");
            break;
        case Family::Exponential:
            if (params_.size() != 1) throw InvalidParameter("exponential: expects (lambda)");
            if (!(params_[0] > 0.0)) throw InvalidParameter("exponential: lambda must be > 0");
            break;
        case Family::Custom:
            if (!custom_->pdf || !custom_->cdf || !custom_->sampler)
                throw InvalidParameter(custom_->name + ": pdf, cdf and sampler are required");
            if (params_.size() != custom_->param_names.size())
                throw InvalidParameter(custom_->name + ": wrong parameter count");
            break;
    }
}

std::string DensityModel::family_name() const {
    return family_ == Family::Custom ? custom_->name : to_string(family_);
}

std::vector<std::string> DensityModel::param_names() const {
    switch (family_) {
        case Family::Gaussian: return {"mu", "sigma"};
        case Family::Exponential: return {"lambda"};
        case Family::Custom: return custom_->param_names;
    }
    return {};
}

Interval DensityModel::support() const {
    switch (family_) {
        case Family::Gaussian: return {};
        case Family::Exponential: return {0.0, kInf};
        case Family::Custom: return custom_->support;
    }
    return {};
}

bool DensityModel::has_gradients() const {
    if (family_ != Family::Custom) return true;
    return (custom_->grad_pdf && custom_->grad_cdf) || custom_->finite_difference_gradients;
}

DensityModel DensityModel::with_params(std::vector<double> params) const {
    return DensityModel(family_, std::move(params), custom_);
}

double DensityModel::pdf(double x) const {
    switch (family_) {
        case Family::Gaussian: {
            const double s = params_[1];
            return standard_normal_pdf((x - params_[0]) / s) / s;
        }
        case Family::Exponential: {
            const double l = params_[0];
            return x < 0.0 ? 0.0 : l * std::exp(-l * x);
        }
        case Family::Custom:
            return support().contains(x) ? custom_->pdf(x, params_) : 0.0;
    }
    return 0.0;
}

double DensityModel::log_pdf(double x) const {
    switch (family_) {
        case Family::Gaussian: {
            const double z = (x - params_[0]) / params_[1];
            return -0.5 * z * z - std::log(params_[1]) - kLogSqrt2Pi;
        }
        case Family::Exponential:
            return x < 0.0 ? -kInf : std::log(params_[0]) - params_[0] * x;
        case Family::Custom: {
            const double f = pdf(x);
            return f > 0.0 ? std::log(f) : -kInf;
        }
    }
    return -kInf;
}

double DensityModel::cdf(double x) const {
    if (x == kInf) return 1.0;
    if (x == -kInf) return 0.0;
    switch (family_) {
        case Family::Gaussian:
            return standard_normal_cdf((x - params_[0]) / params_[1]);
        case Family::Exponential:
            return x <= 0.0 ? 0.0 : -std::expm1(-params_[0] * x);
        case Family::Custom: {
            const Interval s = support();
            if (x <= s.lo) return 0.0;
            if (x >= s.hi) return 1.0;
            return custom_->cdf(x, params_);
        }
    }
    return 0.0;
}

double DensityModel::pdf_dx(double x) const {
    switch (family_) {
        case Family::Gaussian: {
            const double s = params_[1];
            const double z = (x - params_[0]) / s;
            return -z / s * pdf(x);
        }
        case Family::Exponential: {
            const double l = params_[0];
            return x < 0.0 ? 0.0 : -l * l * std::exp(-l * x);
        }
        case Family::Custom: {
            if (custom_->pdf_dx) return custom_->pdf_dx(x, params_);
            const double h = 1e-6 * std::max(1.0, std::abs(x));
            return (pdf(x + h) - pdf(x - h)) / (2.0 * h);
        }
    }
    return 0.0;
}

std::vector<double> DensityModel::fd_gradient(double x, bool of_cdf) const {
    if (!custom_->finite_difference_gradients)
        throw CapabilityMissing(custom_->name + ": no parameter gradients available");
    std::vector<double> g(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(params_[i]));
        auto up = params_, dn = params_;
        up[i] += h;
        dn[i] -= h;
        const auto mu = with_params(std::move(up));
        const auto md = with_params(std::move(dn));
        g[i] = of_cdf ? (mu.cdf(x) - md.cdf(x)) / (2.0 * h) : (mu.pdf(x) - md.pdf(x)) / (2.0 * h);
    }
    return g;
}

std::vector<double> DensityModel::grad_pdf_params(double x) const {
    switch (family_) {
        case Family::Gaussian: {
            const double s = params_[1];
            const double z = (x - params_[0]) / s;
            const double f = pdf(x);
            return {z / s * f, (z * z - 1.0) / s * f};
        }
        case Family::Exponential: {
            const double l = params_[0];
            if (x < 0.0) return {0.0};
            return {std::exp(-l * x) * (1.0 - l * x)};
        }
        case Family::Custom:
            if (custom_->grad_pdf) return custom_->grad_pdf(x, params_);
            return fd_gradient(x, false);
    }
    return {};
}

std::vector<double> DensityModel::grad_cdf_params(double x) const {
    if (std::isinf(x)) return std::vector<double>(params_.size(), 0.0);
    switch (family_) {
        case Family::Gaussian: {
            const double z = (x - params_[0]) / params_[1];
            const double f = pdf(x);
            return {-f, -z * f};
        }
        case Family::Exponential: {
            if (x <= 0.0) return {0.0};
            return {x * std::exp(-params_[0] * x)};
        }
        case Family::Custom:
            if (custom_->grad_cdf) return custom_->grad_cdf(x, params_);
            return fd_gradient(x, true);
    }
    return {};
}

double DensityModel::location() const {
    switch (family_) {
        case Family::Gaussian: return params_[0];
        case Family::Exponential: return 1.0 / params_[0];
        case Family::Custom: return custom_->location ? custom_->location(params_) : 0.0;
    }
    return 0.0;
}

double DensityModel::scale() const {
    switch (family_) {
        case Family::Gaussian: return params_[1];
        case Family::Exponential: return 1.0 / params_[0];
        case Family::Custom: return custom_->scale ? custom_->scale(params_) : 1.0;
    }
    return 1.0;
}

double DensityModel::sample_one(Rng& rng) const {
    switch (family_) {
        case Family::Gaussian:
            return params_[0] + params_[1] * rng.standard_normal();
        case Family::Exponential:
            return -std::log(rng.uniform_open_left()) / params_[0];
        case Family::Custom:
            return custom_->sampler(rng, params_);
    }
    return 0.0;
}

std::vector<double> DensityModel::sample(Rng& rng, std::size_t n) const {
    if (n == 0) throw InvalidParameter("sample: n must be >= 1");
    std::vector<double> out(n);
    for (auto& v : out) v = sample_one(rng);
    return out;
}

nlohmann::json DensityModel::to_json() const {
    nlohmann::json p = nlohmann::json::object();
    const auto names = param_names();
    for (std::size_t i = 0; i < names.size(); ++i) p[names[i]] = params_[i];
    return {{"family", family_name()}, {"params", p}};
}

DensityModel DensityModel::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidParameter("density: expected an object");
    for (const auto& [key, _] : j.items())
        if (key != "family" && key != "params")
            throw InvalidParameter("density: unknown key '" + key + "'");
    if (!j.contains("family") || !j["family"].is_string())
        throw InvalidParameter("density: missing string key 'family'");
    if (!j.contains("params") || !j["params"].is_object())
        throw InvalidParameter("density: missing object key 'params'");
    const std::string fam = j["family"].get<std::string>();
    const auto& pj = j["params"];

    std::vector<std::string> names;
    std::shared_ptr<const CustomFamily> custom;
    Family family;
    if (fam == "gaussian") {
        family = Family::Gaussian;
        names = {"mu", "sigma"};
    } else if (fam == "exponential") {
        family = Family::Exponential;
        names = {"lambda"};
    } else {
        std::lock_guard lock(registry_mutex());
        auto it = registry().find(fam);
        if (it == registry().end()) throw InvalidParameter("density: unknown family '" + fam + "'");
        family = Family::Custom;
        custom = it->second;
        names = custom->param_names;
    }
    for (const auto& [key, _] : pj.items())
        if (std::find(names.begin(), names.end(), key) == names.end())
            throw InvalidParameter("density: unknown key 'params." + key + "' for family " + fam);
    std::vector<double> params;
    for (const auto& n : names) {
        if (!pj.contains(n) || !pj[n].is_number())
            throw InvalidParameter("density: missing numeric key 'params." + n + "'");
        params.push_back(pj[n].get<double>());
    }
    return DensityModel(family, std::move(params), std::move(custom));
}

void register_family(std::shared_ptr<const CustomFamily> family) {
    if (!family || family->name.empty()) throw InvalidParameter("register_family: unnamed family");
    if (family->name == "gaussian" || family->name == "exponential")
        throw InvalidParameter("register_family: name collides with a built-in family");
    std::lock_guard lock(registry_mutex());
    registry()[family->name] = std::move(family);
}

HypothesisPair::HypothesisPair(DensityModel h0, DensityModel h1, double p0)
    : h0_(std::move(h0)), h1_(std::move(h1)), p0_(p0) {
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw InvalidParameter("hypothesis pair: p0 must be in [0,1]");
}

std::vector<double> HypothesisPair::theta() const {
    std::vector<double> t = h0_.params();
    t.insert(t.end(), h1_.params().begin(), h1_.params().end());
    return t;
}

std::vector<std::string> HypothesisPair::theta_names() const {
    std::vector<std::string> out;
    for (const auto& n : h0_.param_names()) out.push_back(n + "0");
    for (const auto& n : h1_.param_names()) out.push_back(n + "1");
    return out;
}

HypothesisPair HypothesisPair::with_theta(std::span<const double> theta) const {
    if (theta.size() != theta_size()) throw InvalidParameter("with_theta: size mismatch");
    const auto m0 = h0_.param_count();
    return HypothesisPair(h0_.with_params({theta.begin(), theta.begin() + m0}),
                          h1_.with_params({theta.begin() + m0, theta.end()}), p0_);
}

nlohmann::json HypothesisPair::to_json() const {
    return {{"h0", h0_.to_json()}, {"h1", h1_.to_json()}, {"p0", p0_}};
}

HypothesisPair HypothesisPair::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidParameter("problem: expected an object");
    for (const auto& [key, _] : j.items())
        if (key != "h0" && key != "h1" && key != "p0" && key != "p1")
            throw InvalidParameter("problem: unknown key '" + key + "'");
    if (!j.contains("h0")) throw InvalidParameter("problem: missing key 'h0'");
    if (!j.contains("h1")) throw InvalidParameter("problem: missing key 'h1'");
    double p0 = 0.5;
    if (j.contains("p0")) {
        if (!j["p0"].is_number()) throw InvalidParameter("problem: key 'p0' must be a number");
        p0 = j["p0"].get<double>();
    }
    if (j.contains("p1")) {
        if (!j["p1"].is_number()) throw InvalidParameter("problem: key 'p1' must be a number");
        const double p1 = j["p1"].get<double>();
        if (!j.contains("p0")) p0 = 1.0 - p1;
        else if (std::abs(p0 + p1 - 1.0) > 1e-12)
            throw InvalidParameter("problem: keys 'p0' and 'p1' must sum to 1");
    }
    DensityModel h0 = [&] {
        try { return DensityModel::from_json(j["h0"]); }
        catch (const InvalidParameter& e) { throw InvalidParameter(std::string("h0.") + e.what()); }
    }();
    DensityModel h1 = [&] {
        try { return DensityModel::from_json(j["h1"]); }
        catch (const InvalidParameter& e) { throw InvalidParameter(std::string("h1.") + e.what()); }
    }();
    return HypothesisPair(std::move(h0), std::move(h1), p0);
}

}  // namespace acsens
