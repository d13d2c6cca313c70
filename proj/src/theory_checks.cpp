#include "acsens/theory_checks.hpp"

#include <algorithm>
#include <cmath>

namespace acsens {

namespace {

double scaled_step(double base, double x) { return base * std::max(1.0, std::abs(x)); }

std::size_t argmax_abs(const std::vector<double>& v) {
    std::size_t j = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
        if (std::abs(v[k]) > std::abs(v[j])) j = k;
    return j;
}

// Match each nominal root with the nearest root of a perturbed problem.
std::vector<double> matched_roots(const std::vector<double>& nominal, const LikelihoodRootReport& rep) {
    if (rep.roots.size() < nominal.size())
        throw SolverFailure("boundary count dropped under perturbation (" + std::to_string(nominal.size()) + " -> " +
                            std::to_string(rep.roots.size()) + ")");
    std::vector<double> out(nominal.size());
    for (std::size_t i = 0; i < nominal.size(); ++i) {
        double best = rep.roots[0];
        for (double r : rep.roots)
            if (std::abs(r - nominal[i]) < std::abs(best - nominal[i])) best = r;
        out[i] = best;
    }
    return out;
}

BoundarySet shifted(const BoundarySet& b, std::size_t i, double delta) {
    auto y = b.boundaries();
    y[i] += delta;
    return b.with_boundaries(std::move(y));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

nlohmann::json vec(const std::vector<double>& v) { return nlohmann::json(v); }

}  // namespace

nlohmann::json TheoryCheckOptions::to_json() const {
    return {{"a1_gap_tolerance", a1_gap_tolerance}, {"a1_tie_relative", a1_tie_relative},
            {"resolve_step", resolve_step},         {"boundary_step", boundary_step},
            {"a2_threshold", a2_threshold},         {"a3_threshold", a3_threshold},
            {"nonzero_threshold", nonzero_threshold}, {"identity_tolerance", identity_tolerance},
            {"descent_step", descent_step},         {"grid_points", search.grid_points}};
}

std::string to_string(A1Verdict v) {
    switch (v) {
        case A1Verdict::Holds: return "holds";
        case A1Verdict::Fragile: return "fragile";
        case A1Verdict::Fails: return "fails";
    }
    return "?";
}

BoundarySet ml_optimum(const HypothesisPair& pair, const SearchOptions& search) {
    const auto rep = ml_boundaries(pair, 1.0, search);
    if (rep.roots.empty()) throw SolverFailure("ML classifier has no finite boundary");
    return rep.boundary_set();
}

std::vector<double> boundary_parameter_derivative(const HypothesisPair& pair, std::size_t j,
                                                  const TheoryCheckOptions& opt) {
    const auto nominal = ml_optimum(pair, opt.search).boundaries();
    auto theta = pair.theta();
    if (j >= theta.size()) throw InvalidParameter("parameter index out of range");
    const double h = opt.resolve_step;
    auto up = theta, dn = theta;
    up[j] += h;
    dn[j] -= h;
    const auto yu = matched_roots(nominal, ml_boundaries(pair.with_theta(up), 1.0, opt.search));
    const auto yd = matched_roots(nominal, ml_boundaries(pair.with_theta(dn), 1.0, opt.search));
    std::vector<double> d(nominal.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (yu[i] - yd[i]) / (2.0 * h);
    return d;
}

std::vector<double> boundary_eta_derivative(const HypothesisPair& pair, const TheoryCheckOptions& opt) {
    const auto nominal = ml_optimum(pair, opt.search).boundaries();
    const double h = opt.resolve_step;
    const auto yu = matched_roots(nominal, ml_boundaries(pair, 1.0 + h, opt.search));
    const auto yd = matched_roots(nominal, ml_boundaries(pair, 1.0 - h, opt.search));
    std::vector<double> d(nominal.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (yu[i] - yd[i]) / (2.0 * h);
    return d;
}

std::vector<double> sensitivity_boundary_gradient(const BoundarySet& b, const HypothesisPair& pair, Norm norm,
                                                  double step) {
    std::vector<double> grad(b.size());
    const double s0 = sensitivity(b, pair, norm);
    const std::size_t j0 = argmax_abs(accuracy_gradient(b, pair));
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double h = scaled_step(step, b[i]);
        const auto bp = shifted(b, i, h), bm = shifted(b, i, -h);
        const auto gp = accuracy_gradient(bp, pair), gm = accuracy_gradient(bm, pair);
        const double sp = vector_norm(gp, norm), sm = vector_norm(gm, norm);
        if (norm == Norm::Two) {
            grad[i] = (sp - sm) / (2.0 * h);
            continue;
        }
        const bool keep_p = argmax_abs(gp) == j0, keep_m = argmax_abs(gm) == j0;
        if (keep_p && keep_m)
            grad[i] = (sp - sm) / (2.0 * h);
        else if (keep_p)
            grad[i] = (sp - s0) / h;
        else if (keep_m)
            grad[i] = (s0 - sm) / h;
        else
            grad[i] = (std::abs(gp[j0]) - std::abs(gm[j0])) / (2.0 * h);
    }
    return grad;
}

A1Result check_a1(const HypothesisPair& pair, const TheoryCheckOptions& opt) {
    A1Result r;
    r.gradient = accuracy_gradient(ml_optimum(pair, opt.search), pair);
    std::vector<double> mags(r.gradient.size());
    std::transform(r.gradient.begin(), r.gradient.end(), mags.begin(), [](double v) { return std::abs(v); });
    r.index_j = argmax_abs(r.gradient);
    const double top = mags[r.index_j];
    double second = 0.0;
    for (std::size_t k = 0; k < mags.size(); ++k)
        if (k != r.index_j) second = std::max(second, mags[k]);
    r.gap = top - second;
    const double tie = opt.a1_tie_relative * top;
    r.max_count = static_cast<std::size_t>(
        std::count_if(mags.begin(), mags.end(), [&](double m) { return top - m <= tie; }));
    if (r.gap > opt.a1_gap_tolerance)
        r.verdict = A1Verdict::Holds;
    else if (r.gap <= tie)
        r.verdict = A1Verdict::Fails;
    else
        r.verdict = A1Verdict::Fragile;
    r.holds = r.verdict == A1Verdict::Holds;
    return r;
}

A2Result check_a2(const HypothesisPair& pair, std::size_t j, const TheoryCheckOptions& opt) {
    A2Result r;
    const auto b = ml_optimum(pair, opt.search);
    r.curvature = accuracy_boundary_curvature(b, pair);
    r.boundary_derivative = boundary_parameter_derivative(pair, j, opt);
    r.products.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) r.products[i] = r.curvature[i] * r.boundary_derivative[i];
    r.witness_index = argmax_abs(r.products);
    r.witness_value = r.products[r.witness_index];
    r.holds = std::abs(r.witness_value) > opt.a2_threshold;
    return r;
}

A3Result check_a3(const HypothesisPair& pair, const TheoryCheckOptions& opt) {
    A3Result r;
    r.precondition_met = check_a1(pair, opt).holds;
    const auto b = ml_optimum(pair, opt.search);
    r.boundary_eta_derivative = boundary_eta_derivative(pair, opt);
    r.sensitivity_gradient = sensitivity_boundary_gradient(b, pair, Norm::Inf, opt.boundary_step);
    r.inner_product = dot(r.boundary_eta_derivative, r.sensitivity_gradient);
    r.holds = r.precondition_met && std::abs(r.inner_product) > opt.a3_threshold;
    return r;
}

GradientWitness gradient_witness(const HypothesisPair& pair, Norm norm, const TheoryCheckOptions& opt) {
    GradientWitness w;
    w.norm = norm;
    const auto b = ml_optimum(pair, opt.search);
    w.verdict_available = norm == Norm::Two || check_a1(pair, opt).holds;
    w.sensitivity_gradient = sensitivity_boundary_gradient(b, pair, norm, opt.boundary_step);
    w.gradient_norm = vector_norm(w.sensitivity_gradient, Norm::Two);
    w.nonzero = w.verdict_available && w.gradient_norm > opt.nonzero_threshold;

    // Implicit-function identity, every parameter component.
    const auto curv = accuracy_boundary_curvature(b, pair);
    for (std::size_t j = 0; j < pair.theta_size(); ++j) {
        const auto dy = boundary_parameter_derivative(pair, j, opt);
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double h = scaled_step(opt.boundary_step, b[i]);
            const double lhs =
                (accuracy_gradient(shifted(b, i, h), pair)[j] - accuracy_gradient(shifted(b, i, -h), pair)[j]) /
                (2.0 * h);
            w.identity_residual = std::max(w.identity_residual, std::abs(lhs + curv[i] * dy[i]));
        }
    }
    w.identity_holds = w.identity_residual <= opt.identity_tolerance;

    w.base_sensitivity = sensitivity(b, pair, norm);
    w.base_accuracy = accuracy(b, pair);
    w.probe_sensitivity = w.base_sensitivity;
    w.probe_accuracy = w.base_accuracy;
    if (w.gradient_norm > 0.0) {
        double step = opt.descent_step;
        for (int k = 0; k < 30 && !w.probe_reduces; ++k, step *= 0.5) {
            auto y = b.boundaries();
            for (std::size_t i = 0; i < y.size(); ++i) y[i] -= step * w.sensitivity_gradient[i] / w.gradient_norm;
            if (!std::is_sorted(y.begin(), y.end())) continue;
            const auto bp = b.with_boundaries(y);
            w.probe_step = step;
            w.probe_sensitivity = sensitivity(bp, pair, norm);
            w.probe_accuracy = accuracy(bp, pair);
            w.probe_reduces =
                w.probe_sensitivity < w.base_sensitivity && w.probe_accuracy <= w.base_accuracy + 1e-12;
        }
    }
    return w;
}

AssumptionReport check_assumptions(const HypothesisPair& pair, const TheoryCheckOptions& opt) {
    AssumptionReport r;
    r.options = opt;
    r.y_star = ml_optimum(pair, opt.search).boundaries();
    r.a1 = check_a1(pair, opt);
    r.a2 = check_a2(pair, r.a1.index_j, opt);
    r.a3 = check_a3(pair, opt);
    r.witness_inf = gradient_witness(pair, Norm::Inf, opt);
    r.witness_two = gradient_witness(pair, Norm::Two, opt);
    return r;
}

nlohmann::json AssumptionReport::to_json() const {
    auto witness = [](const GradientWitness& w) {
        nlohmann::json j{{"norm", to_string(w.norm)},
                         {"verdict_available", w.verdict_available},
                         {"sensitivity_gradient", vec(w.sensitivity_gradient)},
                         {"gradient_norm", w.gradient_norm},
                         {"identity_residual", w.identity_residual},
                         {"identity_holds", w.identity_holds},
                         {"probe_step", w.probe_step},
                         {"probe_sensitivity", w.probe_sensitivity},
                         {"probe_accuracy", w.probe_accuracy},
                         {"base_sensitivity", w.base_sensitivity},
                         {"base_accuracy", w.base_accuracy},
                         {"probe_reduces", w.probe_reduces}};
        j["nonzero"] = w.verdict_available ? nlohmann::json(w.nonzero) : nlohmann::json(nullptr);
        return j;
    };
    return {{"y_star", vec(y_star)},
            {"a1",
             {{"holds", a1.holds},
              {"verdict", to_string(a1.verdict)},
              {"gap", a1.gap},
              {"index_j", a1.index_j},
              {"max_count", a1.max_count},
              {"gradient", vec(a1.gradient)}}},
            {"a2",
             {{"holds", a2.holds},
              {"witness_index", a2.witness_index},
              {"witness_value", a2.witness_value},
              {"products", vec(a2.products)},
              {"curvature", vec(a2.curvature)},
              {"boundary_derivative", vec(a2.boundary_derivative)}}},
            {"a3",
             {{"holds", a3.holds},
              {"precondition_met", a3.precondition_met},
              {"inner_product", a3.inner_product},
              {"boundary_eta_derivative", vec(a3.boundary_eta_derivative)},
              {"sensitivity_gradient", vec(a3.sensitivity_gradient)}}},
            {"sensitivity_gradient_at_opt", vec(witness_inf.sensitivity_gradient)},
            {"witness_inf", witness(witness_inf)},
            {"witness_two", witness(witness_two)},
            {"options", options.to_json()}};
}

}  // namespace acsens
