#include "acsens/classifier.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace acsens {

std::string to_string(Orientation o) { return o == Orientation::H0First ? "h0_first" : "h1_first"; }
std::string to_string(Norm n) { return n == Norm::Inf ? "inf" : "two"; }
std::string to_string(Label l) { return l == Label::H0 ? "H0" : "H1"; }

Orientation orientation_from_string(const std::string& s) {
    if (s == "h0_first" || s == "H0First") return Orientation::H0First;
    if (s == "h1_first" || s == "H1First") return Orientation::H1First;
    throw InvalidParameter("unknown orientation '" + s + "'");
}

Norm norm_from_string(const std::string& s) {
    if (s == "inf") return Norm::Inf;
    if (s == "two" || s == "2") return Norm::Two;
    throw InvalidParameter("unknown norm '" + s + "'");
}

Orientation flipped(Orientation o) {
    return o == Orientation::H0First ? Orientation::H1First : Orientation::H0First;
}

BoundarySet::BoundarySet(std::vector<double> boundaries, Orientation orientation)
    : y_(std::move(boundaries)), orientation_(orientation) {
    if (y_.empty()) throw InvalidParameter("boundary set: at least one boundary required");
    for (double v : y_)
        if (!std::isfinite(v)) throw InvalidParameter("boundary set: boundaries must be finite");
    if (!std::is_sorted(y_.begin(), y_.end()))
        throw InvalidParameter("boundary set: boundaries must be sorted");
}

Label BoundarySet::interval_label(std::size_t i) const {
    const bool even = (i % 2) == 0;
    if (orientation_ == Orientation::H0First) return even ? Label::H0 : Label::H1;
    return even ? Label::H1 : Label::H0;
}

nlohmann::json BoundarySet::to_json() const {
    return {{"boundaries", y_}, {"orientation", to_string(orientation_)}};
}

ClassifierSpec ClassifierSpec::ml(double eta, std::optional<BoundarySet> resolved) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidParameter("ml classifier: eta must be > 0");
    return ClassifierSpec(MlClassifier{eta, std::move(resolved)});
}

BoundarySet ClassifierSpec::boundary_set() const {
    return std::visit(
        [](const auto& k) -> BoundarySet {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, GeneralClassifier>) {
                return k.boundaries;
            } else if constexpr (std::is_same_v<T, MlClassifier>) {
                if (!k.resolved)
                    throw UnresolvedClassifier("ml classifier: boundaries not resolved (run the boundary solver)");
                return *k.resolved;
            } else {
                return BoundarySet({k.y}, k.orientation);
            }
        },
        kind_);
}

nlohmann::json ClassifierSpec::to_json() const {
    return std::visit(
        [](const auto& k) -> nlohmann::json {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, GeneralClassifier>) {
                return {{"kind", "general"},
                        {"boundaries", k.boundaries.boundaries()},
                        {"orientation", to_string(k.boundaries.orientation())}};
            } else if constexpr (std::is_same_v<T, MlClassifier>) {
                nlohmann::json j = {{"kind", "ml"}, {"eta", k.eta}};
                if (k.resolved) {
                    j["boundaries"] = k.resolved->boundaries();
                    j["orientation"] = to_string(k.resolved->orientation());
                }
                return j;
            } else {
                return {{"kind", "linear"}, {"boundaries", {k.y}}, {"orientation", to_string(k.orientation)}};
            }
        },
        kind_);
}

ClassifierSpec ClassifierSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidParameter("classifier: expected an object");
    for (const auto& [key, _] : j.items())
        if (key != "kind" && key != "boundaries" && key != "orientation" && key != "eta")
            throw InvalidParameter("classifier: unknown key '" + key + "'");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw InvalidParameter("classifier: missing string key 'kind'");
    const auto kind = j["kind"].get<std::string>();
    const Orientation o = j.contains("orientation")
                              ? orientation_from_string(j["orientation"].get<std::string>())
                              : Orientation::H0First;
    std::vector<double> y;
    if (j.contains("boundaries")) {
        if (!j["boundaries"].is_array()) throw InvalidParameter("classifier: key 'boundaries' must be an array");
        y = j["boundaries"].get<std::vector<double>>();
    }
    if (kind == "general") {
        return general(BoundarySet(std::move(y), o));
    }
    if (kind == "linear") {
        if (y.size() != 1) throw InvalidParameter("classifier: linear kind needs exactly one boundary");
        return linear(y[0], o);
    }
    if (kind == "ml") {
        if (!j.contains("eta") || !j["eta"].is_number()) throw InvalidParameter("classifier: missing numeric key 'eta'");
        std::optional<BoundarySet> resolved;
        if (!y.empty()) resolved = BoundarySet(std::move(y), o);
        return ml(j["eta"].get<double>(), std::move(resolved));
    }
    throw InvalidParameter("classifier: unknown kind '" + kind + "'");
}

Label classify(const BoundarySet& b, double x) {
    const auto& y = b.boundaries();
    if (std::binary_search(y.begin(), y.end(), x)) return b.boundary_label();
    const auto idx = static_cast<std::size_t>(std::upper_bound(y.begin(), y.end(), x) - y.begin());
    return b.interval_label(idx);
}

Label classify(const ClassifierSpec& spec, const HypothesisPair& pair, double x) {
    if (const auto* ml = std::get_if<MlClassifier>(&spec.kind()); ml && !ml->resolved) {
        const double lhs = std::log(pair.p1()) + pair.h1().log_pdf(x);
        const double rhs = std::log(ml->eta) + std::log(pair.p0()) + pair.h0().log_pdf(x);
        return lhs >= rhs ? Label::H1 : Label::H0;
    }
    return classify(spec.boundary_set(), x);
}

namespace {

int label_index(Label l) { return l == Label::H0 ? 0 : 1; }

}  // namespace

double accuracy(const BoundarySet& b, const HypothesisPair& pair) {
    const auto& y = b.boundaries();
    const std::size_t n = y.size();
    double acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double lo = i == 0 ? -kInf : y[i - 1];
        const double hi = i == n ? kInf : y[i];
        const int k = label_index(b.interval_label(i));
        const auto& m = pair.model(k);
        acc += pair.prior(k) * (m.cdf(hi) - m.cdf(lo));
    }
    assert(acc > -1e-12 && acc < 1.0 + 1e-12);
    return acc;
}

double accuracy(const ClassifierSpec& spec, const HypothesisPair& pair) {
    return accuracy(spec.boundary_set(), pair);
}

std::vector<double> accuracy_gradient(const BoundarySet& b, const HypothesisPair& pair) {
    for (int k = 0; k < 2; ++k)
        if (!pair.model(k).has_gradients())
            throw CapabilityMissing(pair.model(k).family_name() + ": parameter gradients unavailable");
    std::vector<double> grad(pair.theta_size(), 0.0);
    const auto& y = b.boundaries();
    // Each boundary contributes +p_k dF_k(y_i) for the interval on its left
    // and -p_k dF_k(y_i) for the interval on its right.
    for (std::size_t i = 0; i < y.size(); ++i) {
        const int left = label_index(b.interval_label(i));
        const int right = label_index(b.interval_label(i + 1));
        for (int k : {left, right}) {
            const double sign = (k == left ? 1.0 : -1.0) * pair.prior(k);
            const auto g = pair.model(k).grad_cdf_params(y[i]);
            const auto off = pair.theta_offset(k);
            for (std::size_t c = 0; c < g.size(); ++c) grad[off + c] += sign * g[c];
        }
    }
    return grad;
}

std::vector<double> accuracy_gradient(const ClassifierSpec& spec, const HypothesisPair& pair) {
    return accuracy_gradient(spec.boundary_set(), pair);
}

double vector_norm(const std::vector<double>& v, Norm norm) {
    double r = 0.0;
    if (norm == Norm::Inf) {
        for (double x : v) r = std::max(r, std::abs(x));
        return r;
    }
    for (double x : v) r += x * x;
    return std::sqrt(r);
}

double sensitivity(const BoundarySet& b, const HypothesisPair& pair, Norm norm) {
    return vector_norm(accuracy_gradient(b, pair), norm);
}

double sensitivity(const ClassifierSpec& spec, const HypothesisPair& pair, Norm norm) {
    return sensitivity(spec.boundary_set(), pair, norm);
}

std::vector<double> accuracy_boundary_gradient(const BoundarySet& b, const HypothesisPair& pair) {
    const auto& y = b.boundaries();
    std::vector<double> g(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double sign = b.interval_label(i) == Label::H0 ? 1.0 : -1.0;
        g[i] = sign * (pair.p0() * pair.h0().pdf(y[i]) - pair.p1() * pair.h1().pdf(y[i]));
    }
    return g;
}

std::vector<double> accuracy_boundary_curvature(const BoundarySet& b, const HypothesisPair& pair) {
    const auto& y = b.boundaries();
    std::vector<double> w(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double sign = b.interval_label(i) == Label::H0 ? 1.0 : -1.0;
        w[i] = sign * (pair.p0() * pair.h0().pdf_dx(y[i]) - pair.p1() * pair.h1().pdf_dx(y[i]));
    }
    return w;
}

}  // namespace acsens
