#include "acsens/boundary_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace acsens {

std::string to_string(RootMethod m) {
    return m == RootMethod::GaussianQuadratic ? "gaussian_quadratic" : "grid_bisection";
}

BoundarySet LikelihoodRootReport::boundary_set(double anchor) const {
    if (roots.empty()) return BoundarySet({anchor, anchor}, orientation);
    return BoundarySet(roots, orientation);
}

nlohmann::json LikelihoodRootReport::to_json() const {
    return {{"roots", roots},
            {"method", to_string(method)},
            {"orientation", to_string(orientation)},
            {"residuals", residuals},
            {"eta", eta},
            {"endpoint_sign_warning", endpoint_sign_warning}};
}

double log_likelihood_margin(const HypothesisPair& pair, double eta, double x) {
    return (std::log(pair.p1()) + pair.h1().log_pdf(x)) -
           (std::log(eta) + std::log(pair.p0()) + pair.h0().log_pdf(x));
}

namespace {

void check_eta(double eta) {
    if (!(eta > 0.0)) throw InvalidParameter("eta must be > 0");
}

double residual(const HypothesisPair& pair, double eta, double r) {
    return std::abs(pair.p1() * pair.h1().pdf(r) - eta * pair.p0() * pair.h0().pdf(r));
}

void fill_residuals(LikelihoodRootReport& rep, const HypothesisPair& pair) {
    rep.residuals.clear();
    for (double r : rep.roots) rep.residuals.push_back(residual(pair, rep.eta, r));
}

Orientation winner(double margin) {
    return margin >= 0.0 ? Orientation::H1First : Orientation::H0First;
}

}  // namespace

Interval default_search_interval(const HypothesisPair& pair) {
    const auto& a = pair.h0();
    const auto& b = pair.h1();
    double lo = std::min(a.location() - 8.0 * a.scale(), b.location() - 8.0 * b.scale());
    double hi = std::max(a.location() + 8.0 * a.scale(), b.location() + 8.0 * b.scale());
    const double sup_lo = std::min(a.support().lo, b.support().lo);
    const double sup_hi = std::max(a.support().hi, b.support().hi);
    lo = std::max(lo, sup_lo);
    hi = std::min(hi, sup_hi);
    return {lo, hi};
}

LikelihoodRootReport ml_boundaries_gaussian(const HypothesisPair& pair, double eta) {
    check_eta(eta);
    if (!pair.both_gaussian()) throw InvalidParameter("ml_boundaries_gaussian: both models must be Gaussian");
    const double mu0 = pair.h0().params()[0], s0 = pair.h0().params()[1];
    const double mu1 = pair.h1().params()[0], s1 = pair.h1().params()[1];

    // Degenerate variances go to the linear branch.
    const bool equal_var = std::abs(s0 - s1) <= 1e-9;
    const double a = equal_var ? 0.0 : 0.5 * (1.0 / (s0 * s0) - 1.0 / (s1 * s1));
    const double b = mu1 / (s1 * s1) - mu0 / (s0 * s0);
    const double c = std::log(s0 / s1) + std::log(pair.p1() / pair.p0()) + mu0 * mu0 / (2.0 * s0 * s0) -
                     mu1 * mu1 / (2.0 * s1 * s1) - std::log(eta);

    LikelihoodRootReport rep;
    rep.method = RootMethod::GaussianQuadratic;
    rep.eta = eta;

    if (a == 0.0) {
        if (b == 0.0) {
            rep.orientation = winner(c);
        } else {
            rep.roots = {-c / b};
            rep.orientation = b > 0.0 ? Orientation::H0First : Orientation::H1First;
        }
    } else {
        const double disc = b * b - 4.0 * a * c;
        rep.orientation = winner(a);
        if (disc > 0.0) {
            const double sq = std::sqrt(disc);
            const double q = -0.5 * (b + std::copysign(sq, b));
            double r1 = q / a;
            double r2 = q != 0.0 ? c / q : -r1;
            if (r1 > r2) std::swap(r1, r2);
            if (r1 == r2) {
                // Tangential in floating point; zero-measure region.
            } else {
                rep.roots = {r1, r2};
            }
        }
    }
    // One Newton polish on the log margin (derivative 2ax + b).
    for (double& r : rep.roots) {
        const double d = 2.0 * a * r + b;
        if (d != 0.0) {
            const double step = log_likelihood_margin(pair, eta, r) / d;
            if (std::isfinite(step) && std::abs(step) < 1e-6 * std::max(1.0, std::abs(r))) r -= step;
        }
    }
    if (rep.roots.size() == 2 && rep.roots[0] > rep.roots[1]) std::swap(rep.roots[0], rep.roots[1]);
    fill_residuals(rep, pair);
    return rep;
}

LikelihoodRootReport ml_boundaries_generic(const HypothesisPair& pair, double eta, const SearchOptions& search) {
    check_eta(eta);
    const Interval iv = search.interval ? *search.interval : default_search_interval(pair);
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
        throw InvalidParameter("ml_boundaries_generic: empty or unbounded search interval");
    const std::size_t n = std::max<std::size_t>(search.grid_points, 2);

    auto margin = [&](double x) { return log_likelihood_margin(pair, eta, x); };
    auto sign_of = [](double m) { return std::isnan(m) ? 0 : (m > 0.0 ? 1 : (m < 0.0 ? -1 : 0)); };

    std::vector<double> xs(n);
    std::vector<int> sg(n);
    const double h = (iv.hi - iv.lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = i + 1 == n ? iv.hi : iv.lo + h * static_cast<double>(i);
        sg[i] = sign_of(margin(xs[i]));
    }

    LikelihoodRootReport rep;
    rep.method = RootMethod::GridBisection;
    rep.eta = eta;

    auto bisect = [&](double lo, double hi, int slo) {
        for (int it = 0; it < 200; ++it) {
            const double tol = std::max(1e-12, 4.0 * std::numeric_limits<double>::epsilon() *
                                                   std::max(std::abs(lo), std::abs(hi)));
            if (hi - lo <= tol) break;
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (sign_of(margin(mid)) == slo) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    // Walk nonzero-sign runs; a sign flip across (possibly zero) grid points is a root,
    // a zero touch without a flip is tangential and dropped.
    int prev_sign = 0;
    std::size_t prev_idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sg[i] == 0) continue;
        if (prev_sign != 0 && sg[i] != prev_sign) {
            if (i == prev_idx + 1) {
                rep.roots.push_back(bisect(xs[prev_idx], xs[i], prev_sign));
            } else {
                // Zero plateau between prev_idx and i; take its centre.
                rep.roots.push_back(0.5 * (xs[prev_idx + 1] + xs[i - 1]));
            }
        }
        prev_sign = sg[i];
        prev_idx = i;
    }

    int first_sign = 0;
    for (int s : sg)
        if (s != 0) {
            first_sign = s;
            break;
        }
    rep.orientation = first_sign > 0 ? Orientation::H1First : Orientation::H0First;

    int last_sign = 0;
    for (auto it = sg.rbegin(); it != sg.rend(); ++it)
        if (*it != 0) {
            last_sign = *it;
            break;
        }
    rep.endpoint_sign_warning = rep.roots.empty() && first_sign == last_sign && !(pair.h0() == pair.h1());
    fill_residuals(rep, pair);
    return rep;
}

LikelihoodRootReport ml_boundaries(const HypothesisPair& pair, double eta, const SearchOptions& search) {
    if (pair.both_gaussian()) return ml_boundaries_gaussian(pair, eta);
    return ml_boundaries_generic(pair, eta, search);
}

ClassifierSpec resolve_ml(const HypothesisPair& pair, double eta, const SearchOptions& search) {
    const auto rep = ml_boundaries(pair, eta, search);
    const Interval iv = search.interval ? *search.interval : default_search_interval(pair);
    const double anchor = std::isfinite(iv.lo) && std::isfinite(iv.hi) ? 0.5 * (iv.lo + iv.hi) : 0.0;
    return ClassifierSpec::ml(eta, rep.boundary_set(anchor));
}

LinearOptimum optimal_linear_boundary(const HypothesisPair& pair, const SearchOptions& search) {
    const auto rep = ml_boundaries(pair, 1.0, search);
    if (rep.roots.empty()) throw SolverFailure("optimal_linear_boundary: likelihood equation has no root");
    LinearOptimum best;
    best.accuracy = -1.0;
    for (double r : rep.roots) {
        for (Orientation o : {Orientation::H0First, Orientation::H1First}) {
            const double a = accuracy(BoundarySet({r}, o), pair);
            if (a > best.accuracy) best = {r, o, a};
        }
    }
    return best;
}

}  // namespace acsens
