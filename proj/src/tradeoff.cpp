#include "acsens/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "acsens/csv.hpp"
#include "simplex.hpp"

namespace acsens {

namespace {

struct Candidate {
    std::vector<double> y;
    Orientation o = Orientation::H0First;
    double s = kInf;
};

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return ys.back();
    const std::size_t k = static_cast<std::size_t>(it - xs.begin());
    if (xs[k] == x || k == 0) return ys[k];
    const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return ys[k - 1] + t * (ys[k] - ys[k - 1]);
}

Interval finite_interval(const HypothesisPair& pair, const SearchOptions& search) {
    const Interval iv = search.interval ? *search.interval : default_search_interval(pair);
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi))
        throw InvalidParameter("curve search interval must be finite and nonempty");
    return iv;
}

TradeoffPoint make_point(const BoundarySet& b, const HypothesisPair& pair, Norm norm, Provenance prov) {
    return TradeoffPoint{accuracy(b, pair), sensitivity(b, pair, norm), b, prov};
}

// Feasible-set machinery for the equality-constrained problem.
class ConstrainedSolver {
public:
    ConstrainedSolver(const HypothesisPair& pair, Norm norm, const GeneralCurveOptions& opt)
        : pair_(pair), norm_(norm), opt_(opt), iv_(finite_interval(pair, opt.search)) {
        if (opt.n_boundaries == 0) throw InvalidParameter("n_boundaries must be at least 1");
        const auto rep = ml_boundaries(pair, 1.0, opt.search);
        const auto b = rep.boundary_set(0.5 * (iv_.lo + iv_.hi));
        a_max_ = accuracy(b, pair);
        if (rep.roots.size() == opt.n_boundaries) ystar_ = b;
        const std::size_t g = std::max<std::size_t>(opt.grid, 2);
        h_ = (iv_.hi - iv_.lo) / static_cast<double>(g - 1);
        span_ = iv_.hi - iv_.lo;
        if (opt.n_boundaries == 2) build_grid(g);
    }

    double a_max() const { return a_max_; }

    TradeoffPoint solve(double zeta) const {
        if (!(zeta >= 0.5 - 1e-12)) throw InvalidParameter("accuracy target below 0.5: " + format_number(zeta));
        if (zeta > a_max_ + 1e-9)
            throw InfeasibleTarget("accuracy target " + format_number(zeta) + " exceeds the maximum " +
                                   format_number(a_max_));
        const Provenance prov{SweepKind::ConstrainedMin, zeta};
        if (ystar_ && zeta >= a_max_ - 1e-12) return make_point(*ystar_, pair_, norm_, prov);

        std::vector<Candidate> cands;
        if (opt_.n_boundaries == 1)
            cands = single_boundary_candidates(zeta);
        else if (opt_.n_boundaries == 2)
            cands = grid_candidates(zeta);
        if (ystar_ && opt_.n_boundaries == 2) {
            auto rays = ray_candidates(zeta);
            cands.insert(cands.end(), rays.begin(), rays.end());
        }
        if (opt_.n_boundaries > 2) cands = penalty_candidates(zeta);
        if (cands.empty()) throw SolverFailure("no feasible boundaries for accuracy " + format_number(zeta));

        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            if (a.s != b.s) return a.s < b.s;
            if (a.o != b.o) return a.o < b.o;
            return a.y < b.y;
        });
        Candidate best = cands.front();
        if (opt_.n_boundaries == 2) {
            std::vector<Candidate> chosen;
            for (const auto& c : cands) {
                if (chosen.size() >= opt_.refine_candidates) break;
                const bool distinct = std::all_of(chosen.begin(), chosen.end(), [&](const Candidate& d) {
                    return d.o != c.o || std::max(std::abs(d.y[0] - c.y[0]), std::abs(d.y[1] - c.y[1])) > 2 * h_;
                });
                if (distinct) chosen.push_back(c);
            }
            for (const auto& c : chosen) {
                const auto r = refine(c, zeta);
                if (r.s < best.s) best = r;
            }
        }
        const BoundarySet b(best.y, best.o);
        auto p = make_point(b, pair_, norm_, prov);
        if (std::abs(p.accuracy - zeta) > opt_.feasibility_tolerance)
            throw SolverFailure("best candidate misses the accuracy target by " +
                                format_number(std::abs(p.accuracy - zeta)));
        return p;
    }

private:
    double acc(const std::vector<double>& y, Orientation o) const { return accuracy(BoundarySet(y, o), pair_); }
    double sens(const std::vector<double>& y, Orientation o) const {
        return sensitivity(BoundarySet(y, o), pair_, norm_);
    }

    void build_grid(std::size_t g) {
        x_.resize(g);
        f0_.resize(g);
        f1_.resize(g);
        for (std::size_t k = 0; k < g; ++k) {
            x_[k] = k + 1 == g ? iv_.hi : iv_.lo + h_ * static_cast<double>(k);
            f0_[k] = pair_.h0().cdf(x_[k]);
            f1_[k] = pair_.h1().cdf(x_[k]);
        }
    }

    // Accuracy of the H0-first classifier with boundaries at grid nodes i <= j.
    double grid_acc(std::size_t i, std::size_t j) const {
        return pair_.p0() * (f0_[i] + (1.0 - f0_[j])) + pair_.p1() * (f1_[j] - f1_[i]);
    }

    std::vector<Candidate> grid_candidates(double zeta) const {
        std::vector<Candidate> out;
        const std::size_t g = x_.size();
        for (Orientation o : {Orientation::H0First, Orientation::H1First}) {
            // A_{H1 first} = 1 - A_{H0 first}
            const double level = o == Orientation::H0First ? zeta : 1.0 - zeta;
            auto push = [&](double y1, double y2) {
                Candidate c{{y1, y2}, o, 0.0};
                c.s = sens(c.y, o);
                out.push_back(std::move(c));
            };
            for (std::size_t j = 0; j < g; ++j) {
                for (std::size_t i = 0; i <= j; ++i) {
                    const double v = grid_acc(i, j) - level;
                    if (i == j && std::abs(v) <= 1e-12) push(x_[i], x_[i]);
                    // Edge along y1: (i, j) -> (i + 1, j), valid while i + 1 <= j.
                    if (i + 1 <= j) {
                        const double w = grid_acc(i + 1, j) - level;
                        if ((v > 0) != (w > 0) && v != 0.0) {
                            const double y2 = x_[j];
                            auto f = [&](double t) { return acc({t, y2}, o) - zeta; };
                            if ((f(x_[i]) > 0) != (f(x_[i + 1]) > 0)) push(detail::bracketed_root(f, x_[i], x_[i + 1]), y2);
                        }
                    }
                    // Edge along y2: (i, j) -> (i, j + 1).
                    if (j + 1 < g) {
                        const double w = grid_acc(i, j + 1) - level;
                        if ((v > 0) != (w > 0) && v != 0.0) {
                            const double y1 = x_[i];
                            auto f = [&](double t) { return acc({y1, t}, o) - zeta; };
                            if ((f(x_[j]) > 0) != (f(x_[j + 1]) > 0)) push(y1, detail::bracketed_root(f, x_[j], x_[j + 1]));
                        }
                    }
                }
            }
        }
        return out;
    }

    // Level-set points on rays from the ML optimum; they cover targets so close
    // to the maximum that the level set fits inside one grid cell.
    std::vector<Candidate> ray_candidates(double zeta) const {
        std::vector<Candidate> out;
        const auto& ys = ystar_->boundaries();
        const Orientation o = ystar_->orientation();
        const double pi = std::acos(-1.0);
        for (std::size_t k = 0; k < opt_.rays; ++k) {
            const double phi = 2 * pi * static_cast<double>(k) / static_cast<double>(opt_.rays);
            const double d1 = std::cos(phi), d2 = std::sin(phi);
            auto at = [&](double t) { return std::vector<double>{ys[0] + t * d1, ys[1] + t * d2}; };
            auto ok = [&](const std::vector<double>& y) {
                return y[0] <= y[1] && y[0] >= iv_.lo - span_ && y[1] <= iv_.hi + span_;
            };
            auto f = [&](double t) { return acc(at(t), o) - zeta; };
            double prev = 0.0;
            for (double t = h_ / 1024; t <= 2 * span_; t *= 2) {
                if (!ok(at(t))) break;
                if (f(t) <= 0) {
                    const double r = detail::bracketed_root(f, prev, t);
                    Candidate c{at(r), o, 0.0};
                    if (ok(c.y)) {
                        c.s = sens(c.y, o);
                        out.push_back(std::move(c));
                    }
                    break;
                }
                prev = t;
            }
        }
        return out;
    }

    std::vector<Candidate> single_boundary_candidates(double zeta) const {
        std::vector<Candidate> out;
        const std::size_t g = std::max<std::size_t>(opt_.grid, 2) * 8;
        const double step = (iv_.hi - iv_.lo) / static_cast<double>(g - 1);
        for (Orientation o : {Orientation::H0First, Orientation::H1First}) {
            auto f = [&](double t) { return acc({t}, o) - zeta; };
            double prev = iv_.lo, fprev = f(prev);
            for (std::size_t k = 1; k < g; ++k) {
                const double x = iv_.lo + step * static_cast<double>(k), fx = f(x);
                if (fprev == 0.0 || (fprev > 0) != (fx > 0)) {
                    Candidate c{{detail::bracketed_root(f, prev, x)}, o, 0.0};
                    c.s = sens(c.y, o);
                    out.push_back(std::move(c));
                }
                prev = x;
                fprev = fx;
            }
        }
        return out;
    }

    // Restore accuracy == zeta by moving coordinate c alone, keeping the
    // boundaries sorted.
    std::optional<std::vector<double>> restore(std::vector<double> y, std::size_t c, Orientation o, double zeta,
                                               double step) const {
        const double lo = c == 0 ? iv_.lo - span_ : y[c - 1];
        const double hi = c + 1 == y.size() ? iv_.hi + span_ : y[c + 1];
        if (y[c] < lo || y[c] > hi) return std::nullopt;
        auto f = [&](double t) {
            auto z = y;
            z[c] = t;
            return acc(z, o) - zeta;
        };
        const auto r = detail::nearest_root(f, y[c], step, lo, hi);
        if (!r) return std::nullopt;
        y[c] = *r;
        if (std::abs(acc(y, o) - zeta) > opt_.feasibility_tolerance * 1e-3) return std::nullopt;
        return y;
    }

    // Projected coordinate descent along the feasible set.
    Candidate refine(Candidate c, double zeta) const {
        double step = h_;
        for (std::size_t it = 0; it < opt_.max_iterations && step > opt_.min_step; ++it) {
            bool improved = false;
            for (std::size_t k = 0; k < c.y.size() && !improved; ++k) {
                for (double dir : {1.0, -1.0}) {
                    auto y = c.y;
                    y[k] += dir * step;
                    if (!std::is_sorted(y.begin(), y.end())) continue;
                    const std::size_t other = k == 0 ? 1 : k - 1;
                    const auto r = restore(y, other, c.o, zeta, step);
                    if (!r) continue;
                    const double s = sens(*r, c.o);
                    if (s < c.s) {
                        c.y = *r;
                        c.s = s;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        return c;
    }

    // n > 2: quadratic-penalty simplex search from perturbed ML boundaries.
    std::vector<Candidate> penalty_candidates(double zeta) const {
        std::vector<Candidate> out;
        const std::size_t n = opt_.n_boundaries;
        const auto rep = ml_boundaries(pair_, 1.0, opt_.search);
        std::vector<double> base = rep.roots;
        const double mid = 0.5 * (iv_.lo + iv_.hi);
        if (base.empty()) base.push_back(mid);
        while (base.size() < n) base.push_back(base.size() % 2 ? base.front() : iv_.hi);
        base.resize(n);
        std::sort(base.begin(), base.end());
        const Orientation o0 = rep.orientation;
        const double scale = 0.05 * span_;
        for (std::size_t r = 0; r < opt_.restarts; ++r) {
            Rng rng(opt_.seed + r);
            for (Orientation o : {o0, flipped(o0)}) {
                std::vector<double> x = base;
                if (r > 0)
                    for (auto& v : x) v += scale * rng.standard_normal();
                std::vector<double> step(n, scale);
                for (double rho = 1e2; rho <= 1e8 * 1.0001; rho *= 10) {
                    auto obj = [&](const std::vector<double>& v) {
                        auto y = v;
                        std::sort(y.begin(), y.end());
                        const double a = acc(y, o);
                        return sens(y, o) + rho * (a - zeta) * (a - zeta);
                    };
                    x = detail::nelder_mead(obj, x, step, 4000, 1e-12).x;
                    for (auto& s : step) s = std::max(s * 0.3, 1e-6);
                }
                std::sort(x.begin(), x.end());
                // Polish feasibility on the coordinate with the largest pull.
                const auto ga = accuracy_boundary_gradient(BoundarySet(x, o), pair_);
                const std::size_t c = static_cast<std::size_t>(
                    std::max_element(ga.begin(), ga.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) -
                    ga.begin());
                const auto y = restore(x, c, o, zeta, 1e-6 * span_);
                if (!y) continue;
                out.push_back(Candidate{*y, o, sens(*y, o)});
            }
        }
        return out;
    }

    HypothesisPair pair_;
    Norm norm_;
    GeneralCurveOptions opt_;
    Interval iv_;
    double a_max_ = 0.5;
    std::optional<BoundarySet> ystar_;
    double h_ = 0.0, span_ = 0.0;
    std::vector<double> x_, f0_, f1_;
};

}  // namespace

std::string to_string(SweepKind k) {
    switch (k) {
        case SweepKind::MlSweep: return "ml_sweep";
        case SweepKind::LinearSweep: return "linear_sweep";
        case SweepKind::ConstrainedMin: return "constrained_min";
    }
    return "?";
}

std::string Provenance::label() const {
    const char* key = kind == SweepKind::MlSweep ? "eta" : kind == SweepKind::LinearSweep ? "y" : "zeta";
    return to_string(kind) + ":" + key + "=" + format_number(value);
}

nlohmann::json TradeoffPoint::to_json() const {
    return {{"accuracy", accuracy},
            {"sensitivity", sensitivity},
            {"boundaries", boundaries.to_json()},
            {"provenance", {{"kind", to_string(provenance.kind)}, {"value", provenance.value}}}};
}

std::optional<double> TradeoffCurve::sensitivity_at(double a) const {
    if (points.empty() || a < points.front().accuracy || a > points.back().accuracy) return std::nullopt;
    std::vector<double> xs, ys;
    for (const auto& p : points) {
        xs.push_back(p.accuracy);
        ys.push_back(p.sensitivity);
    }
    return interp(xs, ys, a);
}

void TradeoffCurve::write_csv(std::ostream& os) const {
    auto meta = metadata;
    meta["norm"] = to_string(norm);
    meta["pair_digest"] = pair_digest;
    meta["dropped_points"] = dropped.size();
    write_comment_header(os, meta);
    os << "accuracy,sensitivity";
    for (std::size_t i = 1; i <= boundary_count(); ++i) os << ",y" << i;
    os << ",provenance\n";
    for (const auto& p : points) {
        os << format_number(p.accuracy) << ',' << format_number(p.sensitivity);
        for (double y : p.boundaries.boundaries()) os << ',' << format_number(y);
        os << ',' << csv_field(p.provenance.label()) << '\n';
    }
}

nlohmann::json TradeoffCurve::to_json() const {
    nlohmann::json pts = nlohmann::json::array(), drop = nlohmann::json::array();
    for (const auto& p : points) pts.push_back(p.to_json());
    for (const auto& d : dropped) {
        nlohmann::json j{{"provenance", d.provenance.label()}, {"reason", d.reason}};
        if (d.point) j["point"] = d.point->to_json();
        drop.push_back(j);
    }
    return {{"norm", to_string(norm)}, {"pair_digest", pair_digest}, {"metadata", metadata},
            {"points", pts},           {"dropped", drop}};
}

std::string pair_digest(const HypothesisPair& pair) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : pair.to_json().dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<double> default_eta_grid() {
    std::vector<double> g;
    for (int k = 0; k < 400; ++k) g.push_back(std::pow(10.0, -3.0 + 6.0 * k / 399.0));
    g.push_back(1.0);
    std::sort(g.begin(), g.end());
    return g;
}

std::vector<double> default_linear_grid(const HypothesisPair& pair) {
    const auto iv = default_search_interval(pair);
    std::vector<double> g;
    for (int k = 0; k <= 2000; ++k) g.push_back(iv.lo + (iv.hi - iv.lo) * k / 2000.0);
    try {
        g.push_back(optimal_linear_boundary(pair).y);
    } catch (const SolverFailure&) {
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

std::vector<double> default_zeta_grid(const HypothesisPair& pair, std::size_t steps) {
    if (steps < 2) throw InvalidParameter("zeta grid needs at least 2 steps");
    const double amax = accuracy(resolve_ml(pair, 1.0), pair);
    std::vector<double> g(steps);
    for (std::size_t k = 0; k < steps; ++k) g[k] = 0.5 + (amax - 0.5) * static_cast<double>(k) / (steps - 1);
    g.back() = amax;
    return g;
}

TradeoffCurve select_frontier(std::vector<TradeoffPoint> sweep, Norm norm, std::vector<DroppedPoint> dropped) {
    TradeoffCurve curve;
    curve.norm = norm;
    curve.dropped = std::move(dropped);
    if (sweep.empty()) return curve;

    // The two runs of monotone accuracy that meet at the first maximum.
    std::size_t peak = 0;
    for (std::size_t k = 1; k < sweep.size(); ++k)
        if (sweep[k].accuracy > sweep[peak].accuracy) peak = k;
    std::size_t a = peak, b = peak;
    while (a > 0 && sweep[a - 1].accuracy < sweep[a].accuracy) --a;
    while (b + 1 < sweep.size() && sweep[b + 1].accuracy < sweep[b].accuracy) ++b;

    auto branch = [&](std::size_t from, std::size_t to) {
        std::vector<double> acc, sens;
        for (std::size_t k = from; k <= to; ++k) {
            acc.push_back(sweep[k].accuracy);
            sens.push_back(sweep[k].sensitivity);
        }
        if (acc.size() > 1 && acc.front() > acc.back()) {
            std::reverse(acc.begin(), acc.end());
            std::reverse(sens.begin(), sens.end());
        }
        return std::make_pair(acc, sens);
    };
    bool take_left = true;
    if (a < peak && b > peak) {
        const auto [la, ls] = branch(a, peak);
        const auto [ra, rs] = branch(peak, b);
        const double lo = std::max(la.front(), ra.front()), hi = sweep[peak].accuracy;
        double diff = 0.0;
        for (int k = 0; k <= 200; ++k) {
            const double x = lo + (hi - lo) * k / 200.0;
            diff += interp(la, ls, x) - interp(ra, rs, x);
        }
        take_left = diff <= 0.0;
    } else if (b > peak) {
        take_left = false;
    }
    const std::size_t from = take_left ? a : peak, to = take_left ? peak : b;

    std::vector<TradeoffPoint> kept;
    for (std::size_t k = 0; k < sweep.size(); ++k) {
        if (k >= from && k <= to)
            kept.push_back(sweep[k]);
        else
            curve.dropped.push_back({sweep[k].provenance, "off the selected branch", sweep[k]});
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const TradeoffPoint& x, const TradeoffPoint& y) { return x.accuracy < y.accuracy; });
    for (auto& p : kept) {
        if (!curve.points.empty() && p.accuracy <= curve.points.back().accuracy) {
            curve.dropped.push_back({p.provenance, "duplicate accuracy", p});
            continue;
        }
        curve.points.push_back(std::move(p));
    }
    return curve;
}

TradeoffCurve ml_curve(const HypothesisPair& pair, const std::vector<double>& eta_grid, Norm norm,
                       const SearchOptions& search) {
    if (eta_grid.empty()) throw InvalidParameter("eta grid is empty");
    std::vector<double> etas = eta_grid;
    std::sort(etas.begin(), etas.end());
    for (double e : etas)
        if (!(e > 0) || !std::isfinite(e)) throw InvalidParameter("eta values must be positive and finite");

    const std::size_t n_ref = ml_boundaries(pair, 1.0, search).roots.size();
    std::vector<TradeoffPoint> sweep;
    std::vector<DroppedPoint> dropped;
    for (double e : etas) {
        const Provenance prov{SweepKind::MlSweep, e};
        const auto rep = ml_boundaries(pair, e, search);
        if (rep.roots.empty()) {
            dropped.push_back({prov, "no finite boundary", std::nullopt});
            continue;
        }
        auto p = make_point(rep.boundary_set(), pair, norm, prov);
        if (rep.roots.size() != n_ref)
            dropped.push_back({prov, "boundary count differs from eta = 1", p});
        else if (p.accuracy < 0.5)
            dropped.push_back({prov, "below chance", p});
        else
            sweep.push_back(std::move(p));
    }
    auto curve = select_frontier(std::move(sweep), norm, std::move(dropped));
    curve.pair_digest = pair_digest(pair);
    curve.metadata = {{"curve", "ml"},
                      {"eta_grid_size", etas.size()},
                      {"eta_min", etas.front()},
                      {"eta_max", etas.back()},
                      {"grid_points", search.grid_points}};
    return curve;
}

TradeoffCurve linear_curve(const HypothesisPair& pair, const std::vector<double>& y_grid, Norm norm) {
    if (y_grid.empty()) throw InvalidParameter("boundary grid is empty");
    std::vector<double> ys = y_grid;
    std::sort(ys.begin(), ys.end());
    std::vector<TradeoffPoint> sweep;
    for (double y : ys) {
        if (!std::isfinite(y)) throw InvalidParameter("boundary grid values must be finite");
        const BoundarySet b0({y}, Orientation::H0First), b1({y}, Orientation::H1First);
        const double a0 = accuracy(b0, pair), a1 = accuracy(b1, pair);
        sweep.push_back(make_point(a0 >= a1 ? b0 : b1, pair, norm, {SweepKind::LinearSweep, y}));
    }
    auto curve = select_frontier(std::move(sweep), norm);
    curve.pair_digest = pair_digest(pair);
    curve.metadata = {
        {"curve", "linear"}, {"y_grid_size", ys.size()}, {"y_min", ys.front()}, {"y_max", ys.back()}};
    return curve;
}

nlohmann::json GeneralCurveOptions::to_json() const {
    nlohmann::json j{{"n_boundaries", n_boundaries},
                     {"grid", grid},
                     {"refine_candidates", refine_candidates},
                     {"max_iterations", max_iterations},
                     {"min_step", min_step},
                     {"feasibility_tolerance", feasibility_tolerance},
                     {"rays", rays},
                     {"grid_points", search.grid_points}};
    if (n_boundaries > 2) {
        j["restarts"] = restarts;
        j["seed"] = seed;
        j["best_effort"] = "no global guarantee";
    }
    if (search.interval) j["interval"] = {search.interval->lo, search.interval->hi};
    return j;
}

TradeoffPoint constrained_minimum(const HypothesisPair& pair, double zeta, Norm norm, const GeneralCurveOptions& opt) {
    return ConstrainedSolver(pair, norm, opt).solve(zeta);
}

TradeoffCurve general_curve(const HypothesisPair& pair, const std::vector<double>& zeta_grid, Norm norm,
                            const GeneralCurveOptions& opt) {
    if (zeta_grid.empty()) throw InvalidParameter("zeta grid is empty");
    std::vector<double> zs = zeta_grid;
    std::sort(zs.begin(), zs.end());
    const ConstrainedSolver solver(pair, norm, opt);
    TradeoffCurve curve;
    curve.norm = norm;
    for (double z : zs) {
        if (z > solver.a_max() + 1e-9)
            throw InfeasibleTarget("accuracy target " + format_number(z) + " exceeds the maximum " +
                                   format_number(solver.a_max()));
        const Provenance prov{SweepKind::ConstrainedMin, z};
        try {
            auto p = solver.solve(z);
            if (!curve.points.empty() && p.accuracy <= curve.points.back().accuracy)
                curve.dropped.push_back({prov, "duplicate accuracy", p});
            else
                curve.points.push_back(std::move(p));
        } catch (const SolverFailure& e) {
            curve.dropped.push_back({prov, e.what(), std::nullopt});
        }
    }
    curve.pair_digest = pair_digest(pair);
    curve.metadata = opt.to_json();
    curve.metadata["curve"] = "general";
    curve.metadata["zeta_grid_size"] = zs.size();
    curve.metadata["max_accuracy"] = solver.a_max();
    return curve;
}

double dominance_excess(const TradeoffCurve& lower, const TradeoffCurve& upper) {
    double worst = -kInf;
    for (const auto& p : lower.points) {
        const auto s = upper.sensitivity_at(p.accuracy);
        if (s) worst = std::max(worst, p.sensitivity - *s);
    }
    return worst;
}

std::size_t count_inversions(const TradeoffCurve& curve) {
    std::size_t n = 0;
    for (std::size_t k = 0; k + 1 < curve.points.size(); ++k)
        if (curve.points[k].sensitivity > curve.points[k + 1].sensitivity) ++n;
    return n;
}

}  // namespace acsens
