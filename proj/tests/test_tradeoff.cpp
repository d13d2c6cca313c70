#include <doctest.h>

#include <cmath>
#include <sstream>

#include "acsens/tradeoff.hpp"
#include "oracles.hpp"

using namespace acsens;

namespace {

HypothesisPair table1() { return {DensityModel::gaussian(0, 9), DensityModel::gaussian(9, 4), 0.5}; }
HypothesisPair fig2c() { return {DensityModel::gaussian(0, 4), DensityModel::gaussian(5, 3), 0.5}; }

TradeoffPoint synthetic(double a, double s, double v) {
    return {a, s, BoundarySet({v}), {SweepKind::LinearSweep, v}};
}

// Brute-force minimum of S subject to A = zeta over two boundaries: y1 on a
// uniform grid, y2 by sign scan plus bisection; then a finer y1 pass around
// the best coarse value.
struct Brute {
    double s = kInf, y1 = 0.0;
};

Brute scan_y1(const HypothesisPair& pair, double zeta, Norm norm, double lo, double hi, int n1, double y2_hi, int n2) {
    Brute best;
    for (Orientation o : {Orientation::H0First, Orientation::H1First}) {
        for (int i = 0; i <= n1; ++i) {
            const double y1 = lo + (hi - lo) * i / n1;
            auto f = [&](double y2) { return accuracy(BoundarySet({y1, y2}, o), pair) - zeta; };
            double prev = y1, fp = f(prev);
            for (int k = 1; k <= n2; ++k) {
                const double x = y1 + (y2_hi - y1) * k / n2, fx = f(x);
                if ((fp > 0) != (fx > 0)) {
                    double a = prev, b = x, fa = fp;
                    for (int it = 0; it < 80; ++it) {
                        const double m = 0.5 * (a + b), fm = f(m);
                        if ((fm > 0) == (fa > 0)) {
                            a = m;
                            fa = fm;
                        } else {
                            b = m;
                        }
                    }
                    const double s = sensitivity(BoundarySet({y1, 0.5 * (a + b)}, o), pair, norm);
                    if (s < best.s) best = {s, y1};
                }
                prev = x;
                fp = fx;
            }
        }
    }
    return best;
}

double brute_force_min(const HypothesisPair& pair, double zeta, Norm norm, double lo, double hi) {
    const int n1 = 1600;
    const double h = (hi - lo) / n1;
    const auto coarse = scan_y1(pair, zeta, norm, lo, hi, n1, hi, 800);
    const auto fine = scan_y1(pair, zeta, norm, coarse.y1 - 2 * h, coarse.y1 + 2 * h, 400, hi, 800);
    return std::min(coarse.s, fine.s);
}

}  // namespace

TEST_CASE("ML curve passes through the table classifiers") {
    const auto pair = table1();
    auto grid = default_eta_grid();
    grid.push_back(0.4603);
    const auto c = ml_curve(pair, grid, Norm::Inf);
    bool saw1 = false, saw2 = false;
    for (const auto& p : c.points) {
        if (p.provenance.value == 1.0) {
            saw1 = true;
            CHECK(std::abs(p.accuracy - 0.7891) <= 5e-4);
            CHECK(std::abs(p.sensitivity - 0.0334) <= 1e-3);
        }
        if (p.provenance.value == 0.4603) {
            saw2 = true;
            CHECK(std::abs(p.accuracy - 0.7766) <= 5e-4);
            CHECK(std::abs(p.sensitivity - 0.0201) <= 1e-3);
        }
    }
    CHECK(saw1);
    CHECK(saw2);
    CHECK(c.points.back().provenance.value == 1.0);
    for (std::size_t k = 0; k + 1 < c.points.size(); ++k) CHECK(c.points[k].accuracy < c.points[k + 1].accuracy);
    for (const auto& p : c.points) CHECK(p.boundaries.size() == 2);
    // Lowering accuracy from the top first raises sensitivity somewhere.
    CHECK(count_inversions(c) >= 1);
}

TEST_CASE("ML curve on a single threshold") {
    const auto c = ml_curve(table1(), {1.0}, Norm::Inf);
    REQUIRE(c.points.size() == 1);
    CHECK(c.points[0].accuracy == accuracy(resolve_ml(table1(), 1.0), table1()));
    CHECK_THROWS_AS(ml_curve(table1(), {}, Norm::Inf), InvalidParameter);
    CHECK_THROWS_AS(ml_curve(table1(), {-1.0}, Norm::Inf), InvalidParameter);
}

TEST_CASE("linear curve") {
    const auto pair = table1();
    const auto c = linear_curve(pair, default_linear_grid(pair), Norm::Inf);
    const auto top = c.points.back();
    CHECK(std::round(top.boundaries[0] * 100) / 100 == doctest::Approx(3.65));
    double best = 0;
    for (const auto& d : c.dropped)
        if (d.point) best = std::max(best, d.point->accuracy);
    CHECK(best <= top.accuracy);

    // Far boundaries: one label everywhere, gradient terms vanish.
    const BoundarySet far({1e6});
    CHECK(accuracy(far, pair) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sensitivity(far, pair, Norm::Inf) < 1e-300);

    // Equal-variance midpoint: accuracy Phi(delta/(2 sigma)) by quadrature.
    const HypothesisPair eq(DensityModel::gaussian(1, 2), DensityModel::gaussian(4, 2));
    const auto ce = linear_curve(eq, {2.5}, Norm::Inf);
    const double phi = oracle::integrate([](double t) { return std::exp(-t * t / 2) / std::sqrt(2 * M_PI); }, -kInf, 0.75);
    CHECK(std::abs(ce.points[0].accuracy - phi) < 1e-12);
    CHECK_THROWS_AS(linear_curve(pair, {}, Norm::Inf), InvalidParameter);
}

TEST_CASE("frontier branch selection") {
    // Sweep: rises to a peak, then falls along a more sensitive branch.
    std::vector<TradeoffPoint> sweep{synthetic(0.55, 0.01, 0), synthetic(0.6, 0.02, 1), synthetic(0.7, 0.03, 2),
                                     synthetic(0.65, 0.05, 3), synthetic(0.58, 0.06, 4)};
    const auto c = select_frontier(sweep, Norm::Inf);
    REQUIRE(c.points.size() == 3);
    CHECK(c.points[0].provenance.value == 0);
    CHECK(c.points[2].provenance.value == 2);
    CHECK(c.dropped.size() == 2);
    // Mirror: the falling side is the cheaper one.
    std::vector<TradeoffPoint> mirror{synthetic(0.55, 0.09, 0), synthetic(0.7, 0.03, 1), synthetic(0.6, 0.01, 2)};
    const auto m = select_frontier(mirror, Norm::Inf);
    REQUIRE(m.points.size() == 2);
    CHECK(m.points[0].provenance.value == 2);
}

TEST_CASE("general curve endpoints") {
    const auto pair = table1();
    const auto top = constrained_minimum(pair, accuracy(resolve_ml(pair, 1.0), pair), Norm::Inf);
    CHECK(std::abs(top.sensitivity - 0.0334) <= 1e-3);
    CHECK(std::abs(top.boundaries[0] - 3.65) < 0.01);
    CHECK(std::abs(top.boundaries[1] - 18.78) < 0.01);

    const auto bottom = constrained_minimum(pair, 0.5, Norm::Inf);
    CHECK(bottom.sensitivity < 1e-12);
    CHECK(std::abs(bottom.accuracy - 0.5) < 1e-12);

    CHECK_THROWS_AS(constrained_minimum(pair, 0.8, Norm::Inf), InfeasibleTarget);
    CHECK_THROWS_AS(general_curve(pair, {0.6, 0.9}, Norm::Inf), InfeasibleTarget);
    CHECK_THROWS_AS(general_curve(pair, {}, Norm::Inf), InvalidParameter);
}

TEST_CASE("constrained minimum agrees with brute force") {
    const auto pair = table1();
    GeneralCurveOptions opt;
    opt.grid = 150;
    for (Norm n : {Norm::Inf, Norm::Two}) {
        for (double zeta : {0.62, 0.775}) {
            const auto p = constrained_minimum(pair, zeta, n, opt);
            CHECK(std::abs(p.accuracy - zeta) <= 1e-6);
            const double bf = brute_force_min(pair, zeta, n, -40, 40);
            CHECK(p.sensitivity <= bf + 1e-9);
            CHECK(p.sensitivity >= bf - 1e-5);
        }
    }
}

TEST_CASE("property: general curve dominance and monotonicity") {
    for (const auto& pair : {table1(), fig2c()}) {
        for (Norm n : {Norm::Inf, Norm::Two}) {
            const auto g = general_curve(pair, default_zeta_grid(pair, 30), n);
            const auto ml = ml_curve(pair, default_eta_grid(), n);
            const auto lin = linear_curve(pair, default_linear_grid(pair), n);
            CHECK(g.dropped.empty());
            for (const auto& p : g.points) CHECK(std::abs(p.accuracy - p.provenance.value) <= 1e-6);
            CHECK(dominance_excess(g, ml) <= 1e-6);
            CHECK(dominance_excess(g, lin) <= 1e-6);
            for (std::size_t k = 0; k + 1 < g.points.size(); ++k)
                CHECK(g.points[k].sensitivity <= g.points[k + 1].sensitivity + 1e-5);
        }
    }
}

TEST_CASE("general curve with one and three boundaries") {
    const auto pair = table1();
    GeneralCurveOptions one;
    one.n_boundaries = 1;
    const auto lin = linear_curve(pair, default_linear_grid(pair), Norm::Inf);
    for (double zeta : {0.6, 0.7, 0.78}) {
        const auto p = constrained_minimum(pair, zeta, Norm::Inf, one);
        REQUIRE(p.boundaries.size() == 1);
        CHECK(std::abs(p.accuracy - zeta) <= 1e-6);
        CHECK(p.sensitivity <= *lin.sensitivity_at(zeta) + 1e-6);
    }

    GeneralCurveOptions three;
    three.n_boundaries = 3;
    three.restarts = 3;
    const auto c = general_curve(pair, {0.6, 0.75}, Norm::Inf, three);
    CHECK(c.metadata["best_effort"] == "no global guarantee");
    for (const auto& p : c.points) {
        CHECK(p.boundaries.size() == 3);
        CHECK(std::abs(p.accuracy - p.provenance.value) <= 1e-6);
    }
    CHECK(c.points.size() + c.dropped.size() == 2);
}

TEST_CASE("csv layout and digest") {
    const auto pair = table1();
    const auto c = ml_curve(pair, {0.5, 1.0}, Norm::Two);
    std::ostringstream os;
    c.write_csv(os);
    const std::string s = os.str();
    CHECK(s.find("# norm: \"two\"") != std::string::npos);
    CHECK(s.find("accuracy,sensitivity,y1,y2,provenance\n") != std::string::npos);
    CHECK(s.find("ml_sweep:eta=1,") == std::string::npos);
    CHECK(s.find(",ml_sweep:eta=1\n") != std::string::npos);

    CHECK(pair_digest(pair) == pair_digest(table1()));
    CHECK(pair_digest(pair) != pair_digest(fig2c()));
    CHECK(pair_digest(pair).size() == 16);
    const auto j = c.to_json();
    CHECK(j["points"].size() == c.points.size());
}
