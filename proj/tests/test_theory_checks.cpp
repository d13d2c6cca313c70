#include <doctest.h>

#include <cmath>

#include "acsens/theory_checks.hpp"
#include "oracles.hpp"

using namespace acsens;

namespace {

HypothesisPair gauss(double m0, double s0, double m1, double s1, double p0 = 0.5) {
    return {DensityModel::gaussian(m0, s0), DensityModel::gaussian(m1, s1), p0};
}
HypothesisPair table1() { return gauss(0, 9, 9, 4); }
HypothesisPair fig2c() { return gauss(0, 4, 5, 3); }

// dy*/dtheta_j from the 50-digit quadratic with a tiny step.
std::vector<double> oracle_dy(const HypothesisPair& p, std::size_t j, double eta = 1.0) {
    auto root = [&](const std::vector<double>& t) {
        return oracle::gaussian_ml_roots_50(t[0], t[1], t[2], t[3], p.p0(), eta);
    };
    const double h = 1e-8;
    auto up = p.theta(), dn = p.theta();
    up[j] += h;
    dn[j] -= h;
    const auto ru = root(up), rd = root(dn);
    std::vector<double> d(ru.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (ru[i] - rd[i]) / (2 * h);
    return d;
}

}  // namespace

TEST_CASE("A1 on the table pair holds with sigma1 dominant") {
    const auto r = check_a1(table1());
    CHECK(r.holds);
    CHECK(r.verdict == A1Verdict::Holds);
    CHECK(r.index_j == 3);
    CHECK(r.max_count == 1);
    CHECK(r.gap > 0.01);
}

TEST_CASE("A1 fails on the equal-max pair and on a mirrored pair") {
    const auto r = check_a1(fig2c());
    CHECK_FALSE(r.holds);
    CHECK(r.verdict == A1Verdict::Fails);
    CHECK(r.max_count == 2);
    CHECK(std::abs(std::abs(r.gradient[0]) - 0.043) <= 2e-3);

    const auto s = check_a1(gauss(-2, 3, 2, 3));
    CHECK(s.verdict == A1Verdict::Fails);
    CHECK(std::abs(std::abs(s.gradient[0]) - std::abs(s.gradient[2])) < 1e-15);
}

TEST_CASE("A1 near-tie is reported as fragile") {
    // Move sigma1 until |dA/dsigma1| exceeds the tied mean components by 5e-7.
    auto excess = [](double s1) {
        const auto g = check_a1(gauss(0, 4, 5, s1)).gradient;
        return std::abs(g[3]) - std::abs(g[0]) - 5e-7;
    };
    // The sigma1 component grows as sigma1 shrinks.
    double lo = 2.5, hi = 3.0;
    REQUIRE(excess(lo) > 0);
    REQUIRE(excess(hi) < 0);
    for (int k = 0; k < 100; ++k) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0 ? lo : hi) = mid;
    }
    const auto r = check_a1(gauss(0, 4, 5, lo));
    CHECK(r.verdict == A1Verdict::Fragile);
    CHECK_FALSE(r.holds);
    CHECK(r.gap == doctest::Approx(5e-7).epsilon(1e-3));
}

TEST_CASE("A2 on the table pair") {
    const auto pair = table1();
    const auto r = check_a2(pair, 3);
    CHECK(r.holds);
    const auto d = oracle_dy(pair, 3);
    REQUIRE(d.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(r.boundary_derivative[i] - d[i]) < 1e-6);
    CHECK(std::abs(r.witness_value) > 1e-3);
}

TEST_CASE("A2 with a boundary invariant to the chosen parameter") {
    // Root at 0 = mu0 + sigma0: first-order invariant to sigma0.
    const auto pair = gauss(-1, 1, 1, 1);
    const auto r = check_a2(pair, 1);
    REQUIRE(r.products.size() == 1);
    CHECK(std::abs(r.products[0]) < 1e-8);
    CHECK_FALSE(r.holds);
    // The midpoint moves with either mean.
    const auto m = check_a2(pair, 0);
    CHECK(m.holds);
    CHECK(m.boundary_derivative[0] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("A2 on the exponential pair") {
    const HypothesisPair pair(DensityModel::exponential(1), DensityModel::exponential(2));
    const auto r = check_a2(pair, 0);
    CHECK(r.holds);
    // y* = ln(l1/l0)/(l1-l0); d/dl0 at (1,2) = ln 2 - 1.
    CHECK(std::abs(r.boundary_derivative[0] - (std::log(2.0) - 1.0)) < 1e-7);
}

TEST_CASE("A3 on the table pair") {
    const auto pair = table1();
    const auto r = check_a3(pair);
    CHECK(r.precondition_met);
    CHECK(r.holds);
    // dy/deta against the 50-digit quadratic.
    const double h = 1e-8;
    const auto up = oracle::gaussian_ml_roots_50(0, 9, 9, 4, 0.5, 1 + h);
    const auto dn = oracle::gaussian_ml_roots_50(0, 9, 9, 4, 0.5, 1 - h);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(r.boundary_eta_derivative[i] - (up[i] - dn[i]) / (2 * h)) < 1e-5);
    // dS/dy against a coarser central difference.
    const auto b = ml_optimum(pair);
    for (std::size_t i = 0; i < 2; ++i) {
        const double d = oracle::central_difference(
            [&](double t) {
                auto y = b.boundaries();
                y[i] = t;
                return sensitivity(b.with_boundaries(y), pair, Norm::Inf);
            },
            b[i], 1e-4);
        CHECK(std::abs(r.sensitivity_gradient[i] - d) < 1e-7);
    }
    CHECK(std::abs(r.inner_product) > 1e-8);
}

TEST_CASE("gradient witness on the table pair") {
    const auto w = gradient_witness(table1(), Norm::Inf);
    CHECK(w.verdict_available);
    CHECK(w.nonzero);
    CHECK(w.identity_holds);
    CHECK(w.probe_reduces);
    CHECK(w.probe_accuracy <= w.base_accuracy + 1e-12);
}

TEST_CASE("gradient witness when A1 fails") {
    const auto inf = gradient_witness(fig2c(), Norm::Inf);
    CHECK_FALSE(inf.verdict_available);
    CHECK_FALSE(inf.nonzero);
    const auto two = gradient_witness(fig2c(), Norm::Two);
    CHECK(two.verdict_available);
    CHECK(two.nonzero);
    CHECK(two.probe_reduces);
}

TEST_CASE("identity holds where both sides vanish") {
    const auto w = gradient_witness(gauss(-1, 1, 1, 1), Norm::Two);
    CHECK(w.identity_holds);
    const auto b = ml_optimum(gauss(-1, 1, 1, 1));
    const auto dy = boundary_parameter_derivative(gauss(-1, 1, 1, 1), 1);
    CHECK(std::abs(dy[0]) < 1e-8);
    CHECK(std::abs(b[0]) < 1e-12);
}

TEST_CASE("property: identity, nonzero gradient and descent on random pairs satisfying A1 and A2") {
    Rng rng(101);
    int tested = 0;
    for (int attempt = 0; attempt < 2000 && tested < 50; ++attempt) {
        const auto p = gauss(-5 + 10 * rng.uniform(), 0.5 + 6 * rng.uniform(), -5 + 10 * rng.uniform(),
                             0.5 + 6 * rng.uniform(), 0.3 + 0.4 * rng.uniform());
        AssumptionReport r;
        try {
            r = check_assumptions(p);
        } catch (const SolverFailure&) {
            continue;
        }
        if (!r.a1.holds || !r.a2.holds) continue;
        ++tested;
        CHECK(r.witness_inf.nonzero);
        CHECK(r.witness_inf.identity_residual <= 1e-5);
        CHECK(r.witness_inf.probe_reduces);
    }
    CHECK(tested == 50);
}

TEST_CASE("report json records tolerances") {
    const auto j = check_assumptions(table1()).to_json();
    CHECK(j["options"]["a1_gap_tolerance"] == 1e-6);
    CHECK(j["options"]["resolve_step"] == 1e-5);
    CHECK(j["a1"]["holds"] == true);
    CHECK(j["sensitivity_gradient_at_opt"].size() == 2);
}
