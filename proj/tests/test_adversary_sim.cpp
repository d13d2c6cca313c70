#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "acsens/adversary_sim.hpp"
#include "acsens/boundary_solver.hpp"
#include "oracles.hpp"

using namespace acsens;

namespace {

HypothesisPair table1() { return {DensityModel::gaussian(0, 9), DensityModel::gaussian(9, 4), 0.5}; }

// Accuracy of boundaries (y1, y2), H0 outside, by quadrature on the perturbed pair.
double quadrature_accuracy(double y1, double y2, double m0, double s0, double m1, double s1) {
    auto f0 = [&](double x) { return std::exp(-0.5 * std::pow((x - m0) / s0, 2)) / (s0 * std::sqrt(2 * M_PI)); };
    auto f1 = [&](double x) { return std::exp(-0.5 * std::pow((x - m1) / s1, 2)) / (s1 * std::sqrt(2 * M_PI)); };
    return 0.5 * (oracle::integrate(f0, -kInf, y1) + oracle::integrate(f1, y1, y2) + oracle::integrate(f0, y2, kInf));
}

}  // namespace

TEST_CASE("scenarios and perturbation parsing") {
    const auto s2 = scenario("s2");
    CHECK(s2.mu_bar_0 == 1.0);
    CHECK(s2.sigma_bar_1 == 1.5);
    CHECK_THROWS_AS(scenario("s3"), InvalidParameter);
    CHECK_THROWS_WITH_AS(PerturbationSpec::from_json({{"mu_bar_2", 1}}), doctest::Contains("mu_bar_2"), InvalidParameter);
    const PerturbationSpec bad{0, -9, 0, 0};
    CHECK_THROWS_AS(bad.apply(table1()), InvalidParameter);
    const auto back = PerturbationSpec::from_json(s2.to_json());
    CHECK(back.mu_bar_1 == -2.0);
}

TEST_CASE("analytic perturbed accuracy") {
    const auto pair = table1();
    const auto b = resolve_ml(pair, 1.0).boundary_set();
    CHECK(analytic_perturbed_accuracy(pair, b, {}) == accuracy(b, pair));
    const auto s2 = scenario("s2");
    CHECK(std::abs(analytic_perturbed_accuracy(pair, b, s2) - quadrature_accuracy(b[0], b[1], 1, 11, 7, 5.5)) < 1e-10);
}

TEST_CASE("monte carlo matches the analytic accuracy") {
    const auto pair = table1();
    ExperimentOptions opt;
    opt.n_obs = 4000;
    opt.n_trials = 25;
    opt.base_seed = 3;
    for (double eta : {1.0, 0.4603}) {
        const auto b = resolve_ml(pair, eta).boundary_set();
        for (const char* s : {"none", "s1", "s2"}) {
            const auto r = run_experiment(pair, b, scenario(s), opt);
            CHECK(r.per_trial_accuracy.size() == 25);
            CHECK(std::abs(r.mean_accuracy - r.analytic_accuracy) <= 3 * r.standard_error);
            const auto [lo, hi] = std::minmax_element(r.per_trial_accuracy.begin(), r.per_trial_accuracy.end());
            CHECK(r.mean_accuracy >= *lo);
            CHECK(r.mean_accuracy <= *hi);
        }
    }
}

TEST_CASE("experiment is deterministic and thread-count independent") {
    const auto pair = table1();
    const auto b = resolve_ml(pair, 1.0).boundary_set();
    ExperimentOptions a;
    a.n_obs = 500;
    a.n_trials = 7;
    a.base_seed = 42;
    a.threads = 1;
    auto c = a;
    c.threads = 3;
    const auto r1 = run_experiment(pair, b, scenario("s1"), a);
    const auto r2 = run_experiment(pair, b, scenario("s1"), c);
    CHECK(r1.per_trial_accuracy == r2.per_trial_accuracy);
    std::ostringstream o1, o2;
    r1.write_csv(o1);
    r2.write_csv(o2);
    CHECK(o1.str() == o2.str());
    CHECK(o1.str().find("trial,seed,accuracy\n0,42,") != std::string::npos);

    // Trial t depends only on base_seed + t.
    auto shifted = a;
    shifted.base_seed = 43;
    const auto r3 = run_experiment(pair, b, scenario("s1"), shifted);
    CHECK(r3.per_trial_accuracy[0] == r1.per_trial_accuracy[1]);

    a.n_trials = 0;
    CHECK_THROWS_AS(run_experiment(pair, b, scenario("s1"), a), InvalidParameter);
}
