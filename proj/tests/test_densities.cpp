#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "acsens/densities.hpp"
#include "oracles.hpp"

using namespace acsens;

TEST_CASE("pdf at known points") {
    CHECK(DensityModel::gaussian(0, 9).pdf(0) == doctest::Approx(0.044326).epsilon(1e-5));
    CHECK(DensityModel::exponential(2).pdf(0) == doctest::Approx(2.0));
    CHECK(DensityModel::exponential(2).pdf(-1) == 0.0);

    // 50-digit evaluation of the closed form: 0.0407750045321617313...
    const double ref = 0.040775004532161731327;
    CHECK(std::abs(oracle::normal_pdf_50(3.65, 9, 4) - ref) < 1e-18);
    CHECK(std::abs(DensityModel::gaussian(9, 4).pdf(3.65) - ref) < 1e-16);
}

TEST_CASE("cdf at known points") {
    CHECK(DensityModel::gaussian(0, 1).cdf(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(DensityModel::exponential(1).cdf(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(DensityModel::gaussian(3, 2).cdf(kInf) == 1.0);
    CHECK(DensityModel::gaussian(3, 2).cdf(-kInf) == 0.0);

    // Quadrature of the pdf from -inf: 0.657465404737895...
    const auto g = DensityModel::gaussian(0, 9);
    const double quad = oracle::integrate([&](double x) { return g.pdf(x); }, -kInf, 3.65);
    CHECK(std::abs(quad - 0.65746540473789510) < 1e-12);
    CHECK(std::abs(g.cdf(3.65) - 0.65746540473789510) < 1e-12);
}

TEST_CASE("standard normal cdf accuracy against 50-digit reference") {
    // Phi(1) = 0.841344746068542948585...
    CHECK(std::abs(standard_normal_cdf(1.0) - 0.84134474606854294859) < 1e-15);
    for (double z = -8.0; z <= 8.0; z += 0.37) {
        const double quad = oracle::integrate([](double t) { return standard_normal_pdf(t); }, -kInf, z);
        CHECK(std::abs(standard_normal_cdf(z) - quad) < 1e-12);
    }
}

TEST_CASE("pdf integrates to one") {
    for (const auto& m : {DensityModel::gaussian(0, 9), DensityModel::gaussian(-3, 0.2), DensityModel::exponential(0.5),
                          DensityModel::exponential(7)}) {
        const double lo = m.support().lo, hi = m.support().hi;
        CHECK(std::abs(oracle::integrate([&](double x) { return m.pdf(x); }, lo, hi) - 1.0) < 1e-9);
    }
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(DensityModel::gaussian(0, 0), InvalidParameter);
    CHECK_THROWS_AS(DensityModel::gaussian(0, -1), InvalidParameter);
    CHECK_THROWS_AS(DensityModel::exponential(0), InvalidParameter);
    CHECK_THROWS_AS(DensityModel::gaussian(NAN, 1), InvalidParameter);
    CHECK_THROWS_AS(HypothesisPair(DensityModel::gaussian(0, 1), DensityModel::gaussian(1, 1), 1.5),
                    InvalidParameter);
}

TEST_CASE("parameter gradients at known points") {
    CHECK(DensityModel::gaussian(0, 1).grad_pdf_params(0)[0] == 0.0);
    CHECK(DensityModel::exponential(1).grad_pdf_params(0)[0] == doctest::Approx(1.0));
    CHECK(DensityModel::gaussian(0, 1).grad_cdf_params(0)[0] ==
          doctest::Approx(-1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
    CHECK(DensityModel::exponential(1).grad_cdf_params(kInf)[0] == 0.0);
    CHECK(DensityModel::exponential(1).grad_cdf_params(800.0)[0] == doctest::Approx(0.0));

    const auto g = DensityModel::gaussian(0, 9);
    const double fd_sigma = oracle::central_difference(
        [](double s) { return DensityModel::gaussian(0, s).pdf(3.65); }, 9.0, 1e-6);
    CHECK(std::abs(g.grad_pdf_params(3.65)[1] - fd_sigma) < 1e-8);

    const auto g2 = DensityModel::gaussian(9, 4);
    const auto fd = oracle::fd_gradient(
        [](const std::vector<double>& t) { return DensityModel::gaussian(t[0], t[1]).cdf(18.78); }, {9.0, 4.0}, 1e-6);
    const auto an = g2.grad_cdf_params(18.78);
    CHECK(std::abs(an[0] - fd[0]) < 1e-8);
    CHECK(std::abs(an[1] - fd[1]) < 1e-8);
}

TEST_CASE("property: d cdf/dx equals pdf and parameter gradients match finite differences") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const bool gauss = trial % 2 == 0;
        const auto m = gauss ? DensityModel::gaussian(-5 + 10 * rng.uniform(), 0.5 + 5 * rng.uniform())
                             : DensityModel::exponential(0.2 + 3 * rng.uniform());
        const double x = gauss ? m.location() + m.scale() * (-3 + 6 * rng.uniform())
                               : 0.05 + 3 * m.scale() * rng.uniform();
        const double dcdf = oracle::central_difference([&](double t) { return m.cdf(t); }, x, 1e-5);
        CHECK(std::abs(dcdf - m.pdf(x)) <= 1e-6 * m.pdf(x));
        const double dpdf = oracle::central_difference([&](double t) { return m.pdf(t); }, x, 1e-5);
        CHECK(std::abs(dpdf - m.pdf_dx(x)) < 1e-7);

        auto make = [&](const std::vector<double>& p) { return m.with_params(p); };
        const auto fdp = oracle::fd_gradient([&](const std::vector<double>& p) { return make(p).pdf(x); },
                                             m.params(), 1e-6);
        const auto fdc = oracle::fd_gradient([&](const std::vector<double>& p) { return make(p).cdf(x); },
                                             m.params(), 1e-6);
        const auto gp = m.grad_pdf_params(x);
        const auto gc = m.grad_cdf_params(x);
        for (std::size_t i = 0; i < gp.size(); ++i) {
            CHECK(std::abs(gp[i] - fdp[i]) < 1e-7);
            CHECK(std::abs(gc[i] - fdc[i]) < 1e-7);
        }
    }
}

TEST_CASE("sampling moments and determinism") {
    {
        Rng rng(123);
        const auto xs = DensityModel::exponential(1).sample(rng, 1000000);
        const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        CHECK(mean >= 0.997);
        CHECK(mean <= 1.003);
    }
    {
        Rng rng(456);
        const auto xs = DensityModel::gaussian(0, 9).sample(rng, 1000000);
        const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        double ss = 0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / (xs.size() - 1));
        CHECK(sd >= 8.97);
        CHECK(sd <= 9.03);
    }
    Rng a(99), b(99);
    const auto m = DensityModel::gaussian(2, 3);
    CHECK_THROWS_AS(m.sample(a, 0), InvalidParameter);
    CHECK(m.sample(a, 1)[0] == m.sample(b, 1)[0]);
}

TEST_CASE("sampler stream is pinned") {
    // Any change to the generator or the transforms breaks reproducibility
    // of seeded runs and shows up here.
    Rng rng(42);
    CHECK(rng.uniform() == 0.75515553295453897);
    CHECK(rng.standard_normal() == 0.71740812424289713);
    CHECK(rng.standard_normal() == 1.3010803566749882);
    Rng e(42);
    CHECK(DensityModel::exponential(1).sample_one(e) == 1.4071320984121438);
}

TEST_CASE("property: Kolmogorov-Smirnov statistic of 1e5 draws below 0.01") {
    for (const auto& m : {DensityModel::gaussian(1, 2), DensityModel::exponential(3)}) {
        Rng rng(2024);
        auto xs = m.sample(rng, 100000);
        std::sort(xs.begin(), xs.end());
        double d = 0.0;
        const double n = static_cast<double>(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double F = m.cdf(xs[i]);
            d = std::max({d, std::abs(F - i / n), std::abs((i + 1) / n - F)});
        }
        CHECK(d < 0.01);
    }
}

TEST_CASE("custom family with finite-difference gradients") {
    // Laplace(mu, b) registered as a custom family.
    auto fam = std::make_shared<CustomFamily>();
    fam->name = "laplace";
    fam->param_names = {"mu", "b"};
    fam->pdf = [](double x, std::span<const double> p) { return std::exp(-std::abs(x - p[0]) / p[1]) / (2 * p[1]); };
    fam->cdf = [](double x, std::span<const double> p) {
        const double z = (x - p[0]) / p[1];
        return z < 0 ? 0.5 * std::exp(z) : 1 - 0.5 * std::exp(-z);
    };
    fam->sampler = [](Rng& r, std::span<const double> p) {
        const double u = r.uniform() - 0.5;
        return p[0] - p[1] * std::copysign(1.0, u) * std::log(1 - 2 * std::abs(u));
    };
    fam->location = [](std::span<const double> p) { return p[0]; };
    fam->scale = [](std::span<const double> p) { return p[1] * std::sqrt(2.0); };
    register_family(fam);

    const auto m = DensityModel::custom(fam, {1.0, 2.0});
    const auto g = m.grad_cdf_params(0.3);
    // dF/dmu = -f(x) for a location family.
    CHECK(g[0] == doctest::Approx(-m.pdf(0.3)).epsilon(1e-6));

    const auto parsed = DensityModel::from_json(m.to_json());
    CHECK(parsed == m);

    auto nograd = std::make_shared<CustomFamily>(*fam);
    nograd->name = "laplace_nograd";
    nograd->finite_difference_gradients = false;
    const auto m2 = DensityModel::custom(nograd, {1.0, 2.0});
    CHECK_FALSE(m2.has_gradients());
    CHECK_THROWS_AS(m2.grad_pdf_params(0.0), CapabilityMissing);
}

TEST_CASE("json round trip and strict parsing") {
    const HypothesisPair pair(DensityModel::gaussian(0, 9), DensityModel::gaussian(9, 4), 0.5);
    const auto back = HypothesisPair::from_json(pair.to_json());
    CHECK(back.h0() == pair.h0());
    CHECK(back.h1() == pair.h1());
    CHECK(back.p1() == 0.5);

    auto j = pair.to_json();
    j["h1"]["params"]["sgima"] = 3;
    try {
        HypothesisPair::from_json(j);
        FAIL("expected parse failure");
    } catch (const InvalidParameter& e) {
        CHECK(std::string(e.what()).find("sgima") != std::string::npos);
    }
    auto j2 = pair.to_json();
    j2["prior"] = 1;
    CHECK_THROWS_AS(HypothesisPair::from_json(j2), InvalidParameter);
}
