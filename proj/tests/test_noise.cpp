#include <doctest.h>

#include <cmath>
#include <random>

#include "projstruct/errors.hpp"
#include "projstruct/noise.hpp"
#include "support.hpp"

using namespace projstruct;

TEST_CASE("A1 Gaussian recovers the closed form") {
    SmoothnessFamily f(3);
    // exp(alpha chi^2) has finite variance only for alpha < 1/4
    const auto light = check_a1(f, NoiseModel::gaussian(), 0.2, 100000, 7);
    REQUIRE(light.size() == 4);
    for (const auto& r : light) {
        INFO(to_string(r.structure));
        CHECK(r.pass);
        CHECK(r.closed_form == doctest::Approx(-0.5 * r.dim * std::log(0.6)));
        CHECK(std::abs(r.estimate - r.closed_form) <= 3 * r.se + 1e-12);
    }
    // At alpha = 0.4 the sample mean is heavy-tailed and biased low, so only
    // the one-sided comparison and the pass rule are meaningful.
    const auto heavy = check_a1(f, NoiseModel::gaussian(), 0.4, 100000, 7);
    for (const auto& r : heavy) {
        INFO(to_string(r.structure));
        CHECK(r.pass);
        CHECK(r.closed_form == doctest::Approx(-0.5 * r.dim * std::log(0.2)));
        CHECK(r.closed_form <= r.dim);
        CHECK(r.estimate <= r.closed_form + 3 * r.se);
        CHECK(r.estimate <= r.bound + 2 * r.se);
    }
    CHECK(heavy[0].estimate == 0);
    CHECK(heavy[0].se == 0);
}

TEST_CASE("A1 Bernoulli block model") {
    BiclusterFamily f(2, 3);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    Vec theta(6);
    for (int i = 0; i < 6; ++i) theta(i) = u(rng);
    const auto rows = check_a1(f, NoiseModel::bernoulli(theta), bernoulli_alpha(), 20000, 11);
    for (const auto& r : rows) {
        CHECK(r.pass);
        CHECK(std::isnan(r.closed_form));
        CHECK(r.saturated == 0);
    }
    CHECK(bernoulli_alpha() == doctest::Approx((std::exp(1.0) - 1) / (2 * (1 + std::exp(1.0)))));
}

TEST_CASE("A2 sums") {
    const auto sm = check_a2(SmoothnessFamily(30), 1.0);
    REQUIRE(sm.bound.has_value());
    CHECK(*sm.bound == doctest::Approx(1.5819767));
    CHECK(sm.sum <= *sm.bound);
    double ref = 0;
    for (int i = 0; i <= 30; ++i) ref += std::exp(-1.0 * i);
    CHECK(sm.sum == doctest::Approx(ref).epsilon(1e-14));
    CHECK(sm.pass);

    const auto sp = check_a2(SparsityFamily(8), 2.0);
    REQUIRE(sp.bound.has_value());
    CHECK(*sp.bound == doctest::Approx(1 / (1 - std::exp(-1.0))));
    CHECK(sp.pass);
    double ref2 = 0;
    for (int k = 0; k <= 8; ++k)
        ref2 += std::exp(log_binomial(8, k)) * std::exp(-2.0 * (k == 0 ? 0 : 2 * k * std::log(std::exp(1.0) * 8 / k)));
    CHECK(sp.sum == doctest::Approx(ref2).epsilon(1e-12));
    CHECK(sp.count == 256);

    const auto one = check_a2(SmoothnessFamily(1), 1.0);
    CHECK(one.sum == doctest::Approx(1 + std::exp(-1.0)));

    const auto bc = check_a2(BiclusterFamily(3, 3), 1.0);
    CHECK(bc.pass);
    CHECK(!a2_closed_form(ClusteringFamily(4, 2), 1.0).has_value());
    for (FamilyPtr f : {FamilyPtr(std::make_shared<JumpFamily>(12)), FamilyPtr(std::make_shared<KnotFamily>(12))})
        CHECK(check_a2(*f, 2.0).pass);
}

TEST_CASE("A3 reports") {
    for (const auto& r : check_a3(SmoothnessFamily(10), 50, 3, 1)) CHECK(r.pass);
    for (const auto& r : check_a3(SparsityFamily(8), 50, 3, 2)) CHECK(r.pass);
    CHECK_THROWS_AS(check_a3(ClusteringFamily(5, 2), 5, 2, 3), Unsupported);
}

TEST_CASE("A4 tail curves") {
    const auto rows = check_a4(NoiseModel::gaussian(), {0.0, 1.0, 4.0, 9.0}, 20000, 50, 5);
    CHECK(rows[0].psi1 == 1);
    CHECK(rows[0].psi2 == 1);
    for (const auto& r : rows) {
        if (r.M == 0) continue;
        // exact Gaussian tail P(|Z| >= sqrt M) = erfc(sqrt(M/2))
        const double exact = std::erfc(std::sqrt(r.M / 2));
        CHECK(std::abs(r.psi1 - exact) <= 3 * std::sqrt(exact * (1 - exact) / 20000) + 1e-12);
        CHECK(r.psi1 <= std::exp(-r.M / 4) + 3 * r.psi1_se);
    }
    for (const auto& noise : {NoiseModel::gaussian(), NoiseModel::rademacher(),
                              NoiseModel::bounded_uniform(std::sqrt(3.0)), NoiseModel::ar1(0.5)}) {
        const double c = noise.fourth_moment_constant();
        for (const auto& r : check_a4(noise, {2.0, 4.0, 8.0}, 5000, 100, 9)) {
            INFO(noise.name(), " M=", r.M);
            // Chebyshev: P(|S - N| >= M sqrt N) <= Var / (M^2 N) ~ c / M^2
            CHECK(r.psi2 <= c / (r.M * r.M) + 3 * r.psi2_se + 0.02);
        }
    }
    CHECK_THROWS_AS(check_a4(NoiseModel::bounded_uniform(1.0), {1.0}, 10, 5, 1), ContractError);
}

TEST_CASE("noise streams") {
    const int reps = 40000;
    for (const auto& noise : {NoiseModel::gaussian(), NoiseModel::rademacher(),
                              NoiseModel::bounded_uniform(2.0), NoiseModel::ar1(0.6)}) {
        Rng rng(21);
        double mean = 0;
        for (int r = 0; r < reps; ++r) mean += noise.sample(rng, 1)(0);
        CHECK(std::abs(mean / reps) <= 4 / std::sqrt(reps));
    }
    Vec theta = Vec::Constant(1, 0.3);
    Rng rb(4);
    double mb = 0;
    for (int r = 0; r < reps; ++r) mb += NoiseModel::bernoulli(theta).sample(rb, 1)(0);
    CHECK(std::abs(mb / reps) <= 4 / std::sqrt(reps));

    Rng ra(5);
    const Vec x = NoiseModel::ar1(0.6).sample(ra, 200000);
    const double lag1 = x.head(x.size() - 1).dot(x.tail(x.size() - 1)) / (x.size() - 1);
    const double var = x.squaredNorm() / x.size();
    // lag-1 sample autocorrelation s.e. ~ sqrt((1 - phi^2) / n)
    CHECK(std::abs(lag1 / var - 0.6) <= 3 * std::sqrt((1 - 0.36) / x.size()));

    Rng s1(99), s2(99);
    CHECK(NoiseModel::ar1(0.3).sample(s1, 50) == NoiseModel::ar1(0.3).sample(s2, 50));
    CHECK_THROWS_AS(NoiseModel::ar1(1.0), ContractError);
    CHECK_THROWS_AS(NoiseModel::bernoulli(Vec::Constant(2, 1.5)), ContractError);
}

TEST_CASE("noise from JSON") {
    CHECK(NoiseModel::from_json({{"kind", "ar1"}, {"phi", 0.2}}).param == 0.2);
    CHECK(NoiseModel::from_json({{"kind", "uniform"}, {"half_width", 1.0}}).kind == NoiseKind::BoundedUniform);
    CHECK_THROWS_AS(NoiseModel::from_json({{"kind", "cauchy"}}), ConfigError);
    CHECK_THROWS_AS(NoiseModel::from_json({{"kind", "ar1"}}), ConfigError);
}
