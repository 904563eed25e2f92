#include <doctest.h>

#include <cmath>
#include <random>

#include "projstruct/errors.hpp"
#include "projstruct/oracle.hpp"
#include "support.hpp"

using namespace projstruct;

namespace {

double r2(const Family& f, const Structure& s, const Vec& theta, double sigma) {
    return (theta - testsupport::oracle_project(f, s, theta)).squaredNorm() + sigma * sigma * f.majorant(s);
}

}  // namespace

TEST_CASE("constants from the proof formulas") {
    const auto c = FrameworkConstants::from_theory(0.4, 1.5, 40.0, 0.1, true);
    CHECK(c.kappa_bar == doctest::Approx((32 * 1.5 + 10 + 0.4) / 1.6));
    CHECK(c.tau_bar == doctest::Approx(3 * (1 + 40 * 0.4) / 0.4));
    CHECK(c.tau0 == doctest::Approx(11.0 / 9 * c.tau_bar + 0.1));
    CHECK(c.c1 == doctest::Approx(40 * 0.4 / 4 - 0.625 - 0.025));
    CHECK(c.c2 == doctest::Approx(0.025));
    CHECK(c.c3 == doctest::Approx(15 + 160));
    CHECK(c.M0 == doctest::Approx(c.c3 * (3 + 0.8 + 4) / 0.4));
    CHECK(c.M1 == doctest::Approx(12 * c.c3 * 2.5 / 0.4));
    CHECK(c.M2 == doctest::Approx(c.M1 / 0.1));
    CHECK(c.M3 == c.c3);
    CHECK(c.validate().empty());
    CHECK(c.tau0 > 11.0 / 9 * c.tau_bar);
}

TEST_CASE("strict and practical modes") {
    CHECK_THROWS_AS(FrameworkConstants::from_theory(0.4, 1.5, 1.0, 0.1, true), ContractError);
    const auto p = FrameworkConstants::from_theory(0.4, 1.5, 1.0, 0.1, false);
    CHECK(!p.validate().empty());
    CHECK_THROWS_AS(FrameworkConstants::from_theory(0.0, 1.5, 1.0), ContractError);
    CHECK_THROWS_AS(FrameworkConstants::from_theory(1.5, 1.5, 1.0), ContractError);
}

TEST_CASE("tau0_default") {
    FrameworkConstants c;
    c.alpha = 1.0;
    c.kappa = 0.0;  // tau_bar = 3
    CHECK(tau_bar(c.kappa, c.alpha) == doctest::Approx(3));
    CHECK(tau0_default(c, 0.1) == doctest::Approx(11.0 / 9 * 3 + 0.1));
    CHECK(tau0_default(c, 1e-9) == doctest::Approx(3.1));
    double prev = 0;
    for (double d : {0.05, 0.1, 0.3, 0.6, 0.9}) {
        CHECK(tau0_default(c, d) > prev);
        prev = tau0_default(c, d);
    }
    CHECK_THROWS_AS(tau0_default(c, 1.0), ContractError);
}

TEST_CASE("constants JSON overrides") {
    const auto c = constants_from_json({{"alpha", 0.4}, {"kappa", 2.0}, {"M2", 7.5}});
    CHECK(c.M2 == 7.5);
    CHECK(c.kappa == 2.0);
    const auto back = constants_from_json(to_json(c));
    CHECK(back.M2 == 7.5);
    CHECK(back.tau0 == doctest::Approx(c.tau0));
}

TEST_CASE("oracle on exactly structured signals") {
    SparsityFamily f(10);
    Vec th = Vec::Zero(10);
    th(2) = 50;
    th(7) = -40;
    const auto r = oracle_rate(th, f, 1.0, 1.0);
    CHECK(r.structure == Structure{SparseSet{{2, 7}}});
    CHECK(r.approx_sq == 0);
    CHECK(r.rate_sq == doctest::Approx(f.majorant(SparseSet{{2, 7}})));
    CHECK(r.rate_sq == doctest::Approx(r.approx_sq + r.complexity));
    const auto j = to_json(r);
    CHECK(j.contains("structure"));
    CHECK(j["rate_sq"].get<double>() == r.rate_sq);
}

TEST_CASE("oracle rate never exceeds the full-structure rate") {
    std::mt19937_64 rng(1);
    for (const auto& f : testsupport::small_families(rng)) {
        const auto full = f->full_structure();
        if (!full) continue;
        for (int trial = 0; trial < 20; ++trial) {
            const Vec th = testsupport::random_vec(rng, f->ambient_dim(), 5.0);
            const auto r = oracle_rate(th, *f, 0.8, 1.0);
            CHECK(r.rate_sq <= 0.64 * f->majorant(*full) + 1e-9);
        }
    }
    // rho(full) = N for smoothness, so r^2 <= N sigma^2
    SmoothnessFamily sm(12);
    for (int trial = 0; trial < 20; ++trial)
        CHECK(oracle_rate(testsupport::random_vec(rng, 12, 9.0), sm, 1.0).rate_sq <= 12 + 1e-9);
}

TEST_CASE("smoothness oracle matches a scan") {
    SmoothnessFamily f(12);
    Vec th(12);
    for (int i = 0; i < 12; ++i) th(i) = std::pow(0.5, i);
    const auto r = oracle_rate(th, f, 0.5, 1.0);
    double best = 1e300;
    int arg = -1;
    for (int level = 0; level <= 12; ++level) {
        const double v = th.tail(12 - level).squaredNorm() + 0.25 * level;
        if (v < best - 1e-15) best = v, arg = level;
    }
    CHECK(r.structure == Structure{Truncation{arg}});
    CHECK(r.rate_sq == doctest::Approx(best));
}

TEST_CASE("oracle optimality and tau sandwich") {
    std::mt19937_64 rng(2);
    for (const auto& f : testsupport::small_families(rng)) {
        const auto all = enumerate(*f);
        for (int trial = 0; trial < 30; ++trial) {
            const double sigma = 0.5 + 0.25 * (trial % 4);
            const Structure s = testsupport::random_structure(*f, rng);
            const Vec th = f->project(s, testsupport::random_vec(rng, f->ambient_dim(), 3.0)) +
                           testsupport::random_vec(rng, f->ambient_dim(), 0.5);
            const auto r1 = oracle_rate(th, *f, sigma, 1.0);
            for (const auto& i : all) CHECK(r2(*f, i, th, sigma) >= r1.rate_sq - 1e-12 * (1 + r1.rate_sq));
            double prev_rho = 1e300;
            for (double tau : {1.0, 2.0, 5.0}) {
                const auto rt = oracle_rate(th, *f, sigma, tau);
                const double at = r2(*f, rt.structure, th, sigma);
                CHECK(r1.rate_sq <= at + 1e-12 * (1 + at));
                CHECK(at <= tau * r1.rate_sq + 1e-12 * (1 + at));
                const double rho = f->majorant(rt.structure);
                CHECK(rho <= prev_rho);
                prev_rho = rho;
            }
        }
    }
}

TEST_CASE("excessive bias ratio") {
    const auto c = FrameworkConstants::from_theory(0.4, 1.5, 1.0);
    SparsityFamily f(50);
    Vec structured = Vec::Zero(50);
    structured.head(3).setConstant(100.0);
    CHECK(ebr_ratio(structured, f, 1.0, c) == 0);
    CHECK(ebr_member(structured, f, 1.0, c, 0.0));

    const Vec deceptive = Vec::Constant(50, 0.5);
    const double b = ebr_ratio(deceptive, f, 1.0, c);
    // the tau0-oracle drops everything: b = ||theta||^2 / sigma^2
    CHECK(b == doctest::Approx(12.5));
    CHECK(b > 1);
    CHECK(!ebr_member(deceptive, f, 1.0, c, 0.0));
    CHECK(ebr_member(deceptive, f, 1.0, c, 13.0));

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec th = testsupport::random_vec(rng, 50, 3.0);
        const double b1 = ebr_ratio(th, f, 1.0, c);
        CHECK(ebr_ratio(2.5 * th, f, 2.5, c) == doctest::Approx(b1));
        for (double t1 : {0.0, 0.5, 2.0})
            if (ebr_member(th, f, 1.0, c, t1)) CHECK(ebr_member(th, f, 1.0, c, t1 + 1.0));
    }
}
