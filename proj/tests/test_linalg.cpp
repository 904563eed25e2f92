#include <doctest.h>

#include <random>

#include "projstruct/errors.hpp"
#include "projstruct/linalg.hpp"
#include "support.hpp"

using namespace projstruct;

namespace {

Mat cols(std::initializer_list<std::initializer_list<double>> columns, int n) {
    Mat m(n, static_cast<int>(columns.size()));
    int j = 0;
    for (const auto& c : columns) {
        int i = 0;
        for (double v : c) m(i++, j) = v;
        ++j;
    }
    return m;
}

// Ridge-regularized normal equations with a shrinking regularizer; the limit
// is the pseudo-inverse projection.
Vec ridge_sweep_projection(const Mat& b, const Vec& y) {
    Vec last;
    for (double lam = 1e-2; lam >= 1e-12; lam /= 10) {
        Eigen::MatrixXd g = b.transpose() * b;
        g.diagonal().array() += lam;
        last = b * g.ldlt().solve(b.transpose() * y);
    }
    return last;
}

}  // namespace

TEST_CASE("least_squares_project examples") {
    Vec y(3);
    y << 3, -1, 2;
    Vec p = least_squares_project(cols({{1, 0, 0}, {0, 0, 1}}, 3), y);
    CHECK(p(0) == doctest::Approx(3));
    CHECK(p(1) == doctest::Approx(0).epsilon(1e-12));
    CHECK(p(2) == doctest::Approx(2));

    Vec y2(2);
    y2 << 0, 2;
    Vec q = least_squares_project(cols({{1, 1}}, 2), y2);
    CHECK(q(0) == doctest::Approx(1));
    CHECK(q(1) == doctest::Approx(1));

    Vec y3(2);
    y3 << 5, 7;
    const Mat deficient = cols({{1, 0}, {2, 0}}, 2);
    Vec r = least_squares_project(deficient, y3);
    Vec ref = ridge_sweep_projection(deficient, y3);
    CHECK(r(0) == doctest::Approx(5));
    CHECK(std::abs(r(1)) < 1e-12);
    CHECK((r - ref).norm() < 1e-6);
}

TEST_CASE("least_squares_project rejects bad input") {
    Vec y(3);
    y << 1, 2, 3;
    CHECK_THROWS_AS(least_squares_project(Mat::Ones(2, 1), y), ContractError);
    CHECK_THROWS_AS(least_squares_project(Mat::Ones(3, 4), y), ContractError);
}

TEST_CASE("sq_norm") {
    Vec y(2);
    y << 3, 4;
    CHECK(sq_norm(y) == 25);
    CHECK(sq_norm(Vec::Zero(5)) == 0);
    CHECK_THROWS_AS(sq_norm(Vec()), ContractError);
}

TEST_CASE("projection invariants on random spans") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> dn(2, 12);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = dn(rng);
        const int k = std::uniform_int_distribution<int>(1, n)(rng);
        Mat b(n, k);
        for (int j = 0; j < k; ++j) b.col(j) = testsupport::random_vec(rng, n);
        if (k >= 2 && trial % 3 == 0) b.col(k - 1) = 0.5 * b.col(0) - b.col(1);
        const Vec y = testsupport::random_vec(rng, n, 3.0);
        const Vec p = least_squares_project(b, y);
        const Vec pp = least_squares_project(b, p);
        CHECK((pp - p).cwiseAbs().maxCoeff() <= 1e-9 * (1 + y.norm()));
        CHECK(std::abs(y.squaredNorm() - p.squaredNorm() - (y - p).squaredNorm()) <=
              1e-9 * y.squaredNorm());
        for (int j = 0; j < k; ++j)
            CHECK(std::abs(b.col(j).dot(y - p)) <= 1e-8 * b.col(j).norm() * y.norm());
        CHECK((p - testsupport::span_projection(b, y)).norm() <= 1e-8 * (1 + y.norm()));
        CHECK(column_rank(b) == static_cast<int>(orthonormal_span(b).cols()));
    }
}

TEST_CASE("vectorize round trip") {
    Mat m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    const Vec v = vectorize(m);
    CHECK(v(1) == 2);
    CHECK(v(3) == 4);
    CHECK(unvectorize(v, 2, 3) == m);
}
