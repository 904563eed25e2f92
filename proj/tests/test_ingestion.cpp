#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "projstruct/errors.hpp"
#include "projstruct/ingestion.hpp"

using namespace projstruct;

TEST_CASE("trigonometric basis") {
    CHECK(trig_basis(1, 0.3) == 1);
    CHECK(trig_basis(2, 0.25) == doctest::Approx(0).scale(1));
    CHECK(trig_basis(3, 0.25) == doctest::Approx(std::sqrt(2.0)));
    CHECK(trig_basis(4, 0.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(trig_basis(0, 0.1), ContractError);
}

TEST_CASE("density to sequence") {
    const auto one = density_to_sequence({0.3}, 6, 1.0);
    for (int i = 0; i < 6; ++i) CHECK(one.y(i) == doctest::Approx(trig_basis(i + 1, 0.3)));

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = u(rng);
    const auto seq = density_to_sequence(xs, 9, 2.0);
    CHECK(seq.y(0) == doctest::Approx(1));
    // each phi_i with i >= 2 has unit variance under U(0,1)
    for (int i = 1; i < 9; ++i) CHECK(std::abs(seq.y(i)) <= 3 / std::sqrt(n));
    for (int i = 0; i < 9; ++i) CHECK(std::abs(seq.y(i)) <= std::sqrt(2.0));
    CHECK(seq.sigma == doctest::Approx(std::sqrt(2.0 * std::log(n) / n)));

    std::vector<double> hundred(100, 0.5);
    CHECK(density_to_sequence(hundred, 1, 1.0).sigma == doctest::Approx(std::sqrt(std::log(100.0) / 100)));
    CHECK_THROWS_AS(density_to_sequence({1.5}, 3, 1.0), ContractError);
    CHECK_THROWS_AS(density_to_sequence({}, 3, 1.0), ContractError);
}

TEST_CASE("covariance ingestion") {
    const Mat one = covariance_to_matrix({{1, 2, 3}});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(one(i, j) == (i + 1) * (j + 1));

    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    const int n = 10000;
    std::vector<std::vector<double>> rows(n, std::vector<double>(3));
    for (auto& r : rows)
        for (auto& v : r) v = z(rng);
    const Mat s = covariance_to_matrix(rows);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(s(i, j) == s(j, i));
            // Var(x_i x_j) = 1 off the diagonal, 2 on it
            const double se = std::sqrt((i == j ? 2.0 : 1.0) / n);
            CHECK(std::abs(s(i, j) - (i == j ? 1.0 : 0.0)) <= 3 * se);
        }
    const Eigen::MatrixXd dense = s;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK_THROWS_AS(covariance_to_matrix({{1, 2}, {3}}), ContractError);
}

TEST_CASE("Laplacian eigen order") {
    Mat path(3, 3);
    path << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    const auto le = laplacian_eigen_order(path);
    // det(L - x I) = -x (x - 1)(x - 3)
    CHECK(le.eigenvalues(0) == doctest::Approx(0).scale(1));
    CHECK(le.eigenvalues(1) == doctest::Approx(1));
    CHECK(le.eigenvalues(2) == doctest::Approx(3));
    const Vec c = le.basis.col(0);
    CHECK((c.array() - c(0)).abs().maxCoeff() < 1e-12);
    CHECK(c(0) > 0);
    CHECK((le.basis.transpose() * le.basis - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);

    const int n = 5;
    Mat k = Mat::Ones(n, n) - Mat::Identity(n, n);
    const auto lk = laplacian_eigen_order(k);
    CHECK(lk.eigenvalues(0) == doctest::Approx(0).scale(1));
    for (int i = 1; i < n; ++i) CHECK(lk.eigenvalues(i) == doctest::Approx(n));
    for (int j = 0; j < n; ++j) {
        const auto col = lk.basis.col(j);
        int first = 0;
        while (std::abs(col(first)) < 1e-12) ++first;
        CHECK(col(first) > 0);
    }
    Vec f = Vec::Ones(n);
    const Vec coords = to_eigen_coordinates(lk, f);
    CHECK(coords(0) == doctest::Approx(std::sqrt(n)));
    CHECK(coords.tail(n - 1).norm() < 1e-10);

    Mat bad = path;
    bad(0, 1) = 0;
    CHECK_THROWS_AS(laplacian_eigen_order(bad), ContractError);
    Mat loop = path;
    loop(1, 1) = 1;
    CHECK_THROWS_AS(laplacian_eigen_order(loop), ContractError);
}

TEST_CASE("CSV readers") {
    const std::string p = "ingestion_test_samples.csv";
    {
        std::ofstream out(p);
        out << "# samples\n0.1\n\n0.5\n0.75\n";
    }
    CHECK(read_samples_csv(p) == std::vector<double>{0.1, 0.5, 0.75});
    {
        std::ofstream out(p);
        out << "1,2\n3,4\n";
    }
    CHECK(read_matrix_csv(p) == std::vector<std::vector<double>>{{1, 2}, {3, 4}});
    {
        std::ofstream out(p);
        out << "1,x\n";
    }
    CHECK_THROWS_AS(read_matrix_csv(p), ConfigError);
    std::remove(p.c_str());
    CHECK_THROWS_AS(read_samples_csv("does/not/exist.csv"), ConfigError);
}
