#include <doctest.h>

#include <cmath>
#include <random>

#include "projstruct/errors.hpp"
#include "projstruct/selection.hpp"
#include "support.hpp"

using namespace projstruct;

namespace {

// Objective evaluated from the definition, independent of the selector code.
double direct_objective(const Family& f, const Structure& s, const Vec& y, double sigma, double kappa) {
    const Vec r = y - testsupport::oracle_project(f, s, y);
    return r.squaredNorm() + sigma * sigma * 2 * kappa * f.majorant(s);
}

Vec signal_plus_noise(const Family& f, std::mt19937_64& rng, double scale) {
    const Structure s = testsupport::random_structure(f, rng);
    const Vec th = f.project(s, testsupport::random_vec(rng, f.ambient_dim(), scale));
    return th + testsupport::random_vec(rng, f.ambient_dim());
}

}  // namespace

TEST_CASE("smoothness selection example") {
    SmoothnessFamily f(3);
    Vec y(3);
    y << 10, 0.1, 0.1;
    const auto sel = select_penalized(y, f, {1.0, 1.0, false});
    CHECK(sel.structure == Structure{Truncation{1}});
    double best = 1e300;
    int arg = -1;
    for (int level = 0; level <= 3; ++level) {
        double tail = 0;
        for (int i = level; i < 3; ++i) tail += y(i) * y(i);
        const double obj = tail + 2.0 * level;
        if (obj < best) best = obj, arg = level;
    }
    CHECK(arg == 1);
    CHECK(sel.objective == doctest::Approx(best));
}

TEST_CASE("sparsity selection keeps the largest coordinates") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4 + trial % 9;
        SparsityFamily f(n);
        const Vec y = testsupport::random_vec(rng, n, 3.0);
        const auto sel = select_penalized(y, f, {1.0, 0.5, false});
        const auto& idx = std::get<SparseSet>(sel.structure).indices;
        double min_in = 1e300, max_out = 0;
        for (int i = 0; i < n; ++i) {
            const bool in = std::binary_search(idx.begin(), idx.end(), i);
            if (in) min_in = std::min(min_in, std::abs(y(i)));
            else max_out = std::max(max_out, std::abs(y(i)));
        }
        if (!idx.empty()) CHECK(min_in >= max_out);
        const auto bf = select_bruteforce(y, f, {1.0, 0.5, false});
        CHECK(bf.structure == sel.structure);
    }
}

TEST_CASE("bicluster recovers an exact block pattern at tiny noise") {
    BiclusterFamily f(3, 3);
    const Structure truth = Bicluster{{0, 0, 1}, {0, 1, 1}};
    Vec y(9);
    const double block[2][2] = {{1.0, -2.0}, {3.0, 0.5}};
    const auto& b = std::get<Bicluster>(truth);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) y(i * 3 + j) = block[b.rows[i]][b.cols[j]];
    // In 3x3 the elbow majorant makes the all-rows partition cheaper than two
    // row blocks, so the selected subspace contains the truth at no larger rho.
    for (auto mode : {SelectMode::Exact, SelectMode::Heuristic}) {
        const auto sel = select_penalized(y, f, {1e-4, 1.0, false}, mode);
        CHECK(f.residual_sq(sel.structure, y) < 1e-20);
        CHECK(f.majorant(sel.structure) <= f.majorant(truth));
    }
    BiclusterFamily g(6, 6);
    Vec z(36);
    const Structure t6 = Bicluster{{0, 0, 0, 1, 1, 1}, {0, 0, 1, 1, 1, 1}};
    const auto& b6 = std::get<Bicluster>(t6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) z(i * 6 + j) = block[b6.rows[i]][b6.cols[j]];
    CHECK(select_penalized(z, g, {1e-4, 1.0, false}, SelectMode::Heuristic).structure == t6);
}

TEST_CASE("bruteforce edge cases") {
    SmoothnessFamily one(1);
    Vec y(1);
    y << 0.0;
    CHECK(select_bruteforce(y, one, {}).structure == Structure{Truncation{0}});
    // all-zero data: the minimal-rho structure wins
    std::mt19937_64 rng(3);
    for (const auto& f : testsupport::small_families(rng)) {
        const auto sel = select_bruteforce(Vec::Zero(f->ambient_dim()), *f, {1.0, 1.0, false});
        CHECK(f->majorant(sel.structure) == doctest::Approx(f->majorant(f->empty_structure())));
    }
    EnumerationCaps caps;
    caps.max_count = 10;
    CHECK_THROWS_AS(select_bruteforce(Vec::Zero(8), SparsityFamily(8), {}, caps), CapExceeded);
}

TEST_CASE("exact selectors match brute force") {
    std::mt19937_64 rng(5);
    for (const auto& f : testsupport::small_families(rng)) {
        for (int trial = 0; trial < 40; ++trial) {
            const double sigma = 0.3 + (trial % 5) * 0.4;
            const double kappa = 0.25 + (trial % 3) * 0.5;
            const Vec y = signal_plus_noise(*f, rng, 3.0);
            const Penalty pen{sigma, kappa, trial % 4 == 0};
            const auto ex = select_penalized(y, *f, pen);
            const auto bf = select_bruteforce(y, *f, pen);
            INFO(to_string(f->kind()), " trial ", trial);
            CHECK(ex.exact);
            CHECK(std::abs(ex.objective - bf.objective) <= 1e-9 * (1 + std::abs(bf.objective)));
            CHECK(ex.structure == bf.structure);
            if (!pen.add_dim)
                CHECK(bf.objective == doctest::Approx(direct_objective(*f, bf.structure, y, sigma, kappa))
                                          .epsilon(1e-9));
        }
    }
}

TEST_CASE("heuristics never beat the optimum") {
    std::mt19937_64 rng(7);
    for (const auto& f : testsupport::small_families(rng)) {
        for (int trial = 0; trial < 20; ++trial) {
            const Vec y = signal_plus_noise(*f, rng, 2.0);
            const Penalty pen{1.0, 0.5, false};
            const auto h = select_penalized(y, *f, pen, SelectMode::Heuristic);
            const auto bf = select_bruteforce(y, *f, pen);
            CHECK(h.objective >= bf.objective - 1e-9 * (1 + std::abs(bf.objective)));
            CHECK(h.objective ==
                  doctest::Approx(penalized_objective(*f, h.structure, y, pen)).epsilon(1e-12));
        }
    }
}

TEST_CASE("bicluster local search is monotone") {
    std::mt19937_64 rng(11);
    BiclusterFamily f(8, 7);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec y = signal_plus_noise(f, rng, 2.0);
        SelectOptions opts;
        opts.seed = trial;
        const auto sel = select_penalized(y, f, {1.0, 0.5, false}, SelectMode::Heuristic, opts);
        CHECK(!sel.exact);
        REQUIRE(!sel.trace.empty());
        for (std::size_t i = 1; i < sel.trace.size(); ++i) CHECK(sel.trace[i] <= sel.trace[i - 1] + 1e-12);
        CHECK(sel.trace.back() == doctest::Approx(sel.objective));
    }
}

TEST_CASE("increasing kappa never grows the sparse selection") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        SparsityFamily f(20);
        const Vec y = testsupport::random_vec(rng, 20, 2.5);
        std::size_t prev = 21;
        for (double kappa : {0.05, 0.1, 0.3, 0.5, 1.0, 2.0, 5.0}) {
            const auto sel = select_penalized(y, f, {1.0, kappa, false});
            const auto k = std::get<SparseSet>(sel.structure).indices.size();
            CHECK(k <= prev);
            prev = k;
        }
    }
}

TEST_CASE("exact mode unavailable") {
    std::mt19937_64 rng(17);
    Mat x(30, 25);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = std::normal_distribution<double>()(rng);
    RegressionFamily big(x);
    CHECK_THROWS_AS(select_penalized(Vec::Zero(30), big, {}), CapExceeded);
    CHECK_NOTHROW(select_penalized(Vec::Zero(30), big, {}, SelectMode::Heuristic));
    CHECK_THROWS_AS(select_penalized(Vec::Zero(20), ClusteringFamily(20, 3), {}), CapExceeded);
    CHECK_NOTHROW(select_penalized(Vec::Zero(20), ClusteringFamily(20, 3), {}, SelectMode::Heuristic));
}

TEST_CASE("segment_dp examples") {
    Vec c = Vec::Constant(6, 2.5);
    const auto tc = segment_dp(c, 5);
    for (double v : tc.sse) CHECK(v == doctest::Approx(0).epsilon(1e-12));

    Vec step(4);
    step << 0, 0, 5, 5;
    const auto ts = segment_dp(step, 3);
    CHECK(ts.breaks[1] == std::vector<int>{1});  // between positions 1 and 2 (0-based)
    CHECK(std::abs(ts.sse[1]) < 1e-12);
    CHECK(ts.sse[0] == doctest::Approx(25));
}

TEST_CASE("segment_dp matches exhaustive search") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 10;
        const Vec v = testsupport::random_vec(rng, n, 2.0);
        const auto table = segment_dp(v, n - 1);
        std::vector<double> best(n, 1e300);
        for (const auto& breaks : testsupport::all_subsets(n - 1)) {
            double sse = 0;
            int start = 0;
            auto close = [&](int end) {
                const double m = v.segment(start, end - start).mean();
                sse += (v.segment(start, end - start).array() - m).square().sum();
                start = end;
            };
            for (int b : breaks) close(b + 1);
            close(n);
            best[breaks.size()] = std::min(best[breaks.size()], sse);
        }
        for (int k = 0; k < n; ++k) CHECK(table.sse[k] == doctest::Approx(best[k]).epsilon(1e-9).scale(1));
    }
}

TEST_CASE("tie rule prefers smaller rho then canonical order") {
    SparsityFamily f(3);
    const Structure a = SparseSet{{0}}, b = SparseSet{{0, 1}}, c = SparseSet{{1}};
    CHECK(better_candidate(f, 1.0, a, 1.0 + 1e-14, b));
    CHECK(!better_candidate(f, 1.0, b, 1.0, a));
    CHECK(better_candidate(f, 1.0, a, 1.0, c));
    CHECK(!better_candidate(f, 1.0, c, 1.0, a));
    CHECK(better_candidate(f, 0.5, b, 1.0, a));
}
