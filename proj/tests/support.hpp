#pragma once

// Independent reference implementations used as test oracles. Subspaces are
// described by their defining linear constraints C x = 0, and projections are
// computed with an SVD pseudo-inverse, a route that shares no code with the
// closed-form projections in the library.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <doctest.h>

#include "projstruct/family.hpp"
#include "projstruct/rng.hpp"

namespace testsupport {

using projstruct::Family;
using projstruct::Structure;
using projstruct::Vec;
using Dense = Eigen::MatrixXd;

inline Dense rows_to_matrix(const std::vector<Vec>& rows, int n) {
    Dense c = Dense::Zero(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t i = 0; i < rows.size(); ++i) c.row(i) = rows[i].transpose();
    return c;
}

// Constraint rows whose common null space is L_I.
inline Dense constraints(const Family& f, const Structure& s) {
    using namespace projstruct;
    const int n = f.ambient_dim();
    std::vector<Vec> rows;
    auto unit = [&](int i) {
        Vec e = Vec::Zero(n);
        e(i) = 1;
        return e;
    };
    auto diff = [&](int i, int j) {
        Vec e = Vec::Zero(n);
        e(i) = 1;
        e(j) -= 1;
        return e;
    };
    if (auto* t = std::get_if<Truncation>(&s)) {
        for (int i = t->level; i < n; ++i) rows.push_back(unit(i));
    } else if (auto* t = std::get_if<SparseSet>(&s)) {
        for (int i = 0; i < n; ++i)
            if (!std::binary_search(t->indices.begin(), t->indices.end(), i)) rows.push_back(unit(i));
    } else if (auto* t = std::get_if<LeveledSparse>(&s)) {
        std::vector<int> keep;
        for (std::size_t j = 0; j < t->levels.size(); ++j)
            for (int k : t->levels[j]) keep.push_back((1 << j) - 1 + k);
        for (int i = 0; i < n; ++i)
            if (std::find(keep.begin(), keep.end(), i) == keep.end()) rows.push_back(unit(i));
    } else if (auto* t = std::get_if<MultiLevelPartition>(&s)) {
        for (const auto& cl : t->clusters)
            for (std::size_t a = 1; a < cl.size(); ++a) rows.push_back(diff(cl[0], cl[a]));
    } else if (auto* t = std::get_if<JumpSet>(&s)) {
        for (int i = 0; i + 1 < n; ++i)
            if (!std::binary_search(t->breaks.begin(), t->breaks.end(), i)) rows.push_back(diff(i, i + 1));
    } else if (auto* t = std::get_if<KnotSet>(&s)) {
        // 2 x_i = x_{i-1} + x_{i+1} away from the knots.
        for (int i = 1; i + 1 < n; ++i)
            if (!std::binary_search(t->knots.begin(), t->knots.end(), i)) {
                Vec e = Vec::Zero(n);
                e(i) = 2;
                e(i - 1) = -1;
                e(i + 1) = -1;
                rows.push_back(e);
            }
    } else if (auto* t = std::get_if<Band>(&s)) {
        const int p = static_cast<int>(std::lround(std::sqrt(n)));
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                if (std::abs(i - j) > t->width) rows.push_back(unit(i * p + j));
                else if (i < j) rows.push_back(diff(i * p + j, j * p + i));
            }
    } else if (auto* t = std::get_if<Bicluster>(&s)) {
        const int n1 = static_cast<int>(t->rows.size()), n2 = static_cast<int>(t->cols.size());
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j)
                for (int k = 0; k < n1; ++k)
                    for (int l = 0; l < n2; ++l)
                        if (t->rows[i] == t->rows[k] && t->cols[j] == t->cols[l] &&
                            i * n2 + j < k * n2 + l)
                            rows.push_back(diff(i * n2 + j, k * n2 + l));
    }
    return rows_to_matrix(rows, n);
}

// Projection onto ker(C): y minus its projection on the row space of C.
inline Vec nullspace_projection(const Dense& c, const Vec& y) {
    if (c.rows() == 0) return y;
    Eigen::JacobiSVD<Dense> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    const Dense v = svd.matrixV().leftCols(svd.rank());
    return y - v * (v.transpose() * y);
}

inline int nullspace_dim(const Dense& c, int n) {
    if (c.rows() == 0) return n;
    Eigen::JacobiSVD<Dense> svd(c);
    svd.setThreshold(1e-10);
    return n - static_cast<int>(svd.rank());
}

// Projection onto the column span of a regression design subset via SVD.
inline Vec span_projection(const Dense& basis, const Vec& y) {
    if (basis.cols() == 0) return Vec::Zero(y.size());
    Eigen::JacobiSVD<Dense> svd(basis, Eigen::ComputeThinU);
    svd.setThreshold(1e-10);
    const int r = static_cast<int>(svd.rank());
    const Dense u = svd.matrixU().leftCols(r);
    return u * (u.transpose() * y);
}

inline Vec oracle_project(const Family& f, const Structure& s, const Vec& y) {
    using namespace projstruct;
    if (auto* t = std::get_if<RegressionSupport>(&s)) {
        const auto& rf = static_cast<const RegressionFamily&>(f);
        Dense b(rf.design().rows(), static_cast<Eigen::Index>(t->indices.size()));
        for (std::size_t k = 0; k < t->indices.size(); ++k) b.col(k) = rf.design().col(t->indices[k]);
        return span_projection(b, y);
    }
    return nullspace_projection(constraints(f, s), y);
}

// All subsets of [0, m) as bitmasks, independent of the library enumeration.
inline std::vector<std::vector<int>> all_subsets(int m) {
    std::vector<std::vector<int>> out;
    for (long mask = 0; mask < (1L << m); ++mask) {
        std::vector<int> s;
        for (int i = 0; i < m; ++i)
            if (mask >> i & 1) s.push_back(i);
        out.push_back(std::move(s));
    }
    return out;
}

// Random canonical structure for a family (hand-rolled generators).
inline Structure random_structure(const Family& f, std::mt19937_64& rng) {
    using namespace projstruct;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto random_subset = [&](int lo, int hi, double p) {
        std::vector<int> out;
        for (int i = lo; i <= hi; ++i)
            if (u(rng) < p) out.push_back(i);
        return out;
    };
    const double p = 0.1 + 0.8 * u(rng);
    switch (f.kind()) {
        case FamilyKind::Smoothness:
            return Truncation{static_cast<int>(u(rng) * (f.ambient_dim() + 1)) % (f.ambient_dim() + 1)};
        case FamilyKind::Sparsity: return SparseSet{random_subset(0, f.ambient_dim() - 1, p)};
        case FamilyKind::Leveled: {
            const auto& lf = static_cast<const LeveledSparsityFamily&>(f);
            return lf.from_flat(random_subset(0, f.ambient_dim() - 1, p));
        }
        case FamilyKind::Clustering: {
            const auto& cf = static_cast<const ClusteringFamily&>(f);
            const int m = static_cast<int>(u(rng) * (cf.max_clusters() + 1)) % (cf.max_clusters() + 1);
            MultiLevelPartition part;
            part.clusters.resize(m);
            for (int i = 0; i < f.ambient_dim(); ++i) {
                const int l = static_cast<int>(u(rng) * (m + 1)) % (m + 1);
                if (l == m) part.free.push_back(i);
                else part.clusters[l].push_back(i);
            }
            return f.canonicalize(part);
        }
        case FamilyKind::Jump: return JumpSet{random_subset(0, f.ambient_dim() - 2, p)};
        case FamilyKind::Knot: return KnotSet{random_subset(1, f.ambient_dim() - 2, p)};
        case FamilyKind::Regression: {
            const auto& rf = static_cast<const RegressionFamily&>(f);
            if (u(rng) < 0.15) return rf.full_rank_structure();
            int top = 0;
            while (top + 1 <= rf.num_predictors() && rf.in_small_family(top + 1)) ++top;
            std::vector<int> idx(rf.num_predictors());
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            const int k = static_cast<int>(u(rng) * (top + 1)) % (top + 1);
            idx.resize(k);
            std::sort(idx.begin(), idx.end());
            return RegressionSupport{idx, false};
        }
        case FamilyKind::Band: {
            const int pp = static_cast<const BandFamily&>(f).p();
            return Band{static_cast<int>(u(rng) * pp) % pp};
        }
        case FamilyKind::Bicluster: {
            const auto& bf = static_cast<const BiclusterFamily&>(f);
            const int s1 = 1 + static_cast<int>(u(rng) * bf.rows()) % bf.rows();
            const int s2 = 1 + static_cast<int>(u(rng) * bf.cols()) % bf.cols();
            std::vector<int> r(bf.rows()), c(bf.cols());
            for (auto& l : r) l = static_cast<int>(u(rng) * s1) % s1;
            for (auto& l : c) l = static_cast<int>(u(rng) * s2) % s2;
            return f.canonicalize(Bicluster{r, c});
        }
    }
    return f.empty_structure();
}

inline Vec random_vec(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> z(0.0, scale);
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = z(rng);
    return v;
}

// Small instances of every family, used by property tests.
std::vector<projstruct::FamilyPtr> small_families(std::mt19937_64& rng);

}  // namespace testsupport

namespace doctest {
template <>
struct StringMaker<projstruct::Structure> {
    static String convert(const projstruct::Structure& s) { return projstruct::to_string(s).c_str(); }
};
}  // namespace doctest
