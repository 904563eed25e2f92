#include "projstruct/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "projstruct/errors.hpp"
#include "projstruct/rng.hpp"

namespace projstruct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Running argmin under the tie rule.
struct Best {
    explicit Best(const Family& fam) : f(fam) {}

    const Family& f;
    std::optional<Structure> s;
    double obj = kInf;
    long visited = 0;

    void offer(const Structure& cand, double value) {
        ++visited;
        if (!s || better_candidate(f, value, cand, obj, *s)) {
            s = cand;
            obj = value;
        }
    }
};

Selection finish(const Best& b, const Family& f, const Vec& y, const Penalty& pen, bool exact) {
    if (!b.s) throw ContractError(to_string(f.kind()) + ": no candidate structures");
    Selection out{*b.s, penalized_objective(f, *b.s, y, pen), exact, b.visited, {}};
    return out;
}

void require_length(const Family& f, const Vec& y) {
    if (y.size() != f.ambient_dim())
        throw ContractError(to_string(f.kind()) + ": vector length " + std::to_string(y.size()) +
                            " does not match ambient dimension " + std::to_string(f.ambient_dim()));
}

double pen_scale(const Penalty& pen) { return pen.sigma * pen.sigma; }

// ---- smoothness / band: scan ----------------------------------------------------------

Selection select_smoothness(const Vec& y, const SmoothnessFamily& f, const Penalty& pen) {
    const int n = f.ambient_dim();
    std::vector<double> tail(n + 1, 0.0);
    for (int i = n - 1; i >= 0; --i) tail[i] = tail[i + 1] + y(i) * y(i);
    Best best{f};
    for (int level = 0; level <= n; ++level) {
        const Structure s = Truncation{level};
        best.offer(s, tail[level] + pen_scale(pen) * pen.of(f, s));
    }
    return finish(best, f, y, pen, true);
}

Selection select_scan(const Vec& y, const Family& f, const Penalty& pen) {
    Best best{f};
    f.for_each({}, [&](const Structure& s) {
        best.offer(s, penalized_objective(f, s, y, pen));
        return true;
    });
    return finish(best, f, y, pen, true);
}

// ---- sparsity: sort + size scan -------------------------------------------------------

std::vector<int> order_by_magnitude(const Vec& y, int offset, int len) {
    std::vector<int> order(len);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(y(offset + a)) > std::abs(y(offset + b));
    });
    return order;
}

Selection select_sparsity(const Vec& y, const SparsityFamily& f, const Penalty& pen,
                          const EnumerationCaps& caps) {
    const int n = f.ambient_dim();
    const auto order = order_by_magnitude(y, 0, n);
    const int top = caps.max_cardinality < 0 ? n : std::min(n, caps.max_cardinality);
    const double total = y.squaredNorm();
    double kept = 0;
    Best best{f};
    for (int k = 0; k <= top; ++k) {
        if (k > 0) kept += y(order[k - 1]) * y(order[k - 1]);
        std::vector<int> idx(order.begin(), order.begin() + k);
        std::sort(idx.begin(), idx.end());
        const double penalty = 2 * pen.kappa * f.majorant_of_size(k) + (pen.add_dim ? k : 0);
        best.offer(SparseSet{idx}, std::max(0.0, total - kept) + pen_scale(pen) * penalty);
    }
    return finish(best, f, y, pen, true);
}

Selection select_leveled(const Vec& y, const LeveledSparsityFamily& f, const Penalty& pen) {
    require_length(f, y);
    LeveledSparse s;
    for (int j = 0; j <= f.max_level(); ++j) {
        const int len = 1 << j, off = LeveledSparsityFamily::offset(j);
        const auto order = order_by_magnitude(y, off, len);
        double kept = 0, best_val = 0;
        int best_k = 0;
        for (int k = 1; k <= len; ++k) {
            kept += y(off + order[k - 1]) * y(off + order[k - 1]);
            const double penalty =
                2 * pen.kappa * LeveledSparsityFamily::level_majorant(j, k) + (pen.add_dim ? k : 0);
            const double val = -kept + pen_scale(pen) * penalty;
            // Strict improvement keeps the smaller level set on ties.
            if (val < best_val - 1e-12 * std::max(1.0, std::abs(best_val))) {
                best_val = val;
                best_k = k;
            }
        }
        std::vector<int> idx(order.begin(), order.begin() + best_k);
        std::sort(idx.begin(), idx.end());
        s.levels.push_back(std::move(idx));
    }
    while (!s.levels.empty() && s.levels.back().empty()) s.levels.pop_back();
    Best best{f};
    best.offer(s, penalized_objective(f, s, y, pen));
    best.visited = f.ambient_dim() + 1;
    return finish(best, f, y, pen, true);
}

// ---- jumps: segmentation DP ---------------------------------------------------------------

Selection select_jump(const Vec& y, const JumpFamily& f, const Penalty& pen,
                      const EnumerationCaps& caps) {
    const int n = f.ambient_dim();
    const int top = caps.max_cardinality < 0 ? n - 1 : std::min(n - 1, caps.max_cardinality);
    const auto table = segment_dp(y, top);
    Best best{f};
    for (int k = 0; k < static_cast<int>(table.sse.size()); ++k) {
        if (!std::isfinite(table.sse[k])) continue;
        const double penalty = 2 * pen.kappa * f.majorant_of_size(k) + (pen.add_dim ? k + 1 : 0);
        best.offer(JumpSet{table.breaks[k]}, table.sse[k] + pen_scale(pen) * penalty);
    }
    return finish(best, f, y, pen, true);
}

// ---- greedy forward search over index sets (knot / regression heuristics) ------------------

template <class Make>
Selection forward_greedy(const Vec& y, const Family& f, const Penalty& pen, int universe_lo,
                         int universe_hi, int max_size, Make make) {
    Best best{f};
    std::vector<int> current;
    double current_obj = penalized_objective(f, make(current), y, pen);
    best.offer(make(current), current_obj);
    std::vector<double> trace{current_obj};
    while (static_cast<int>(current.size()) < max_size) {
        std::optional<Structure> step;
        std::vector<int> step_idx;
        double step_obj = kInf;
        for (int j = universe_lo; j <= universe_hi; ++j) {
            if (std::binary_search(current.begin(), current.end(), j)) continue;
            auto idx = current;
            idx.insert(std::upper_bound(idx.begin(), idx.end(), j), j);
            const Structure cand = make(idx);
            const double val = penalized_objective(f, cand, y, pen);
            best.offer(cand, val);
            if (!step || better_candidate(f, val, cand, step_obj, *step)) {
                step = cand;
                step_obj = val;
                step_idx = idx;
            }
        }
        if (!step || step_obj >= current_obj) break;
        current = std::move(step_idx);
        current_obj = step_obj;
        trace.push_back(current_obj);
    }
    auto out = finish(best, f, y, pen, false);
    out.trace = std::move(trace);
    return out;
}

// ---- regression: exhaustive DFS with incremental orthogonalization ---------------------------

Selection select_regression_exhaustive(const Vec& y, const RegressionFamily& f, const Penalty& pen,
                                       int top) {
    const int p = f.num_predictors();
    const Mat& x = f.design();
    Best best{f};
    std::vector<Vec> basis;
    std::vector<int> idx;
    // The residual after projecting on basis; columns are processed in index order.
    std::function<void(int, const Vec&)> dfs = [&](int next, const Vec& resid) {
        const int k = static_cast<int>(idx.size());
        const double penalty = 2 * pen.kappa * f.small_majorant(k) +
                               (pen.add_dim ? static_cast<double>(basis.size()) : 0.0);
        best.offer(RegressionSupport{idx, false}, resid.squaredNorm() + pen_scale(pen) * penalty);
        if (k == top) return;
        for (int j = next; j < p; ++j) {
            Vec v = x.col(j);
            const double norm0 = v.norm();
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& q : basis) v -= q.dot(v) * q;
            const double norm = v.norm();
            idx.push_back(j);
            if (norm > kRankTolerance * std::max(norm0, 1e-300) && norm0 > 0) {
                basis.push_back(v / norm);
                dfs(j + 1, resid - basis.back().dot(resid) * basis.back());
                basis.pop_back();
            } else {
                dfs(j + 1, resid);
            }
            idx.pop_back();
        }
    };
    dfs(0, y);
    const Structure full = f.full_rank_structure();
    best.offer(full, penalized_objective(f, full, y, pen));
    return finish(best, f, y, pen, true);
}

int regression_top(const RegressionFamily& f, const EnumerationCaps& caps) {
    int top = 0;
    while (top + 1 <= f.num_predictors() && f.in_small_family(top + 1)) ++top;
    if (caps.max_cardinality >= 0) top = std::min(top, caps.max_cardinality);
    return top;
}

Selection select_regression(const Vec& y, const RegressionFamily& f, const Penalty& pen,
                            SelectMode mode, const SelectOptions& opts) {
    require_length(f, y);
    const int top = regression_top(f, opts.caps);
    if (mode == SelectMode::Exact) {
        if (f.num_predictors() > opts.regression_exhaustive_max_p)
            throw CapExceeded("regression: exact selection requires p <= " +
                                  std::to_string(opts.regression_exhaustive_max_p),
                              f.count(opts.caps));
        return select_regression_exhaustive(y, f, pen, top);
    }
    auto out = forward_greedy(y, f, pen, 0, f.num_predictors() - 1, top,
                              [](const std::vector<int>& idx) -> Structure {
                                  return RegressionSupport{idx, false};
                              });
    // I_r is always a candidate (the elbow of the majorant).
    const Structure full = f.full_rank_structure();
    const double val = penalized_objective(f, full, y, pen);
    if (better_candidate(f, val, full, out.objective, out.structure)) {
        out.structure = full;
        out.objective = val;
    }
    ++out.visited;
    return out;
}

// ---- knots --------------------------------------------------------------------------------

Selection select_knot(const Vec& y, const KnotFamily& f, const Penalty& pen, SelectMode mode,
                      const SelectOptions& opts) {
    require_length(f, y);
    if (mode == SelectMode::Exact) return select_bruteforce(y, f, pen, opts.caps);
    const int n = f.ambient_dim();
    const int top = opts.caps.max_cardinality < 0 ? n - 2 : std::min(n - 2, opts.caps.max_cardinality);
    return forward_greedy(y, f, pen, 1, n - 2, top,
                          [](const std::vector<int>& idx) -> Structure { return KnotSet{idx}; });
}

// ---- clustering ---------------------------------------------------------------------------

// Clusters restricted to runs of the sorted values; the free set is arbitrary
// within that order. Exact over this restricted class.
Selection select_clustering_sorted(const Vec& y, const ClusteringFamily& f, const Penalty& pen) {
    const int n = f.ambient_dim();
    const int mmax = f.max_clusters();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return y(a) < y(b); });
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = y(order[i]);
    const double shift = v.mean();
    std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        s1[i + 1] = s1[i] + (v(i) - shift);
        s2[i + 1] = s2[i] + (v(i) - shift) * (v(i) - shift);
    }
    auto sse = [&](int a, int b) {  // [a, b)
        const double len = b - a, sum = s1[b] - s1[a];
        return std::max(0.0, s2[b] - s2[a] - sum * sum / len);
    };
    const double scale = pen_scale(pen) * 2 * pen.kappa;
    // dp[i][m][fr]: best partial cost for the first i sorted values.
    const auto idx3 = [&](int i, int m, int fr) { return (i * (mmax + 1) + m) * (n + 1) + fr; };
    std::vector<double> dp((n + 1) * (mmax + 1) * (n + 1), kInf);
    std::vector<int> from(dp.size(), -1);  // previous i (segment start) or -2 for free step
    dp[idx3(0, 0, 0)] = 0;
    for (int i = 0; i < n; ++i)
        for (int m = 0; m <= mmax; ++m)
            for (int fr = 0; fr <= i; ++fr) {
                const double cur = dp[idx3(i, m, fr)];
                if (!std::isfinite(cur)) continue;
                auto& free_next = dp[idx3(i + 1, m, fr + 1)];
                if (cur < free_next) {
                    free_next = cur;
                    from[idx3(i + 1, m, fr + 1)] = -2;
                }
                if (m == mmax) continue;
                for (int j = i + 2; j <= n; ++j) {
                    const double val = cur + sse(i, j) - scale * std::lgamma(j - i + 1.0);
                    auto& slot = dp[idx3(j, m + 1, fr)];
                    if (val < slot) {
                        slot = val;
                        from[idx3(j, m + 1, fr)] = i;
                    }
                }
            }
    Best best{f};
    for (int m = 0; m <= mmax; ++m)
        for (int fr = 0; fr <= n; ++fr) {
            const double cur = dp[idx3(n, m, fr)];
            if (!std::isfinite(cur)) continue;
            MultiLevelPartition part;
            for (int i = n, mm = m, ff = fr; i > 0;) {
                const int prev = from[idx3(i, mm, ff)];
                if (prev == -2) {
                    part.free.push_back(order[i - 1]);
                    --i;
                    --ff;
                } else {
                    std::vector<int> cl;
                    for (int t = prev; t < i; ++t) cl.push_back(order[t]);
                    part.clusters.push_back(std::move(cl));
                    i = prev;
                    --mm;
                }
            }
            const Structure s = f.canonicalize(part);
            best.offer(s, penalized_objective(f, s, y, pen));
        }
    auto out = finish(best, f, y, pen, false);
    return out;
}

// ---- bicluster ------------------------------------------------------------------------------

struct BiclusterSearch {
    const BiclusterFamily& f;
    const Vec& y;
    const Penalty& pen;
    int n1, n2;

    double at(int i, int j) const { return y(i * n2 + j); }

    Eigen::MatrixXd block_means(const std::vector<int>& r, const std::vector<int>& c, int s1,
                                int s2) const {
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(s1, s2), cnt = Eigen::MatrixXd::Zero(s1, s2);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j) {
                sums(r[i], c[j]) += at(i, j);
                cnt(r[i], c[j]) += 1;
            }
        const double global = y.mean();
        for (int a = 0; a < s1; ++a)
            for (int b = 0; b < s2; ++b) sums(a, b) = cnt(a, b) > 0 ? sums(a, b) / cnt(a, b) : global;
        return sums;
    }

    double objective(const std::vector<int>& r, const std::vector<int>& c) const {
        const Structure s = Bicluster{canonical_labels(r), canonical_labels(c)};
        return penalized_objective(f, s, y, pen);
    }

    // Alternating reassignment from (r, c); returns the trace of accepted objectives.
    std::vector<double> run(std::vector<int>& r, std::vector<int>& c, int s1, int s2,
                            bool fix_rows, bool fix_cols) const {
        double cur = objective(r, c);
        std::vector<double> trace{cur};
        for (int iter = 0; iter < 100; ++iter) {
            auto nr = r;
            auto nc = c;
            if (!fix_rows) {
                const auto mu = block_means(nr, nc, s1, s2);
                for (int i = 0; i < n1; ++i) {
                    int best_l = nr[i];
                    double best_cost = kInf;
                    for (int l = 0; l < s1; ++l) {
                        double cost = 0;
                        for (int j = 0; j < n2; ++j) cost += std::pow(at(i, j) - mu(l, nc[j]), 2);
                        if (cost < best_cost - 1e-12 * std::max(1.0, cost) ||
                            (l == nr[i] && cost <= best_cost)) {
                            best_cost = cost;
                            best_l = l;
                        }
                    }
                    nr[i] = best_l;
                }
            }
            if (!fix_cols) {
                const auto mu = block_means(nr, nc, s1, s2);
                for (int j = 0; j < n2; ++j) {
                    int best_l = nc[j];
                    double best_cost = kInf;
                    for (int l = 0; l < s2; ++l) {
                        double cost = 0;
                        for (int i = 0; i < n1; ++i) cost += std::pow(at(i, j) - mu(nr[i], l), 2);
                        if (cost < best_cost - 1e-12 * std::max(1.0, cost) ||
                            (l == nc[j] && cost <= best_cost)) {
                            best_cost = cost;
                            best_l = l;
                        }
                    }
                    nc[j] = best_l;
                }
            }
            const double next = objective(nr, nc);
            if (!(next < cur - 1e-12 * std::max(1.0, std::abs(cur)))) break;
            r = std::move(nr);
            c = std::move(nc);
            cur = next;
            trace.push_back(cur);
        }
        return trace;
    }
};

std::vector<int> quantile_labels(const std::vector<double>& score, int s) {
    const int n = static_cast<int>(score.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] < score[b]; });
    std::vector<int> labels(n);
    for (int rank = 0; rank < n; ++rank) labels[order[rank]] = static_cast<int>((long)rank * s / n);
    return labels;
}

Selection select_bicluster_heuristic(const Vec& y, const BiclusterFamily& f, const Penalty& pen,
                                     const SelectOptions& opts) {
    require_length(f, y);
    const int n1 = f.rows(), n2 = f.cols();
    BiclusterSearch search{f, y, pen, n1, n2};
    std::vector<double> row_mean(n1, 0.0), col_mean(n2, 0.0);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            row_mean[i] += y(i * n2 + j) / n2;
            col_mean[j] += y(i * n2 + j) / n1;
        }
    auto axis_sizes = [&](int n) {
        std::vector<int> out;
        for (int s = 1; s <= std::min(n - 1, opts.bicluster_max_blocks); ++s) out.push_back(s);
        out.push_back(n);
        return out;
    };
    Best best{f};
    std::vector<double> best_trace;
    for (int s1 : axis_sizes(n1))
        for (int s2 : axis_sizes(n2)) {
            const bool fix_rows = s1 == n1 || s1 == 1, fix_cols = s2 == n2 || s2 == 1;
            const int restarts = (fix_rows && fix_cols) ? 0 : opts.bicluster_restarts;
            for (int start = 0; start <= restarts; ++start) {
                std::vector<int> r, c;
                if (start == 0) {
                    r = s1 == n1 ? quantile_labels(std::vector<double>(n1, 0.0), n1)
                                 : quantile_labels(row_mean, s1);
                    c = s2 == n2 ? quantile_labels(std::vector<double>(n2, 0.0), n2)
                                 : quantile_labels(col_mean, s2);
                } else {
                    Rng rng(derive_seed(opts.seed, (static_cast<std::uint64_t>(s1) << 40) ^
                                                       (static_cast<std::uint64_t>(s2) << 20) ^
                                                       static_cast<std::uint64_t>(start)));
                    std::uniform_int_distribution<int> d1(0, s1 - 1), d2(0, s2 - 1);
                    r.resize(n1);
                    c.resize(n2);
                    for (auto& l : r) l = fix_rows ? 0 : d1(rng);
                    for (auto& l : c) l = fix_cols ? 0 : d2(rng);
                    if (s1 == n1) std::iota(r.begin(), r.end(), 0);
                    if (s2 == n2) std::iota(c.begin(), c.end(), 0);
                }
                auto trace = search.run(r, c, s1, s2, fix_rows, fix_cols);
                const Structure s = Bicluster{canonical_labels(r), canonical_labels(c)};
                const auto before = best.s;
                best.offer(s, trace.back());
                if (best.s != before) best_trace = std::move(trace);
            }
        }
    auto out = finish(best, f, y, pen, false);
    out.trace = std::move(best_trace);
    return out;
}

}  // namespace

double Penalty::of(const Family& f, const Structure& s) const {
    return 2.0 * kappa * f.majorant(s) + (add_dim ? f.dim(s) : 0.0);
}

double penalized_objective(const Family& f, const Structure& s, const Vec& y, const Penalty& pen) {
    return f.residual_sq(s, y) + pen.sigma * pen.sigma * pen.of(f, s);
}

bool better_candidate(const Family& f, double obj_a, const Structure& a, double obj_b,
                      const Structure& b) {
    const double tol = 1e-12 * std::max({1.0, std::abs(obj_a), std::abs(obj_b)});
    if (obj_a < obj_b - tol) return true;
    if (obj_b < obj_a - tol) return false;
    const double ra = f.majorant(a), rb = f.majorant(b);
    if (ra != rb) return ra < rb;
    return f.order_key(a) < f.order_key(b);
}

Selection select_bruteforce(const Vec& y, const Family& f, const Penalty& pen,
                            const EnumerationCaps& caps) {
    require_finite(y, "select_bruteforce");
    require_length(f, y);
    Best best{f};
    visit_structures(f, caps, [&](const Structure& s) {
        best.offer(s, penalized_objective(f, s, y, pen));
        return true;
    });
    return finish(best, f, y, pen, true);
}

Selection select_penalized(const Vec& y, const Family& f, const Penalty& pen, SelectMode mode,
                           const SelectOptions& opts) {
    require_finite(y, "select_penalized");
    require_length(f, y);
    if (!(pen.sigma >= 0) || !(pen.kappa >= 0))
        throw ContractError("select_penalized: sigma and kappa must be nonnegative");
    switch (f.kind()) {
        case FamilyKind::Smoothness:
            return select_smoothness(y, static_cast<const SmoothnessFamily&>(f), pen);
        case FamilyKind::Band: return select_scan(y, f, pen);
        case FamilyKind::Sparsity:
            return select_sparsity(y, static_cast<const SparsityFamily&>(f), pen, opts.caps);
        case FamilyKind::Leveled:
            return select_leveled(y, static_cast<const LeveledSparsityFamily&>(f), pen);
        case FamilyKind::Jump:
            return select_jump(y, static_cast<const JumpFamily&>(f), pen, opts.caps);
        case FamilyKind::Knot:
            return select_knot(y, static_cast<const KnotFamily&>(f), pen, mode, opts);
        case FamilyKind::Regression:
            return select_regression(y, static_cast<const RegressionFamily&>(f), pen, mode, opts);
        case FamilyKind::Clustering: {
            const auto& cf = static_cast<const ClusteringFamily&>(f);
            if (mode == SelectMode::Exact) {
                if (f.ambient_dim() > opts.clustering_exact_max_n || cf.max_clusters() > 3)
                    throw CapExceeded("clustering: exact selection requires n <= " +
                                          std::to_string(opts.clustering_exact_max_n) +
                                          " and max_clusters <= 3",
                                      f.count(opts.caps));
                EnumerationCaps caps = opts.caps;
                caps.max_clusters = cf.max_clusters();
                return select_bruteforce(y, f, pen, caps);
            }
            return select_clustering_sorted(y, cf, pen);
        }
        case FamilyKind::Bicluster: {
            const auto& bf = static_cast<const BiclusterFamily&>(f);
            if (mode == SelectMode::Exact) return select_bruteforce(y, f, pen, opts.caps);
            return select_bicluster_heuristic(y, bf, pen, opts);
        }
    }
    throw ContractError("select_penalized: unknown family");
}

SegmentTable segment_dp(const Vec& values, int max_breaks) {
    const int n = static_cast<int>(values.size());
    if (n < 1) throw ContractError("segment_dp: empty input");
    if (max_breaks < 0 || max_breaks > n - 1)
        throw ContractError("segment_dp: max_breaks must lie in [0, n-1]");
    const double shift = values.mean();
    std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const double v = values(i) - shift;
        s1[i + 1] = s1[i] + v;
        s2[i + 1] = s2[i] + v * v;
    }
    auto cost = [&](int a, int b) {  // segment [a, b]
        const double len = b - a + 1, sum = s1[b + 1] - s1[a];
        return std::max(0.0, s2[b + 1] - s2[a] - sum * sum / len);
    };
    // d[k][j]: best cost of values[0..j] with k breaks; arg[k][j]: position of the last break.
    std::vector<std::vector<double>> d(max_breaks + 1, std::vector<double>(n, kInf));
    std::vector<std::vector<int>> arg(max_breaks + 1, std::vector<int>(n, -1));
    for (int j = 0; j < n; ++j) d[0][j] = cost(0, j);
    for (int k = 1; k <= max_breaks; ++k)
        for (int j = k; j < n; ++j)
            for (int i = k - 1; i < j; ++i) {
                const double val = d[k - 1][i] + cost(i + 1, j);
                if (val < d[k][j]) {
                    d[k][j] = val;
                    arg[k][j] = i;
                }
            }
    SegmentTable out;
    out.sse.resize(max_breaks + 1);
    out.breaks.resize(max_breaks + 1);
    for (int k = 0; k <= max_breaks; ++k) {
        out.sse[k] = d[k][n - 1];
        std::vector<int> br;
        for (int kk = k, j = n - 1; kk > 0; --kk) {
            j = arg[kk][j];
            br.push_back(j);
        }
        std::reverse(br.begin(), br.end());
        out.breaks[k] = std::move(br);
    }
    return out;
}

}  // namespace projstruct
