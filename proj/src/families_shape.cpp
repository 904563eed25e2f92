// Segmentation families for isotonic / unimodal (jumps) and convex (knots) signals.
#include <algorithm>
#include <cmath>
#include <numeric>

#include "family_internal.hpp"

namespace projstruct {

using detail::as;

// ---- jumps ------------------------------------------------------------------------

JumpFamily::JumpFamily(int n) : n_(n) {
    if (n < 1) throw ContractError("jump: n must be >= 1");
}

void JumpFamily::validate(const Structure& s) const {
    detail::require_sorted_unique(as<JumpSet>(s, kind()).breaks, 0, n_ - 2, "jump");
}

Vec JumpFamily::project(const Structure& s, const Vec& theta) const {
    validate(s);
    check_length(theta);
    Vec out(n_);
    int start = 0;
    auto flush = [&](int end) {  // segment [start, end]
        const double mean = theta.segment(start, end - start + 1).mean();
        out.segment(start, end - start + 1).setConstant(mean);
        start = end + 1;
    };
    for (int b : std::get<JumpSet>(s).breaks) flush(b);
    flush(n_ - 1);
    return out;
}

int JumpFamily::dim(const Structure& s) const {
    validate(s);
    return static_cast<int>(std::get<JumpSet>(s).breaks.size()) + 1;
}

double JumpFamily::majorant_of_size(int k) const {
    return 1.0 + 2.0 * xlog_ratio(k, std::exp(1.0) * n_);
}

double JumpFamily::majorant(const Structure& s) const { return majorant_of_size(dim(s) - 1); }

Slicing JumpFamily::slicing(const Structure& s) const { return {dim(s) - 1}; }

std::vector<long> JumpFamily::order_key(const Structure& s) const {
    return detail::size_lex_key(std::get<JumpSet>(s).breaks);
}

double JumpFamily::count(const EnumerationCaps& caps) const {
    return detail::count_subsets(n_ - 1, caps.max_cardinality);
}

void JumpFamily::for_each(const EnumerationCaps& caps,
                          const std::function<bool(const Structure&)>& fn) const {
    detail::for_each_subset(n_ - 1, caps.max_cardinality,
                            [&](const std::vector<int>& idx) { return fn(JumpSet{idx}); });
}

Structure JumpFamily::union_structure(const Structure& a, const Structure& b) const {
    validate(a);
    validate(b);
    return JumpSet{detail::sorted_union(std::get<JumpSet>(a).breaks, std::get<JumpSet>(b).breaks)};
}

std::optional<Structure> JumpFamily::full_structure() const {
    std::vector<int> all(n_ - 1);
    std::iota(all.begin(), all.end(), 0);
    return JumpSet{all};
}

Structure JumpFamily::empty_structure() const { return JumpSet{}; }

nlohmann::json JumpFamily::describe() const { return {{"kind", "jump"}, {"n", n_}}; }

// ---- knots ------------------------------------------------------------------------

KnotFamily::KnotFamily(int n) : n_(n) {
    if (n < 3) throw ContractError("knot: n must be >= 3");
}

void KnotFamily::validate(const Structure& s) const {
    detail::require_sorted_unique(as<KnotSet>(s, kind()).knots, 1, n_ - 2, "knot");
}

namespace {

std::vector<int> knot_nodes(const KnotSet& s, int n) {
    std::vector<int> nodes{0};
    nodes.insert(nodes.end(), s.knots.begin(), s.knots.end());
    nodes.push_back(n - 1);
    return nodes;
}

}  // namespace

Mat KnotFamily::hat_basis(const KnotSet& s) const {
    validate(s);
    const auto nodes = knot_nodes(s, n_);
    const int m = static_cast<int>(nodes.size());
    Mat b = Mat::Zero(n_, m);
    for (int j = 0; j + 1 < m; ++j) {
        const double width = nodes[j + 1] - nodes[j];
        for (int i = nodes[j]; i <= nodes[j + 1]; ++i) {
            b(i, j) = (nodes[j + 1] - i) / width;
            b(i, j + 1) = (i - nodes[j]) / width;
        }
    }
    return b;
}

Vec KnotFamily::project(const Structure& s, const Vec& theta) const {
    validate(s);
    check_length(theta);
    const auto nodes = knot_nodes(std::get<KnotSet>(s), n_);
    const int m = static_cast<int>(nodes.size());
    // Hats overlap only their neighbours, so the Gram matrix is tridiagonal.
    std::vector<double> diag(m, 0.0), off(m - 1, 0.0), rhs(m, 0.0);
    for (int j = 0; j + 1 < m; ++j) {
        const double width = nodes[j + 1] - nodes[j];
        const int lo = nodes[j];
        // Endpoints are shared between adjacent segments; each point is counted once.
        const int hi = (j + 2 == m) ? nodes[j + 1] : nodes[j + 1] - 1;
        for (int i = lo; i <= hi; ++i) {
            const double a = (nodes[j + 1] - i) / width;
            const double c = (i - nodes[j]) / width;
            diag[j] += a * a;
            diag[j + 1] += c * c;
            off[j] += a * c;
            rhs[j] += a * theta(i);
            rhs[j + 1] += c * theta(i);
        }
    }
    // Thomas algorithm; the system is symmetric positive definite.
    std::vector<double> cp(m, 0.0), dp(m, 0.0);
    cp[0] = m > 1 ? off[0] / diag[0] : 0.0;
    dp[0] = rhs[0] / diag[0];
    for (int j = 1; j < m; ++j) {
        const double denom = diag[j] - off[j - 1] * cp[j - 1];
        cp[j] = j + 1 < m ? off[j] / denom : 0.0;
        dp[j] = (rhs[j] - off[j - 1] * dp[j - 1]) / denom;
    }
    std::vector<double> coef(m);
    coef[m - 1] = dp[m - 1];
    for (int j = m - 2; j >= 0; --j) coef[j] = dp[j] - cp[j] * coef[j + 1];

    Vec out(n_);
    for (int j = 0; j + 1 < m; ++j) {
        const double width = nodes[j + 1] - nodes[j];
        for (int i = nodes[j]; i <= nodes[j + 1]; ++i)
            out(i) = coef[j] * (nodes[j + 1] - i) / width + coef[j + 1] * (i - nodes[j]) / width;
    }
    return out;
}

int KnotFamily::dim(const Structure& s) const {
    validate(s);
    return static_cast<int>(std::get<KnotSet>(s).knots.size()) + 2;
}

double KnotFamily::majorant_of_size(int k) const {
    return std::max(1.0 + 3.0 * xlog_ratio(k, std::exp(1.0) * n_), k + 2.0);
}

double KnotFamily::majorant(const Structure& s) const { return majorant_of_size(dim(s) - 2); }

Slicing KnotFamily::slicing(const Structure& s) const { return {dim(s) - 2}; }

std::vector<long> KnotFamily::order_key(const Structure& s) const {
    return detail::size_lex_key(std::get<KnotSet>(s).knots);
}

double KnotFamily::count(const EnumerationCaps& caps) const {
    return detail::count_subsets(n_ - 2, caps.max_cardinality);
}

void KnotFamily::for_each(const EnumerationCaps& caps,
                          const std::function<bool(const Structure&)>& fn) const {
    detail::for_each_subset(n_ - 2, caps.max_cardinality, [&](const std::vector<int>& idx) {
        std::vector<int> knots(idx.size());
        std::transform(idx.begin(), idx.end(), knots.begin(), [](int i) { return i + 1; });
        return fn(KnotSet{knots});
    });
}

Structure KnotFamily::union_structure(const Structure& a, const Structure& b) const {
    validate(a);
    validate(b);
    return KnotSet{detail::sorted_union(std::get<KnotSet>(a).knots, std::get<KnotSet>(b).knots)};
}

std::optional<Structure> KnotFamily::full_structure() const {
    std::vector<int> all(n_ - 2);
    std::iota(all.begin(), all.end(), 1);
    return KnotSet{all};
}

Structure KnotFamily::empty_structure() const { return KnotSet{}; }

nlohmann::json KnotFamily::describe() const { return {{"kind", "knot"}, {"n", n_}}; }

}  // namespace projstruct
