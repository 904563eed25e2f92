// Smoothness, sparsity, leveled (wavelet) sparsity and clustering families.
#include <algorithm>
#include <cmath>
#include <numeric>

#include "family_internal.hpp"

namespace projstruct {

using detail::as;

// ---- smoothness ---------------------------------------------------------------

SmoothnessFamily::SmoothnessFamily(int n) : n_(n) {
    if (n < 1) throw ContractError("smoothness: n must be >= 1");
}

void SmoothnessFamily::validate(const Structure& s) const {
    const auto& t = as<Truncation>(s, kind());
    if (t.level < 0 || t.level > n_)
        throw ContractError("smoothness: level " + std::to_string(t.level) + " outside [0, n]");
}

Vec SmoothnessFamily::project(const Structure& s, const Vec& theta) const {
    validate(s);
    check_length(theta);
    Vec out = theta;
    const int level = std::get<Truncation>(s).level;
    out.tail(n_ - level).setZero();
    return out;
}

int SmoothnessFamily::dim(const Structure& s) const {
    validate(s);
    return std::get<Truncation>(s).level;
}

double SmoothnessFamily::majorant(const Structure& s) const { return dim(s); }

Slicing SmoothnessFamily::slicing(const Structure& s) const { return {dim(s)}; }

std::vector<long> SmoothnessFamily::order_key(const Structure& s) const { return {dim(s)}; }

double SmoothnessFamily::count(const EnumerationCaps&) const { return n_ + 1; }

void SmoothnessFamily::for_each(const EnumerationCaps&,
                                const std::function<bool(const Structure&)>& fn) const {
    for (int level = 0; level <= n_; ++level)
        if (!fn(Truncation{level})) return;
}

Structure SmoothnessFamily::union_structure(const Structure& a, const Structure& b) const {
    validate(a);
    validate(b);
    return Truncation{std::max(std::get<Truncation>(a).level, std::get<Truncation>(b).level)};
}

std::optional<Structure> SmoothnessFamily::full_structure() const { return Truncation{n_}; }
Structure SmoothnessFamily::empty_structure() const { return Truncation{0}; }

nlohmann::json SmoothnessFamily::describe() const {
    return {{"kind", "smoothness"}, {"n", n_}};
}

// ---- sparsity -----------------------------------------------------------------

SparsityFamily::SparsityFamily(int n, SparsityMajorant variant) : n_(n), variant_(variant) {
    if (n < 1) throw ContractError("sparsity: n must be >= 1");
}

void SparsityFamily::validate(const Structure& s) const {
    detail::require_sorted_unique(as<SparseSet>(s, kind()).indices, 0, n_ - 1, "sparsity");
}

Vec SparsityFamily::project(const Structure& s, const Vec& theta) const {
    validate(s);
    check_length(theta);
    Vec out = Vec::Zero(n_);
    for (int i : std::get<SparseSet>(s).indices) out(i) = theta(i);
    return out;
}

int SparsityFamily::dim(const Structure& s) const {
    validate(s);
    return static_cast<int>(std::get<SparseSet>(s).indices.size());
}

double SparsityFamily::majorant_of_size(int k) const {
    if (variant_ == SparsityMajorant::RhoPrime)
        return std::max<double>(k, log_binomial(n_, k));
    return 2.0 * xlog_ratio(k, std::exp(1.0) * n_);
}

double SparsityFamily::majorant(const Structure& s) const { return majorant_of_size(dim(s)); }

Slicing SparsityFamily::slicing(const Structure& s) const { return {dim(s)}; }

std::vector<long> SparsityFamily::order_key(const Structure& s) const {
    return detail::size_lex_key(std::get<SparseSet>(s).indices);
}

double SparsityFamily::count(const EnumerationCaps& caps) const {
    return detail::count_subsets(n_, caps.max_cardinality);
}

void SparsityFamily::for_each(const EnumerationCaps& caps,
                              const std::function<bool(const Structure&)>& fn) const {
    detail::for_each_subset(n_, caps.max_cardinality,
                            [&](const std::vector<int>& idx) { return fn(SparseSet{idx}); });
}

Structure SparsityFamily::union_structure(const Structure& a, const Structure& b) const {
    validate(a);
    validate(b);
    return SparseSet{
        detail::sorted_union(std::get<SparseSet>(a).indices, std::get<SparseSet>(b).indices)};
}

std::optional<Structure> SparsityFamily::full_structure() const {
    std::vector<int> all(n_);
    std::iota(all.begin(), all.end(), 0);
    return SparseSet{all};
}

Structure SparsityFamily::empty_structure() const { return SparseSet{}; }

nlohmann::json SparsityFamily::describe() const {
    return {{"kind", "sparsity"},
            {"n", n_},
            {"majorant", variant_ == SparsityMajorant::Rho ? "rho" : "rho_prime"}};
}

// ---- leveled sparsity -----------------------------------------------------------

LeveledSparsityFamily::LeveledSparsityFamily(int max_level)
    : max_level_(max_level), n_((1 << (max_level + 1)) - 1) {
    if (max_level < 0 || max_level > 20) throw ContractError("leveled: max_level outside [0, 20]");
}

void LeveledSparsityFamily::validate(const Structure& s) const {
    const auto& t = as<LeveledSparse>(s, kind());
    if (static_cast<int>(t.levels.size()) > max_level_ + 1)
        throw ContractError("leveled: more levels than max_level + 1");
    if (!t.levels.empty() && t.levels.back().empty())
        throw ContractError("leveled: trailing empty levels must be trimmed");
    for (std::size_t j = 0; j < t.levels.size(); ++j)
        detail::require_sorted_unique(t.levels[j], 0, (1 << j) - 1, "leveled");
}

LeveledSparse LeveledSparsityFamily::from_flat(const std::vector<int>& flat) const {
    LeveledSparse out;
    for (int idx : flat) {
        if (idx < 0 || idx >= n_) throw ContractError("leveled: flat index out of range");
        int level = 0;
        while (offset(level + 1) <= idx) ++level;
        if (static_cast<int>(out.levels.size()) <= level) out.levels.resize(level + 1);
        out.levels[level].push_back(idx - offset(level));
    }
    for (auto& lv : out.levels) std::sort(lv.begin(), lv.end());
    while (!out.levels.empty() && out.levels.back().empty()) out.levels.pop_back();
    return out;
}

std::vector<int> LeveledSparsityFamily::to_flat(const LeveledSparse& s) const {
    std::vector<int> flat;
    for (std::size_t j = 0; j < s.levels.size(); ++j)
        for (int k : s.levels[j]) flat.push_back(offset(static_cast<int>(j)) + k);
    return flat;
}

Vec LeveledSparsityFamily::project(const Structure& s, const Vec& theta) const {
    validate(s);
    check_length(theta);
    Vec out = Vec::Zero(n_);
    for (int i : to_flat(std::get<LeveledSparse>(s))) out(i) = theta(i);
    return out;
}

int LeveledSparsityFamily::dim(const Structure& s) const {
    validate(s);
    return static_cast<int>(to_flat(std::get<LeveledSparse>(s)).size());
}

double LeveledSparsityFamily::level_majorant(int level, int k) {
    return 2.0 * xlog_ratio(k, std::exp(1.0) * std::ldexp(1.0, level));
}

double LeveledSparsityFamily::majorant(const Structure& s) const {
    validate(s);
    const auto& t = std::get<LeveledSparse>(s);
    double rho = 0;
    for (std::size_t j = 0; j < t.levels.size(); ++j)
        rho += level_majorant(static_cast<int>(j), static_cast<int>(t.levels[j].size()));
    return rho;
}

Slicing LeveledSparsityFamily::slicing(const Structure& s) const {
    validate(s);
    const auto& t = std::get<LeveledSparse>(s);
    Slicing out{static_cast<int>(t.levels.size()) - 1};
    for (const auto& lv : t.levels) out.push_back(static_cast<int>(lv.size()));
    return out;
}

std::vector<long> LeveledSparsityFamily::order_key(const Structure& s) const {
    return detail::size_lex_key(to_flat(std::get<LeveledSparse>(s)));
}

double LeveledSparsityFamily::count(const EnumerationCaps& caps) const {
    return detail::count_subsets(n_, caps.max_cardinality);
}

void LeveledSparsityFamily::for_each(const EnumerationCaps& caps,
                                     const std::function<bool(const Structure&)>& fn) const {
    detail::for_each_subset(n_, caps.max_cardinality,
                            [&](const std::vector<int>& idx) { return fn(from_flat(idx)); });
}

Structure LeveledSparsityFamily::union_structure(const Structure& a, const Structure& b) const {
    validate(a);
    validate(b);
    const auto& x = std::get<LeveledSparse>(a);
    const auto& y = std::get<LeveledSparse>(b);
    LeveledSparse out;
    out.levels.resize(std::max(x.levels.size(), y.levels.size()));
    for (std::size_t j = 0; j < out.levels.size(); ++j) {
        static const std::vector<int> none;
        out.levels[j] = detail::sorted_union(j < x.levels.size() ? x.levels[j] : none,
                                             j < y.levels.size() ? y.levels[j] : none);
    }
    return out;
}

std::optional<Structure> LeveledSparsityFamily::full_structure() const {
    std::vector<int> all(n_);
    std::iota(all.begin(), all.end(), 0);
    return from_flat(all);
}

Structure LeveledSparsityFamily::empty_structure() const { return LeveledSparse{}; }

nlohmann::json LeveledSparsityFamily::describe() const {
    return {{"kind", "leveled"}, {"max_level", max_level_}};
}

// ---- clustering -----------------------------------------------------------------

ClusteringFamily::ClusteringFamily(int n, int max_clusters) : n_(n), max_clusters_(max_clusters) {
    if (n < 1) throw ContractError("clustering: n must be >= 1");
    if (max_clusters < 0) throw ContractError("clustering: max_clusters must be >= 0");
}

void ClusteringFamily::validate(const Structure& s) const {
    const auto& t = as<MultiLevelPartition>(s, kind());
    detail::require_sorted_unique(t.free, 0, n_ - 1, "clustering");
    if (static_cast<int>(t.clusters.size()) > max_clusters_)
        throw ContractError("clustering: more than max_clusters clusters");
    std::vector<int> seen(n_, 0);
    for (int i : t.free) ++seen[i];
    for (std::size_t c = 0; c < t.clusters.size(); ++c) {
        const auto& cl = t.clusters[c];
        detail::require_sorted_unique(cl, 0, n_ - 1, "clustering");
        if (cl.size() < 2) throw ContractError("clustering: clusters must have size >= 2");
        if (c > 0 && cl.front() <= t.clusters[c - 1].front())
            throw ContractError("clustering: clusters must be ordered by first element");
        for (int i : cl) ++seen[i];
    }
    for (int i = 0; i < n_; ++i)
        if (seen[i] != 1)
            throw ContractError("clustering: parts must partition [0, n) (index " +
                                std::to_string(i) + ")");
}

Structure ClusteringFamily::canonicalize(const Structure& s) const {
    auto t = as<MultiLevelPartition>(s, kind());
    std::vector<std::vector<int>> clusters;
    for (auto cl : t.clusters) {
        std::sort(cl.begin(), cl.end());
        if (cl.size() == 1) t.free.push_back(cl.front());
        else if (cl.size() > 1) clusters.push_back(std::move(cl));
    }
    std::sort(t.free.begin(), t.free.end());
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    t.clusters = std::move(clusters);
    validate(t);
    return t;
}

Vec ClusteringFamily::project(const Structure& s, const Vec& theta) const {
    validate(s);
    check_length(theta);
    const auto& t = std::get<MultiLevelPartition>(s);
    Vec out = theta;
    for (const auto& cl : t.clusters) {
        double mean = 0;
        for (int i : cl) mean += theta(i);
        mean /= static_cast<double>(cl.size());
        for (int i : cl) out(i) = mean;
    }
    return out;
}

int ClusteringFamily::dim(const Structure& s) const {
    validate(s);
    const auto& t = std::get<MultiLevelPartition>(s);
    return std::min(n_, static_cast<int>(t.free.size() + t.clusters.size()));
}

double ClusteringFamily::majorant(const Structure& s) const {
    const int d = dim(s);
    const auto& t = std::get<MultiLevelPartition>(s);
    const double m = static_cast<double>(t.clusters.size());
    double log_multinomial = std::lgamma(n_ + 1.0) - std::lgamma(t.free.size() + 1.0);
    for (const auto& cl : t.clusters) log_multinomial -= std::lgamma(cl.size() + 1.0);
    return d + log_multinomial + log_binomial(n_ + m, m);
}

Slicing ClusteringFamily::slicing(const Structure& s) const {
    validate(s);
    const auto& t = std::get<MultiLevelPartition>(s);
    Slicing out{static_cast<int>(t.free.size())};
    for (const auto& cl : t.clusters) out.push_back(static_cast<int>(cl.size()));
    return out;
}

std::vector<long> ClusteringFamily::order_key(const Structure& s) const {
    const auto& t = std::get<MultiLevelPartition>(s);
    std::vector<long> key{static_cast<long>(t.free.size() + t.clusters.size()),
                          static_cast<long>(t.clusters.size())};
    std::vector<long> labels(n_, 0);
    for (std::size_t c = 0; c < t.clusters.size(); ++c)
        for (int i : t.clusters[c]) labels[i] = static_cast<long>(c) + 1;
    key.insert(key.end(), labels.begin(), labels.end());
    return key;
}

double ClusteringFamily::count(const EnumerationCaps& caps) const {
    const int cap = std::min(max_clusters_, caps.max_clusters < 0 ? max_clusters_ : caps.max_clusters);
    // a[k][m]: partitions of k elements into m blocks of size >= 2.
    std::vector<std::vector<double>> a(n_ + 1, std::vector<double>(cap + 1, 0.0));
    a[0][0] = 1;
    for (int k = 1; k <= n_; ++k)
        for (int m = 1; m <= cap; ++m)
            a[k][m] = m * a[k - 1][m] + (k >= 2 ? (k - 1) * a[k - 2][m - 1] : 0.0);
    double total = 0;
    for (int f = 0; f <= n_; ++f)
        for (int m = 0; m <= cap; ++m) total += std::exp(log_binomial(n_, f)) * a[n_ - f][m];
    return std::round(total);
}

void ClusteringFamily::for_each(const EnumerationCaps& caps,
                                const std::function<bool(const Structure&)>& fn) const {
    const int cap = std::min(max_clusters_, caps.max_clusters < 0 ? max_clusters_ : caps.max_clusters);
    std::vector<int> label(n_, -1);  // -1 free, otherwise cluster id
    std::vector<int> sizes;
    std::function<bool(int)> rec = [&](int pos) -> bool {
        if (pos == n_) {
            for (int sz : sizes)
                if (sz < 2) return true;
            MultiLevelPartition p;
            p.clusters.resize(sizes.size());
            for (int i = 0; i < n_; ++i) {
                if (label[i] < 0) p.free.push_back(i);
                else p.clusters[label[i]].push_back(i);
            }
            return fn(p);
        }
        // A singleton cluster that can no longer grow is not canonical; prune early.
        label[pos] = -1;
        if (!rec(pos + 1)) return false;
        for (std::size_t c = 0; c < sizes.size(); ++c) {
            label[pos] = static_cast<int>(c);
            ++sizes[c];
            const bool go = rec(pos + 1);
            --sizes[c];
            if (!go) return false;
        }
        if (static_cast<int>(sizes.size()) < cap && pos + 1 < n_) {
            label[pos] = static_cast<int>(sizes.size());
            sizes.push_back(1);
            const bool go = rec(pos + 1);
            sizes.pop_back();
            if (!go) return false;
        }
        return true;
    };
    rec(0);
}

Structure ClusteringFamily::union_structure(const Structure&, const Structure&) const {
    throw Unsupported("clustering: no union witness is known for condition (A3)");
}

std::optional<Structure> ClusteringFamily::full_structure() const {
    MultiLevelPartition p;
    p.free.resize(n_);
    std::iota(p.free.begin(), p.free.end(), 0);
    return p;
}

Structure ClusteringFamily::empty_structure() const {
    if (max_clusters_ == 0 || n_ < 2) return *full_structure();
    MultiLevelPartition p;
    p.clusters.emplace_back(n_);
    std::iota(p.clusters[0].begin(), p.clusters[0].end(), 0);
    return p;
}

nlohmann::json ClusteringFamily::describe() const {
    return {{"kind", "clustering"}, {"n", n_}, {"max_clusters", max_clusters_}};
}

}  // namespace projstruct
