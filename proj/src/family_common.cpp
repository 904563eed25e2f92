#include <algorithm>
#include <cmath>
#include <string>

#include "family_internal.hpp"
#include "projstruct/errors.hpp"
#include "projstruct/family.hpp"

namespace projstruct {

std::string to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::Smoothness: return "smoothness";
        case FamilyKind::Sparsity: return "sparsity";
        case FamilyKind::Leveled: return "leveled";
        case FamilyKind::Clustering: return "clustering";
        case FamilyKind::Jump: return "jump";
        case FamilyKind::Knot: return "knot";
        case FamilyKind::Regression: return "regression";
        case FamilyKind::Band: return "band";
        case FamilyKind::Bicluster: return "bicluster";
    }
    return "unknown";
}

double log_binomial(double n, double k) {
    if (k < 0 || k > n) return -INFINITY;
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

double xlog_ratio(double k, double a) {
    if (k == 0) return 0.0;
    return k * std::log(a / k);
}

double Family::residual_sq(const Structure& s, const Vec& theta) const {
    return (theta - project(s, theta)).squaredNorm();
}

bool Family::canonical_less(const Structure& a, const Structure& b) const {
    return order_key(a) < order_key(b);
}

void Family::check_length(const Vec& theta) const {
    if (theta.size() != ambient_dim()) {
        throw ContractError(to_string(kind()) + ": vector length " + std::to_string(theta.size()) +
                            " does not match ambient dimension " + std::to_string(ambient_dim()));
    }
}

void visit_structures(const Family& f, const EnumerationCaps& caps,
                      const std::function<bool(const Structure&)>& fn) {
    const double projected = f.count(caps);
    if (projected > caps.max_count) {
        throw CapExceeded(to_string(f.kind()) + ": enumeration exceeds cap of " +
                              std::to_string(static_cast<long long>(caps.max_count)),
                          projected);
    }
    f.for_each(caps, fn);
}

std::vector<Structure> enumerate(const Family& f, const EnumerationCaps& caps) {
    std::vector<std::pair<std::vector<long>, Structure>> keyed;
    visit_structures(f, caps, [&](const Structure& s) {
        keyed.emplace_back(f.order_key(s), s);
        return true;
    });
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Structure> out;
    out.reserve(keyed.size());
    for (auto& [key, s] : keyed) out.push_back(std::move(s));
    return out;
}

namespace detail {

double count_subsets(int m, int max_card) {
    const int top = max_card < 0 ? m : std::min(m, max_card);
    double total = 0;
    for (int k = 0; k <= top; ++k) total += std::exp(log_binomial(m, k));
    return std::round(total);
}

bool for_each_subset(int m, int max_card, const std::function<bool(const std::vector<int>&)>& fn) {
    const int top = max_card < 0 ? m : std::min(m, max_card);
    std::vector<int> idx;
    for (int k = 0; k <= top; ++k) {
        idx.resize(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            if (!fn(idx)) return false;
            int i = k - 1;
            while (i >= 0 && idx[i] == m - k + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return true;
}

void require_sorted_unique(const std::vector<int>& v, int lo, int hi, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < lo || v[i] > hi)
            throw ContractError(std::string(what) + ": index " + std::to_string(v[i]) +
                                " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                "]");
        if (i > 0 && v[i] <= v[i - 1])
            throw ContractError(std::string(what) + ": indices must be sorted and distinct");
    }
}

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<long> size_lex_key(const std::vector<int>& v) {
    std::vector<long> key;
    key.reserve(v.size() + 1);
    key.push_back(static_cast<long>(v.size()));
    key.insert(key.end(), v.begin(), v.end());
    return key;
}

}  // namespace detail

void for_each_set_partition(int n, int max_blocks,
                            const std::function<bool(const std::vector<int>&)>& fn) {
    if (n <= 0) return;
    const int cap = max_blocks < 0 ? n : max_blocks;
    std::vector<int> labels(n, 0);
    // Depth-first over restricted-growth strings.
    std::function<bool(int, int)> rec = [&](int pos, int used) -> bool {
        if (pos == n) return fn(labels);
        for (int l = 0; l <= used && l < cap; ++l) {
            labels[pos] = l;
            if (!rec(pos + 1, std::max(used, l + 1))) return false;
        }
        return true;
    };
    labels[0] = 0;
    rec(1, 1);
}

double count_set_partitions(int n, int max_blocks) {
    // Stirling numbers of the second kind, summed over k <= max_blocks.
    const int cap = max_blocks < 0 ? n : std::min(n, max_blocks);
    std::vector<std::vector<double>> s(n + 1, std::vector<double>(n + 1, 0.0));
    s[0][0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= i; ++k) s[i][k] = k * s[i - 1][k] + s[i - 1][k - 1];
    double total = 0;
    for (int k = 1; k <= cap; ++k) total += s[n][k];
    return total;
}

FamilyPtr family_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("family: missing 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    auto need = [&](const char* field) {
        if (!j.contains(field) || !j.at(field).is_number_integer())
            throw ConfigError("family '" + kind + "': missing integer field '" + field + "'");
        return j.at(field).get<int>();
    };
    if (kind == "smoothness") return std::make_shared<SmoothnessFamily>(need("n"));
    if (kind == "sparsity") {
        auto variant = SparsityMajorant::Rho;
        if (j.contains("majorant")) {
            const auto m = j.at("majorant").get<std::string>();
            if (m == "rho_prime") variant = SparsityMajorant::RhoPrime;
            else if (m != "rho") throw ConfigError("family 'sparsity': unknown majorant '" + m + "'");
        }
        return std::make_shared<SparsityFamily>(need("n"), variant);
    }
    if (kind == "leveled") return std::make_shared<LeveledSparsityFamily>(need("max_level"));
    if (kind == "clustering")
        return std::make_shared<ClusteringFamily>(need("n"), need("max_clusters"));
    if (kind == "jump") return std::make_shared<JumpFamily>(need("n"));
    if (kind == "knot") return std::make_shared<KnotFamily>(need("n"));
    if (kind == "band") return std::make_shared<BandFamily>(need("p"));
    if (kind == "bicluster") return std::make_shared<BiclusterFamily>(need("rows"), need("cols"));
    if (kind == "regression") {
        if (!j.contains("design") || !j.at("design").is_array() || j.at("design").empty())
            throw ConfigError("family 'regression': missing 'design' matrix");
        const auto& rows = j.at("design");
        const auto p = rows.at(0).size();
        Mat x(rows.size(), p);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != p) throw ConfigError("family 'regression': ragged design rows");
            for (std::size_t k = 0; k < p; ++k) x(i, k) = rows[i][k].get<double>();
        }
        return std::make_shared<RegressionFamily>(std::move(x));
    }
    throw ConfigError("family: unknown kind '" + kind + "'");
}

}  // namespace projstruct
