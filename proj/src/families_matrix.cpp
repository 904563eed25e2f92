// Regression supports, banded symmetric matrices and biclusterings.
#include <algorithm>
#include <cmath>
#include <numeric>

#include "family_internal.hpp"

namespace projstruct {

using detail::as;

// ---- regression -----------------------------------------------------------------

RegressionFamily::RegressionFamily(Mat design) : design_(std::move(design)) {
    if (design_.rows() < 1 || design_.cols() < 1)
        throw ContractError("regression: design must be non-empty");
    for (Eigen::Index i = 0; i < design_.size(); ++i)
        if (!std::isfinite(design_.data()[i]))
            throw ContractError("regression: design has non-finite entries");
    rank_ = column_rank(design_);
    // I_r: the first r linearly independent columns, scanning in index order.
    full_.full_rank = true;
    int current = 0;
    for (int j = 0; j < num_predictors() && current < rank_; ++j) {
        auto trial = full_.indices;
        trial.push_back(j);
        const int r = column_rank(columns(trial));
        if (r > current) {
            full_.indices = std::move(trial);
            current = r;
        }
    }
}

Mat RegressionFamily::columns(const std::vector<int>& idx) const {
    Mat out(design_.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out.col(k) = design_.col(idx[k]);
    return out;
}

double RegressionFamily::small_majorant(int k) const {
    return 2.0 * xlog_ratio(k, std::exp(1.0) * num_predictors());
}

bool RegressionFamily::in_small_family(int k) const {
    return k >= 0 && k <= num_predictors() && small_majorant(k) <= rank_;
}

void RegressionFamily::validate(const Structure& s) const {
    const auto& t = as<RegressionSupport>(s, kind());
    if (t.full_rank) {
        if (t.indices != full_.indices)
            throw ContractError("regression: full-rank structure must carry the canonical I_r columns");
        return;
    }
    detail::require_sorted_unique(t.indices, 0, num_predictors() - 1, "regression");
    if (!in_small_family(static_cast<int>(t.indices.size())))
        throw ContractError("regression: support of size " + std::to_string(t.indices.size()) +
                            " violates 2|I|log(ep/|I|) <= rank");
}

Vec RegressionFamily::project(const Structure& s, const Vec& theta) const {
    validate(s);
    check_length(theta);
    const auto& idx = std::get<RegressionSupport>(s).indices;
    if (idx.empty()) return Vec::Zero(theta.size());
    return least_squares_project(columns(idx), theta);
}

int RegressionFamily::dim(const Structure& s) const {
    validate(s);
    const auto& t = std::get<RegressionSupport>(s);
    if (t.full_rank) return rank_;
    if (t.indices.empty()) return 0;
    return column_rank(columns(t.indices));
}

double RegressionFamily::majorant(const Structure& s) const {
    validate(s);
    const auto& t = std::get<RegressionSupport>(s);
    if (t.full_rank) return rank_;
    return small_majorant(static_cast<int>(t.indices.size()));
}

Slicing RegressionFamily::slicing(const Structure& s) const {
    validate(s);
    const auto& t = std::get<RegressionSupport>(s);
    return {static_cast<int>(t.indices.size()), t.full_rank ? 1 : 0};
}

std::vector<long> RegressionFamily::order_key(const Structure& s) const {
    const auto& t = std::get<RegressionSupport>(s);
    auto key = detail::size_lex_key(t.indices);
    key.insert(key.begin(), t.full_rank ? 1 : 0);
    return key;
}

double RegressionFamily::count(const EnumerationCaps& caps) const {
    double total = 1;  // I_r
    for (int k = 0; k <= num_predictors(); ++k) {
        if (!in_small_family(k)) break;
        if (caps.max_cardinality >= 0 && k > caps.max_cardinality) break;
        total += std::round(std::exp(log_binomial(num_predictors(), k)));
    }
    return total;
}

void RegressionFamily::for_each(const EnumerationCaps& caps,
                                const std::function<bool(const Structure&)>& fn) const {
    int top = 0;
    while (top + 1 <= num_predictors() && in_small_family(top + 1)) ++top;
    if (caps.max_cardinality >= 0) top = std::min(top, caps.max_cardinality);
    const bool go = detail::for_each_subset(num_predictors(), top, [&](const std::vector<int>& idx) {
        return fn(RegressionSupport{idx, false});
    });
    if (go) fn(full_);
}

Structure RegressionFamily::union_structure(const Structure& a, const Structure& b) const {
    validate(a);
    validate(b);
    const auto& x = std::get<RegressionSupport>(a);
    const auto& y = std::get<RegressionSupport>(b);
    if (x.full_rank || y.full_rank) return full_;
    auto idx = detail::sorted_union(x.indices, y.indices);
    if (!in_small_family(static_cast<int>(idx.size()))) return full_;
    return RegressionSupport{std::move(idx), false};
}

std::optional<Structure> RegressionFamily::full_structure() const {
    if (rank_ == ambient_dim()) return full_;
    return std::nullopt;
}

Structure RegressionFamily::empty_structure() const { return RegressionSupport{{}, false}; }

nlohmann::json RegressionFamily::describe() const {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < design_.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < design_.cols(); ++k) row.push_back(design_(i, k));
        rows.push_back(std::move(row));
    }
    return {{"kind", "regression"}, {"design", rows}};
}

// ---- band -----------------------------------------------------------------------

BandFamily::BandFamily(int p) : p_(p) {
    if (p < 1) throw ContractError("band: p must be >= 1");
}

void BandFamily::validate(const Structure& s) const {
    const auto& t = as<Band>(s, kind());
    if (t.width < 0 || t.width > p_ - 1)
        throw ContractError("band: width " + std::to_string(t.width) + " outside [0, p-1]");
}

Vec BandFamily::project(const Structure& s, const Vec& theta) const {
    validate(s);
    check_length(theta);
    const int w = std::get<Band>(s).width;
    Vec out = Vec::Zero(theta.size());
    for (int i = 0; i < p_; ++i)
        for (int j = std::max(0, i - w); j <= std::min(p_ - 1, i + w); ++j)
            out(i * p_ + j) = 0.5 * (theta(i * p_ + j) + theta(j * p_ + i));
    return out;
}

int BandFamily::dim(const Structure& s) const {
    validate(s);
    const int w = std::get<Band>(s).width;
    return p_ + w * p_ - w * (w + 1) / 2;
}

double BandFamily::majorant(const Structure& s) const { return dim(s); }

Slicing BandFamily::slicing(const Structure& s) const {
    validate(s);
    return {std::get<Band>(s).width};
}

std::vector<long> BandFamily::order_key(const Structure& s) const {
    return {std::get<Band>(s).width};
}

double BandFamily::count(const EnumerationCaps&) const { return p_; }

void BandFamily::for_each(const EnumerationCaps&,
                          const std::function<bool(const Structure&)>& fn) const {
    for (int w = 0; w < p_; ++w)
        if (!fn(Band{w})) return;
}

Structure BandFamily::union_structure(const Structure& a, const Structure& b) const {
    validate(a);
    validate(b);
    return Band{std::max(std::get<Band>(a).width, std::get<Band>(b).width)};
}

// The widest band is the full symmetric space, not all of R^{p x p}.
std::optional<Structure> BandFamily::full_structure() const {
    if (p_ == 1) return Band{0};
    return std::nullopt;
}

Structure BandFamily::empty_structure() const { return Band{0}; }

nlohmann::json BandFamily::describe() const { return {{"kind", "band"}, {"p", p_}}; }

// ---- bicluster ----------------------------------------------------------------------

BiclusterFamily::BiclusterFamily(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) throw ContractError("bicluster: dimensions must be >= 1");
}

namespace {

int num_blocks(const std::vector<int>& labels) {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

void require_rgs(const std::vector<int>& labels, int n, const char* axis) {
    if (static_cast<int>(labels.size()) != n)
        throw ContractError(std::string("bicluster: ") + axis + " labels have wrong length");
    int next = 0;
    for (int l : labels) {
        if (l < 0 || l > next)
            throw ContractError(std::string("bicluster: ") + axis +
                                " labels must be a restricted-growth string");
        if (l == next) ++next;
    }
}

std::vector<int> refine(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> codes(a.size());
    const int base = static_cast<int>(a.size()) + 1;
    for (std::size_t i = 0; i < a.size(); ++i) codes[i] = a[i] * base + b[i];
    return canonical_labels(codes);
}

std::vector<int> identity_labels(int n) {
    std::vector<int> out(n);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

}  // namespace

void BiclusterFamily::validate(const Structure& s) const {
    const auto& t = as<Bicluster>(s, kind());
    require_rgs(t.rows, rows_, "row");
    require_rgs(t.cols, cols_, "column");
}

Structure BiclusterFamily::canonicalize(const Structure& s) const {
    const auto& t = as<Bicluster>(s, kind());
    Bicluster out{canonical_labels(t.rows), canonical_labels(t.cols)};
    validate(out);
    return out;
}

Vec BiclusterFamily::project(const Structure& s, const Vec& theta) const {
    validate(s);
    check_length(theta);
    const auto& t = std::get<Bicluster>(s);
    const int s1 = num_blocks(t.rows), s2 = num_blocks(t.cols);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(s1, s2);
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(s1, s2);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) {
            sums(t.rows[i], t.cols[j]) += theta(i * cols_ + j);
            counts(t.rows[i], t.cols[j]) += 1;
        }
    Vec out(theta.size());
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            out(i * cols_ + j) = sums(t.rows[i], t.cols[j]) / counts(t.rows[i], t.cols[j]);
    return out;
}

int BiclusterFamily::dim(const Structure& s) const {
    validate(s);
    const auto& t = std::get<Bicluster>(s);
    return num_blocks(t.rows) * num_blocks(t.cols);
}

double BiclusterFamily::majorant_of_blocks(int s1, int s2) const {
    if (s1 < 1 || s1 > rows_ || s2 < 1 || s2 > cols_)
        throw ContractError("bicluster: block counts out of range");
    const double n1 = rows_, n2 = cols_;
    if (s1 < rows_ && s2 < cols_)
        return double(s1) * s2 + n1 * std::log(double(s1)) + n2 * std::log(double(s2));
    if (s1 < rows_) return s1 * n2 + n1 * std::log(double(s1));
    if (s2 < cols_) return n1 * s2 + n2 * std::log(double(s2));
    return n1 * n2;
}

double BiclusterFamily::majorant(const Structure& s) const {
    validate(s);
    const auto& t = std::get<Bicluster>(s);
    return majorant_of_blocks(num_blocks(t.rows), num_blocks(t.cols));
}

Slicing BiclusterFamily::slicing(const Structure& s) const {
    validate(s);
    const auto& t = std::get<Bicluster>(s);
    return {num_blocks(t.rows), num_blocks(t.cols)};
}

std::vector<long> BiclusterFamily::order_key(const Structure& s) const {
    const auto& t = std::get<Bicluster>(s);
    std::vector<long> key{static_cast<long>(num_blocks(t.rows)) * num_blocks(t.cols)};
    key.insert(key.end(), t.rows.begin(), t.rows.end());
    key.insert(key.end(), t.cols.begin(), t.cols.end());
    return key;
}

double BiclusterFamily::count(const EnumerationCaps& caps) const {
    return count_set_partitions(rows_, caps.max_blocks) * count_set_partitions(cols_, caps.max_blocks);
}

void BiclusterFamily::for_each(const EnumerationCaps& caps,
                               const std::function<bool(const Structure&)>& fn) const {
    std::vector<std::vector<int>> col_parts;
    for_each_set_partition(cols_, caps.max_blocks, [&](const std::vector<int>& c) {
        col_parts.push_back(c);
        return true;
    });
    for_each_set_partition(rows_, caps.max_blocks, [&](const std::vector<int>& r) {
        for (const auto& c : col_parts)
            if (!fn(Bicluster{r, c})) return false;
        return true;
    });
}

Structure BiclusterFamily::union_structure(const Structure& a, const Structure& b) const {
    validate(a);
    validate(b);
    const auto& x = std::get<Bicluster>(a);
    const auto& y = std::get<Bicluster>(b);
    // Any pair of partitions refining both inputs on each axis contains both
    // subspaces; the identity partition refines everything. Take the cheapest.
    const std::vector<int> rr = refine(x.rows, y.rows), ri = identity_labels(rows_);
    const std::vector<int> cr = refine(x.cols, y.cols), ci = identity_labels(cols_);
    const Bicluster candidates[] = {{rr, cr}, {rr, ci}, {ri, cr}, {ri, ci}};
    const Bicluster* best = &candidates[0];
    for (const auto& c : candidates) {
        const double rc = majorant(c), rb = majorant(*best);
        if (rc < rb || (rc == rb && order_key(c) < order_key(*best))) best = &c;
    }
    return *best;
}

std::optional<Structure> BiclusterFamily::full_structure() const {
    return Bicluster{identity_labels(rows_), identity_labels(cols_)};
}

Structure BiclusterFamily::empty_structure() const {
    return Bicluster{std::vector<int>(rows_, 0), std::vector<int>(cols_, 0)};
}

nlohmann::json BiclusterFamily::describe() const {
    return {{"kind", "bicluster"}, {"rows", rows_}, {"cols", cols_}};
}

}  // namespace projstruct
