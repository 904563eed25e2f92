#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "projstruct/linalg.hpp"
#include "projstruct/structure.hpp"

namespace projstruct {

enum class FamilyKind {
    Smoothness,
    Sparsity,
    Leveled,
    Clustering,
    Jump,
    Knot,
    Regression,
    Band,
    Bicluster,
};

std::string to_string(FamilyKind k);

// Limits applied before any exhaustive enumeration.
struct EnumerationCaps {
    double max_count = 1 << 20;
    int max_cardinality = -1;  // sparse / leveled / jump / knot / regression set size; -1 = none
    int max_clusters = 3;      // clustering: number of clusters of size >= 2
    int max_blocks = -1;       // bicluster: blocks per axis; -1 = none
};

using Slicing = std::vector<int>;

// A structure family {L_I, I in 𝓘}: closed-form projections, dimensions,
// complexity majorants rho(I) >= dim(L_I), slicing, enumeration and the
// union witness I'(I0, I1) with L_I0 ∪ L_I1 ⊆ L_I' and rho(I') <= rho(I0) + rho(I1).
//
// Structures are canonical: two valid structures are equal iff their
// subspaces are equal. canonicalize() maps redundant encodings onto that form.
class Family {
public:
    virtual ~Family() = default;

    virtual FamilyKind kind() const = 0;
    virtual int ambient_dim() const = 0;

    // Throws ContractError unless `s` is a canonical structure of this family.
    virtual void validate(const Structure& s) const = 0;
    virtual Structure canonicalize(const Structure& s) const { return s; }

    virtual Vec project(const Structure& s, const Vec& theta) const = 0;
    virtual int dim(const Structure& s) const = 0;
    virtual double majorant(const Structure& s) const = 0;
    virtual Slicing slicing(const Structure& s) const = 0;

    // Lexicographic key defining the canonical order (size first).
    virtual std::vector<long> order_key(const Structure& s) const = 0;

    // Exact number of structures the enumeration would visit under `caps`.
    virtual double count(const EnumerationCaps& caps) const = 0;
    // Visits structures until `fn` returns false. No cap check; see visit_structures().
    virtual void for_each(const EnumerationCaps& caps,
                          const std::function<bool(const Structure&)>& fn) const = 0;

    // Union witness for condition (A3). Throws Unsupported where none is known.
    virtual Structure union_structure(const Structure& a, const Structure& b) const = 0;
    virtual bool supports_union() const { return true; }

    // Structure whose subspace is the whole ambient space, if the family has one.
    virtual std::optional<Structure> full_structure() const = 0;
    // A structure with the smallest majorant.
    virtual Structure empty_structure() const = 0;

    virtual nlohmann::json describe() const = 0;

    // ||theta - P_I theta||^2
    double residual_sq(const Structure& s, const Vec& theta) const;
    // Ordering used for tie-breaking: canonical key comparison.
    bool canonical_less(const Structure& a, const Structure& b) const;

protected:
    void check_length(const Vec& theta) const;
};

using FamilyPtr = std::shared_ptr<const Family>;

// Checks the cap, then returns every structure in canonical order.
std::vector<Structure> enumerate(const Family& f, const EnumerationCaps& caps = {});
// Checks the cap, then streams structures (generation order) to `fn`.
void visit_structures(const Family& f, const EnumerationCaps& caps,
                      const std::function<bool(const Structure&)>& fn);

// ---- concrete families -------------------------------------------------------

// Truncation levels I in [n]_0; rho(I) = I. Also used for graph smoothness once
// the signal is expressed in a Laplacian eigenbasis (see ingestion).
class SmoothnessFamily final : public Family {
public:
    explicit SmoothnessFamily(int n);
    FamilyKind kind() const override { return FamilyKind::Smoothness; }
    int ambient_dim() const override { return n_; }
    void validate(const Structure& s) const override;
    Vec project(const Structure& s, const Vec& theta) const override;
    int dim(const Structure& s) const override;
    double majorant(const Structure& s) const override;
    Slicing slicing(const Structure& s) const override;
    std::vector<long> order_key(const Structure& s) const override;
    double count(const EnumerationCaps& caps) const override;
    void for_each(const EnumerationCaps& caps,
                  const std::function<bool(const Structure&)>& fn) const override;
    Structure union_structure(const Structure& a, const Structure& b) const override;
    std::optional<Structure> full_structure() const override;
    Structure empty_structure() const override;
    nlohmann::json describe() const override;

private:
    int n_;
};

enum class SparsityMajorant { Rho, RhoPrime };

// Subsets I of [n]. rho(I) = 2|I| log(en/|I|), or rho'(I) = max{|I|, log C(n,|I|)}.
class SparsityFamily final : public Family {
public:
    SparsityFamily(int n, SparsityMajorant variant = SparsityMajorant::Rho);
    FamilyKind kind() const override { return FamilyKind::Sparsity; }
    int ambient_dim() const override { return n_; }
    SparsityMajorant variant() const { return variant_; }
    void validate(const Structure& s) const override;
    Vec project(const Structure& s, const Vec& theta) const override;
    int dim(const Structure& s) const override;
    double majorant(const Structure& s) const override;
    double majorant_of_size(int k) const;
    Slicing slicing(const Structure& s) const override;
    std::vector<long> order_key(const Structure& s) const override;
    double count(const EnumerationCaps& caps) const override;
    void for_each(const EnumerationCaps& caps,
                  const std::function<bool(const Structure&)>& fn) const override;
    Structure union_structure(const Structure& a, const Structure& b) const override;
    std::optional<Structure> full_structure() const override;
    Structure empty_structure() const override;
    nlohmann::json describe() const override;

private:
    int n_;
    SparsityMajorant variant_;
};

// Wavelet coefficients theta_{jk}, levels j = 0..max_level, k in [0, 2^j), stored
// level by level: (j, k) -> 2^j - 1 + k. rho(I) = 2 sum_j |I_j| log(e 2^j / |I_j|).
class LeveledSparsityFamily final : public Family {
public:
    explicit LeveledSparsityFamily(int max_level);
    FamilyKind kind() const override { return FamilyKind::Leveled; }
    int ambient_dim() const override { return n_; }
    int max_level() const { return max_level_; }
    static int offset(int level) { return (1 << level) - 1; }
    void validate(const Structure& s) const override;
    Vec project(const Structure& s, const Vec& theta) const override;
    int dim(const Structure& s) const override;
    double majorant(const Structure& s) const override;
    static double level_majorant(int level, int k);
    Slicing slicing(const Structure& s) const override;
    std::vector<long> order_key(const Structure& s) const override;
    double count(const EnumerationCaps& caps) const override;
    void for_each(const EnumerationCaps& caps,
                  const std::function<bool(const Structure&)>& fn) const override;
    Structure union_structure(const Structure& a, const Structure& b) const override;
    std::optional<Structure> full_structure() const override;
    Structure empty_structure() const override;
    nlohmann::json describe() const override;

    // Flat index set <-> per-level structure.
    LeveledSparse from_flat(const std::vector<int>& flat) const;
    std::vector<int> to_flat(const LeveledSparse& s) const;

private:
    int max_level_;
    int n_;
};

// Free coordinates I0 plus m clusters (each of size >= 2) sharing a common value.
// rho(I) = (|I0| + m) ∧ n + log multinomial(n; |I0|, |I1|, ..., |Im|) + log C(n+m, m).
// No union witness is known for this family.
class ClusteringFamily final : public Family {
public:
    ClusteringFamily(int n, int max_clusters);
    FamilyKind kind() const override { return FamilyKind::Clustering; }
    int ambient_dim() const override { return n_; }
    int max_clusters() const { return max_clusters_; }
    void validate(const Structure& s) const override;
    Structure canonicalize(const Structure& s) const override;
    Vec project(const Structure& s, const Vec& theta) const override;
    int dim(const Structure& s) const override;
    double majorant(const Structure& s) const override;
    Slicing slicing(const Structure& s) const override;
    std::vector<long> order_key(const Structure& s) const override;
    double count(const EnumerationCaps& caps) const override;
    void for_each(const EnumerationCaps& caps,
                  const std::function<bool(const Structure&)>& fn) const override;
    Structure union_structure(const Structure& a, const Structure& b) const override;
    bool supports_union() const override { return false; }
    std::optional<Structure> full_structure() const override;
    Structure empty_structure() const override;
    nlohmann::json describe() const override;

private:
    int n_;
    int max_clusters_;
};

// Piecewise-constant sequences with jumps only at the breaks (isotonic / unimodal).
// dim = |I| + 1, rho(I) = 1 + 2|I| log(en/|I|).
class JumpFamily final : public Family {
public:
    explicit JumpFamily(int n);
    FamilyKind kind() const override { return FamilyKind::Jump; }
    int ambient_dim() const override { return n_; }
    void validate(const Structure& s) const override;
    Vec project(const Structure& s, const Vec& theta) const override;
    int dim(const Structure& s) const override;
    double majorant(const Structure& s) const override;
    double majorant_of_size(int k) const;
    Slicing slicing(const Structure& s) const override;
    std::vector<long> order_key(const Structure& s) const override;
    double count(const EnumerationCaps& caps) const override;
    void for_each(const EnumerationCaps& caps,
                  const std::function<bool(const Structure&)>& fn) const override;
    Structure union_structure(const Structure& a, const Structure& b) const override;
    std::optional<Structure> full_structure() const override;
    Structure empty_structure() const override;
    nlohmann::json describe() const override;

private:
    int n_;
};

// Continuous piecewise-linear sequences with slope changes only at the knots (convex).
// dim = |I| + 2, rho(I) = max{1 + 3|I| log(en/|I|), |I| + 2}.
class KnotFamily final : public Family {
public:
    explicit KnotFamily(int n);
    FamilyKind kind() const override { return FamilyKind::Knot; }
    int ambient_dim() const override { return n_; }
    void validate(const Structure& s) const override;
    Vec project(const Structure& s, const Vec& theta) const override;
    int dim(const Structure& s) const override;
    double majorant(const Structure& s) const override;
    double majorant_of_size(int k) const;
    Slicing slicing(const Structure& s) const override;
    std::vector<long> order_key(const Structure& s) const override;
    double count(const EnumerationCaps& caps) const override;
    void for_each(const EnumerationCaps& caps,
                  const std::function<bool(const Structure&)>& fn) const override;
    Structure union_structure(const Structure& a, const Structure& b) const override;
    std::optional<Structure> full_structure() const override;
    Structure empty_structure() const override;
    nlohmann::json describe() const override;

    // Hat-function basis (n x (|I|+2)) with nodes 0, knots..., n-1.
    Mat hat_basis(const KnotSet& s) const;

private:
    int n_;
};

// Column supports of a design X (n x p) with rank r: 𝓘 = 𝓘1 ∪ {I_r},
// 𝓘1 = {I : 2|I| log(ep/|I|) <= r}. rho(I) = 2|I| log(ep/|I|) on 𝓘1 and r at I_r.
class RegressionFamily final : public Family {
public:
    explicit RegressionFamily(Mat design);
    FamilyKind kind() const override { return FamilyKind::Regression; }
    int ambient_dim() const override { return static_cast<int>(design_.rows()); }
    int num_predictors() const { return static_cast<int>(design_.cols()); }
    int rank() const { return rank_; }
    const Mat& design() const { return design_; }
    const RegressionSupport& full_rank_structure() const { return full_; }
    bool in_small_family(int k) const;
    double small_majorant(int k) const;
    Mat columns(const std::vector<int>& idx) const;
    void validate(const Structure& s) const override;
    Vec project(const Structure& s, const Vec& theta) const override;
    int dim(const Structure& s) const override;
    double majorant(const Structure& s) const override;
    Slicing slicing(const Structure& s) const override;
    std::vector<long> order_key(const Structure& s) const override;
    double count(const EnumerationCaps& caps) const override;
    void for_each(const EnumerationCaps& caps,
                  const std::function<bool(const Structure&)>& fn) const override;
    Structure union_structure(const Structure& a, const Structure& b) const override;
    std::optional<Structure> full_structure() const override;
    Structure empty_structure() const override;
    nlohmann::json describe() const override;

private:
    Mat design_;
    int rank_;
    RegressionSupport full_;
};

// Symmetric banded p x p matrices (vectorized row-major): entries with |i-j| > I vanish.
// dim = rho = p + I(p - (I+1)/2), I in [0, p-1].
class BandFamily final : public Family {
public:
    explicit BandFamily(int p);
    FamilyKind kind() const override { return FamilyKind::Band; }
    int ambient_dim() const override { return p_ * p_; }
    int p() const { return p_; }
    void validate(const Structure& s) const override;
    Vec project(const Structure& s, const Vec& theta) const override;
    int dim(const Structure& s) const override;
    double majorant(const Structure& s) const override;
    Slicing slicing(const Structure& s) const override;
    std::vector<long> order_key(const Structure& s) const override;
    double count(const EnumerationCaps& caps) const override;
    void for_each(const EnumerationCaps& caps,
                  const std::function<bool(const Structure&)>& fn) const override;
    Structure union_structure(const Structure& a, const Structure& b) const override;
    std::optional<Structure> full_structure() const override;
    Structure empty_structure() const override;
    nlohmann::json describe() const override;

private:
    int p_;
};

// Block-constant n1 x n2 matrices (vectorized row-major) for a row partition
// and a column partition. rho is the four-branch elbow majorant in the
// numbers (s1, s2) of row and column blocks.
class BiclusterFamily final : public Family {
public:
    BiclusterFamily(int rows, int cols);
    FamilyKind kind() const override { return FamilyKind::Bicluster; }
    int ambient_dim() const override { return rows_ * cols_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    void validate(const Structure& s) const override;
    Structure canonicalize(const Structure& s) const override;
    Vec project(const Structure& s, const Vec& theta) const override;
    int dim(const Structure& s) const override;
    double majorant(const Structure& s) const override;
    double majorant_of_blocks(int s1, int s2) const;
    Slicing slicing(const Structure& s) const override;
    std::vector<long> order_key(const Structure& s) const override;
    double count(const EnumerationCaps& caps) const override;
    void for_each(const EnumerationCaps& caps,
                  const std::function<bool(const Structure&)>& fn) const override;
    Structure union_structure(const Structure& a, const Structure& b) const override;
    std::optional<Structure> full_structure() const override;
    Structure empty_structure() const override;
    nlohmann::json describe() const override;

private:
    int rows_;
    int cols_;
};

// Builds a family from its JSON description, e.g. {"kind": "sparsity", "n": 10}.
FamilyPtr family_from_json(const nlohmann::json& j);

// log C(n, k) and 0 log(a/0) = 0 helpers shared by majorants and tests.
double log_binomial(double n, double k);
double xlog_ratio(double k, double a);  // k log(a / k), 0 when k == 0

// Restricted-growth strings of length n with at most max_blocks blocks, in
// lexicographic order. Returns false from fn to stop early.
void for_each_set_partition(int n, int max_blocks,
                            const std::function<bool(const std::vector<int>&)>& fn);
double count_set_partitions(int n, int max_blocks);

}  // namespace projstruct
