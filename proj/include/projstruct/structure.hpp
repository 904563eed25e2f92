#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace projstruct {

// All index values are 0-based. Index arrays are kept sorted and duplicate-free.

// Smoothness: coordinates 0..level-1 are free, the tail is zero.
struct Truncation {
    int level = 0;
    bool operator==(const Truncation&) const = default;
};

// Sparsity: coordinates outside `indices` are zero.
struct SparseSet {
    std::vector<int> indices;
    bool operator==(const SparseSet&) const = default;
};

// Wavelet leveled sparsity: levels[j] lists the active positions k in [0, 2^j).
// Trailing empty levels are trimmed, so the highest stored level is j0.
struct LeveledSparse {
    std::vector<std::vector<int>> levels;
    bool operator==(const LeveledSparse&) const = default;
};

// Multi-level clustering: `free` coordinates are unrestricted, each cluster
// (size >= 2) shares one common value. Clusters are ordered by first element.
struct MultiLevelPartition {
    std::vector<int> free;
    std::vector<std::vector<int>> clusters;
    bool operator==(const MultiLevelPartition&) const = default;
};

// Piecewise-constant segmentation: break b in [0, n-2] allows x[b] != x[b+1].
struct JumpSet {
    std::vector<int> breaks;
    bool operator==(const JumpSet&) const = default;
};

// Continuous piecewise-linear segmentation: knot i in [1, n-2] allows a slope change at i.
struct KnotSet {
    std::vector<int> knots;
    bool operator==(const KnotSet&) const = default;
};

// Regression support over design columns; full_rank marks the distinguished
// structure I_r (indices then hold the r canonical independent columns).
struct RegressionSupport {
    std::vector<int> indices;
    bool full_rank = false;
    bool operator==(const RegressionSupport&) const = default;
};

// Symmetric band of half-width `width` in [0, p-1].
struct Band {
    int width = 0;
    bool operator==(const Band&) const = default;
};

// Row and column partitions as restricted-growth label strings
// (labels[0] == 0, each new label is max-so-far + 1).
struct Bicluster {
    std::vector<int> rows;
    std::vector<int> cols;
    bool operator==(const Bicluster&) const = default;
};

using Structure = std::variant<Truncation, SparseSet, LeveledSparse, MultiLevelPartition, JumpSet,
                               KnotSet, RegressionSupport, Band, Bicluster>;

// Family tag used in the JSON encoding ("truncation", "sparse", ...).
std::string structure_tag(const Structure& s);

nlohmann::json to_json(const Structure& s);
Structure structure_from_json(const nlohmann::json& j);

// Compact single-line form, e.g. sparse{0,2}.
std::string to_string(const Structure& s);

// Relabel a label vector into restricted-growth form.
std::vector<int> canonical_labels(const std::vector<int>& labels);

}  // namespace projstruct
