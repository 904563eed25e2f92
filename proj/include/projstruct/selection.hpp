#pragma once

#include <cstdint>
#include <vector>

#include "projstruct/family.hpp"

namespace projstruct {

// pen(I) = 2 kappa rho(I), plus dim(L_I) when add_dim is set.
struct Penalty {
    double sigma = 1.0;
    double kappa = 1.0;
    bool add_dim = false;

    double of(const Family& f, const Structure& s) const;
};

enum class SelectMode { Exact, Heuristic };

struct SelectOptions {
    EnumerationCaps caps{};
    int regression_exhaustive_max_p = 18;
    int clustering_exact_max_n = 12;
    int bicluster_restarts = 10;
    int bicluster_max_blocks = 8;  // heuristic search range per axis (full partitions always tried)
    std::uint64_t seed = 0x5eed;
};

struct Selection {
    Structure structure;
    double objective = 0.0;
    bool exact = true;
    long visited = 0;  // candidates evaluated
    // Objective after each accepted step of the winning local search (heuristics only).
    std::vector<double> trace;
};

// ||y - P_I y||^2 + sigma^2 pen(I)
double penalized_objective(const Family& f, const Structure& s, const Vec& y, const Penalty& pen);

// Tie rule: objectives within relative 1e-12 are equal; then smaller rho;
// then canonical order. Returns true if (obj_a, a) beats (obj_b, b).
bool better_candidate(const Family& f, double obj_a, const Structure& a, double obj_b,
                      const Structure& b);

Selection select_penalized(const Vec& y, const Family& f, const Penalty& pen,
                           SelectMode mode = SelectMode::Exact, const SelectOptions& opts = {});

// Exhaustive minimizer over the enumerated family. Throws CapExceeded.
Selection select_bruteforce(const Vec& y, const Family& f, const Penalty& pen,
                            const EnumerationCaps& caps = {});

// Best segmentations by number of breaks: sse[k] is the smallest within-segment
// sum of squares with exactly k breaks and breaks[k] a break set achieving it.
// Break b separates positions b and b+1.
struct SegmentTable {
    std::vector<double> sse;
    std::vector<std::vector<int>> breaks;
};
SegmentTable segment_dp(const Vec& values, int max_breaks);

}  // namespace projstruct
