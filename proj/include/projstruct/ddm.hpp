#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "projstruct/family.hpp"
#include "projstruct/rng.hpp"
#include "projstruct/selection.hpp"

namespace projstruct {

enum class ConditionalLaw { Gaussian, IdentityResample };

struct DdmConfig {
    double kappa = 1.0;
    double sigma = 1.0;
    ConditionalLaw law = ConditionalLaw::Gaussian;
    // Draws one coordinate of Z for IdentityResample; standard normal when unset.
    std::function<double(Rng&)> z_law;
    // Use pen(I) = 2 kappa rho(I) + dim(L_I) instead of 2 kappa rho(I).
    bool add_dim_penalty = false;

    Penalty penalty() const { return {sigma, kappa, add_dim_penalty}; }
};

// kappa = e - 1 for the Gaussian conditional law: variance factor kappa / (kappa + 1).
double gaussian_variance_factor();

enum class NormalizerMethod { Enumeration, SymmetricPolynomial, RestrictedCandidateSet };
std::string to_string(NormalizerMethod m);

struct DdmPosterior {
    std::vector<Structure> candidates;
    std::vector<double> log_weights;  // normalized, natural log
    NormalizerMethod method = NormalizerMethod::Enumeration;
    double log_normalizer = 0.0;  // log of the sum of unnormalized weights
    double kappa = 1.0;
    double sigma = 1.0;
    bool add_dim_penalty = false;
};

// log lambda_I - ||y - P_I y||^2 / (2 sigma^2)
double log_unnormalized_weight(const Vec& y, const Family& f, const Structure& s,
                               const DdmConfig& cfg);

// Posterior over every structure of the family (enumeration within caps).
DdmPosterior structure_posterior(const Vec& y, const Family& f, const DdmConfig& cfg,
                                 const EnumerationCaps& caps = {});

// Posterior evaluated on explicit candidates. For the sparsity family the
// normalizer is the exact sum over all 2^n subsets (symmetric polynomials) and
// the weights are the full-family weights of the listed candidates; otherwise
// the weights are renormalized over the candidates.
DdmPosterior structure_posterior(const Vec& y, const Family& f, const DdmConfig& cfg,
                                 const std::vector<Structure>& candidates);

// Exact log normalizer of the sparsity DDM over all subsets, O(n^2).
double sparsity_log_normalizer(const Vec& y, const SparsityFamily& f, const DdmConfig& cfg);
// Exact P(i in I | y) under the sparsity DDM.
Vec sparsity_inclusion_probabilities(const Vec& y, const SparsityFamily& f, const DdmConfig& cfg);
// Exact MA-DDM mean for the sparsity family: y_i P(i in I | y).
Vec sparsity_ma_mean(const Vec& y, const SparsityFamily& f, const DdmConfig& cfg);

// Highest-weight candidate; ties by smaller rho, then canonical order.
Structure select_map(const DdmPosterior& post, const Family& f);

Vec ma_mean(const Vec& y, const Family& f, const DdmPosterior& post);
Vec ms_mean(const Vec& y, const Family& f, const Structure& selected);

// Draws from the conditional DDM given I: P_I y + c sigma P_I Z.
std::vector<Vec> sample_conditional(const Vec& y, const Family& f, const Structure& s,
                                    const DdmConfig& cfg, Rng& rng, int count);

// [{structure, log_weight}, ...] sorted by descending weight, at most top_k entries (all if < 0).
nlohmann::json posterior_to_json(const DdmPosterior& post, int top_k = -1);

double log_sum_exp(const std::vector<double>& v);

}  // namespace projstruct
