#include "projstruct/ddm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "projstruct/errors.hpp"

namespace projstruct {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

void require_sigma(const DdmConfig& cfg) {
    if (!(cfg.sigma > 0) || !std::isfinite(cfg.sigma))
        throw ContractError("ddm: sigma must be positive and finite");
    if (!(cfg.kappa >= 0) || !std::isfinite(cfg.kappa))
        throw ContractError("ddm: kappa must be nonnegative and finite");
}

// log e_k(x) for k = 0..m over the values whose logs are in lx, skipping index `skip`.
std::vector<double> log_elementary_symmetric(const std::vector<double>& lx, int skip = -1) {
    const int n = static_cast<int>(lx.size());
    std::vector<double> le(n + 1, kNegInf);
    le[0] = 0.0;
    int used = 0;
    for (int i = 0; i < n; ++i) {
        if (i == skip) continue;
        ++used;
        for (int k = used; k >= 1; --k) le[k] = log_add(le[k], lx[i] + le[k - 1]);
    }
    return le;
}

// Log prior-times-residual factor shared by all size-k subsets, except the e_k term.
double sparsity_size_term(const SparsityFamily& f, const DdmConfig& cfg, int k) {
    return -cfg.kappa * f.majorant_of_size(k) - (cfg.add_dim_penalty ? 0.5 * k : 0.0);
}

DdmPosterior make_posterior(std::vector<Structure> cands, std::vector<double> logw,
                            NormalizerMethod method, double log_z, const DdmConfig& cfg) {
    for (auto& w : logw) w -= log_z;
    DdmPosterior p;
    p.candidates = std::move(cands);
    p.log_weights = std::move(logw);
    p.method = method;
    p.log_normalizer = log_z;
    p.kappa = cfg.kappa;
    p.sigma = cfg.sigma;
    p.add_dim_penalty = cfg.add_dim_penalty;
    return p;
}

}  // namespace

double gaussian_variance_factor() {
    const double k = std::exp(1.0) - 1.0;
    return k / (k + 1.0);
}

std::string to_string(NormalizerMethod m) {
    switch (m) {
        case NormalizerMethod::Enumeration: return "enumeration";
        case NormalizerMethod::SymmetricPolynomial: return "symmetric-polynomial";
        case NormalizerMethod::RestrictedCandidateSet: return "restricted-candidate-set";
    }
    return "unknown";
}

double log_sum_exp(const std::vector<double>& v) {
    if (v.empty()) return kNegInf;
    const double m = *std::max_element(v.begin(), v.end());
    if (m == kNegInf) return kNegInf;
    double s = 0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

double log_unnormalized_weight(const Vec& y, const Family& f, const Structure& s,
                               const DdmConfig& cfg) {
    require_sigma(cfg);
    const double half_pen = 0.5 * cfg.penalty().of(f, s);
    return -half_pen - f.residual_sq(s, y) / (2 * cfg.sigma * cfg.sigma);
}

DdmPosterior structure_posterior(const Vec& y, const Family& f, const DdmConfig& cfg,
                                 const EnumerationCaps& caps) {
    require_sigma(cfg);
    require_finite(y, "structure_posterior");
    std::vector<Structure> cands;
    std::vector<double> logw;
    visit_structures(f, caps, [&](const Structure& s) {
        logw.push_back(log_unnormalized_weight(y, f, s, cfg));
        cands.push_back(s);
        return true;
    });
    const double log_z = log_sum_exp(logw);
    return make_posterior(std::move(cands), std::move(logw), NormalizerMethod::Enumeration, log_z,
                          cfg);
}

DdmPosterior structure_posterior(const Vec& y, const Family& f, const DdmConfig& cfg,
                                 const std::vector<Structure>& candidates) {
    require_sigma(cfg);
    require_finite(y, "structure_posterior");
    if (candidates.empty()) throw ContractError("structure_posterior: empty candidate set");
    std::vector<double> logw;
    for (const auto& s : candidates) {
        f.validate(s);
        logw.push_back(log_unnormalized_weight(y, f, s, cfg));
    }
    if (const auto* sf = dynamic_cast<const SparsityFamily*>(&f)) {
        const double log_z = sparsity_log_normalizer(y, *sf, cfg);
        return make_posterior(candidates, std::move(logw), NormalizerMethod::SymmetricPolynomial,
                              log_z, cfg);
    }
    const double log_z = log_sum_exp(logw);
    return make_posterior(candidates, std::move(logw), NormalizerMethod::RestrictedCandidateSet,
                          log_z, cfg);
}

double sparsity_log_normalizer(const Vec& y, const SparsityFamily& f, const DdmConfig& cfg) {
    require_sigma(cfg);
    if (y.size() != f.ambient_dim()) throw ContractError("sparsity: length mismatch");
    const int n = f.ambient_dim();
    const double s2 = 2 * cfg.sigma * cfg.sigma;
    std::vector<double> lx(n);
    for (int i = 0; i < n; ++i) lx[i] = y(i) * y(i) / s2;
    const auto le = log_elementary_symmetric(lx);
    std::vector<double> terms(n + 1);
    for (int k = 0; k <= n; ++k) terms[k] = sparsity_size_term(f, cfg, k) + le[k];
    return log_sum_exp(terms) - y.squaredNorm() / s2;
}

Vec sparsity_inclusion_probabilities(const Vec& y, const SparsityFamily& f, const DdmConfig& cfg) {
    const double log_z = sparsity_log_normalizer(y, f, cfg);
    const int n = f.ambient_dim();
    const double s2 = 2 * cfg.sigma * cfg.sigma;
    std::vector<double> lx(n);
    for (int i = 0; i < n; ++i) lx[i] = y(i) * y(i) / s2;
    const double base = -y.squaredNorm() / s2;
    Vec prob(n);
    for (int i = 0; i < n; ++i) {
        const auto le = log_elementary_symmetric(lx, i);  // without coordinate i
        std::vector<double> terms(n);
        for (int k = 1; k <= n; ++k) terms[k - 1] = sparsity_size_term(f, cfg, k) + lx[i] + le[k - 1];
        prob(i) = std::min(1.0, std::exp(log_sum_exp(terms) + base - log_z));
    }
    return prob;
}

Vec sparsity_ma_mean(const Vec& y, const SparsityFamily& f, const DdmConfig& cfg) {
    return y.cwiseProduct(sparsity_inclusion_probabilities(y, f, cfg));
}

Structure select_map(const DdmPosterior& post, const Family& f) {
    if (post.candidates.empty()) throw ContractError("select_map: empty posterior");
    std::size_t best = 0;
    for (std::size_t i = 1; i < post.candidates.size(); ++i)
        if (better_candidate(f, -post.log_weights[i], post.candidates[i], -post.log_weights[best],
                             post.candidates[best]))
            best = i;
    return post.candidates[best];
}

Vec ma_mean(const Vec& y, const Family& f, const DdmPosterior& post) {
    if (post.candidates.empty()) throw ContractError("ma_mean: empty posterior");
    Vec out = Vec::Zero(y.size());
    for (std::size_t i = 0; i < post.candidates.size(); ++i) {
        const double w = std::exp(post.log_weights[i]);
        if (w == 0.0) continue;
        out += w * f.project(post.candidates[i], y);
    }
    return out;
}

Vec ms_mean(const Vec& y, const Family& f, const Structure& selected) {
    return f.project(selected, y);
}

std::vector<Vec> sample_conditional(const Vec& y, const Family& f, const Structure& s,
                                    const DdmConfig& cfg, Rng& rng, int count) {
    if (count < 1) throw ContractError("sample_conditional: count must be >= 1");
    if (!(cfg.sigma >= 0)) throw ContractError("sample_conditional: sigma must be >= 0");
    const int n = static_cast<int>(y.size());
    const double scale = cfg.law == ConditionalLaw::Gaussian
                             ? std::sqrt(gaussian_variance_factor()) * cfg.sigma
                             : cfg.sigma;
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vec> out;
    out.reserve(count);
    for (int c = 0; c < count; ++c) {
        Vec z(n);
        for (int i = 0; i < n; ++i)
            z(i) = (cfg.law == ConditionalLaw::IdentityResample && cfg.z_law) ? cfg.z_law(rng)
                                                                               : normal(rng);
        out.push_back(f.project(s, y + scale * z));
    }
    return out;
}

nlohmann::json posterior_to_json(const DdmPosterior& post, int top_k) {
    std::vector<std::size_t> order(post.candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return post.log_weights[a] > post.log_weights[b];
    });
    if (top_k >= 0 && static_cast<std::size_t>(top_k) < order.size()) order.resize(top_k);
    nlohmann::json arr = nlohmann::json::array();
    for (auto i : order)
        arr.push_back({{"log_weight", post.log_weights[i]}, {"structure", to_json(post.candidates[i])}});
    return arr;
}

}  // namespace projstruct
