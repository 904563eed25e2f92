#include "projstruct/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "projstruct/errors.hpp"

namespace projstruct {

double kappa_lower_bound(double alpha, double nu) { return (32 * nu + 10 + alpha) / (4 * alpha); }

double tau_bar(double kappa, double alpha) { return 3 * (1 + kappa * alpha) / alpha; }

double tau0_default(const FrameworkConstants& c, double delta) {
    if (!(delta > 0 && delta < 1)) throw ContractError("tau0_default: delta must lie in (0, 1)");
    return (1 + delta) / (1 - delta) * tau_bar(c.kappa, c.alpha) + 0.1;
}

FrameworkConstants FrameworkConstants::from_theory(double alpha, double nu, double kappa,
                                                   double delta, bool strict) {
    FrameworkConstants c;
    c.alpha = alpha;
    c.nu = nu;
    c.kappa = kappa;
    c.delta = delta;
    c.strict = strict;
    c.validate();
    c.kappa_bar = kappa_lower_bound(alpha, nu);
    c.tau_bar = projstruct::tau_bar(kappa, alpha);
    c.tau0 = tau0_default(c, delta);
    c.c1 = kappa * alpha / 4 - 5.0 / 8 - alpha / 16;
    c.c2 = alpha / 16;
    // max{3, 6/alpha + 4 kappa}; the max matters only below the theoretical kappa range.
    c.c3 = std::max(3.0, 6 / alpha + 4 * kappa);
    c.M0 = c.c3 * (2 * nu + 2 * alpha + 4) / alpha;
    c.M1 = 12 * c.c3 * (nu + 1) / alpha;
    c.M2 = c.M1 / delta;
    c.M3 = c.c3;
    return c;
}

std::string FrameworkConstants::validate() const {
    if (!(alpha > 0 && alpha <= 1)) throw ContractError("constants: alpha must lie in (0, 1]");
    if (!(nu > 0)) throw ContractError("constants: nu must be positive");
    if (!(kappa > 0)) throw ContractError("constants: kappa must be positive");
    if (!(delta > 0 && delta < 1)) throw ContractError("constants: delta must lie in (0, 1)");
    const double bound = kappa_lower_bound(alpha, nu);
    if (kappa > bound) return {};
    if (strict)
        throw ContractError("constants: strict mode requires kappa > " + std::to_string(bound) +
                            " (got " + std::to_string(kappa) + ")");
    return "kappa = " + std::to_string(kappa) + " is below the theoretical bound " +
           std::to_string(bound) + "; running in practical mode";
}

nlohmann::json to_json(const FrameworkConstants& c) {
    return {{"alpha", c.alpha}, {"nu", c.nu},       {"kappa", c.kappa}, {"delta", c.delta},
            {"kappa_bar", c.kappa_bar}, {"tau_bar", c.tau_bar}, {"tau0", c.tau0},
            {"c1", c.c1},       {"c2", c.c2},       {"c3", c.c3},       {"M0", c.M0},
            {"M1", c.M1},       {"M2", c.M2},       {"M3", c.M3},       {"strict", c.strict}};
}

FrameworkConstants constants_from_json(const nlohmann::json& j) {
    auto num = [&](const char* key, double def) {
        if (!j.contains(key)) return def;
        if (!j.at(key).is_number()) throw ConfigError(std::string("constants: '") + key + "' must be a number");
        return j.at(key).get<double>();
    };
    const bool strict = j.contains("strict") ? j.at("strict").get<bool>() : false;
    auto c = FrameworkConstants::from_theory(num("alpha", 0.4), num("nu", 1.5), num("kappa", 1.0),
                                             num("delta", 0.1), strict);
    c.tau0 = num("tau0", c.tau0);
    c.M0 = num("M0", c.M0);
    c.M1 = num("M1", c.M1);
    c.M2 = num("M2", c.M2);
    c.M3 = num("M3", c.M3);
    return c;
}

OracleReport oracle_rate(const Vec& theta, const Family& f, double sigma, double tau,
                         SelectMode mode, const SelectOptions& opts) {
    if (!(tau >= 0)) throw ContractError("oracle_rate: tau must be nonnegative");
    if (!(sigma >= 0)) throw ContractError("oracle_rate: sigma must be nonnegative");
    // tau sigma^2 rho = sigma^2 (2 kappa) rho with kappa = tau / 2.
    const auto sel = select_penalized(theta, f, Penalty{sigma, tau / 2, false}, mode, opts);
    OracleReport r;
    r.structure = sel.structure;
    r.approx_sq = f.residual_sq(sel.structure, theta);
    r.complexity = tau * sigma * sigma * f.majorant(sel.structure);
    r.rate_sq = r.approx_sq + r.complexity;
    r.tau = tau;
    return r;
}

double ebr_ratio(const Vec& theta, const Family& f, double sigma, const FrameworkConstants& c,
                 SelectMode mode, const SelectOptions& opts) {
    if (!(sigma > 0)) throw ContractError("ebr_ratio: sigma must be positive");
    const auto r = oracle_rate(theta, f, sigma, c.tau0, mode, opts);
    return r.approx_sq / (sigma * sigma * (1 + f.majorant(r.structure)));
}

bool ebr_member(const Vec& theta, const Family& f, double sigma, const FrameworkConstants& c,
                double t, SelectMode mode, const SelectOptions& opts) {
    return ebr_ratio(theta, f, sigma, c, mode, opts) <= t;
}

nlohmann::json to_json(const OracleReport& r) {
    return {{"approx_sq", r.approx_sq},
            {"complexity", r.complexity},
            {"rate_sq", r.rate_sq},
            {"structure", to_json(r.structure)},
            {"tau", r.tau}};
}

}  // namespace projstruct
