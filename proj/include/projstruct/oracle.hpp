#pragma once

#include <json.hpp>

#include "projstruct/family.hpp"
#include "projstruct/selection.hpp"

namespace projstruct {

// Constants of the framework. from_theory() fills every derived value from
// (alpha, nu, kappa, delta); experiments may override M0..M3 and tau0.
struct FrameworkConstants {
    double alpha = 0.4;
    double nu = 1.5;
    double kappa = 1.0;
    double delta = 0.1;
    double kappa_bar = 0;
    double tau_bar = 0;
    double tau0 = 0;
    double c1 = 0, c2 = 0, c3 = 0;
    double M0 = 0, M1 = 0, M2 = 0, M3 = 0;
    bool strict = false;

    static FrameworkConstants from_theory(double alpha, double nu, double kappa, double delta = 0.1,
                                          bool strict = false);

    // Throws ContractError on out-of-range parameters; in strict mode also
    // requires kappa > kappa_bar. Returns a warning message (empty if none).
    std::string validate() const;
};

double kappa_lower_bound(double alpha, double nu);
double tau_bar(double kappa, double alpha);
double tau0_default(const FrameworkConstants& c, double delta = 0.1);

nlohmann::json to_json(const FrameworkConstants& c);
FrameworkConstants constants_from_json(const nlohmann::json& j);

struct OracleReport {
    Structure structure;
    double approx_sq = 0;   // ||theta - P_I theta||^2
    double complexity = 0;  // tau sigma^2 rho(I)
    double rate_sq = 0;     // approx_sq + complexity
    double tau = 1;
};

// Minimizer of ||theta - P_I theta||^2 + tau sigma^2 rho(I).
OracleReport oracle_rate(const Vec& theta, const Family& f, double sigma, double tau = 1.0,
                         SelectMode mode = SelectMode::Exact, const SelectOptions& opts = {});

// b(theta) = ||theta - P_{I*} theta||^2 / (sigma^2 (1 + rho(I*))), I* the tau0-oracle.
double ebr_ratio(const Vec& theta, const Family& f, double sigma, const FrameworkConstants& c,
                 SelectMode mode = SelectMode::Exact, const SelectOptions& opts = {});
bool ebr_member(const Vec& theta, const Family& f, double sigma, const FrameworkConstants& c,
                double t, SelectMode mode = SelectMode::Exact, const SelectOptions& opts = {});

nlohmann::json to_json(const OracleReport& r);

}  // namespace projstruct
