#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "projstruct/family.hpp"
#include "projstruct/rng.hpp"

namespace projstruct {

enum class NoiseKind { Gaussian, BoundedUniform, Rademacher, AR1, Bernoulli };

// Zero-mean noise xi. BoundedUniform(h) is U(-h, h); AR1(phi) is the stationary
// unit-variance Gaussian AR(1) process; Bernoulli(theta) is B(theta_i) - theta_i.
struct NoiseModel {
    NoiseKind kind = NoiseKind::Gaussian;
    double param = 0.0;  // half-width or AR coefficient
    Vec bernoulli_mean;  // theta for the Bernoulli kind

    static NoiseModel gaussian() { return {}; }
    static NoiseModel bounded_uniform(double half_width);
    static NoiseModel rademacher();
    static NoiseModel ar1(double coefficient);
    static NoiseModel bernoulli(Vec theta);
    static NoiseModel from_json(const nlohmann::json& j);

    Vec sample(Rng& rng, int n) const;
    bool unit_variance() const;
    // c with Var(sum_i xi_i^2) <= c N asymptotically; NaN when unknown.
    double fourth_moment_constant() const;
    std::string name() const;
    void validate() const;
};

// Constant alpha of condition (A1) for Bernoulli / bounded noise: (e - 1) / (2 (1 + e)).
double bernoulli_alpha();

struct A1Row {
    Structure structure;
    int dim = 0;
    double estimate = 0;     // log mean exp(alpha ||P_I xi||^2), summands capped at 700
    double se = 0;           // jackknife standard error
    double bound = 0;        // d_I
    double closed_form = 0;  // exact value for Gaussian noise (NaN otherwise)
    long saturated = 0;      // summands hitting the cap
    bool pass = false;       // estimate <= bound + 2 se
};

std::vector<A1Row> check_a1(const Family& f, const NoiseModel& noise, double alpha, int reps,
                            std::uint64_t seed, const EnumerationCaps& caps = {},
                            const std::function<double(const Structure&)>& d_fn = {});

struct A2Report {
    double sum = 0;  // sum_I exp(-nu rho(I)) over the enumeration
    std::optional<double> bound;
    long count = 0;
    bool pass = true;  // sum <= bound when a bound is known
};

// Closed-form C_nu when the family has one for this nu.
std::optional<double> a2_closed_form(const Family& f, double nu);
A2Report check_a2(const Family& f, double nu, const EnumerationCaps& caps = {});

struct A3Row {
    Structure a, b, witness;
    double containment_error = 0;  // max over probes and both inputs
    double rho_excess = 0;         // rho(I') - rho(I0) - rho(I1), must be <= 0 up to rounding
    bool pass = false;
};

// Throws Unsupported for families without a union witness.
std::vector<A3Row> check_a3(const Family& f, int pairs, int probes, std::uint64_t seed,
                            const EnumerationCaps& caps = {});

struct A4Row {
    double M = 0;
    double psi1 = 0, psi1_se = 0;  // P(|<v, xi>| >= sqrt(M)), v uniform on the sphere
    double psi2 = 0, psi2_se = 0;  // P(| ||xi||^2 - N | >= M sqrt(N))
};

std::vector<A4Row> check_a4(const NoiseModel& noise, const std::vector<double>& m_grid, int reps,
                            int n, std::uint64_t seed);

}  // namespace projstruct
