#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "projstruct/family.hpp"
#include "projstruct/noise.hpp"
#include "projstruct/oracle.hpp"
#include "projstruct/rng.hpp"

namespace projstruct {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a 64 over the canonical (sorted-key) JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

// Shortest round-trip decimal form; "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    int column(const std::string& name) const;  // throws Error if absent
    double number(std::size_t row, const std::string& name) const;
};

// "# projstruct <version> seed=<seed> config_hash=<hash>" then the header and rows.
std::string to_csv(const Table& t, std::uint64_t seed, const std::string& hash);

// ---- building blocks shared by the commands and the acceptance runner -----------------

// Family from a config entry, with size fields filled from `n` when present
// (n for sequence families, p for band, rows = cols = n for bicluster,
// max_level for leveled).
FamilyPtr family_for_size(const nlohmann::json& spec, int n);

// Signal generators (amplitudes in units of sigma unless stated):
//   {"kind": "zero"}
//   {"kind": "sparse", "s": 5, "amplitude": 8, "positions": "random"|"first", "signs": "random"|"positive"}
//   {"kind": "constant", "value": 0.5}
//   {"kind": "sobolev", "beta": 1, "scale": 1}       theta_i = scale * i^(-beta - 1/2), absolute units
//   {"kind": "piecewise", "pieces": 3, "amplitude": 4}
//   {"kind": "vector", "values": [...]}              absolute units
Vec make_signal(const nlohmann::json& spec, const Family& f, double sigma, Rng& rng);

// Y = theta + sigma xi, or Y ~ Bernoulli(theta) for the Bernoulli kind (sigma unused).
Vec make_observation(const Vec& theta, double sigma, const NoiseModel& noise, Rng& rng);

// Noise model from a config entry; {"kind": "bernoulli"} takes its means from theta.
NoiseModel noise_for(const nlohmann::json& spec, const Vec& theta);

// Sample quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> v, double q);

// M that makes the EBR ball cover: max(0, (loss - (t+1) M2 rhat^2) / ((t+2) sigma^2)).
double ebr_required_m(double loss, double radius_at_zero, double t, double sigma);
// M that makes the quarter ball cover given the statistic S = ||y'-theta_hat||^2 - s'^2 V.
double quarter_required_m(double loss, double stat, double sigma_prime, double m1, int n);

// ---- commands -------------------------------------------------------------------------

// Runs a selection; output is a JSON document (see README for the schema).
nlohmann::json run_select(const nlohmann::json& config, std::uint64_t seed,
                          const std::string& base_dir = ".");

// Monte Carlo experiment; one row per grid cell.
Table run_simulate(const nlohmann::json& config, std::uint64_t seed, int workers);

// Condition checks a1..a4; one row per structure / pair / M value.
Table run_check(const nlohmann::json& config, std::uint64_t seed, int workers);

}  // namespace projstruct
