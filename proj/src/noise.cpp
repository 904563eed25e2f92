#include "projstruct/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "projstruct/errors.hpp"

namespace projstruct {

namespace {

constexpr double kExpCap = 700.0;

// log mean exp and its jackknife standard error.
std::pair<double, double> log_mean_exp_jackknife(const std::vector<double>& a) {
    const std::size_t n = a.size();
    const double m = *std::max_element(a.begin(), a.end());
    double s = 0;
    for (double x : a) s += std::exp(x - m);
    const double est = m + std::log(s / n);
    if (n < 2) return {est, std::numeric_limits<double>::infinity()};
    double mean_loo = 0;
    std::vector<double> loo(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rest = std::max(s - std::exp(a[i] - m), std::numeric_limits<double>::min());
        loo[i] = m + std::log(rest / (n - 1));
        mean_loo += loo[i];
    }
    mean_loo /= n;
    double ss = 0;
    for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
    return {est, std::sqrt((n - 1.0) / n * ss)};
}

}  // namespace

NoiseModel NoiseModel::bounded_uniform(double half_width) {
    NoiseModel m;
    m.kind = NoiseKind::BoundedUniform;
    m.param = half_width;
    m.validate();
    return m;
}

NoiseModel NoiseModel::rademacher() {
    NoiseModel m;
    m.kind = NoiseKind::Rademacher;
    return m;
}

NoiseModel NoiseModel::ar1(double coefficient) {
    NoiseModel m;
    m.kind = NoiseKind::AR1;
    m.param = coefficient;
    m.validate();
    return m;
}

NoiseModel NoiseModel::bernoulli(Vec theta) {
    NoiseModel m;
    m.kind = NoiseKind::Bernoulli;
    m.bernoulli_mean = std::move(theta);
    m.validate();
    return m;
}

void NoiseModel::validate() const {
    switch (kind) {
        case NoiseKind::BoundedUniform:
            if (!(param > 0)) throw ContractError("noise: uniform half-width must be positive");
            break;
        case NoiseKind::AR1:
            if (!(std::abs(param) < 1)) throw ContractError("noise: AR1 coefficient must satisfy |phi| < 1");
            break;
        case NoiseKind::Bernoulli:
            for (Eigen::Index i = 0; i < bernoulli_mean.size(); ++i)
                if (!(bernoulli_mean(i) >= 0 && bernoulli_mean(i) <= 1))
                    throw ContractError("noise: Bernoulli means must lie in [0, 1]");
            break;
        default: break;
    }
}

NoiseModel NoiseModel::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("noise: missing 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") return gaussian();
    if (kind == "rademacher") return rademacher();
    if (kind == "uniform") {
        if (!j.contains("half_width")) throw ConfigError("noise 'uniform': missing 'half_width'");
        return bounded_uniform(j.at("half_width").get<double>());
    }
    if (kind == "ar1") {
        if (!j.contains("phi")) throw ConfigError("noise 'ar1': missing 'phi'");
        return ar1(j.at("phi").get<double>());
    }
    if (kind == "bernoulli") {
        if (!j.contains("theta")) throw ConfigError("noise 'bernoulli': missing 'theta'");
        const auto v = j.at("theta").get<std::vector<double>>();
        return bernoulli(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    throw ConfigError("noise: unknown kind '" + kind + "'");
}

Vec NoiseModel::sample(Rng& rng, int n) const {
    Vec xi(n);
    switch (kind) {
        case NoiseKind::Gaussian: return standard_normal(rng, n);
        case NoiseKind::BoundedUniform: {
            std::uniform_real_distribution<double> u(-param, param);
            for (int i = 0; i < n; ++i) xi(i) = u(rng);
            return xi;
        }
        case NoiseKind::Rademacher: {
            std::bernoulli_distribution b(0.5);
            for (int i = 0; i < n; ++i) xi(i) = b(rng) ? 1.0 : -1.0;
            return xi;
        }
        case NoiseKind::AR1: {
            const Vec e = standard_normal(rng, n);
            const double innov = std::sqrt(1 - param * param);
            xi(0) = e(0);
            for (int i = 1; i < n; ++i) xi(i) = param * xi(i - 1) + innov * e(i);
            return xi;
        }
        case NoiseKind::Bernoulli: {
            if (bernoulli_mean.size() != n)
                throw ContractError("noise: Bernoulli mean has length " +
                                    std::to_string(bernoulli_mean.size()) + ", expected " +
                                    std::to_string(n));
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (int i = 0; i < n; ++i) {
                const double p = bernoulli_mean(i);
                xi(i) = (u(rng) < p ? 1.0 : 0.0) - p;
            }
            return xi;
        }
    }
    return xi;
}

bool NoiseModel::unit_variance() const {
    switch (kind) {
        case NoiseKind::Gaussian:
        case NoiseKind::Rademacher:
        case NoiseKind::AR1: return true;
        case NoiseKind::BoundedUniform: return std::abs(param - std::sqrt(3.0)) < 1e-12;
        case NoiseKind::Bernoulli: return false;
    }
    return false;
}

double NoiseModel::fourth_moment_constant() const {
    switch (kind) {
        case NoiseKind::Gaussian: return 2.0;
        case NoiseKind::Rademacher: return 0.0;
        case NoiseKind::BoundedUniform: return std::pow(param, 4) / 5 - std::pow(param, 4) / 9;
        case NoiseKind::AR1: return 2 * (1 + param * param) / (1 - param * param);
        case NoiseKind::Bernoulli: return std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string NoiseModel::name() const {
    switch (kind) {
        case NoiseKind::Gaussian: return "gaussian";
        case NoiseKind::BoundedUniform: return "uniform";
        case NoiseKind::Rademacher: return "rademacher";
        case NoiseKind::AR1: return "ar1";
        case NoiseKind::Bernoulli: return "bernoulli";
    }
    return "unknown";
}

double bernoulli_alpha() {
    const double e = std::exp(1.0);
    return (e - 1) / (2 * (1 + e));
}

std::vector<A1Row> check_a1(const Family& f, const NoiseModel& noise, double alpha, int reps,
                            std::uint64_t seed, const EnumerationCaps& caps,
                            const std::function<double(const Structure&)>& d_fn) {
    if (!(alpha > 0)) throw ContractError("check_a1: alpha must be positive");
    if (reps < 2) throw ContractError("check_a1: reps must be >= 2");
    noise.validate();
    const auto structures = enumerate(f, caps);
    const int n = f.ambient_dim();
    std::vector<A1Row> rows;
    std::vector<double> vals(reps);
    for (const auto& s : structures) {
        A1Row row;
        row.structure = s;
        row.dim = f.dim(s);
        row.bound = d_fn ? d_fn(s) : row.dim;
        for (int r = 0; r < reps; ++r) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
            const Vec xi = noise.sample(rng, n);
            double v = alpha * f.project(s, xi).squaredNorm();
            if (v > kExpCap) {
                v = kExpCap;
                ++row.saturated;
            }
            vals[r] = v;
        }
        std::tie(row.estimate, row.se) = log_mean_exp_jackknife(vals);
        row.closed_form = (noise.kind == NoiseKind::Gaussian && 2 * alpha < 1)
                              ? -0.5 * row.dim * std::log(1 - 2 * alpha)
                              : std::numeric_limits<double>::quiet_NaN();
        row.pass = row.estimate <= row.bound + 2 * row.se;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::optional<double> a2_closed_form(const Family& f, double nu) {
    switch (f.kind()) {
        case FamilyKind::Smoothness:
            if (nu > 0) return std::exp(nu) / (std::exp(nu) - 1);
            break;
        case FamilyKind::Sparsity:
            if (static_cast<const SparsityFamily&>(f).variant() == SparsityMajorant::Rho && nu > 1)
                return 1 / (1 - std::exp(1 - nu));
            break;
        case FamilyKind::Jump:
        case FamilyKind::Knot:
            if (nu > 1) return 1 / (1 - std::exp(1 - nu));
            break;
        case FamilyKind::Bicluster:
            if (nu >= 1) return 1 / (std::exp(nu) + std::exp(-nu) - 2);
            break;
        default: break;
    }
    return std::nullopt;
}

A2Report check_a2(const Family& f, double nu, const EnumerationCaps& caps) {
    if (!(nu > 0)) throw ContractError("check_a2: nu must be positive");
    A2Report rep;
    // Enumeration order is fixed, so the floating-point sum is reproducible.
    visit_structures(f, caps, [&](const Structure& s) {
        rep.sum += std::exp(-nu * f.majorant(s));
        ++rep.count;
        return true;
    });
    rep.bound = a2_closed_form(f, nu);
    rep.pass = !rep.bound || rep.sum <= *rep.bound * (1 + 1e-12);
    return rep;
}

std::vector<A3Row> check_a3(const Family& f, int pairs, int probes, std::uint64_t seed,
                            const EnumerationCaps& caps) {
    if (!f.supports_union())
        throw Unsupported(to_string(f.kind()) + ": condition (A3) has no known union witness");
    const auto structures = enumerate(f, caps);
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, structures.size() - 1);
    std::vector<A3Row> rows;
    for (int p = 0; p < pairs; ++p) {
        A3Row row;
        row.a = structures[pick(rng)];
        row.b = structures[pick(rng)];
        row.witness = f.union_structure(row.a, row.b);
        f.validate(row.witness);
        for (int q = 0; q < probes; ++q) {
            const Vec x = standard_normal(rng, f.ambient_dim());
            for (const auto* s : {&row.a, &row.b}) {
                const Vec px = f.project(*s, x);
                row.containment_error =
                    std::max(row.containment_error, (f.project(row.witness, px) - px).norm());
            }
        }
        row.rho_excess = f.majorant(row.witness) - f.majorant(row.a) - f.majorant(row.b);
        // subadditivity up to rounding of the majorant sums
        row.pass = row.containment_error <= 1e-8 &&
                   row.rho_excess <= 1e-12 * (1 + f.majorant(row.a) + f.majorant(row.b));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<A4Row> check_a4(const NoiseModel& noise, const std::vector<double>& m_grid, int reps,
                            int n, std::uint64_t seed) {
    if (!noise.unit_variance())
        throw ContractError("check_a4: requires a unit-variance noise kind (got " + noise.name() + ")");
    if (reps < 1 || n < 1) throw ContractError("check_a4: reps and N must be positive");
    std::vector<double> inner(reps), centered(reps);
    for (int r = 0; r < reps; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        const Vec xi = noise.sample(rng, n);
        Vec v = standard_normal(rng, n);
        v /= v.norm();
        inner[r] = std::abs(v.dot(xi));
        centered[r] = std::abs(xi.squaredNorm() - n);
    }
    std::vector<A4Row> rows;
    for (double M : m_grid) {
        if (!(M >= 0)) throw ContractError("check_a4: M must be nonnegative");
        A4Row row;
        row.M = M;
        long c1 = 0, c2 = 0;
        for (int r = 0; r < reps; ++r) {
            c1 += inner[r] >= std::sqrt(M);
            c2 += centered[r] >= M * std::sqrt(static_cast<double>(n));
        }
        row.psi1 = static_cast<double>(c1) / reps;
        row.psi2 = static_cast<double>(c2) / reps;
        row.psi1_se = std::sqrt(row.psi1 * (1 - row.psi1) / reps);
        row.psi2_se = std::sqrt(row.psi2 * (1 - row.psi2) / reps);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace projstruct
