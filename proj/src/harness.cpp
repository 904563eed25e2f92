#include "projstruct/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "projstruct/balls.hpp"
#include "projstruct/ddm.hpp"
#include "projstruct/errors.hpp"
#include "projstruct/ingestion.hpp"
#include "projstruct/selection.hpp"

namespace projstruct {

namespace {

using nlohmann::json;

constexpr std::uint64_t kStreamCalibration = 5;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- config access ---------------------------------------------------------------------

double get_number(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError("field '" + key + "': expected a number");
    return j.at(key).get<double>();
}

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing required field '" + key + "'");
    return get_number(j, key, 0.0);
}

int get_int(const json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw ConfigError("field '" + key + "': expected an integer");
    return j.at(key).get<int>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) throw ConfigError("field '" + key + "': expected true or false");
    return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) throw ConfigError("field '" + key + "': expected a string");
    return j.at(key).get<std::string>();
}

const json& require_object(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_object())
        throw ConfigError("missing required object '" + key + "'");
    return j.at(key);
}

std::vector<double> number_list(const json& j, const std::string& key, std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) throw ConfigError("field '" + key + "': expected a nonempty list");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError("field '" + key + "': expected numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

SelectMode mode_of(const json& j) {
    const auto m = get_string(j, "mode", "exact");
    if (m == "exact") return SelectMode::Exact;
    if (m == "heuristic") return SelectMode::Heuristic;
    throw ConfigError("field 'mode': expected 'exact' or 'heuristic', got '" + m + "'");
}

SelectOptions select_options(const json& j, std::uint64_t seed) {
    SelectOptions o;
    o.seed = seed;
    if (j.contains("caps")) {
        const auto& c = j.at("caps");
        o.caps.max_count = get_number(c, "max_count", o.caps.max_count);
        o.caps.max_cardinality = get_int(c, "max_cardinality", o.caps.max_cardinality);
        o.caps.max_clusters = get_int(c, "max_clusters", o.caps.max_clusters);
        o.caps.max_blocks = get_int(c, "max_blocks", o.caps.max_blocks);
    }
    o.bicluster_restarts = get_int(j, "restarts", o.bicluster_restarts);
    return o;
}

FrameworkConstants constants_of(const json& j, double kappa) {
    json c = j.contains("constants") ? j.at("constants") : json::object();
    if (!c.is_object()) throw ConfigError("field 'constants': expected an object");
    if (!c.contains("kappa")) c["kappa"] = kappa;
    return constants_from_json(c);
}

// ---- parallel replications ---------------------------------------------------------------

// Runs fn(rep) for rep in [0, reps) on `workers` threads; results are stored by
// index so aggregation never depends on scheduling.
std::vector<std::vector<double>> run_reps(int reps, int workers,
                                          const std::function<std::vector<double>(int)>& fn) {
    std::vector<std::vector<double>> out(reps);
    const int k = std::max(1, std::min(workers, reps));
    if (k == 1) {
        for (int r = 0; r < reps; ++r) out[r] = fn(r);
        return out;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int w = 0; w < k; ++w)
        pool.emplace_back([&] {
            for (int r = next++; r < reps && !failed; r = next++) {
                try {
                    out[r] = fn(r);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

struct Summary {
    double mean = 0, se = 0;
};

Summary summarize(const std::vector<std::vector<double>>& per_rep, std::size_t idx) {
    const std::size_t n = per_rep.size();
    Summary s;
    for (const auto& r : per_rep) s.mean += r[idx];
    s.mean /= n;
    if (n > 1) {
        double ss = 0;
        for (const auto& r : per_rep) ss += (r[idx] - s.mean) * (r[idx] - s.mean);
        s.se = std::sqrt(ss / (n - 1) / n);
    }
    return s;
}

std::vector<double> column_of(const std::vector<std::vector<double>>& per_rep, std::size_t idx) {
    std::vector<double> v;
    v.reserve(per_rep.size());
    for (const auto& r : per_rep) v.push_back(r[idx]);
    return v;
}

// ---- simulation cells --------------------------------------------------------------------

struct Cell {
    int index = 0;
    int design = 0;  // index over (n, sigma); cells differing only in M or t share replications
    int n = 0;
    double sigma = 1, M = 0, t = 0;
};

std::vector<Cell> make_cells(const json& cfg, bool use_m, bool use_t) {
    const json grid = cfg.contains("grid") ? cfg.at("grid") : json::object();
    std::vector<double> ns = number_list(grid, "n", {});
    if (ns.empty()) {
        const auto& fam = require_object(cfg, "family");
        for (const char* key : {"n", "p", "rows", "max_level"})
            if (fam.contains(key)) {
                ns = {get_number(fam, key, 0)};
                break;
            }
        if (ns.empty() && fam.contains("design")) ns = {0};
        if (ns.empty()) throw ConfigError("simulate: no size given in 'grid.n' or the family");
    }
    const std::vector<double> sigmas = number_list(grid, "sigma", {1.0});
    const std::vector<double> ms = use_m ? number_list(grid, "M", {0.0}) : std::vector<double>{0.0};
    const std::vector<double> ts = use_t ? number_list(grid, "t", {0.0}) : std::vector<double>{0.0};
    std::string rule;
    double rule_scale = 1;
    if (cfg.contains("sigma_rule")) {
        const auto& r = cfg.at("sigma_rule");
        rule = get_string(r, "kind", "");
        rule_scale = get_number(r, "scale", 1.0);
        if (rule != "inv_sqrt_n") throw ConfigError("sigma_rule: unknown kind '" + rule + "'");
    }
    std::vector<Cell> cells;
    int design = 0;
    for (double n : ns)
        for (double s : rule.empty() ? sigmas : std::vector<double>{0.0}) {
            for (double m : ms)
                for (double t : ts) {
                    Cell c;
                    c.index = static_cast<int>(cells.size());
                    c.design = design;
                    c.n = static_cast<int>(n);
                    c.sigma = rule.empty() ? s : rule_scale / std::sqrt(n);
                    c.M = m;
                    c.t = t;
                    if (!(c.sigma > 0)) throw ConfigError("simulate: sigma must be positive");
                    if (c.M < 0 || c.t < 0) throw ConfigError("simulate: M and t must be nonnegative");
                    cells.push_back(c);
                }
            ++design;
        }
    return cells;
}

struct CellContext {
    FamilyPtr family;
    Vec theta;
    std::uint64_t cell_seed = 0;
    NoiseModel noise;
    bool bernoulli = false;
};

CellContext prepare_cell(const json& cfg, const Cell& cell, std::uint64_t master) {
    CellContext ctx;
    ctx.family = family_for_size(require_object(cfg, "family"), cell.n);
    ctx.cell_seed = derive_seed(master, static_cast<std::uint64_t>(cell.design));
    Rng signal_rng(derive_seed(~ctx.cell_seed, kStreamSignal));
    ctx.theta = make_signal(require_object(cfg, "signal"), *ctx.family, cell.sigma, signal_rng);
    const json noise = cfg.contains("noise") ? cfg.at("noise") : json{{"kind", "gaussian"}};
    ctx.noise = noise_for(noise, ctx.theta);
    ctx.bernoulli = ctx.noise.kind == NoiseKind::Bernoulli;
    return ctx;
}

double effective_sigma(const CellContext& ctx, const Cell& cell) { return ctx.bernoulli ? 1.0 : cell.sigma; }

Vec estimate(const Vec& y, const Family& f, double sigma, double kappa, const std::string& estimator,
             SelectMode mode, const SelectOptions& opts, Structure* selected) {
    const Penalty pen{sigma, kappa, false};
    const auto sel = select_penalized(y, f, pen, mode, opts);
    if (selected) *selected = sel.structure;
    if (estimator == "ms") return f.project(sel.structure, y);
    DdmConfig cfg;
    cfg.kappa = kappa;
    cfg.sigma = sigma;
    if (const auto* sf = dynamic_cast<const SparsityFamily*>(&f)) return sparsity_ma_mean(y, *sf, cfg);
    return ma_mean(y, f, structure_posterior(y, f, cfg, opts.caps));
}

struct SimSettings {
    std::string experiment;
    int reps = 100;
    double kappa = 1.0;
    std::string estimator = "ms";
    SelectMode mode = SelectMode::Exact;
    json raw;
};

SimSettings sim_settings(const json& cfg) {
    SimSettings s;
    s.raw = cfg;
    s.experiment = get_string(cfg, "experiment", "");
    if (s.experiment.empty()) throw ConfigError("missing required field 'experiment'");
    s.reps = get_int(cfg, "reps", 100);
    if (s.reps < 2) throw ConfigError("field 'reps': must be >= 2");
    s.kappa = get_number(cfg, "kappa", 1.0);
    if (!(s.kappa > 0)) throw ConfigError("field 'kappa': must be positive");
    s.estimator = get_string(cfg, "estimator", "ms");
    if (s.estimator != "ms" && s.estimator != "ma")
        throw ConfigError("field 'estimator': expected 'ms' or 'ma'");
    s.mode = mode_of(cfg);
    return s;
}

std::vector<std::string> fmt(std::initializer_list<double> values) {
    std::vector<std::string> out;
    for (double v : values) out.push_back(format_number(v));
    return out;
}

// ---- experiments -------------------------------------------------------------------------

Table sim_estimation(const SimSettings& s, std::uint64_t master, int workers, bool log_columns) {
    Table t;
    t.header = log_columns ? std::vector<std::string>{"n", "sigma", "reps", "mean_loss", "se", "log_n",
                                                      "log_mean_loss", "oracle_rate_sq"}
                           : std::vector<std::string>{"n", "sigma", "reps", "mean_loss", "se",
                                                      "oracle_rate_sq", "loss_over_oracle",
                                                      "mean_dim", "sparse_rate", "loss_over_sparse_rate"};
    for (const auto& cell : make_cells(s.raw, false, false)) {
        const auto ctx = prepare_cell(s.raw, cell, master);
        const auto& f = *ctx.family;
        const double sigma = effective_sigma(ctx, cell);
        const auto opts = select_options(s.raw, master);
        const auto per = run_reps(s.reps, workers, [&](int rep) {
            Rng rng(derive_seed(derive_seed(ctx.cell_seed, rep), kStreamNoise));
            const Vec y = make_observation(ctx.theta, cell.sigma, ctx.noise, rng);
            Structure sel;
            const Vec est = estimate(y, f, sigma, s.kappa, s.estimator, s.mode, opts, &sel);
            return std::vector<double>{(est - ctx.theta).squaredNorm(), static_cast<double>(f.dim(sel))};
        });
        const auto loss = summarize(per, 0);
        const auto oracle = oracle_rate(ctx.theta, f, sigma, 1.0, s.mode, opts);
        if (log_columns) {
            t.add(fmt({double(cell.n), cell.sigma, double(s.reps), loss.mean, loss.se, std::log(cell.n),
                       std::log(loss.mean), oracle.rate_sq}));
        } else {
            double rate = kNaN;
            const auto& sig = s.raw.at("signal");
            if (get_string(sig, "kind", "") == "sparse") {
                const double k = get_number(sig, "s", 0);
                rate = sigma * sigma * k * std::log(std::exp(1.0) * f.ambient_dim() / k);
            }
            t.add(fmt({double(cell.n), cell.sigma, double(s.reps), loss.mean, loss.se, oracle.rate_sq,
                       loss.mean / oracle.rate_sq, summarize(per, 1).mean, rate, loss.mean / rate}));
        }
    }
    return t;
}

Table sim_contraction(const SimSettings& s, std::uint64_t master, int workers) {
    Table t;
    t.header = {"n", "sigma", "M", "M0", "frac_exceed", "se", "oracle_rate_sq"};
    for (const auto& cell : make_cells(s.raw, true, false)) {
        const auto ctx = prepare_cell(s.raw, cell, master);
        const auto& f = *ctx.family;
        const double sigma = effective_sigma(ctx, cell);
        const auto c = constants_of(s.raw, s.kappa);
        const auto opts = select_options(s.raw, master);
        const auto oracle = oracle_rate(ctx.theta, f, sigma, 1.0, s.mode, opts);
        const double threshold = c.M0 * oracle.rate_sq + cell.M * sigma * sigma;
        DdmConfig dcfg;
        dcfg.kappa = s.kappa;
        dcfg.sigma = sigma;
        const auto per = run_reps(s.reps, workers, [&](int rep) {
            const auto rep_seed = derive_seed(ctx.cell_seed, rep);
            Rng rng(derive_seed(rep_seed, kStreamNoise));
            const Vec y = make_observation(ctx.theta, cell.sigma, ctx.noise, rng);
            const auto sel = select_penalized(y, f, dcfg.penalty(), s.mode, opts);
            Rng draw(derive_seed(rep_seed, kStreamSampling));
            const Vec v = sample_conditional(y, f, sel.structure, dcfg, draw, 1)[0];
            return std::vector<double>{(v - ctx.theta).squaredNorm() >= threshold ? 1.0 : 0.0};
        });
        const auto e = summarize(per, 0);
        t.add(fmt({double(cell.n), cell.sigma, cell.M, c.M0, e.mean, e.se, oracle.rate_sq}));
    }
    return t;
}

struct Calibration {
    int reps = 0;
    double target = 0.95;
};

std::optional<Calibration> calibration_of(const json& cfg) {
    if (!cfg.contains("calibrate")) return std::nullopt;
    const auto& c = cfg.at("calibrate");
    Calibration out;
    out.reps = get_int(c, "reps", 1000);
    out.target = get_number(c, "target", 0.95);
    if (out.reps < 2 || !(out.target > 0 && out.target < 1))
        throw ConfigError("calibrate: need reps >= 2 and target in (0, 1)");
    return out;
}

// One EBR replication: {loss, radius at M = 0, rho_hat}.
std::vector<double> ebr_rep(const CellContext& ctx, const Cell& cell, const SimSettings& s,
                            const FrameworkConstants& c, const SelectOptions& opts, std::uint64_t rep_seed) {
    const auto& f = *ctx.family;
    const double sigma = effective_sigma(ctx, cell);
    Rng rng(derive_seed(rep_seed, kStreamNoise));
    const Vec y = make_observation(ctx.theta, cell.sigma, ctx.noise, rng);
    Structure sel;
    const Vec est = estimate(y, f, sigma, s.kappa, s.estimator, s.mode, opts, &sel);
    const auto ball = ebr_ball(f, sigma, c, sel, est, cell.t, 0.0);
    return {(est - ctx.theta).squaredNorm(), ball.radius_sq, f.majorant(sel)};
}

Table sim_coverage_ebr(const SimSettings& s, std::uint64_t master, int workers) {
    Table t;
    t.header = {"n", "sigma", "t", "M", "coverage", "se", "mean_radius_sq", "oracle_rate_sq",
                "radius_over_oracle", "ebr_ratio", "M2"};
    const auto cal = calibration_of(s.raw);
    for (const auto& cell0 : make_cells(s.raw, !cal, true)) {
        Cell cell = cell0;
        const auto ctx = prepare_cell(s.raw, cell, master);
        const auto& f = *ctx.family;
        const double sigma = effective_sigma(ctx, cell);
        const auto c = constants_of(s.raw, s.kappa);
        const auto opts = select_options(s.raw, master);
        if (cal) {
            const auto cal_seed = derive_seed(~ctx.cell_seed, kStreamCalibration);
            const auto per = run_reps(cal->reps, workers, [&](int rep) {
                const auto r = ebr_rep(ctx, cell, s, c, opts, derive_seed(cal_seed, rep));
                return std::vector<double>{ebr_required_m(r[0], r[1], cell.t, sigma)};
            });
            cell.M = empirical_quantile(column_of(per, 0), cal->target);
        }
        const auto per = run_reps(s.reps, workers, [&](int rep) {
            auto r = ebr_rep(ctx, cell, s, c, opts, derive_seed(ctx.cell_seed, rep));
            const double radius = r[1] + (cell.t + 2) * cell.M * sigma * sigma;
            return std::vector<double>{r[0] <= radius ? 1.0 : 0.0, radius};
        });
        const auto cov = summarize(per, 0);
        const double radius = summarize(per, 1).mean;
        const auto oracle = oracle_rate(ctx.theta, f, sigma, 1.0, s.mode, opts);
        const double b = ebr_ratio(ctx.theta, f, sigma, c, s.mode, opts);
        t.add(fmt({double(cell.n), cell.sigma, cell.t, cell.M, cov.mean, cov.se, radius, oracle.rate_sq,
                   radius / oracle.rate_sq, b, c.M2}));
    }
    return t;
}

// One quarter-ball replication: {loss, statistic S, sigma'}.
std::vector<double> quarter_rep(const CellContext& ctx, const Cell& cell, const SimSettings& s,
                                const SelectOptions& opts, bool duplicate, std::uint64_t rep_seed) {
    const auto& f = *ctx.family;
    Rng rng(derive_seed(rep_seed, kStreamNoise));
    const Vec y = make_observation(ctx.theta, cell.sigma, ctx.noise, rng);
    Vec y1, y2;
    double sigma_prime;
    if (duplicate) {
        Rng dup(derive_seed(rep_seed, kStreamDuplication));
        std::tie(y1, y2) = duplicate_gaussian(y, cell.sigma, dup);
        sigma_prime = std::sqrt(2.0) * cell.sigma;
    } else {
        Rng second(derive_seed(rep_seed, kStreamDuplication));
        y1 = make_observation(ctx.theta, cell.sigma, ctx.noise, second);
        y2 = y;
        sigma_prime = effective_sigma(ctx, cell);
    }
    const Vec est = estimate(y2, f, sigma_prime, s.kappa, s.estimator, s.mode, opts, nullptr);
    const double v = v_statistic(ctx.bernoulli ? VKind::Bernoulli : VKind::UnitVariance, y1, y2);
    const double stat = (y1 - est).squaredNorm() - sigma_prime * sigma_prime * v;
    return {(est - ctx.theta).squaredNorm(), stat, sigma_prime};
}

Table sim_coverage_quarter(const SimSettings& s, std::uint64_t master, int workers) {
    Table t;
    t.header = {"n", "sigma", "M", "coverage", "se", "mean_radius_sq", "oracle_rate_sq",
                "radius_over_oracle", "M1", "duplication"};
    const auto cal = calibration_of(s.raw);
    const json noise = s.raw.contains("noise") ? s.raw.at("noise") : json{{"kind", "gaussian"}};
    const bool gaussian = get_string(noise, "kind", "gaussian") == "gaussian";
    const auto dup = get_string(s.raw, "duplication", gaussian ? "gaussian" : "second_sample");
    if (dup != "gaussian" && dup != "second_sample")
        throw ConfigError("field 'duplication': expected 'gaussian' or 'second_sample'");
    if (dup == "gaussian" && !gaussian)
        throw ConfigError("gaussian duplication requires gaussian noise; use a second sample");
    for (const auto& cell0 : make_cells(s.raw, !cal, false)) {
        Cell cell = cell0;
        const auto ctx = prepare_cell(s.raw, cell, master);
        const auto& f = *ctx.family;
        if (!quarter_ball_supported(f))
            throw Unsupported(to_string(f.kind()) + ": the quarter ball is not available");
        const auto c = constants_of(s.raw, s.kappa);
        const auto opts = select_options(s.raw, master);
        const int n = f.ambient_dim();
        const bool duplicate = dup == "gaussian";
        if (cal) {
            const auto cal_seed = derive_seed(~ctx.cell_seed, kStreamCalibration);
            const auto per = run_reps(cal->reps, workers, [&](int rep) {
                const auto r = quarter_rep(ctx, cell, s, opts, duplicate, derive_seed(cal_seed, rep));
                return std::vector<double>{quarter_required_m(r[0], r[1], r[2], c.M1, n)};
            });
            cell.M = empirical_quantile(column_of(per, 0), cal->target);
        }
        const double g = std::sqrt(cell.M * (cell.M + c.M1));
        const auto per = run_reps(s.reps, workers, [&](int rep) {
            const auto r = quarter_rep(ctx, cell, s, opts, duplicate, derive_seed(ctx.cell_seed, rep));
            const double radius = std::max(0.0, r[1] + 2 * r[2] * r[2] * g * std::sqrt(double(n)));
            return std::vector<double>{r[0] <= radius ? 1.0 : 0.0, radius};
        });
        const auto cov = summarize(per, 0);
        const double radius = summarize(per, 1).mean;
        const auto oracle = oracle_rate(ctx.theta, f, effective_sigma(ctx, cell), 1.0, s.mode, opts);
        auto row = fmt({double(cell.n), cell.sigma, cell.M, cov.mean, cov.se, radius, oracle.rate_sq,
                        radius / oracle.rate_sq, c.M1});
        row.push_back(dup);
        t.add(std::move(row));
    }
    return t;
}

Table sim_size(const SimSettings& s, std::uint64_t master, int workers) {
    Table t;
    t.header = {"n", "sigma", "t", "M", "oracle_rate_sq", "ebr_mean_radius_sq", "ebr_q50", "ebr_q90",
                "quarter_mean_radius_sq", "quarter_q50", "quarter_q90", "size_margin"};
    const json noise = s.raw.contains("noise") ? s.raw.at("noise") : json{{"kind", "gaussian"}};
    const bool duplicate = get_string(noise, "kind", "gaussian") == "gaussian";
    for (const auto& cell : make_cells(s.raw, true, true)) {
        const auto ctx = prepare_cell(s.raw, cell, master);
        const auto& f = *ctx.family;
        const double sigma = effective_sigma(ctx, cell);
        const auto c = constants_of(s.raw, s.kappa);
        const auto opts = select_options(s.raw, master);
        const int n = f.ambient_dim();
        const bool quarter = quarter_ball_supported(f);
        const double g = std::sqrt(cell.M * (cell.M + c.M1));
        const auto per = run_reps(s.reps, workers, [&](int rep) {
            const auto seed = derive_seed(ctx.cell_seed, rep);
            const auto e = ebr_rep(ctx, cell, s, c, opts, seed);
            double qr = kNaN;
            if (quarter) {
                const auto q = quarter_rep(ctx, cell, s, opts, duplicate, seed);
                qr = std::max(0.0, q[1] + 2 * q[2] * q[2] * g * std::sqrt(double(n)));
            }
            return std::vector<double>{e[1] + (cell.t + 2) * cell.M * sigma * sigma, qr};
        });
        const auto oracle = oracle_rate(ctx.theta, f, sigma, 1.0, s.mode, opts);
        const auto ebr = column_of(per, 0);
        const auto qb = column_of(per, 1);
        // sigma^2 sqrt(N): the margin that dominates on highly structured parameters
        t.add(fmt({double(cell.n), cell.sigma, cell.t, cell.M, oracle.rate_sq, summarize(per, 0).mean,
                   empirical_quantile(ebr, 0.5), empirical_quantile(ebr, 0.9),
                   quarter ? summarize(per, 1).mean : kNaN, quarter ? empirical_quantile(qb, 0.5) : kNaN,
                   quarter ? empirical_quantile(qb, 0.9) : kNaN, sigma * sigma * std::sqrt(double(n))}));
    }
    return t;
}

Table sim_recovery_shell(const SimSettings& s, std::uint64_t master, int workers) {
    Table t;
    t.header = {"n", "sigma", "M", "delta", "rho_star", "rho_oracle", "frac_lower", "frac_upper",
                "frac_shell", "se", "mean_rho_hat"};
    const auto cal = calibration_of(s.raw);
    for (const auto& cell0 : make_cells(s.raw, !cal, false)) {
        Cell cell = cell0;
        const auto ctx = prepare_cell(s.raw, cell, master);
        const auto& f = *ctx.family;
        const double sigma = effective_sigma(ctx, cell);
        const auto c = constants_of(s.raw, s.kappa);
        const auto opts = select_options(s.raw, master);
        const double delta = get_number(s.raw, "delta", c.delta);
        const double upper_factor = get_number(s.raw, "shell_upper", c.M0);
        const double rho_star = f.majorant(oracle_rate(ctx.theta, f, sigma, c.tau0, s.mode, opts).structure);
        const double rho_o = f.majorant(oracle_rate(ctx.theta, f, sigma, 1.0, s.mode, opts).structure);
        auto rho_hat = [&](std::uint64_t seed) {
            Rng rng(derive_seed(seed, kStreamNoise));
            const Vec y = make_observation(ctx.theta, cell.sigma, ctx.noise, rng);
            return f.majorant(select_penalized(y, f, {sigma, s.kappa, false}, s.mode, opts).structure);
        };
        if (cal) {
            const auto cal_seed = derive_seed(~ctx.cell_seed, kStreamCalibration);
            const auto per = run_reps(cal->reps, workers, [&](int rep) {
                const double r = rho_hat(derive_seed(cal_seed, rep));
                return std::vector<double>{std::max({0.0, delta * rho_star - r, r - upper_factor * rho_o})};
            });
            cell.M = empirical_quantile(column_of(per, 0), cal->target);
        }
        const auto per = run_reps(s.reps, workers, [&](int rep) {
            const double r = rho_hat(derive_seed(ctx.cell_seed, rep));
            const double lo = r >= delta * rho_star - cell.M ? 1.0 : 0.0;
            const double hi = r <= upper_factor * rho_o + cell.M ? 1.0 : 0.0;
            return std::vector<double>{lo, hi, lo * hi, r};
        });
        const auto shell = summarize(per, 2);
        t.add(fmt({double(cell.n), cell.sigma, cell.M, delta, rho_star, rho_o, summarize(per, 0).mean,
                   summarize(per, 1).mean, shell.mean, shell.se, summarize(per, 3).mean}));
    }
    return t;
}

// ---- checks ------------------------------------------------------------------------------

EnumerationCaps caps_of(const json& cfg) { return select_options(cfg, 0).caps; }

Table check_table_a1(const json& cfg, std::uint64_t seed) {
    const auto f = family_from_json(require_object(cfg, "family"));
    const json noise_spec = cfg.contains("noise") ? cfg.at("noise") : json{{"kind", "gaussian"}};
    Vec theta = Vec::Constant(f->ambient_dim(), 0.5);
    if (cfg.contains("theta")) {
        const auto v = number_list(cfg, "theta", {});
        if (static_cast<int>(v.size()) != f->ambient_dim()) throw ConfigError("field 'theta': length mismatch");
        theta = Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    const auto noise = noise_for(noise_spec, theta);
    const double alpha = get_number(cfg, "alpha", noise.kind == NoiseKind::Bernoulli ? bernoulli_alpha() : 0.4);
    const auto rows = check_a1(*f, noise, alpha, get_int(cfg, "reps", 10000), seed, caps_of(cfg));
    Table t;
    // theta_dependent: the noise law depends on theta, so the check holds at that theta only
    t.header = {"structure", "dim", "estimate", "se", "bound", "closed_form", "saturated", "pass",
                "theta_dependent"};
    for (const auto& r : rows) {
        auto row = std::vector<std::string>{to_string(r.structure)};
        for (auto& s : fmt({double(r.dim), r.estimate, r.se, r.bound, r.closed_form, double(r.saturated)}))
            row.push_back(s);
        row.push_back(r.pass ? "true" : "false");
        row.push_back(noise.kind == NoiseKind::Bernoulli ? "true" : "false");
        t.add(std::move(row));
    }
    return t;
}

Table check_table_a2(const json& cfg) {
    const auto f = family_from_json(require_object(cfg, "family"));
    Table t;
    t.header = {"nu", "count", "sum", "bound", "pass"};
    for (double nu : number_list(cfg, "nu", {1.0})) {
        const auto r = check_a2(*f, nu, caps_of(cfg));
        auto row = fmt({nu, double(r.count), r.sum, r.bound ? *r.bound : kNaN});
        row.push_back(r.pass ? "true" : "false");
        t.add(std::move(row));
    }
    return t;
}

Table check_table_a3(const json& cfg, std::uint64_t seed) {
    const auto f = family_from_json(require_object(cfg, "family"));
    Table t;
    t.header = {"pair", "status", "a", "b", "witness", "containment_error", "rho_excess", "pass"};
    if (!f->supports_union()) {
        t.add({"0", "unsupported", "", "", "", "nan", "nan", "false"});
        return t;
    }
    const auto rows = check_a3(*f, get_int(cfg, "pairs", 100), get_int(cfg, "probes", 3), seed, caps_of(cfg));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        t.add({std::to_string(i), "ok", to_string(r.a), to_string(r.b), to_string(r.witness),
               format_number(r.containment_error), format_number(r.rho_excess), r.pass ? "true" : "false"});
    }
    return t;
}

Table check_table_a4(const json& cfg, std::uint64_t seed) {
    const json noise_spec = cfg.contains("noise") ? cfg.at("noise") : json{{"kind", "gaussian"}};
    const auto noise = NoiseModel::from_json(noise_spec);
    const int n = get_int(cfg, "n", 100);
    const auto rows = check_a4(noise, number_list(cfg, "M_grid", {0, 1, 4, 9}), get_int(cfg, "reps", 10000), n, seed);
    Table t;
    t.header = {"M", "psi1", "psi1_se", "psi2", "psi2_se", "psi1_envelope", "psi2_envelope"};
    const double c = noise.fourth_moment_constant();
    for (const auto& r : rows)
        t.add(fmt({r.M, r.psi1, r.psi1_se, r.psi2, r.psi2_se, std::exp(-r.M / 4),
                   r.M > 0 ? c / (r.M * r.M) : kNaN}));
    return t;
}

}  // namespace

// ---- public helpers ----------------------------------------------------------------------

std::string config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void Table::add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw Error("table: row width does not match the header");
    rows.push_back(std::move(row));
}

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    throw Error("table: no column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
    const auto& cell = rows.at(row).at(column(name));
    if (cell == "nan") return kNaN;
    if (cell == "inf") return std::numeric_limits<double>::infinity();
    if (cell == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0;
    std::from_chars(cell.data(), cell.data() + cell.size(), v);
    return v;
}

std::string to_csv(const Table& t, std::uint64_t seed, const std::string& hash) {
    std::string out = "# projstruct " + std::string(kVersion) + " seed=" + std::to_string(seed) +
                      " config_hash=" + hash + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
            if (!quote) {
                out += cells[i];
                continue;
            }
            out += '"';
            for (char ch : cells[i]) {
                if (ch == '"') out += '"';
                out += ch;
            }
            out += '"';
        }
        out += '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return out;
}

FamilyPtr family_for_size(const json& spec, int n) {
    json j = spec;
    if (n > 0) {
        const auto kind = get_string(spec, "kind", "");
        if (kind == "band") j["p"] = n;
        else if (kind == "bicluster") j["rows"] = j["cols"] = n;
        else if (kind == "leveled") j["max_level"] = n;
        else if (kind != "regression") j["n"] = n;
    }
    return family_from_json(j);
}

Vec make_signal(const json& spec, const Family& f, double sigma, Rng& rng) {
    const int n = f.ambient_dim();
    const auto kind = get_string(spec, "kind", "");
    if (kind == "zero") return Vec::Zero(n);
    if (kind == "vector") {
        const auto v = number_list(spec, "values", {});
        if (static_cast<int>(v.size()) != n) throw ConfigError("signal 'vector': length does not match the family");
        return Eigen::Map<const Vec>(v.data(), n);
    }
    if (kind == "constant") return Vec::Constant(n, require_number(spec, "value") * sigma);
    if (kind == "sobolev") {
        const double beta = get_number(spec, "beta", 1.0), scale = get_number(spec, "scale", 1.0);
        Vec th(n);
        for (int i = 0; i < n; ++i) th(i) = scale * std::pow(i + 1.0, -beta - 0.5);
        return th;
    }
    if (kind == "sparse") {
        const int s = get_int(spec, "s", 1);
        if (s < 0 || s > n) throw ConfigError("signal 'sparse': s must lie in [0, n]");
        const double amp = require_number(spec, "amplitude") * sigma;
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        if (get_string(spec, "positions", "random") == "random") std::shuffle(idx.begin(), idx.end(), rng);
        const bool random_signs = get_string(spec, "signs", "random") == "random";
        Vec th = Vec::Zero(n);
        std::bernoulli_distribution coin(0.5);
        for (int k = 0; k < s; ++k) th(idx[k]) = (random_signs && coin(rng)) ? -amp : amp;
        return th;
    }
    if (kind == "piecewise") {
        const int pieces = get_int(spec, "pieces", 2);
        if (pieces < 1 || pieces > n) throw ConfigError("signal 'piecewise': pieces must lie in [1, n]");
        const double amp = require_number(spec, "amplitude") * sigma;
        std::vector<int> cuts(n - 1);
        std::iota(cuts.begin(), cuts.end(), 1);
        std::shuffle(cuts.begin(), cuts.end(), rng);
        cuts.resize(pieces - 1);
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(n);
        Vec th(n);
        std::normal_distribution<double> z;
        int start = 0;
        for (int end : cuts) {
            th.segment(start, end - start).setConstant(amp * z(rng));
            start = end;
        }
        return th;
    }
    throw ConfigError("signal: unknown kind '" + kind + "'");
}

NoiseModel noise_for(const json& spec, const Vec& theta) {
    if (get_string(spec, "kind", "") == "bernoulli" && !spec.contains("theta")) {
        if (theta.minCoeff() < 0 || theta.maxCoeff() > 1)
            throw ConfigError("noise 'bernoulli': signal entries must lie in [0, 1]");
        return NoiseModel::bernoulli(theta);
    }
    return NoiseModel::from_json(spec);
}

Vec make_observation(const Vec& theta, double sigma, const NoiseModel& noise, Rng& rng) {
    const Vec xi = noise.sample(rng, static_cast<int>(theta.size()));
    if (noise.kind == NoiseKind::Bernoulli) return theta + xi;
    return theta + sigma * xi;
}

double empirical_quantile(std::vector<double> v, double q) {
    if (v.empty()) throw ContractError("empirical_quantile: empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

double ebr_required_m(double loss, double radius_at_zero, double t, double sigma) {
    return std::max(0.0, (loss - radius_at_zero) / ((t + 2) * sigma * sigma));
}

double quarter_required_m(double loss, double stat, double sigma_prime, double m1, int n) {
    const double g = std::max(0.0, (loss - stat) / (2 * sigma_prime * sigma_prime * std::sqrt(double(n))));
    // M (M + M1) = G^2
    return 0.5 * (-m1 + std::sqrt(m1 * m1 + 4 * g * g));
}

// ---- commands ----------------------------------------------------------------------------

json run_select(const json& config, std::uint64_t seed, const std::string& base_dir) {
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    const auto f = family_from_json(require_object(config, "family"));
    const double sigma = require_number(config, "sigma");
    if (!(sigma > 0)) throw ConfigError("field 'sigma': must be positive");
    const double kappa = get_number(config, "kappa", 1.0);
    if (!(kappa > 0)) throw ConfigError("field 'kappa': must be positive");
    const bool add_dim = get_bool(config, "add_dim_penalty", false);
    const int top_k = get_int(config, "top_k", 10);
    const auto mode = mode_of(config);
    const auto opts = select_options(config, seed);
    const int n = f->ambient_dim();

    Vec y;
    Vec theta;
    bool have_theta = false;
    if (config.contains("data")) {
        const auto v = number_list(config, "data", {});
        if (static_cast<int>(v.size()) != n) throw ConfigError("field 'data': length does not match the family");
        y = Eigen::Map<const Vec>(v.data(), n);
    } else if (config.contains("data_file")) {
        auto path = std::filesystem::path(get_string(config, "data_file", ""));
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        const auto v = read_samples_csv(path.string());
        if (static_cast<int>(v.size()) != n) throw ConfigError("data_file: length does not match the family");
        y = Eigen::Map<const Vec>(v.data(), n);
    } else if (config.contains("generator")) {
        const auto& g = config.at("generator");
        Rng signal_rng(derive_seed(seed, kStreamSignal));
        theta = make_signal(require_object(g, "signal"), *f, sigma, signal_rng);
        const auto noise = noise_for(g.contains("noise") ? g.at("noise") : json{{"kind", "gaussian"}}, theta);
        Rng noise_rng(derive_seed(seed, kStreamNoise));
        y = make_observation(theta, sigma, noise, noise_rng);
        have_theta = true;
    } else {
        throw ConfigError("select: one of 'data', 'data_file' or 'generator' is required");
    }
    require_finite(y, "select data");

    DdmConfig dcfg;
    dcfg.kappa = kappa;
    dcfg.sigma = sigma;
    dcfg.add_dim_penalty = add_dim;
    const auto sel = select_penalized(y, *f, dcfg.penalty(), mode, opts);

    // Posterior: full enumeration when it fits the cap, the exact sparsity
    // normalizer on the magnitude path, otherwise a restricted candidate set.
    DdmPosterior post;
    Vec ma;
    if (f->count(opts.caps) <= opts.caps.max_count) {
        post = structure_posterior(y, *f, dcfg, opts.caps);
        ma = ma_mean(y, *f, post);
    } else if (const auto* sf = dynamic_cast<const SparsityFamily*>(f.get())) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return std::abs(y(a)) > std::abs(y(b)); });
        std::vector<Structure> path;
        for (int k = 0; k <= n; ++k) {
            std::vector<int> idx(order.begin(), order.begin() + k);
            std::sort(idx.begin(), idx.end());
            path.push_back(SparseSet{idx});
        }
        post = structure_posterior(y, *f, dcfg, path);
        ma = sparsity_ma_mean(y, *sf, dcfg);
    } else {
        std::vector<Structure> cands{sel.structure, f->empty_structure()};
        if (auto full = f->full_structure()) cands.push_back(*full);
        std::vector<Structure> unique;
        for (const auto& c : cands)
            if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
        post = structure_posterior(y, *f, dcfg, unique);
        ma = ma_mean(y, *f, post);
    }

    auto vec_json = [](const Vec& v) {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
        return a;
    };
    json out;
    out["version"] = kVersion;
    out["seed"] = seed;
    out["config_hash"] = config_hash(config);
    out["family"] = f->describe();
    out["sigma"] = sigma;
    out["kappa"] = kappa;
    out["mode"] = mode == SelectMode::Exact ? "exact" : "heuristic";
    out["structure"] = to_json(sel.structure);
    out["objective"] = sel.objective;
    out["exact"] = sel.exact;
    out["rho"] = f->majorant(sel.structure);
    out["dim"] = f->dim(sel.structure);
    out["theta_ms"] = vec_json(f->project(sel.structure, y));
    out["theta_ma"] = vec_json(ma);
    out["posterior_method"] = to_string(post.method);
    out["posterior"] = posterior_to_json(post, top_k);
    if (have_theta) out["theta"] = vec_json(theta);
    return out;
}

Table run_simulate(const json& config, std::uint64_t seed, int workers) {
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    const auto s = sim_settings(config);
    if (s.experiment == "estimation-risk") return sim_estimation(s, seed, workers, false);
    if (s.experiment == "rate-scaling") return sim_estimation(s, seed, workers, true);
    if (s.experiment == "contraction") return sim_contraction(s, seed, workers);
    if (s.experiment == "coverage-ebr") return sim_coverage_ebr(s, seed, workers);
    if (s.experiment == "coverage-quarter") return sim_coverage_quarter(s, seed, workers);
    if (s.experiment == "size") return sim_size(s, seed, workers);
    if (s.experiment == "recovery-shell") return sim_recovery_shell(s, seed, workers);
    throw ConfigError("unknown experiment '" + s.experiment + "'");
}

Table run_check(const json& config, std::uint64_t seed, int workers) {
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    const auto which = get_string(config, "check", "");
    if (which == "a1") return check_table_a1(config, seed);
    if (which == "a2") return check_table_a2(config);
    if (which == "a3") return check_table_a3(config, seed);
    if (which == "a4") return check_table_a4(config, seed);
    throw ConfigError("field 'check': expected one of a1, a2, a3, a4");
}

}  // namespace projstruct
