#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "projstruct/balls.hpp"
#include "projstruct/ddm.hpp"
#include "projstruct/errors.hpp"
#include "projstruct/family.hpp"
#include "projstruct/harness.hpp"
#include "projstruct/oracle.hpp"
#include "projstruct/selection.hpp"

namespace py = pybind11;
using namespace projstruct;
using nlohmann::json;

namespace {

// JSON crosses the boundary through the stdlib json module, so structures,
// configs and reports are plain Python dicts and lists.
json from_py(const py::handle& obj) {
    const py::object dumps = py::module_::import("json").attr("dumps");
    return json::parse(dumps(obj).cast<std::string>());
}

py::object to_py(const json& j) {
    const py::object loads = py::module_::import("json").attr("loads");
    return loads(j.dump());
}

SelectMode mode_of(const std::string& m) {
    if (m == "exact") return SelectMode::Exact;
    if (m == "heuristic") return SelectMode::Heuristic;
    throw ConfigError("mode must be 'exact' or 'heuristic'");
}

py::dict table_to_py(const Table& t) {
    py::dict d;
    d["header"] = t.header;
    d["rows"] = t.rows;
    return d;
}

DdmConfig ddm_config(double sigma, double kappa, bool add_dim) {
    DdmConfig c;
    c.sigma = sigma;
    c.kappa = kappa;
    c.add_dim_penalty = add_dim;
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Projection-structure selection, empirical Bayes posteriors and confidence balls";
    m.attr("__version__") = kVersion;

    // Translators run newest first, so the base class is registered first.
    const auto& error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ContractError>(m, "ContractError", error.ptr());
    py::register_exception<CapExceeded>(m, "CapExceeded", error.ptr());
    py::register_exception<Unsupported>(m, "Unsupported", error.ptr());
    const auto& config = py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    static PyObject* config_type = config.ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const json::exception& e) {
            PyErr_SetString(config_type, e.what());
        }
    });

    py::class_<Family, std::shared_ptr<Family>>(m, "Family")
        .def(py::init([](const py::dict& spec) {
                 return std::const_pointer_cast<Family>(family_from_json(from_py(spec)));
             }),
             py::arg("spec"))
        .def_property_readonly("kind", [](const Family& f) { return to_string(f.kind()); })
        .def_property_readonly("ambient_dim", &Family::ambient_dim)
        .def("describe", [](const Family& f) { return to_py(f.describe()); })
        .def("project",
             [](const Family& f, const py::dict& s, const Vec& theta) {
                 return f.project(structure_from_json(from_py(s)), theta);
             },
             py::arg("structure"), py::arg("theta"))
        .def("dim", [](const Family& f, const py::dict& s) { return f.dim(structure_from_json(from_py(s))); })
        .def("majorant",
             [](const Family& f, const py::dict& s) { return f.majorant(structure_from_json(from_py(s))); })
        .def("union",
             [](const Family& f, const py::dict& a, const py::dict& b) {
                 return to_py(to_json(f.union_structure(structure_from_json(from_py(a)),
                                                        structure_from_json(from_py(b)))));
             })
        .def("count", [](const Family& f, double max_count) {
            EnumerationCaps caps;
            caps.max_count = max_count;
            return f.count(caps);
        }, py::arg("max_count") = EnumerationCaps{}.max_count)
        .def("enumerate",
             [](const Family& f, double max_count) {
                 EnumerationCaps caps;
                 caps.max_count = max_count;
                 py::list out;
                 for (const auto& s : enumerate(f, caps)) out.append(to_py(to_json(s)));
                 return out;
             },
             py::arg("max_count") = EnumerationCaps{}.max_count);

    m.def(
        "select",
        [](const Vec& y, const Family& f, double sigma, double kappa, const std::string& mode, bool add_dim,
           std::uint64_t seed) {
            SelectOptions opts;
            opts.seed = seed;
            Selection sel;
            {
                py::gil_scoped_release release;
                sel = select_penalized(y, f, {sigma, kappa, add_dim}, mode_of(mode), opts);
            }
            py::dict d;
            d["structure"] = to_py(to_json(sel.structure));
            d["objective"] = sel.objective;
            d["exact"] = sel.exact;
            d["theta_ms"] = Vec(f.project(sel.structure, y));
            return d;
        },
        py::arg("y"), py::arg("family"), py::arg("sigma"), py::arg("kappa") = 1.0, py::arg("mode") = "exact",
        py::arg("add_dim") = false, py::arg("seed") = SelectOptions{}.seed,
        "Penalized selection: argmin ||y - P_I y||^2 + 2 kappa sigma^2 rho(I).");

    m.def(
        "posterior",
        [](const Vec& y, const Family& f, double sigma, double kappa, bool add_dim, int top_k) {
            const auto post = structure_posterior(y, f, ddm_config(sigma, kappa, add_dim));
            py::dict d;
            d["method"] = to_string(post.method);
            d["log_normalizer"] = post.log_normalizer;
            d["top"] = to_py(posterior_to_json(post, top_k));
            d["theta_ma"] = ma_mean(y, f, post);
            return d;
        },
        py::arg("y"), py::arg("family"), py::arg("sigma"), py::arg("kappa") = 1.0, py::arg("add_dim") = false,
        py::arg("top_k") = 10, "Structure posterior by full enumeration.");

    m.def(
        "sparsity_inclusion_probabilities",
        [](const Vec& y, const Family& f, double sigma, double kappa) {
            const auto* sf = dynamic_cast<const SparsityFamily*>(&f);
            if (!sf) throw Unsupported("inclusion probabilities need a sparsity family");
            return sparsity_inclusion_probabilities(y, *sf, ddm_config(sigma, kappa, false));
        },
        py::arg("y"), py::arg("family"), py::arg("sigma"), py::arg("kappa") = 1.0);

    m.def(
        "sparsity_log_normalizer",
        [](const Vec& y, const Family& f, double sigma, double kappa) {
            const auto* sf = dynamic_cast<const SparsityFamily*>(&f);
            if (!sf) throw Unsupported("the symmetric-polynomial normalizer needs a sparsity family");
            return sparsity_log_normalizer(y, *sf, ddm_config(sigma, kappa, false));
        },
        py::arg("y"), py::arg("family"), py::arg("sigma"), py::arg("kappa") = 1.0);

    m.def(
        "oracle_rate",
        [](const Vec& theta, const Family& f, double sigma, double tau) {
            return to_py(to_json(oracle_rate(theta, f, sigma, tau)));
        },
        py::arg("theta"), py::arg("family"), py::arg("sigma"), py::arg("tau") = 1.0);

    m.def(
        "constants",
        [](const py::dict& overrides) { return to_py(to_json(constants_from_json(from_py(overrides)))); },
        py::arg("overrides") = py::dict(), "Framework constants from theory, with optional overrides.");

    m.def(
        "ebr_radius_sq",
        [](const Family& f, double sigma, const py::dict& constants, const py::dict& i_hat, const Vec& theta_hat,
           double t, double M) {
            return ebr_ball(f, sigma, constants_from_json(from_py(constants)), structure_from_json(from_py(i_hat)),
                            theta_hat, t, M)
                .radius_sq;
        },
        py::arg("family"), py::arg("sigma"), py::arg("constants"), py::arg("i_hat"), py::arg("theta_hat"),
        py::arg("t"), py::arg("M"));

    m.def(
        "quarter_radius_sq",
        [](const Vec& y_prime, const Vec& theta_hat, double sigma, double M, double M1, double v_stat) {
            return quarter_ball(y_prime, theta_hat, sigma, M, M1, v_stat).radius_sq;
        },
        py::arg("y_prime"), py::arg("theta_hat"), py::arg("sigma"), py::arg("M"), py::arg("M1"),
        py::arg("v_stat"));

    m.def(
        "run_select",
        [](const py::dict& config, std::uint64_t seed, const std::string& base_dir) {
            return to_py(run_select(from_py(config), seed, base_dir));
        },
        py::arg("config"), py::arg("seed") = 0, py::arg("base_dir") = ".");

    m.def(
        "run_simulate",
        [](const py::dict& config, std::uint64_t seed, int workers) {
            const json cfg = from_py(config);
            Table t;
            {
                py::gil_scoped_release release;
                t = run_simulate(cfg, seed, workers);
            }
            return table_to_py(t);
        },
        py::arg("config"), py::arg("seed") = 0, py::arg("workers") = 1);

    m.def(
        "run_check",
        [](const py::dict& config, std::uint64_t seed) {
            const json cfg = from_py(config);
            Table t;
            {
                py::gil_scoped_release release;
                t = run_check(cfg, seed, 1);
            }
            return table_to_py(t);
        },
        py::arg("config"), py::arg("seed") = 0);

    m.def("config_hash", [](const py::dict& config) { return config_hash(from_py(config)); });
}
