// Python bindings for the core operations: config-driven simulation and
// analytics plus the closed-form evaluators. The Python surface mirrors the
// CLI's config schema so scripts and shell runs stay interchangeable.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <span>
#include <stdexcept>

#include "vmma/analytics.hpp"
#include "vmma/config.hpp"
#include "vmma/fourier.hpp"
#include "vmma/io.hpp"
#include "vmma/lamperti.hpp"
#include "vmma/simulate.hpp"

namespace py = pybind11;
using namespace vmma;

namespace {

struct Experiment {
    ExperimentConfig cfg;

    const SimulationModel& model() const {
        if (!cfg.model) throw ConfigError("config: missing model block");
        return *cfg.model;
    }
    const GridSpec& target() const {
        if (!cfg.target) throw ConfigError("config: missing grid block");
        return *cfg.target;
    }
    ModelGrids grids() const { return derive_grids(model(), target(), cfg.truncation_tol); }
    TypeGLaw law() const { return TypeGLaw(model(), grids()); }
};

FieldSample draw_field(const Experiment& e, std::size_t rep) {
    ModelGrids grids = e.grids();
    RngStream stream = RngStream(e.cfg.run.master_seed).child(rep);
    FieldSample vol = volatility_draw(e.model(), grids, stream.child(0));
    return simulate_vmmma(e.model().kernel_g, vol, e.target(), stream.child(1));
}

py::dict estimate_dict(const EstimateSE& est) {
    py::dict d;
    d["value"] = est.value;
    d["se"] = est.se;
    return d;
}

py::dict summary_dict(const MonteCarloSummary& s) {
    py::dict d;
    d["n_reps"] = s.n_reps;
    d["mean"] = estimate_dict(s.mean);
    d["second_moment"] = estimate_dict(s.second_moment);
    auto pack = [](const std::vector<EstimateSE>& v) {
        py::list out;
        for (const auto& e : v) out.append(estimate_dict(e));
        return out;
    };
    d["covariance"] = pack(s.covariance);
    d["correlation"] = pack(s.correlation);
    d["covariance_squares"] = pack(s.covariance_squares);
    d["char_fn"] = pack(s.char_fn);
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "volatility-modulated mixed moving-average random fields";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<GridAxis>(m, "GridAxis")
        .def(py::init<double, double, std::size_t>(), py::arg("origin"), py::arg("step"),
             py::arg("count"))
        .def_readonly("origin", &GridAxis::origin)
        .def_readonly("step", &GridAxis::step)
        .def_readonly("count", &GridAxis::count);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<std::vector<GridAxis>>(), py::arg("axes"))
        .def_property_readonly("dim", &GridSpec::dim)
        .def("__len__", &GridSpec::size)
        .def("node", &GridSpec::node, py::arg("flat_index"))
        .def_property_readonly("axes", [](const GridSpec& g) {
            return std::vector<GridAxis>(g.axes().begin(), g.axes().end());
        });

    py::class_<FieldSample>(m, "FieldSample")
        .def_readonly("grid", &FieldSample::grid)
        .def_readonly("values", &FieldSample::values)
        .def("coordinates", &FieldSample::coordinates, py::arg("flat_index"))
        .def("__len__", [](const FieldSample& f) { return f.values.size(); });

    py::class_<Experiment>(m, "Experiment")
        .def_static(
            "from_json",
            [](const std::string& text) { return Experiment{parse_config(text)}; },
            py::arg("text"), "Parse a config document (same schema as the CLI).")
        .def_static(
            "load",
            [](const std::filesystem::path& path) { return Experiment{load_config(path)}; },
            py::arg("path"))
        .def_property_readonly("n_reps", [](const Experiment& e) { return e.cfg.run.n_reps; })
        .def_property_readonly("master_seed",
                               [](const Experiment& e) { return e.cfg.run.master_seed; })
        .def_property_readonly("grid", [](const Experiment& e) { return e.target(); })
        .def("simulate_field", &draw_field, py::arg("rep") = 0,
             "One field draw on the target grid (replication `rep`).")
        .def(
            "simulate_volatility",
            [](const Experiment& e, std::size_t rep) {
                ModelGrids grids = e.grids();
                return volatility_draw(e.model(), grids,
                                       RngStream(e.cfg.run.master_seed).child(rep).child(0));
            },
            py::arg("rep") = 0, "The squared-volatility draw behind replication `rep`.")
        .def(
            "replicate",
            [](const Experiment& e, std::size_t n_reps) {
                ReplicationRequest request{e.cfg.run.lags, e.cfg.run.thetas};
                std::size_t n = n_reps ? n_reps : e.cfg.run.n_reps;
                return summary_dict(replicate(e.model(), e.grids(), request, n,
                                              RngStream(e.cfg.run.master_seed)));
            },
            py::arg("n_reps") = 0, "Monte Carlo summary over the config's lags and thetas.")
        .def(
            "char_x", [](const Experiment& e, double theta) { return e.law().char_X(theta); },
            py::arg("theta"), "Analytic characteristic function of X(0).")
        .def(
            "laplace_v",
            [](const Experiment& e, double theta) { return e.law().laplace_V(theta); },
            py::arg("theta"), "log E exp(-theta V).")
        .def("var_x0", [](const Experiment& e) { return e.law().mean_V(); })
        .def(
            "correlation",
            [](const Experiment& e, const std::vector<double>& lag) {
                return correlation_X(e.model().kernel_g, lag);
            },
            py::arg("lag"), "Stationary correlation of the field (quadrature).");

    m.def(
        "selfsim_spectral",
        [](double H, double w, double tol) { return selfsim_spectral(H, w, tol); }, py::arg("H"),
        py::arg("w"), py::arg("tol") = 1e-10,
        "Spectral density series of the d=1 self-similar correlation.");

    m.def(
        "design_kernel",
        [](const std::vector<double>& lags, const std::vector<double>& values,
           const std::string& root) {
            if (lags.size() < 2) throw std::invalid_argument("design_kernel: need >= 2 lags");
            double step = lags[1] - lags[0];
            CovarianceTable table{GridSpec({GridAxis{lags.front(), step, lags.size()}}), values};
            SpectralRoot r = root == "odd" ? SpectralRoot::odd : SpectralRoot::even;
            DesignResult res = kernel_from_covariance(table, r);
            const auto& tab = std::get<TabulatedKernel>(res.kernel.family());
            py::dict out;
            std::vector<double> z(tab.grid.size());
            for (std::size_t i = 0; i < z.size(); ++i) z[i] = tab.grid.node(i)[0];
            out["z"] = z;
            out["values"] = tab.values;
            out["roundtrip_error"] = res.roundtrip_error;
            return out;
        },
        py::arg("lags"), py::arg("values"), py::arg("root") = "even",
        "Spectral-root kernel design from a symmetric covariance table.");

    m.def(
        "to_mss",
        [](const FieldSample& x, const std::vector<double>& H) { return to_mss(x, MssIndex(H)); },
        py::arg("field"), py::arg("H"));
    m.def(
        "from_mss",
        [](const FieldSample& y, const std::vector<double>& H) {
            return from_mss(y, MssIndex(H));
        },
        py::arg("field"), py::arg("H"));
    m.def(
        "rho_translation_invariant",
        [](const std::vector<double>& H, const std::vector<double>& lag) {
            return rho_translation_invariant(MssIndex(H), lag);
        },
        py::arg("H"), py::arg("lag"),
        "Correlation of the stationary field underlying a translation-invariant-increment "
        "transform.");
    m.def(
        "stat_incr_covariance",
        [](const std::vector<double>& H, double var_x0, const std::vector<double>& t,
           const std::vector<double>& s) {
            return stat_incr_covariance(MssIndex(H), var_x0, t, s);
        },
        py::arg("H"), py::arg("var_x0"), py::arg("t"), py::arg("s"));
}
