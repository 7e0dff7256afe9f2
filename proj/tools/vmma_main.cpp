// Command-line front end: wires experiment configs to the simulation,
// analytics, kernel-design, and Lamperti-transform modules and writes
// machine-readable CSV/JSON outputs (layouts documented in docs/FORMATS.md).
//
// Exit codes: 0 ok, 1 config/validation problem, 2 numeric failure (including
// a failed verification report).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vmma/analytics.hpp"
#include "vmma/config.hpp"
#include "vmma/fourier.hpp"
#include "vmma/io.hpp"
#include "vmma/lamperti.hpp"
#include "vmma/simulate.hpp"

namespace {

using namespace vmma;
using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const std::filesystem::path& path, const std::string& payload, bool quiet) {
    write_file_atomic(path, payload);
    if (!quiet) std::cout << path.string() << '\n';
}

const SimulationModel& need_model(const ExperimentConfig& cfg) {
    if (!cfg.model) throw ConfigError("config: this command needs a model block");
    return *cfg.model;
}

const GridSpec& need_grid(const ExperimentConfig& cfg) {
    if (!cfg.target) throw ConfigError("config: this command needs a grid block");
    return *cfg.target;
}

/// |a - b| <= 4 se, with a small absolute floor so exact-zero-SE comparisons
/// of analytically identical quantities do not fail on rounding.
bool within_4se(double a, double b, double se) { return std::abs(a - b) <= 4.0 * se + 1e-9; }

// --- simulate ----------------------------------------------------------------

int cmd_simulate(const ExperimentConfig& cfg, bool quiet) {
    const SimulationModel& model = need_model(cfg);
    const GridSpec& target = need_grid(cfg);
    ModelGrids grids = derive_grids(model, target, cfg.truncation_tol);
    RngStream master(cfg.run.master_seed);

    ReplicationRequest request{cfg.run.lags, cfg.run.thetas};
    MonteCarloSummary summary = replicate(model, grids, request, cfg.run.n_reps, master);

    // Representative draw: replication 0, the same substreams replicate() uses.
    RngStream rep0 = master.child(0);
    FieldSample vol = volatility_draw(model, grids, rep0.child(0));
    FieldSample field = simulate_vmmma(model.kernel_g, vol, target, rep0.child(1));

    const auto& dir = cfg.output.dir;
    std::string field_csv = field_to_csv(field);
    emit(dir / "field.csv", field_csv, quiet);
    emit(dir / "field.json", field_sidecar_json(field, cfg.run.master_seed, field_csv), quiet);
    std::string vol_csv = field_to_csv(vol);
    emit(dir / "volatility.csv", vol_csv, quiet);
    emit(dir / "volatility.json", field_sidecar_json(vol, cfg.run.master_seed, vol_csv), quiet);
    emit(dir / "summary.json", summary_to_json(summary, request.lags, request.thetas), quiet);

    json run;
    run["format"] = "vmma-run-v1";
    run["master_seed"] = cfg.run.master_seed;
    run["n_reps"] = cfg.run.n_reps;
    run["model_fingerprint"] = content_hash_hex(model_fingerprint(model));
    emit(dir / "run.json", run.dump(2) + "\n", quiet);
    return 0;
}

// --- analyze -----------------------------------------------------------------

// Verification battery for configs with a model block: analytic law against
// Monte Carlo dual routes. Appends one entry per check and folds the flags.
void analyze_model(const ExperimentConfig& cfg, bool quiet, json& checks, bool& all_pass) {
    const SimulationModel& model = need_model(cfg);
    const GridSpec& target = need_grid(cfg);
    ModelGrids grids = derive_grids(model, target, cfg.truncation_tol);
    TypeGLaw law(model, grids);

    std::vector<double> theta_grid = cfg.run.theta_grid;
    if (theta_grid.empty())
        for (int i = 1; i <= 16; ++i) theta_grid.push_back(0.25 * i);
    std::vector<double> thetas = cfg.run.thetas;
    if (thetas.empty()) thetas = {0.0, 0.5, 1.0, 2.0};

    const auto& dir = cfg.output.dir;
    std::vector<double> laplace(theta_grid.size());
    for (std::size_t i = 0; i < theta_grid.size(); ++i) laplace[i] = law.laplace_V(theta_grid[i]);
    emit(dir / "laplace_v.csv", table_to_csv("theta", "value", theta_grid, laplace), quiet);

    std::vector<double> cf(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) cf[i] = law.char_X(thetas[i]);
    emit(dir / "char_fn.csv", table_to_csv("theta", "value", thetas, cf), quiet);

    // Monte Carlo cross-checks against the analytic law.
    RngStream master(cfg.run.master_seed);
    ReplicationRequest request{cfg.run.lags, thetas};
    MonteCarloSummary mc = replicate(model, grids, request, cfg.run.n_reps, master);

    auto add_check = [&](json check, bool pass) {
        check["pass"] = pass;
        checks.push_back(std::move(check));
        all_pass = all_pass && pass;
    };

    {
        double v = law.laplace_V(0.0);
        add_check({{"name", "laplace_zero"}, {"value", v}, {"tolerance", 1e-12}},
                  std::abs(v) <= 1e-12);
    }
    {
        double lo = 1.0, hi = 0.0;
        for (double v : cf) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        add_check({{"name", "cf_bounds"}, {"min", lo}, {"max", hi}}, lo > 0.0 && hi <= 1.0);
    }
    {
        double d = law.doubling_change();
        add_check({{"name", "tail_truncation"}, {"doubling_change", d}, {"tolerance", 0.1}},
                  d < 0.1);
    }
    {
        MonotonicityReport rep = check_complete_monotonicity(law, theta_grid, 4);
        json orders = json::array();
        for (const auto& o : rep.orders)
            orders.push_back(
                {{"order", o.order}, {"worst_margin", o.worst_margin}, {"pass", o.pass}});
        add_check({{"name", "complete_monotonicity"},
                   {"orders", orders},
                   {"noise_floor", rep.noise_floor}},
                  rep.pass);
    }
    {
        double analytic = law.mean_V();
        bool ok = within_4se(analytic, mc.second_moment.value, mc.second_moment.se);
        add_check({{"name", "variance_mc"},
                   {"analytic", analytic},
                   {"mc", mc.second_moment.value},
                   {"se", mc.second_moment.se}},
                  ok);
    }
    {
        json detail = json::array();
        bool ok = true;
        for (std::size_t i = 0; i < thetas.size(); ++i) {
            bool here = within_4se(cf[i], mc.char_fn[i].value, mc.char_fn[i].se);
            detail.push_back({{"theta", thetas[i]},
                              {"analytic", cf[i]},
                              {"mc", mc.char_fn[i].value},
                              {"se", mc.char_fn[i].se},
                              {"pass", here}});
            ok = ok && here;
        }
        add_check({{"name", "char_fn_mc"}, {"details", detail}}, ok);
    }
    if (!cfg.run.lags.empty()) {
        json detail = json::array();
        bool ok = true;
        for (std::size_t i = 0; i < cfg.run.lags.size(); ++i) {
            double analytic = correlation_X(model.kernel_g, cfg.run.lags[i]);
            bool here = within_4se(analytic, mc.correlation[i].value, mc.correlation[i].se);
            detail.push_back({{"lag", cfg.run.lags[i]},
                              {"analytic", analytic},
                              {"mc", mc.correlation[i].value},
                              {"se", mc.correlation[i].se},
                              {"pass", here}});
            ok = ok && here;
        }
        add_check({{"name", "correlation_mc"}, {"details", detail}}, ok);

        detail = json::array();
        ok = true;
        std::size_t n_vol = std::min<std::size_t>(cfg.run.n_reps, 400);
        std::vector<double> t0 = target.node(0);
        for (std::size_t i = 0; i < cfg.run.lags.size() && i < 4; ++i) {
            std::vector<double> t1 = t0;
            for (std::size_t a = 0; a < t1.size(); ++a) t1[a] += std::abs(cfg.run.lags[i][a]);
            EstimateSE analytic =
                cov_squares(model, grids, t0, t1, n_vol, master.child((1ull << 40) + i));
            const EstimateSE& emp = mc.covariance_squares[i];
            double se = std::sqrt(analytic.se * analytic.se + emp.se * emp.se);
            bool here = within_4se(analytic.value, emp.value, se);
            detail.push_back({{"lag", cfg.run.lags[i]},
                              {"analytic", analytic.value},
                              {"analytic_se", analytic.se},
                              {"mc", emp.value},
                              {"mc_se", emp.se},
                              {"pass", here}});
            ok = ok && here;
        }
        add_check({{"name", "covariance_squares"}, {"details", detail}}, ok);
    }
    {
        // Two-point law: kumulant route vs conditional-CF averaging.
        std::vector<std::vector<double>> points{target.node(0)};
        if (!cfg.run.lags.empty()) {
            std::vector<double> t1 = points[0];
            for (std::size_t a = 0; a < t1.size(); ++a) t1[a] += std::abs(cfg.run.lags[0][a]);
            points.push_back(t1);
        } else if (target.axes()[0].count > 1) {
            std::vector<double> t1 = points[0];
            t1[0] += target.axes()[0].step;
            points.push_back(t1);
        }
        double th = 0.5;
        for (double t : thetas)
            if (t != 0.0) {
                th = t;
                break;
            }
        std::vector<double> point_thetas(points.size(), th);
        if (point_thetas.size() > 1) point_thetas[1] = 0.5 * th;
        double kum = joint_cf_kumulant(model, grids, points, point_thetas);
        EstimateSE avg = joint_cf_mc(model, grids, points, point_thetas,
                                     std::min<std::size_t>(cfg.run.n_reps, 500),
                                     master.child((1ull << 40) + 64));
        add_check({{"name", "joint_cf_modes"},
                   {"n_points", points.size()},
                   {"theta", point_thetas},
                   {"kumulant", kum},
                   {"mc", avg.value},
                   {"se", avg.se}},
                  within_4se(kum, avg.value, avg.se));
    }
}

int cmd_analyze(const ExperimentConfig& cfg, bool quiet) {
    if (!cfg.model && !cfg.design)
        throw ConfigError("config: this command needs a model or design block");

    json checks = json::array();
    bool all_pass = true;
    if (cfg.model) analyze_model(cfg, quiet, checks, all_pass);
    if (cfg.design) {
        // Validates the design covariance is usable; Bochner violations throw
        // here and surface as a numeric failure (exit code 2).
        DesignResult res = kernel_from_covariance(cfg.design->covariance, cfg.design->root);
        bool ok = std::isfinite(res.roundtrip_error);
        checks.push_back(
            {{"name", "design_roundtrip"}, {"roundtrip_error", res.roundtrip_error}, {"pass", ok}});
        all_pass = all_pass && ok;
    }

    json report;
    report["format"] = "vmma-report-v1";
    report["n_reps"] = cfg.run.n_reps;
    report["pass"] = all_pass;
    report["checks"] = checks;
    emit(cfg.output.dir / "report.json", report.dump(2) + "\n", quiet);

    if (!all_pass) {
        std::cerr << "verification failed:";
        for (const auto& c : checks)
            if (!c["pass"].get<bool>()) std::cerr << ' ' << c["name"].get<std::string>();
        std::cerr << '\n';
        return 2;
    }
    if (!quiet) std::cout << "verification: pass\n";
    return 0;
}

// --- design-kernel -----------------------------------------------------------

int cmd_design_kernel(const ExperimentConfig& cfg, bool quiet) {
    if (!cfg.design) throw ConfigError("config: this command needs a design block");
    DesignResult res = kernel_from_covariance(cfg.design->covariance, cfg.design->root);
    const auto& tab = std::get<TabulatedKernel>(res.kernel.family());

    const auto& dir = cfg.output.dir;
    std::string csv = kernel_to_csv(tab.grid, tab.values);
    emit(dir / "designed_kernel.csv", csv, quiet);

    json meta;
    meta["format"] = "vmma-design-v1";
    meta["root"] = cfg.design->root == SpectralRoot::even ? "even" : "odd";
    meta["roundtrip_error"] = res.roundtrip_error;
    meta["content_hash"] = content_hash_hex(csv);
    emit(dir / "design.json", meta.dump(2) + "\n", quiet);
    return 0;
}

// --- lamperti ----------------------------------------------------------------

/// (1/pi) int_0^inf rho(h) cos(h w) dh by two-zone composite Simpson: a fine
/// zone over [0, 0.1] absorbs the h^{2H} endpoint kink, the coarse zone runs
/// to where rho has decayed below ~1e-22.
double rho_cosine_transform(const MssIndex& index, double w) {
    auto f = [&](double h) {
        return rho_translation_invariant(index, std::span<const double>(&h, 1)) * std::cos(h * w);
    };
    auto simpson = [&](double a, double b, std::size_t n) {
        double step = (b - a) / static_cast<double>(n);
        double s = f(a) + f(b);
        for (std::size_t i = 1; i < n; ++i) s += f(a + static_cast<double>(i) * step) * (i % 2 ? 4.0 : 2.0);
        return s * step / 3.0;
    };
    double H = index.exponents()[0];
    double decay = std::min(H, 1.0 - H);
    double h_hi = std::min(50.0 / decay, 4000.0);
    auto even_count = [](double length, double step) {
        auto n = static_cast<std::size_t>(std::ceil(length / step));
        return n + n % 2;
    };
    double fine = simpson(0.0, 0.1, even_count(0.1, 1e-4));
    double coarse = simpson(0.1, h_hi, even_count(h_hi - 0.1, 2e-3));
    return (fine + coarse) / std::numbers::pi;
}

int cmd_lamperti(const ExperimentConfig& cfg, bool quiet) {
    const SimulationModel& model = need_model(cfg);
    const GridSpec& target = need_grid(cfg);
    if (cfg.run.mss_exponents.empty())
        throw ConfigError("config: lamperti needs run.H (self-similarity exponents)");
    if (cfg.run.mss_exponents.size() != target.dim())
        throw ConfigError("config: run.H length must match the grid dimension");
    MssIndex index(cfg.run.mss_exponents);

    ModelGrids grids = derive_grids(model, target, cfg.truncation_tol);
    RngStream master(cfg.run.master_seed);
    const auto& dir = cfg.output.dir;

    // Transformed field from replication 0.
    RngStream rep0 = master.child(0);
    FieldSample vol0 = volatility_draw(model, grids, rep0.child(0));
    FieldSample x0 = simulate_vmmma(model.kernel_g, vol0, target, rep0.child(1));
    FieldSample y0 = to_mss(x0, index);
    std::string y_csv = field_to_csv(y0);
    emit(dir / "y_field.csv", y_csv, quiet);
    emit(dir / "y_field.json",
         field_sidecar_json(y0, cfg.run.master_seed, y_csv, cfg.run.mss_exponents), quiet);

    // Covariance table: lattice nodes t against the middle node s, analytic
    // Cov(Y(t), Y(s)) next to the translation-invariant-increment prediction
    // and the empirical product average with its standard error.
    const std::size_t n_nodes = target.size();
    const std::size_t stride = std::max<std::size_t>(1, n_nodes / 128);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n_nodes; i += stride) rows.push_back(i);
    const std::size_t mid = n_nodes / 2;

    const std::size_t n_reps = cfg.run.n_reps;
    std::vector<std::vector<double>> products(rows.size(), std::vector<double>(n_reps));
    for (std::size_t r = 0; r < n_reps; ++r) {
        RngStream rep = master.child(r);
        FieldSample vol = volatility_draw(model, grids, rep.child(0));
        FieldSample x = simulate_vmmma(model.kernel_g, vol, target, rep.child(1));
        FieldSample y = to_mss(x, index);
        for (std::size_t k = 0; k < rows.size(); ++k)
            products[k][r] = y.values[rows[k]] * y.values[mid];
    }

    TypeGLaw law(model, grids);
    double var_x0 = law.mean_V();
    auto r_x = [&](std::span<const double> lag) {
        return var_x0 * correlation_X(model.kernel_g, lag);
    };

    const std::size_t d = target.dim();
    std::string csv;
    for (std::size_t a = 0; a < d; ++a) csv += "t" + std::to_string(a + 1) + ",";
    for (std::size_t a = 0; a < d; ++a) csv += "s" + std::to_string(a + 1) + ",";
    csv += "analytic,stat_incr,empirical,se\n";
    std::vector<double> ses = y0.coordinates(mid);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        std::vector<double> t = y0.coordinates(rows[k]);
        double mean = 0.0;
        for (double v : products[k]) mean += v;
        mean /= static_cast<double>(n_reps);
        double var = 0.0;
        for (double v : products[k]) var += (v - mean) * (v - mean);
        double se = std::sqrt(var / (static_cast<double>(n_reps) *
                                     static_cast<double>(n_reps - 1)));
        for (double v : t) csv += fmt17(v) + ",";
        for (double v : ses) csv += fmt17(v) + ",";
        csv += fmt17(mss_covariance(r_x, index, t, ses)) + "," +
               fmt17(stat_incr_covariance(index, var_x0, t, ses)) + "," + fmt17(mean) + "," +
               fmt17(se) + "\n";
    }
    emit(dir / "mss_covariance.csv", csv, quiet);

    // Spectral consistency (d = 1, H in (0,1)): series density vs numeric
    // cosine transform of the translation-invariant correlation.
    if (d == 1 && index.exponents()[0] < 1.0) {
        std::string table = "freq,series,transform,abs_err\n";
        for (int i = -20; i <= 20; ++i) {
            double w = 0.25 * i;
            double series = selfsim_spectral(index.exponents()[0], w);
            double transform = rho_cosine_transform(index, w);
            table += fmt17(w) + "," + fmt17(series) + "," + fmt17(transform) + "," +
                     fmt17(std::abs(series - transform)) + "\n";
        }
        emit(dir / "rho_spectral.csv", table, quiet);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"volatility-modulated mixed moving-average random fields"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::uint64_t reps = 0;
    bool quiet = false;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--seed", seed, "override run.master_seed");
        cmd->add_option("--out", out_dir, "override output.dir");
        cmd->add_option("--reps", reps, "override run.n_reps");
        cmd->add_flag("--quiet", quiet, "suppress the output-file listing");
    };
    CLI::App* c_sim = app.add_subcommand("simulate", "draw fields and a Monte Carlo summary");
    CLI::App* c_ana =
        app.add_subcommand("analyze", "analytic law tables and a verification report");
    CLI::App* c_des =
        app.add_subcommand("design-kernel", "spectral-root kernel from a covariance table");
    CLI::App* c_lam = app.add_subcommand("lamperti", "multi-self-similar transform outputs");
    for (CLI::App* c : {c_sim, c_ana, c_des, c_lam}) add_common(c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // flag/usage problems are validation errors
    }

    CLI::App* cmd = app.get_subcommands().front();
    try {
        ExperimentConfig cfg = load_config(config_path);
        if (cmd->count("--seed") > 0) cfg.run.master_seed = seed;
        if (cmd->count("--out") > 0) cfg.output.dir = out_dir;
        if (cmd->count("--reps") > 0) {
            if (reps < 2) throw ConfigError("config: --reps must be at least 2");
            cfg.run.n_reps = reps;
        }
        if (cmd == c_sim) return cmd_simulate(cfg, quiet);
        if (cmd == c_ana) return cmd_analyze(cfg, quiet);
        if (cmd == c_des) return cmd_design_kernel(cfg, quiet);
        return cmd_lamperti(cfg, quiet);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
