#include "vmma/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "vmma/io.hpp"

namespace vmma {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config: " + where + ": " + what);
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) fail(where, "unknown key '" + it.key() + "'");
    }
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing key '") + key + "'");
    return *it;
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

std::uint64_t get_uint(const json& v, const std::string& where) {
    if (!v.is_number_unsigned()) fail(where, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::string get_string(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected a string");
    return v.get<std::string>();
}

std::vector<double> get_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(get_number(e, where));
    return out;
}

GridSpec parse_grid_spec(const json& v, const std::string& where) {
    check_keys(v, {"origin", "step", "count"}, where);
    std::vector<double> origin = get_numbers(require(v, "origin", where), where + ".origin");
    std::vector<double> step = get_numbers(require(v, "step", where), where + ".step");
    const json& cj = require(v, "count", where);
    if (!cj.is_array()) fail(where + ".count", "expected an array of counts");
    std::vector<std::size_t> count;
    for (const auto& e : cj) count.push_back(get_uint(e, where + ".count"));
    if (origin.size() != step.size() || origin.size() != count.size())
        fail(where, "origin/step/count lengths differ");
    std::vector<GridAxis> axes(origin.size());
    for (std::size_t a = 0; a < axes.size(); ++a) axes[a] = {origin[a], step[a], count[a]};
    try {
        return GridSpec(axes);
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
}

MixingMeasure parse_mixing(const json& v, const std::string& where) {
    std::string type = get_string(require(v, "type", where), where + ".type");
    try {
        if (type == "unit") {
            check_keys(v, {"type"}, where);
            return MixingMeasure::unit();
        }
        if (type == "dirac") {
            check_keys(v, {"type", "point"}, where);
            return MixingMeasure::dirac(get_numbers(require(v, "point", where), where + ".point"));
        }
        if (type == "discrete" || type == "quadrature") {
            check_keys(v, {"type", "atoms"}, where);
            const json& aj = require(v, "atoms", where);
            if (!aj.is_array()) fail(where + ".atoms", "expected an array");
            std::vector<MixingMeasure::Atom> atoms;
            for (std::size_t i = 0; i < aj.size(); ++i) {
                std::string aw = where + ".atoms[" + std::to_string(i) + "]";
                check_keys(aj[i], {"point", "weight"}, aw);
                atoms.push_back({get_numbers(require(aj[i], "point", aw), aw + ".point"),
                                 get_number(require(aj[i], "weight", aw), aw + ".weight")});
            }
            return type == "discrete" ? MixingMeasure::discrete(std::move(atoms))
                                      : MixingMeasure::quadrature(std::move(atoms));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
    fail(where + ".type", "unknown mixing type '" + type + "'");
}

Kernel parse_kernel(const json& v, std::size_t dim, const std::filesystem::path& base_dir,
                    const std::string& where) {
    std::string family = get_string(require(v, "family", where), where + ".family");
    MixingMeasure mixing = MixingMeasure::unit();
    if (v.contains("mixing")) mixing = parse_mixing(v["mixing"], where + ".mixing");
    auto num = [&](const char* key) {
        return get_number(require(v, key, where), where + "." + key);
    };
    try {
        if (family == "sup_ou") {
            check_keys(v, {"family", "mixing"}, where);
            return Kernel(SupOuKernel{}, dim, std::move(mixing));
        }
        if (family == "trawl") {
            check_keys(v, {"family", "mixing", "region"}, where);
            const json& rj = require(v, "region", where);
            if (!rj.is_array()) fail(where + ".region", "expected an array of [lo, hi] pairs");
            Box region;
            for (const auto& e : rj) {
                std::vector<double> pair = get_numbers(e, where + ".region");
                if (pair.size() != 2) fail(where + ".region", "each entry must be [lo, hi]");
                region.push_back({pair[0], pair[1]});
            }
            return Kernel(TrawlKernel{std::move(region)}, dim, std::move(mixing));
        }
        if (family == "parabolic_green") {
            check_keys(v, {"family", "mixing", "alpha", "beta", "gamma", "gamma_from_mixing"},
                       where);
            ParabolicGreenKernel k{};
            k.alpha = num("alpha");
            k.beta = num("beta");
            k.gamma_from_mixing =
                v.contains("gamma_from_mixing") && v["gamma_from_mixing"].get<bool>();
            k.gamma = k.gamma_from_mixing ? 1.0 : num("gamma");
            return Kernel(k, dim, std::move(mixing));
        }
        if (family == "elliptic_green") {
            check_keys(v, {"family", "mixing", "alpha", "gamma"}, where);
            return Kernel(EllipticGreenKernel{num("alpha"), num("gamma")}, dim, std::move(mixing));
        }
        if (family == "hyperbolic_green") {
            check_keys(v, {"family", "mixing", "alpha", "beta", "gamma"}, where);
            return Kernel(HyperbolicGreenKernel{num("alpha"), num("beta"), num("gamma")}, dim,
                          std::move(mixing));
        }
        if (family == "tabulated") {
            check_keys(v, {"family", "mixing", "grid", "values", "file"}, where);
            if (v.contains("file")) {
                if (v.contains("grid") || v.contains("values"))
                    fail(where, "'file' excludes inline 'grid'/'values'");
                std::filesystem::path p = get_string(v["file"], where + ".file");
                if (p.is_relative()) p = base_dir / p;
                std::ifstream in(p);
                if (!in) fail(where + ".file", "cannot open " + p.string());
                std::ostringstream text;
                text << in.rdbuf();
                Kernel k = kernel_from_csv(text.str());
                if (k.dim() != dim)
                    fail(where + ".file", "kernel dimension does not match the grid");
                return k;
            }
            GridSpec grid = parse_grid_spec(require(v, "grid", where), where + ".grid");
            std::vector<double> values =
                get_numbers(require(v, "values", where), where + ".values");
            return Kernel(TabulatedKernel{std::move(grid), std::move(values)}, dim,
                          std::move(mixing));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
    fail(where + ".family", "unknown kernel family '" + family + "'");
}

CharQuadruplet parse_basis(const json& v, const std::string& where) {
    std::string family = get_string(require(v, "family", where), where + ".family");
    auto num = [&](const char* key) {
        return get_number(require(v, key, where), where + "." + key);
    };
    try {
        if (family == "gaussian") {
            check_keys(v, {"family", "variance"}, where);
            return CharQuadruplet::gaussian(num("variance"));
        }
        if (family == "gamma") {
            check_keys(v, {"family", "shape", "rate"}, where);
            return CharQuadruplet::gamma_subordinator(num("shape"), num("rate"));
        }
        if (family == "inverse_gaussian") {
            check_keys(v, {"family", "delta", "gamma"}, where);
            return CharQuadruplet::inverse_gaussian_subordinator(num("delta"), num("gamma"));
        }
        if (family == "compound_poisson") {
            check_keys(v, {"family", "intensity", "jump"}, where);
            return CharQuadruplet::compound_poisson(num("intensity"), num("jump"));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
    fail(where + ".family", "unknown basis family '" + family + "'");
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    check_keys(root, {"model", "grid", "run", "output", "design"}, "top level");

    ExperimentConfig cfg;
    if (root.contains("grid")) {
        const json& g = root["grid"];
        check_keys(g, {"origin", "step", "count", "truncation_tol"}, "grid");
        json bare = g;
        bare.erase("truncation_tol");
        cfg.target = parse_grid_spec(bare, "grid");
        if (g.contains("truncation_tol")) {
            cfg.truncation_tol = get_number(g["truncation_tol"], "grid.truncation_tol");
            if (!(cfg.truncation_tol > 0.0) || cfg.truncation_tol >= 1.0)
                fail("grid.truncation_tol", "must be in (0, 1)");
        }
    }

    if (root.contains("model")) {
        if (!cfg.target) fail("model", "a grid block is required alongside the model");
        const std::size_t d = cfg.target->dim();
        const json& m = root["model"];
        check_keys(m, {"kernel", "volatility", "constant_variance"}, "model");
        SimulationModel model{parse_kernel(require(m, "kernel", "model"), d, base_dir,
                                           "model.kernel"),
                              std::nullopt, 1.0};
        if (m.contains("volatility")) {
            const json& vb = m["volatility"];
            check_keys(vb, {"kernel", "basis"}, "model.volatility");
            Kernel h = parse_kernel(require(vb, "kernel", "model.volatility"), d, base_dir,
                                    "model.volatility.kernel");
            CharQuadruplet basis =
                parse_basis(require(vb, "basis", "model.volatility"), "model.volatility.basis");
            try {
                model.volatility = make_volatility_model(std::move(h), std::move(basis));
            } catch (const std::exception& e) {
                fail("model.volatility", e.what());
            }
        }
        if (m.contains("constant_variance")) {
            model.constant_variance = get_number(m["constant_variance"], "model.constant_variance");
            if (!(model.constant_variance >= 0.0))
                fail("model.constant_variance", "must be nonnegative");
        }
        cfg.model = std::move(model);
    }

    if (root.contains("run")) {
        const json& r = root["run"];
        check_keys(r, {"n_reps", "master_seed", "thetas", "lags", "H", "theta_grid"}, "run");
        if (r.contains("n_reps")) {
            cfg.run.n_reps = get_uint(r["n_reps"], "run.n_reps");
            if (cfg.run.n_reps < 2) fail("run.n_reps", "need at least 2 replications");
        }
        if (r.contains("master_seed")) cfg.run.master_seed = get_uint(r["master_seed"], "run.master_seed");
        if (r.contains("thetas")) cfg.run.thetas = get_numbers(r["thetas"], "run.thetas");
        if (r.contains("lags")) {
            const json& lj = r["lags"];
            if (!lj.is_array()) fail("run.lags", "expected an array of lag vectors");
            for (const auto& e : lj) cfg.run.lags.push_back(get_numbers(e, "run.lags"));
            if (cfg.target) {
                for (const auto& lag : cfg.run.lags) {
                    if (lag.size() != cfg.target->dim())
                        fail("run.lags", "lag dimension does not match the grid");
                    for (std::size_t a = 0; a < lag.size(); ++a) {
                        double k = lag[a] / cfg.target->axes()[a].step;
                        if (std::abs(k - std::round(k)) > 1e-6)
                            fail("run.lags", "lags must be integer multiples of the grid step");
                        if (std::abs(std::round(k)) >
                            static_cast<double>(cfg.target->axes()[a].count - 1))
                            fail("run.lags", "lag exceeds the grid extent");
                    }
                }
            }
        }
        if (r.contains("H")) {
            cfg.run.mss_exponents = get_numbers(r["H"], "run.H");
            for (double h : cfg.run.mss_exponents)
                if (!(h > 0.0)) fail("run.H", "exponents must be strictly positive");
        }
        if (r.contains("theta_grid")) {
            cfg.run.theta_grid = get_numbers(r["theta_grid"], "run.theta_grid");
            if (cfg.run.theta_grid.size() < 2 || !(cfg.run.theta_grid.front() > 0.0))
                fail("run.theta_grid", "need a positive grid with at least 2 points");
            double step = cfg.run.theta_grid[1] - cfg.run.theta_grid[0];
            for (std::size_t i = 0; i + 1 < cfg.run.theta_grid.size(); ++i)
                if (std::abs(cfg.run.theta_grid[i + 1] - cfg.run.theta_grid[i] - step) >
                    1e-9 * std::abs(step))
                    fail("run.theta_grid", "grid must be uniform");
            if (!(step > 0.0)) fail("run.theta_grid", "grid must be increasing");
        }
    }

    if (root.contains("output")) {
        const json& o = root["output"];
        check_keys(o, {"dir"}, "output");
        if (o.contains("dir")) cfg.output.dir = get_string(o["dir"], "output.dir");
    }

    if (root.contains("design")) {
        const json& dj = root["design"];
        check_keys(dj, {"lags", "values", "root"}, "design");
        std::vector<double> lags = get_numbers(require(dj, "lags", "design"), "design.lags");
        std::vector<double> values = get_numbers(require(dj, "values", "design"), "design.values");
        if (lags.size() != values.size()) fail("design", "lags/values lengths differ");
        if (lags.size() < 2) fail("design.lags", "need at least 2 lags");
        double step = lags[1] - lags[0];
        if (!(step > 0.0)) fail("design.lags", "lags must be increasing");
        for (std::size_t i = 0; i + 1 < lags.size(); ++i)
            if (std::abs(lags[i + 1] - lags[i] - step) > 1e-9 * step)
                fail("design.lags", "lags must form a uniform grid");
        DesignConfig design;
        design.covariance.grid = GridSpec({GridAxis{lags.front(), step, lags.size()}});
        design.covariance.values = std::move(values);
        if (dj.contains("root")) {
            std::string root_name = get_string(dj["root"], "design.root");
            if (root_name == "even")
                design.root = SpectralRoot::even;
            else if (root_name == "odd")
                design.root = SpectralRoot::odd;
            else
                fail("design.root", "must be 'even' or 'odd'");
        }
        cfg.design = std::move(design);
    }

    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.has_parent_path() ? path.parent_path()
                                                           : std::filesystem::path("."));
}

std::string model_fingerprint(const SimulationModel& model) {
    json j;
    auto kernel_json = [](const Kernel& k) {
        json kj;
        std::visit(
            [&](const auto& fam) {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, SupOuKernel>) {
                    kj["family"] = "sup_ou";
                } else if constexpr (std::is_same_v<T, TrawlKernel>) {
                    kj["family"] = "trawl";
                    json region = json::array();
                    for (const auto& side : fam.region) region.push_back({side[0], side[1]});
                    kj["region"] = region;
                } else if constexpr (std::is_same_v<T, ParabolicGreenKernel>) {
                    kj["family"] = "parabolic_green";
                    kj["alpha"] = fam.alpha;
                    kj["beta"] = fam.beta;
                    kj["gamma"] = fam.gamma;
                    kj["gamma_from_mixing"] = fam.gamma_from_mixing;
                } else if constexpr (std::is_same_v<T, EllipticGreenKernel>) {
                    kj["family"] = "elliptic_green";
                    kj["alpha"] = fam.alpha;
                    kj["gamma"] = fam.gamma;
                } else if constexpr (std::is_same_v<T, HyperbolicGreenKernel>) {
                    kj["family"] = "hyperbolic_green";
                    kj["alpha"] = fam.alpha;
                    kj["beta"] = fam.beta;
                    kj["gamma"] = fam.gamma;
                } else {
                    kj["family"] = "tabulated";
                    std::ostringstream blob;
                    for (double v : fam.values) blob << v << ',';
                    kj["values_hash"] = content_hash_hex(blob.str());
                }
            },
            k.family());
        kj["dim"] = k.dim();
        json atoms = json::array();
        for (const auto& a : k.mixing().atoms())
            atoms.push_back({{"point", a.point}, {"weight", a.weight}});
        kj["mixing"] = atoms;
        return kj;
    };
    j["kernel"] = kernel_json(model.kernel_g);
    if (model.volatility) {
        json vj;
        vj["kernel"] = kernel_json(model.volatility->kernel_h);
        std::visit(
            [&](const auto& seed) {
                using T = std::decay_t<decltype(seed)>;
                if constexpr (std::is_same_v<T, GaussianSeed>) {
                    vj["basis"] = {{"family", "gaussian"}, {"variance", seed.variance}};
                } else if constexpr (std::is_same_v<T, GammaSeed>) {
                    vj["basis"] = {{"family", "gamma"}, {"shape", seed.shape}, {"rate", seed.rate}};
                } else if constexpr (std::is_same_v<T, InverseGaussianSeed>) {
                    vj["basis"] = {{"family", "inverse_gaussian"},
                                   {"delta", seed.delta},
                                   {"gamma", seed.gamma}};
                } else {
                    vj["basis"] = {{"family", "compound_poisson"},
                                   {"intensity", seed.intensity},
                                   {"jump", seed.jump}};
                }
            },
            model.volatility->basis.seed());
        j["volatility"] = vj;
    } else {
        j["constant_variance"] = model.constant_variance;
    }
    return j.dump();
}

} // namespace vmma
