#include "vmma/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include <json.hpp>

namespace vmma {
namespace {

// Shortest-exact formatting is overkill here; 17 significant digits
// round-trip doubles and keep golden files stable.
std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string grid_csv(const std::string& coord_prefix, const GridSpec& grid,
                     const std::vector<double>& values,
                     const std::vector<std::vector<double>>* coords) {
    std::ostringstream out;
    for (std::size_t a = 0; a < grid.dim(); ++a) out << coord_prefix << (a + 1) << ',';
    out << "value\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::vector<double> x = coords ? (*coords)[i] : grid.node(i);
        for (double c : x) out << format_double(c) << ',';
        out << format_double(values[i]) << '\n';
    }
    return out.str();
}

} // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("write_file_atomic: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string content_hash_hex(const std::string& payload) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : payload) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string field_to_csv(const FieldSample& field) {
    std::vector<std::vector<double>> coords(field.values.size());
    for (std::size_t i = 0; i < field.values.size(); ++i) coords[i] = field.coordinates(i);
    return grid_csv("x", field.grid, field.values, &coords);
}

std::string kernel_to_csv(const GridSpec& grid, const std::vector<double>& values) {
    if (values.size() != grid.size())
        throw std::invalid_argument("kernel_to_csv: value count does not match grid");
    return grid_csv("z", grid, values, nullptr);
}

Kernel kernel_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("kernel_from_csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split(line, ',');
    if (header.size() < 2 || header.back() != "value")
        throw std::invalid_argument("kernel_from_csv: expected header z1,..,zd,value");
    const std::size_t d = header.size() - 1;
    for (std::size_t a = 0; a < d; ++a)
        if (header[a] != "z" + std::to_string(a + 1))
            throw std::invalid_argument("kernel_from_csv: expected header z1,..,zd,value");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split(line, ',');
        if (cells.size() != d + 1)
            throw std::invalid_argument("kernel_from_csv: wrong column count in row");
        std::vector<double> row(d + 1);
        for (std::size_t c = 0; c <= d; ++c) {
            try {
                row[c] = std::stod(cells[c]);
            } catch (const std::exception&) {
                throw std::invalid_argument("kernel_from_csv: non-numeric cell '" + cells[c] + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("kernel_from_csv: no data rows");

    // reconstruct per-axis uniform lattices from the observed coordinates
    std::vector<GridAxis> axes(d);
    for (std::size_t a = 0; a < d; ++a) {
        std::vector<double> coords;
        coords.reserve(rows.size());
        for (const auto& r : rows) coords.push_back(r[a]);
        std::sort(coords.begin(), coords.end());
        std::vector<double> uniq;
        for (double c : coords)
            if (uniq.empty() || c - uniq.back() > 1e-12 * (1.0 + std::abs(c))) uniq.push_back(c);
        if (uniq.empty()) throw std::invalid_argument("kernel_from_csv: empty axis");
        double step = uniq.size() > 1 ? uniq[1] - uniq[0] : 1.0;
        for (std::size_t i = 0; i + 1 < uniq.size(); ++i)
            if (std::abs(uniq[i + 1] - uniq[i] - step) > 1e-9 * step)
                throw std::invalid_argument("kernel_from_csv: axis " + std::to_string(a + 1) +
                                            " is not a uniform lattice");
        axes[a] = {uniq.front(), step, uniq.size()};
    }
    GridSpec grid(axes);
    if (grid.size() != rows.size())
        throw std::invalid_argument("kernel_from_csv: rows do not fill the lattice");

    std::vector<double> values(grid.size());
    std::vector<bool> seen(grid.size(), false);
    for (const auto& r : rows) {
        std::vector<double> x(r.begin(), r.begin() + static_cast<long>(d));
        std::size_t i = grid.locate(x, 1e-6);
        if (i == GridSpec::npos)
            throw std::invalid_argument("kernel_from_csv: row coordinate off the lattice");
        if (seen[i]) throw std::invalid_argument("kernel_from_csv: duplicate lattice row");
        seen[i] = true;
        values[i] = r[d];
    }
    return Kernel(TabulatedKernel{std::move(grid), std::move(values)}, d);
}

std::string table_to_csv(const std::string& key_name, const std::string& value_name,
                         std::span<const double> keys, std::span<const double> values) {
    if (keys.size() != values.size())
        throw std::invalid_argument("table_to_csv: column length mismatch");
    std::ostringstream out;
    out << key_name << ',' << value_name << '\n';
    for (std::size_t i = 0; i < keys.size(); ++i)
        out << format_double(keys[i]) << ',' << format_double(values[i]) << '\n';
    return out.str();
}

std::string field_sidecar_json(const FieldSample& field, std::uint64_t seed,
                               const std::string& csv_payload,
                               const std::vector<double>& mss_exponents) {
    nlohmann::json j;
    j["format"] = "vmma-field-v1";
    nlohmann::json grid;
    std::vector<double> origin, step;
    std::vector<std::size_t> count;
    for (const auto& ax : field.grid.axes()) {
        origin.push_back(ax.origin);
        step.push_back(ax.step);
        count.push_back(ax.count);
    }
    grid["origin"] = origin;
    grid["step"] = step;
    grid["count"] = count;
    j["grid"] = grid;
    j["scale"] = field.scale == CoordinateScale::exponential ? "exponential" : "linear";
    j["kind"] = field.kind == FieldKind::volatility ? "volatility" : "field";
    j["seed"] = seed;
    j["content_hash"] = content_hash_hex(csv_payload);
    if (!mss_exponents.empty()) j["mss_exponents"] = mss_exponents;
    return j.dump(2) + "\n";
}

std::string summary_to_json(const MonteCarloSummary& summary,
                            const std::vector<std::vector<double>>& lags,
                            const std::vector<double>& thetas) {
    auto est = [](const EstimateSE& e) {
        return nlohmann::json{{"value", e.value}, {"se", e.se}};
    };
    nlohmann::json j;
    j["format"] = "vmma-summary-v1";
    j["n_reps"] = summary.n_reps;
    j["mean"] = est(summary.mean);
    j["second_moment"] = est(summary.second_moment);
    j["lags"] = lags;
    j["covariance"] = nlohmann::json::array();
    j["correlation"] = nlohmann::json::array();
    j["covariance_squares"] = nlohmann::json::array();
    for (std::size_t l = 0; l < summary.covariance.size(); ++l) {
        j["covariance"].push_back(est(summary.covariance[l]));
        j["correlation"].push_back(est(summary.correlation[l]));
        j["covariance_squares"].push_back(est(summary.covariance_squares[l]));
    }
    j["thetas"] = thetas;
    j["char_fn"] = nlohmann::json::array();
    for (const auto& c : summary.char_fn) j["char_fn"].push_back(est(c));
    return j.dump(2) + "\n";
}

} // namespace vmma
