#include "vmma/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace vmma {
namespace {

// Both lattices of a scatter share the step, so every (output node - cell
// node) difference lies on one offset lattice; tabulating the kernel over it
// turns the hot loops into pure multiply-adds (no exp/Bessel per pair).
struct OffsetTable {
    std::vector<double> values;      // row-major over offset indices
    std::vector<long long> min_delta; // per-axis smallest (out index - cell index)
    std::vector<std::size_t> extent; // per-axis offset count
    std::vector<std::size_t> stride; // row-major strides
};

OffsetTable make_offset_table(const Kernel& kernel, std::span<const double> param,
                              const GridSpec& out, const GridSpec& cells) {
    const std::size_t d = out.dim();
    OffsetTable t;
    t.min_delta.resize(d);
    t.extent.resize(d);
    t.stride.assign(d, 1);
    for (std::size_t a = 0; a < d; ++a) {
        t.min_delta[a] = 1 - static_cast<long long>(cells.axes()[a].count);
        t.extent[a] = out.axes()[a].count + cells.axes()[a].count - 1;
    }
    for (std::size_t a = d - 1; a > 0; --a) t.stride[a - 1] = t.stride[a] * t.extent[a];
    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) total *= t.extent[a];
    t.values.resize(total);

    std::vector<std::size_t> i(d, 0);
    std::vector<double> z(d);
    for (std::size_t f = 0; f < total; ++f) {
        for (std::size_t a = 0; a < d; ++a) {
            const auto &oa = out.axes()[a], &ca = cells.axes()[a];
            z[a] = (oa.origin - ca.origin) +
                   static_cast<double>(t.min_delta[a] + static_cast<long long>(i[a])) * oa.step;
        }
        t.values[f] = kernel.eval(param, z);
        for (std::size_t a = d; a-- > 0;) {
            if (++i[a] < t.extent[a]) break;
            i[a] = 0;
        }
    }
    return t;
}

// Integer offset bounds (out index - cell index) admitted by the kernel's
// lag box, clipped to the table's range.
void offset_bounds(const Box& box, const GridSpec& out, const GridSpec& cells,
                   const OffsetTable& tab, std::vector<long long>& dlo,
                   std::vector<long long>& dhi) {
    const std::size_t d = out.dim();
    dlo.resize(d);
    dhi.resize(d);
    for (std::size_t a = 0; a < d; ++a) {
        const auto &oa = out.axes()[a], &ca = cells.axes()[a];
        double base = oa.origin - ca.origin;
        auto lo = static_cast<long long>(std::ceil((box[a][0] - base) / oa.step - 1e-9));
        auto hi = static_cast<long long>(std::floor((box[a][1] - base) / oa.step + 1e-9));
        dlo[a] = std::max(lo, tab.min_delta[a]);
        dhi[a] = std::min(hi, tab.min_delta[a] + static_cast<long long>(tab.extent[a]) - 1);
    }
}

// For every cell c (in flat order) asks cell_scale(c) for its increment and
// scatters increment * table(j - m) over the admitted output window. The
// callback runs for every cell even when the scatter is skipped, so random
// draws stay aligned with cell indices.
template <class CellScale>
void scatter_all(std::vector<double>& out_values, const GridSpec& out, const GridSpec& cells,
                 const OffsetTable& tab, const std::vector<long long>& dlo,
                 const std::vector<long long>& dhi, CellScale&& cell_scale) {
    const std::size_t d = out.dim();
    const std::size_t n_cells = cells.size();
    std::vector<std::size_t> ostride(d, 1);
    for (std::size_t a = d - 1; a > 0; --a) ostride[a - 1] = ostride[a] * out.axes()[a].count;

    std::vector<std::size_t> m(d, 0); // cell multi-index, tracked incrementally
    std::vector<long long> jlo(d), jhi(d), j(d);
    for (std::size_t c = 0; c < n_cells; ++c) {
        double scale = cell_scale(c);
        if (scale != 0.0) {
            bool empty = false;
            for (std::size_t a = 0; a < d; ++a) {
                long long lo = std::max<long long>(0, static_cast<long long>(m[a]) + dlo[a]);
                long long hi = std::min<long long>(static_cast<long long>(out.axes()[a].count) - 1,
                                                   static_cast<long long>(m[a]) + dhi[a]);
                if (lo > hi) {
                    empty = true;
                    break;
                }
                jlo[a] = lo;
                jhi[a] = hi;
            }
            if (!empty) {
                j = jlo;
                const std::size_t run = static_cast<std::size_t>(jhi[d - 1] - jlo[d - 1] + 1);
                while (true) {
                    std::size_t oflat = 0, tflat = 0;
                    for (std::size_t a = 0; a < d; ++a) {
                        oflat += static_cast<std::size_t>(j[a]) * ostride[a];
                        tflat += static_cast<std::size_t>(j[a] - static_cast<long long>(m[a]) -
                                                          tab.min_delta[a]) *
                                 tab.stride[a];
                    }
                    const double* tv = tab.values.data() + tflat;
                    double* ov = out_values.data() + oflat;
                    for (std::size_t k = 0; k < run; ++k) ov[k] += scale * tv[k];
                    if (d == 1) break;
                    std::size_t a = d - 1;
                    bool done = true;
                    while (a-- > 0) { // bump outer axes; the last axis is the run
                        if (j[a] < jhi[a]) {
                            ++j[a];
                            done = false;
                            break;
                        }
                        j[a] = jlo[a];
                    }
                    if (done) break;
                }
            }
        }
        for (std::size_t a = d; a-- > 0;) {
            if (++m[a] < cells.axes()[a].count) break;
            m[a] = 0;
        }
    }
}

// Shared precondition: equal steps and cell-center coverage of the output
// grid dilated by the kernel's lag box.
void require_coverage(const GridSpec& out, const GridSpec& cells, const Box& box,
                      const std::string& who) {
    if (cells.dim() != out.dim())
        throw std::invalid_argument(who + ": lattice dimensions differ");
    for (std::size_t a = 0; a < out.dim(); ++a) {
        const auto &oa = out.axes()[a], &ca = cells.axes()[a];
        if (std::abs(oa.step - ca.step) > 1e-9 * oa.step)
            throw std::invalid_argument(who + ": lattice steps differ");
        double slack = 1e-6 * oa.step;
        double lo_need = oa.origin - box[a][1];
        double hi_need = oa.origin + static_cast<double>(oa.count - 1) * oa.step - box[a][0];
        double cells_lo = ca.origin - 0.5 * ca.step;
        double cells_hi = ca.origin + (static_cast<double>(ca.count) - 0.5) * ca.step;
        if (cells_lo > lo_need + slack || cells_hi < hi_need - slack)
            throw std::invalid_argument(who + ": cell lattice does not cover the dilated grid");
    }
}

// Per-replication lattice aggregates, later combined across replications.
// Layout: [mean, mean square, product averages per lag, squared-product
// averages per lag, cos averages per theta].
std::vector<double> summarize(std::span<const double> agg, std::size_t n_lags,
                              std::size_t n_thetas) {
    std::vector<double> out(2 + 3 * n_lags + n_thetas);
    const double m1 = agg[0], m2 = agg[1];
    out[0] = m1;
    out[1] = m2;
    for (std::size_t l = 0; l < n_lags; ++l) {
        out[2 + l] = agg[2 + l];                                    // covariance (zero-mean model)
        out[2 + n_lags + l] = m2 > 0.0 ? agg[2 + l] / m2 : 0.0;     // correlation
        out[2 + 2 * n_lags + l] = agg[2 + n_lags + l] - m2 * m2;    // Cov(X^2, X^2 at lag)
    }
    for (std::size_t t = 0; t < n_thetas; ++t)
        out[2 + 3 * n_lags + t] = agg[2 + 2 * n_lags + t];
    return out;
}

} // namespace

VolatilityModel make_volatility_model(Kernel kernel_h, CharQuadruplet basis) {
    if (!basis.is_subordinator())
        throw std::invalid_argument(
            "make_volatility_model: volatility basis must be a subordinator family");
    // Probe nonnegativity on a coarse lattice over the truncation box; this
    // catches oscillatory kernels (parabolic, Bessel regimes) at build time.
    Box box = kernel_h.lag_box();
    const std::size_t d = kernel_h.dim();
    const std::size_t n_probe = 17;
    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) total *= n_probe;
    std::vector<double> z(d);
    for (const auto& atom : kernel_h.mixing().atoms()) {
        std::vector<std::size_t> i(d, 0);
        for (std::size_t f = 0; f < total; ++f) {
            for (std::size_t a = 0; a < d; ++a)
                z[a] = box[a][0] + (static_cast<double>(i[a]) + 0.5) / n_probe *
                                       (box[a][1] - box[a][0]);
            if (kernel_h.eval(atom.point, z) < 0.0)
                throw std::invalid_argument(
                    "make_volatility_model: volatility kernel is negative on its support");
            for (std::size_t a = d; a-- > 0;) {
                if (++i[a] < n_probe) break;
                i[a] = 0;
            }
        }
    }
    return {std::move(kernel_h), std::move(basis)};
}

ModelGrids derive_grids(const SimulationModel& model, const GridSpec& target, double tol) {
    const std::size_t d = target.dim();
    if (model.kernel_g.dim() != d)
        throw std::invalid_argument("derive_grids: kernel and target dimensions differ");
    if (!model.volatility && !(model.constant_variance >= 0.0))
        throw std::invalid_argument("derive_grids: constant variance must be nonnegative");

    // Volatility nodes at target origin + (j + 1/2) * step, cells covering
    // [t_min - hi, t_max - lo] per axis.
    Box gbox = model.kernel_g.lag_box(tol);
    std::vector<GridAxis> vol_axes(d);
    for (std::size_t a = 0; a < d; ++a) {
        const GridAxis& ax = target.axes()[a];
        auto jlo = static_cast<long long>(std::floor(-gbox[a][1] / ax.step + 1e-9));
        auto jhi = static_cast<long long>(
            std::ceil(static_cast<double>(ax.count - 1) - gbox[a][0] / ax.step - 1.0 - 1e-9));
        jhi = std::max(jhi, jlo);
        vol_axes[a] = {ax.origin + (0.5 + static_cast<double>(jlo)) * ax.step, ax.step,
                       static_cast<std::size_t>(jhi - jlo + 1)};
    }
    GridSpec vol(vol_axes);

    GridSpec basis = vol;
    if (model.volatility) {
        const Kernel& h = model.volatility->kernel_h;
        if (h.dim() != d)
            throw std::invalid_argument("derive_grids: volatility kernel dimension differs");
        // Basis nodes reuse the target offsets, so volatility lags s - u are
        // again half-offset; cells cover [s_min - hi, s_max - lo].
        Box hbox = h.lag_box(tol);
        std::vector<GridAxis> basis_axes(d);
        for (std::size_t a = 0; a < d; ++a) {
            const GridAxis& sx = vol_axes[a];
            const GridAxis& tx = target.axes()[a];
            double first_rel = (sx.origin - hbox[a][1] - tx.origin) / tx.step;
            double last_rel =
                (sx.origin + static_cast<double>(sx.count - 1) * sx.step - hbox[a][0] -
                 tx.origin) /
                tx.step;
            auto mlo = static_cast<long long>(std::floor(first_rel + 0.5 + 1e-9));
            auto mhi = static_cast<long long>(std::ceil(last_rel - 0.5 - 1e-9));
            mhi = std::max(mhi, mlo);
            basis_axes[a] = {tx.origin + static_cast<double>(mlo) * tx.step, tx.step,
                             static_cast<std::size_t>(mhi - mlo + 1)};
        }
        basis = GridSpec(basis_axes);
    }
    return {target, std::move(vol), std::move(basis)};
}

FieldSample simulate_volatility(const VolatilityModel& model, const GridSpec& grid,
                                const GridSpec& extended_grid, RngStream stream) {
    const Kernel& h = model.kernel_h;
    if (h.dim() != grid.dim())
        throw std::invalid_argument("simulate_volatility: kernel dimension mismatch");
    Box box = h.lag_box();
    require_coverage(grid, extended_grid, box, "simulate_volatility");

    const auto& atoms = h.mixing().atoms();
    const std::size_t n_cells = extended_grid.size();
    const double cell_mass = extended_grid.cell_volume();
    std::vector<double> values(grid.size(), 0.0);
    std::vector<long long> dlo, dhi;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        OffsetTable tab = make_offset_table(h, atoms[i].point, grid, extended_grid);
        offset_bounds(box, grid, extended_grid, tab, dlo, dhi);
        const double mass = atoms[i].weight * cell_mass;
        scatter_all(values, grid, extended_grid, tab, dlo, dhi, [&](std::size_t c) {
            return sample_cell_increment(model.basis, mass, stream.child(i * n_cells + c));
        });
    }
    return FieldSample(grid, std::move(values), FieldKind::volatility);
}

FieldSample volatility_draw(const SimulationModel& model, const ModelGrids& grids,
                            RngStream stream) {
    if (model.volatility)
        return simulate_volatility(*model.volatility, grids.vol, grids.basis, stream);
    if (!(model.constant_variance >= 0.0))
        throw std::invalid_argument("volatility_draw: constant variance must be nonnegative");
    return FieldSample::constant(grids.vol, model.constant_variance, FieldKind::volatility);
}

FieldSample simulate_vmmma(const Kernel& kernel_g, const FieldSample& vol, const GridSpec& grid,
                           RngStream stream) {
    if (vol.kind != FieldKind::volatility)
        throw std::invalid_argument("simulate_vmmma: field is not a squared-volatility sample");
    if (kernel_g.dim() != grid.dim())
        throw std::invalid_argument("simulate_vmmma: kernel dimension mismatch");
    Box box = kernel_g.lag_box();
    require_coverage(grid, vol.grid, box, "simulate_vmmma");

    std::vector<double> sigma(vol.values.size());
    for (std::size_t c = 0; c < sigma.size(); ++c) sigma[c] = std::sqrt(vol.values[c]);

    const auto& atoms = kernel_g.mixing().atoms();
    const double cell_mass = vol.grid.cell_volume();
    std::vector<double> values(grid.size(), 0.0);
    auto engine = stream.engine();
    std::normal_distribution<double> gauss;
    std::vector<long long> dlo, dhi;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        OffsetTable tab = make_offset_table(kernel_g, atoms[i].point, grid, vol.grid);
        offset_bounds(box, grid, vol.grid, tab, dlo, dhi);
        const double sd = std::sqrt(atoms[i].weight * cell_mass);
        scatter_all(values, grid, vol.grid, tab, dlo, dhi, [&](std::size_t c) {
            // draw first so the stream position is cell-indexed even when
            // sigma vanishes
            double w = sd * gauss(engine);
            return sigma[c] * w;
        });
    }
    return FieldSample(grid, std::move(values), FieldKind::field);
}

double compute_V(const Kernel& kernel_g, const FieldSample& vol, std::span<const double> t) {
    if (vol.kind != FieldKind::volatility)
        throw std::invalid_argument("compute_V: field is not a squared-volatility sample");
    const GridSpec& sg = vol.grid;
    const std::size_t d = sg.dim();
    if (t.size() != d || kernel_g.dim() != d)
        throw std::invalid_argument("compute_V: dimension mismatch");

    Box box = kernel_g.lag_box();
    std::vector<IndexRange> win(d);
    for (std::size_t a = 0; a < d; ++a) {
        win[a] = axis_range(sg.axes()[a], t[a] - box[a][1], t[a] - box[a][0]);
        if (win[a].empty) return 0.0;
    }
    std::vector<std::size_t> stride(d, 1);
    for (std::size_t a = d - 1; a > 0; --a) stride[a - 1] = stride[a] * sg.axes()[a].count;

    std::vector<std::size_t> j(d);
    for (std::size_t a = 0; a < d; ++a) j[a] = win[a].first;
    std::vector<double> z(d);
    double sum = 0.0;
    while (true) {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < d; ++a) {
            flat += j[a] * stride[a];
            z[a] = t[a] - (sg.axes()[a].origin + static_cast<double>(j[a]) * sg.axes()[a].step);
        }
        sum += kernel_g.g_tilde(z) * vol.values[flat];
        std::size_t a = d;
        bool done = true;
        while (a-- > 0) {
            if (j[a] < win[a].last) {
                ++j[a];
                done = false;
                break;
            }
            j[a] = win[a].first;
        }
        if (done) break;
    }
    return sum * sg.cell_volume();
}

MonteCarloSummary replicate(const SimulationModel& model, const ModelGrids& grids,
                            const ReplicationRequest& request, std::size_t n_reps,
                            RngStream master) {
    if (n_reps < 2) throw std::invalid_argument("replicate: need at least two replications");
    const GridSpec& tg = grids.target;
    const std::size_t d = tg.dim();
    const std::size_t n_nodes = tg.size();
    const std::size_t L = request.lags.size();
    const std::size_t T = request.thetas.size();

    std::vector<std::size_t> stride(d, 1);
    for (std::size_t a = d - 1; a > 0; --a) stride[a - 1] = stride[a] * tg.axes()[a].count;

    // Lags must be integer multiples of the step; precompute flat offsets and
    // the index window of valid pair bases.
    std::vector<long long> flat_off(L, 0);
    std::vector<std::vector<IndexRange>> pair_win(L, std::vector<IndexRange>(d));
    std::vector<std::size_t> pair_count(L, 1);
    for (std::size_t l = 0; l < L; ++l) {
        if (request.lags[l].size() != d)
            throw std::invalid_argument("replicate: lag dimension mismatch");
        for (std::size_t a = 0; a < d; ++a) {
            const GridAxis& ax = tg.axes()[a];
            double k = request.lags[l][a] / ax.step;
            double kr = std::round(k);
            if (std::abs(k - kr) > 1e-6)
                throw std::invalid_argument(
                    "replicate: lag is not an integer multiple of the grid step");
            auto ki = static_cast<long long>(kr);
            if (std::llabs(ki) > static_cast<long long>(ax.count) - 1)
                throw std::invalid_argument("replicate: lag exceeds the grid extent");
            flat_off[l] += ki * static_cast<long long>(stride[a]);
            auto lo = static_cast<std::size_t>(std::max<long long>(0, -ki));
            auto hi = static_cast<std::size_t>(
                std::min<long long>(static_cast<long long>(ax.count) - 1,
                                    static_cast<long long>(ax.count) - 1 - ki));
            pair_win[l][a] = {lo, hi, false};
            pair_count[l] *= hi - lo + 1;
        }
    }

    const std::size_t m = 2 + 2 * L + T;
    std::vector<double> aggregates(n_reps * m, 0.0);
    std::vector<std::size_t> j(d);
    for (std::size_t r = 0; r < n_reps; ++r) {
        RngStream rep = master.child(r);
        FieldSample vol = volatility_draw(model, grids, rep.child(0));
        FieldSample x = simulate_vmmma(model.kernel_g, vol, tg, rep.child(1));
        double* row = aggregates.data() + r * m;

        double s1 = 0.0, s2 = 0.0;
        for (double v : x.values) {
            s1 += v;
            s2 += v * v;
        }
        row[0] = s1 / static_cast<double>(n_nodes);
        row[1] = s2 / static_cast<double>(n_nodes);

        for (std::size_t l = 0; l < L; ++l) {
            for (std::size_t a = 0; a < d; ++a) j[a] = pair_win[l][a].first;
            double sp = 0.0, sq = 0.0;
            while (true) {
                std::size_t flat = 0;
                for (std::size_t a = 0; a < d; ++a) flat += j[a] * stride[a];
                double u = x.values[flat];
                double v = x.values[static_cast<std::size_t>(static_cast<long long>(flat) +
                                                             flat_off[l])];
                sp += u * v;
                sq += u * u * v * v;
                std::size_t a = d;
                bool done = true;
                while (a-- > 0) {
                    if (j[a] < pair_win[l][a].last) {
                        ++j[a];
                        done = false;
                        break;
                    }
                    j[a] = pair_win[l][a].first;
                }
                if (done) break;
            }
            row[2 + l] = sp / static_cast<double>(pair_count[l]);
            row[2 + L + l] = sq / static_cast<double>(pair_count[l]);
        }

        for (std::size_t ti = 0; ti < T; ++ti) {
            double sc = 0.0;
            for (double v : x.values) sc += std::cos(request.thetas[ti] * v);
            row[2 + 2 * L + ti] = sc / static_cast<double>(n_nodes);
        }
    }

    // Delete-one jackknife over replications.
    std::vector<double> colsum(m, 0.0);
    for (std::size_t r = 0; r < n_reps; ++r)
        for (std::size_t k = 0; k < m; ++k) colsum[k] += aggregates[r * m + k];
    std::vector<double> mean_agg(m);
    for (std::size_t k = 0; k < m; ++k) mean_agg[k] = colsum[k] / static_cast<double>(n_reps);
    std::vector<double> full = summarize(mean_agg, L, T);
    const std::size_t K = full.size();

    std::vector<double> loo(n_reps * K);
    std::vector<double> loo_mean(K, 0.0);
    std::vector<double> drop(m);
    for (std::size_t r = 0; r < n_reps; ++r) {
        for (std::size_t k = 0; k < m; ++k)
            drop[k] = (colsum[k] - aggregates[r * m + k]) / static_cast<double>(n_reps - 1);
        std::vector<double> s = summarize(drop, L, T);
        for (std::size_t k = 0; k < K; ++k) {
            loo[r * K + k] = s[k];
            loo_mean[k] += s[k];
        }
    }
    std::vector<double> se(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) loo_mean[k] /= static_cast<double>(n_reps);
    for (std::size_t r = 0; r < n_reps; ++r)
        for (std::size_t k = 0; k < K; ++k) {
            double dev = loo[r * K + k] - loo_mean[k];
            se[k] += dev * dev;
        }
    for (std::size_t k = 0; k < K; ++k)
        se[k] = std::sqrt(se[k] * static_cast<double>(n_reps - 1) /
                          static_cast<double>(n_reps));

    MonteCarloSummary out;
    out.n_reps = n_reps;
    out.mean = {full[0], se[0]};
    out.second_moment = {full[1], se[1]};
    out.covariance.resize(L);
    out.correlation.resize(L);
    out.covariance_squares.resize(L);
    out.char_fn.resize(T);
    for (std::size_t l = 0; l < L; ++l) {
        out.covariance[l] = {full[2 + l], se[2 + l]};
        out.correlation[l] = {full[2 + L + l], se[2 + L + l]};
        out.covariance_squares[l] = {full[2 + 2 * L + l], se[2 + 2 * L + l]};
    }
    for (std::size_t t = 0; t < T; ++t) out.char_fn[t] = {full[2 + 3 * L + t], se[2 + 3 * L + t]};
    return out;
}

} // namespace vmma
