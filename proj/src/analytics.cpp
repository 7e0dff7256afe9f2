#include "vmma/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vmma {
namespace {

// Lattice nodes inside a window with precomputed weights; the workhorse of
// every "sum kernel weights against a volatility draw" quadrature here.
struct WeightedNodes {
    std::vector<std::size_t> flat;
    std::vector<std::vector<double>> coord;
    std::vector<double> weight;
    double total() const {
        double s = 0.0;
        for (double w : weight) s += w;
        return s;
    }
    double dot(const std::vector<double>& values) const {
        double s = 0.0;
        for (std::size_t i = 0; i < flat.size(); ++i) s += weight[i] * values[flat[i]];
        return s;
    }
};

// Walks `win` on `grid` and stores weight_fn(s) per node (zero weights kept:
// they are cheap and preserve summation order across call sites).
template <class WeightFn>
WeightedNodes collect_window(const GridSpec& grid, const std::vector<IndexRange>& win,
                             WeightFn&& weight_fn) {
    WeightedNodes out;
    const std::size_t d = grid.dim();
    for (std::size_t a = 0; a < d; ++a)
        if (win[a].empty) return out;
    std::vector<std::size_t> stride(d, 1);
    for (std::size_t a = d - 1; a > 0; --a) stride[a - 1] = stride[a] * grid.axes()[a].count;
    std::vector<std::size_t> j(d);
    for (std::size_t a = 0; a < d; ++a) j[a] = win[a].first;
    std::vector<double> s(d);
    while (true) {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < d; ++a) {
            flat += j[a] * stride[a];
            s[a] = grid.axes()[a].origin + static_cast<double>(j[a]) * grid.axes()[a].step;
        }
        out.flat.push_back(flat);
        out.coord.push_back(s);
        out.weight.push_back(weight_fn(s));
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
    return out;
}

std::vector<IndexRange> lag_window(const GridSpec& grid, std::span<const double> t,
                                   const Box& box) {
    std::vector<IndexRange> win(grid.dim());
    for (std::size_t a = 0; a < grid.dim(); ++a)
        win[a] = axis_range(grid.axes()[a], t[a] - box[a][1], t[a] - box[a][0]);
    return win;
}

// Midpoint lattice for int g(lag+s) g(s) ds with cell boundaries on the
// integrand's support edges: per axis the product lives on
// [max(lo, lo-lag), min(hi, hi-lag)]. Aligning the edges keeps the error
// O(step^2) for one-sided kernels at every lag sign and makes box-indicator
// kernels exact. Empty box overlap means the covariance is exactly zero.
std::optional<GridSpec> overlap_quad_grid(const Kernel& kernel, std::span<const double> lag) {
    Box box = kernel.lag_box(1e-9);
    const std::size_t d = box.size();
    const std::size_t n = d == 1 ? 4096 : (d == 2 ? 512 : 64);
    bool hard_box = kernel.support_class() == SupportClass::box;
    std::vector<GridAxis> axes(d);
    for (std::size_t a = 0; a < d; ++a) {
        double A = std::max(box[a][0], box[a][0] - lag[a]);
        double B = std::min(box[a][1], box[a][1] - lag[a]);
        if (!(B > A)) {
            if (hard_box) return std::nullopt;
            // unbounded supports always overlap; what is left is far tail
            B = A + 1e-3 * (box[a][1] - box[a][0]);
        }
        double step = (B - A) / static_cast<double>(n);
        axes[a] = {A + 0.5 * step, step, n};
    }
    return GridSpec(axes);
}

} // namespace

TypeGLaw::TypeGLaw(const SimulationModel& model, const ModelGrids& grids) {
    const Kernel& g = model.kernel_g;
    const std::size_t d = grids.target.dim();
    if (g.dim() != d) throw std::invalid_argument("TypeGLaw: kernel dimension mismatch");
    std::vector<double> t0 = grids.target.node(0);

    if (!model.volatility) {
        if (!(model.constant_variance >= 0.0))
            throw std::invalid_argument("TypeGLaw: constant variance must be nonnegative");
        drift_v_ = compute_V(
            g, FieldSample::constant(grids.vol, model.constant_variance, FieldKind::volatility),
            t0);
        return;
    }

    const VolatilityModel& vm = *model.volatility;
    basis_ = vm.basis;
    const GridSpec& sg = grids.vol;
    const GridSpec& ug = grids.basis;
    const double ds = sg.cell_volume();
    const double du = ug.cell_volume();
    Box gbox = g.lag_box();
    Box hbox = vm.kernel_h.lag_box();

    WeightedNodes sw = collect_window(sg, lag_window(sg, t0, gbox),
                                      [&](const std::vector<double>& s) {
                                          std::vector<double> z(d);
                                          for (std::size_t a = 0; a < d; ++a) z[a] = t0[a] - s[a];
                                          return g.g_tilde(z) * ds;
                                      });
    if (sw.flat.empty()) return; // g's window misses the lattice: V is zero

    const auto& atoms = vm.kernel_h.mixing().atoms();
    std::vector<std::vector<double>> dist; // per kept atom: |u_a - t0_a| per axis
    std::vector<double> z(d);
    std::vector<std::size_t> m(d, 0);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        std::fill(m.begin(), m.end(), 0);
        for (std::size_t c = 0; c < ug.size(); ++c) {
            double k_val = 0.0;
            // k(y, t0 - u) = sum_s g_tilde(t0 - s) h(y, s - u) ds
            for (std::size_t sidx = 0; sidx < sw.flat.size(); ++sidx) {
                bool inside = true;
                for (std::size_t a = 0; a < d; ++a) {
                    z[a] = sw.coord[sidx][a] -
                           (ug.axes()[a].origin + static_cast<double>(m[a]) * ug.axes()[a].step);
                    if (z[a] < hbox[a][0] || z[a] > hbox[a][1]) {
                        inside = false;
                        break;
                    }
                }
                if (inside) k_val += sw.weight[sidx] * vm.kernel_h.eval(atoms[i].point, z);
            }
            if (k_val != 0.0) {
                atoms_.push_back({k_val, atoms[i].weight * du});
                std::vector<double> dd(d);
                for (std::size_t a = 0; a < d; ++a)
                    dd[a] = std::abs(ug.axes()[a].origin +
                                     static_cast<double>(m[a]) * ug.axes()[a].step - t0[a]);
                dist.push_back(std::move(dd));
            }
            for (std::size_t a = d; a-- > 0;) {
                if (++m[a] < ug.axes()[a].count) break;
                m[a] = 0;
            }
        }
    }

    // Half-radius probe: Lambda_V(1) from the cells within half the reach of
    // the tabulation, against the full tabulation.
    if (!atoms_.empty()) {
        std::vector<double> reach(d, 0.0);
        for (const auto& dd : dist)
            for (std::size_t a = 0; a < d; ++a) reach[a] = std::max(reach[a], dd[a]);
        double full = 0.0, half = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            double term = atoms_[i].mass * seed_cumulant(*basis_, -atoms_[i].scale);
            full += term;
            bool in_half = true;
            for (std::size_t a = 0; a < d; ++a)
                if (dist[i][a] > 0.5 * reach[a] + 1e-9) {
                    in_half = false;
                    break;
                }
            if (in_half) half += term;
        }
        doubling_change_ = std::abs(full - half) / std::max(std::abs(full), 1e-12);
    }
}

TypeGLaw TypeGLaw::from_atoms(std::vector<MassAtom> atoms, CharQuadruplet basis) {
    if (!basis.is_subordinator())
        throw std::invalid_argument("TypeGLaw: basis must be a subordinator family");
    for (const auto& a : atoms)
        if (!(a.mass > 0.0) || !(a.scale >= 0.0) || !std::isfinite(a.scale) ||
            !std::isfinite(a.mass))
            throw std::invalid_argument("TypeGLaw: atoms need positive mass and nonnegative scale");
    TypeGLaw law;
    law.atoms_ = std::move(atoms);
    law.basis_ = std::move(basis);
    return law;
}

double TypeGLaw::laplace_V(double theta) const {
    if (!(theta >= 0.0)) throw std::invalid_argument("laplace_V: theta must be nonnegative");
    if (doubling_change_ > 0.1)
        throw std::runtime_error("laplace_V: k-tabulation did not stabilize (half-radius change " +
                                 std::to_string(doubling_change_) + ")");
    double lv = -theta * drift_v_;
    if (basis_)
        for (const auto& a : atoms_) lv += a.mass * seed_cumulant(*basis_, -theta * a.scale);
    return lv;
}

double TypeGLaw::char_X(double theta) const { return std::exp(laplace_V(0.5 * theta * theta)); }

double TypeGLaw::mean_V() const {
    double v = drift_v_;
    if (basis_) {
        double seed_mean = seed_moments(*basis_).mean;
        for (const auto& a : atoms_) v += seed_mean * a.scale * a.mass;
    }
    return v;
}

double laplace_V(const TypeGLaw& model, double theta) { return model.laplace_V(theta); }
double char_X(const TypeGLaw& model, double theta) { return model.char_X(theta); }

double covariance_X(const Kernel& kernel_g, double mean_sigma2, std::span<const double> lag,
                    const GridSpec* quad_grid) {
    const std::size_t d = kernel_g.dim();
    if (lag.size() != d) throw std::invalid_argument("covariance_X: lag dimension mismatch");
    std::optional<GridSpec> own;
    if (!quad_grid) {
        own = overlap_quad_grid(kernel_g, lag);
        if (!own) return 0.0; // disjoint indicator supports
    }
    const GridSpec& qg = quad_grid ? *quad_grid : *own;
    if (qg.dim() != d) throw std::invalid_argument("covariance_X: quadrature grid dimension mismatch");

    const auto& atoms = kernel_g.mixing().atoms();
    std::vector<double> s(d), shifted(d);
    double sum = 0.0;
    for (std::size_t i = 0; i < qg.size(); ++i) {
        s = qg.node(i);
        for (std::size_t a = 0; a < d; ++a) shifted[a] = lag[a] + s[a];
        for (const auto& atom : atoms)
            sum += atom.weight * kernel_g.eval(atom.point, shifted) * kernel_g.eval(atom.point, s);
    }
    return mean_sigma2 * sum * qg.cell_volume();
}

double correlation_X(const Kernel& kernel_g, std::span<const double> lag,
                     const GridSpec* quad_grid) {
    std::vector<double> zero(kernel_g.dim(), 0.0);
    double r0 = covariance_X(kernel_g, 1.0, zero, quad_grid);
    if (!(r0 > 0.0)) throw std::runtime_error("correlation_X: kernel has zero variance");
    return covariance_X(kernel_g, 1.0, lag, quad_grid) / r0;
}

double joint_cf_conditional(const Kernel& kernel_g, const FieldSample& vol,
                            const std::vector<std::vector<double>>& points,
                            const std::vector<double>& thetas) {
    if (points.size() != thetas.size())
        throw std::invalid_argument("joint_cf_conditional: point/theta count mismatch");
    if (points.empty()) return 1.0;
    if (vol.kind != FieldKind::volatility)
        throw std::invalid_argument("joint_cf_conditional: field is not a squared-volatility sample");
    const std::size_t d = vol.grid.dim();
    if (kernel_g.dim() != d)
        throw std::invalid_argument("joint_cf_conditional: kernel dimension mismatch");
    for (const auto& p : points)
        if (p.size() != d) throw std::invalid_argument("joint_cf_conditional: point dimension mismatch");

    if (points.size() == 1)
        return std::exp(-0.5 * thetas[0] * thetas[0] * compute_V(kernel_g, vol, points[0]));

    Box box = kernel_g.lag_box();
    // bounding window over all evaluation points; nodes outside any single
    // point's window contribute zero through the kernel
    std::vector<IndexRange> win(d);
    for (std::size_t a = 0; a < d; ++a) {
        double lo = points[0][a], hi = points[0][a];
        for (const auto& p : points) {
            lo = std::min(lo, p[a]);
            hi = std::max(hi, p[a]);
        }
        win[a] = axis_range(vol.grid.axes()[a], lo - box[a][1], hi - box[a][0]);
        if (win[a].empty) return 1.0;
    }

    const auto& atoms = kernel_g.mixing().atoms();
    std::vector<double> z(d);
    WeightedNodes sw = collect_window(vol.grid, win, [&](const std::vector<double>& s) {
        double inner = 0.0;
        for (const auto& atom : atoms) {
            double acc = 0.0;
            for (std::size_t j = 0; j < points.size(); ++j) {
                for (std::size_t a = 0; a < d; ++a) z[a] = points[j][a] - s[a];
                acc += thetas[j] * kernel_g.eval(atom.point, z);
            }
            inner += atom.weight * acc * acc;
        }
        return inner;
    });
    double q = sw.dot(vol.values) * vol.grid.cell_volume();
    return std::exp(-0.5 * q);
}

double joint_cf_kumulant(const SimulationModel& model, const ModelGrids& grids,
                         const std::vector<std::vector<double>>& points,
                         const std::vector<double>& thetas) {
    if (points.size() != thetas.size())
        throw std::invalid_argument("joint_cf: point/theta count mismatch");
    if (points.empty()) return 1.0;
    if (!model.volatility) {
        FieldSample c = FieldSample::constant(grids.vol, model.constant_variance,
                                              FieldKind::volatility);
        return joint_cf_conditional(model.kernel_g, c, points, thetas);
    }

    const Kernel& g = model.kernel_g;
    const VolatilityModel& vm = *model.volatility;
    const std::size_t d = grids.target.dim();
    for (const auto& p : points)
        if (p.size() != d) throw std::invalid_argument("joint_cf: point dimension mismatch");

    const GridSpec& sg = grids.vol;
    const GridSpec& ug = grids.basis;
    Box gbox = g.lag_box();
    Box hbox = vm.kernel_h.lag_box();
    const double ds = sg.cell_volume();
    const double du = ug.cell_volume();

    // q(s) ds with q the conditional quadratic form's weight field
    std::vector<IndexRange> win(d);
    for (std::size_t a = 0; a < d; ++a) {
        double lo = points[0][a], hi = points[0][a];
        for (const auto& p : points) {
            lo = std::min(lo, p[a]);
            hi = std::max(hi, p[a]);
        }
        win[a] = axis_range(sg.axes()[a], lo - gbox[a][1], hi - gbox[a][0]);
        if (win[a].empty) return 1.0;
    }
    const auto& g_atoms = g.mixing().atoms();
    std::vector<double> z(d);
    WeightedNodes sw = collect_window(sg, win, [&](const std::vector<double>& s) {
        double inner = 0.0;
        for (const auto& atom : g_atoms) {
            double acc = 0.0;
            for (std::size_t j = 0; j < points.size(); ++j) {
                for (std::size_t a = 0; a < d; ++a) z[a] = points[j][a] - s[a];
                acc += thetas[j] * g.eval(atom.point, z);
            }
            inner += atom.weight * acc * acc;
        }
        return inner * ds;
    });

    const auto& h_atoms = vm.kernel_h.mixing().atoms();
    double acc = 0.0;
    std::vector<std::size_t> m(d, 0);
    for (std::size_t i = 0; i < h_atoms.size(); ++i) {
        std::fill(m.begin(), m.end(), 0);
        for (std::size_t c = 0; c < ug.size(); ++c) {
            double k_val = 0.0;
            for (std::size_t sidx = 0; sidx < sw.flat.size(); ++sidx) {
                bool inside = true;
                for (std::size_t a = 0; a < d; ++a) {
                    z[a] = sw.coord[sidx][a] -
                           (ug.axes()[a].origin + static_cast<double>(m[a]) * ug.axes()[a].step);
                    if (z[a] < hbox[a][0] || z[a] > hbox[a][1]) {
                        inside = false;
                        break;
                    }
                }
                if (inside) k_val += sw.weight[sidx] * vm.kernel_h.eval(h_atoms[i].point, z);
            }
            if (k_val != 0.0) {
                try {
                    acc += h_atoms[i].weight * du * seed_cumulant(vm.basis, -0.5 * k_val);
                } catch (const std::domain_error&) {
                    throw std::runtime_error("joint_cf: seed cumulant domain violated at mixing atom " +
                                             std::to_string(i) + ", basis cell " + std::to_string(c));
                }
            }
            for (std::size_t a = d; a-- > 0;) {
                if (++m[a] < ug.axes()[a].count) break;
                m[a] = 0;
            }
        }
    }
    return std::exp(acc);
}

EstimateSE joint_cf_mc(const SimulationModel& model, const ModelGrids& grids,
                       const std::vector<std::vector<double>>& points,
                       const std::vector<double>& thetas, std::size_t n_reps, RngStream stream) {
    if (points.size() != thetas.size())
        throw std::invalid_argument("joint_cf: point/theta count mismatch");
    if (!model.volatility) {
        FieldSample c = FieldSample::constant(grids.vol, model.constant_variance,
                                              FieldKind::volatility);
        return {joint_cf_conditional(model.kernel_g, c, points, thetas), 0.0};
    }
    if (n_reps < 2) throw std::invalid_argument("joint_cf: mc mode needs at least two replications");
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t r = 0; r < n_reps; ++r) {
        FieldSample vol =
            simulate_volatility(*model.volatility, grids.vol, grids.basis, stream.child(r));
        double v = joint_cf_conditional(model.kernel_g, vol, points, thetas);
        sum += v;
        sumsq += v * v;
    }
    double n = static_cast<double>(n_reps);
    double mean = sum / n;
    double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n)};
}

double joint_cf(const SimulationModel& model, const ModelGrids& grids,
                const std::vector<std::vector<double>>& points, const std::vector<double>& thetas,
                CfMode mode, std::size_t n_reps, RngStream stream) {
    if (mode == CfMode::kumulant) return joint_cf_kumulant(model, grids, points, thetas);
    return joint_cf_mc(model, grids, points, thetas, n_reps, stream).value;
}

EstimateSE cov_squares(const SimulationModel& model, const ModelGrids& grids,
                       std::span<const double> t, std::span<const double> t_star,
                       std::size_t n_reps, RngStream stream) {
    const Kernel& g = model.kernel_g;
    const std::size_t d = grids.target.dim();
    if (t.size() != d || t_star.size() != d)
        throw std::invalid_argument("cov_squares: point dimension mismatch");
    const GridSpec& sg = grids.vol;
    const double ds = sg.cell_volume();
    Box box = g.lag_box();
    const auto& atoms = g.mixing().atoms();

    // conditional-covariance weights over the intersection window
    std::vector<IndexRange> cross_win(d);
    for (std::size_t a = 0; a < d; ++a) {
        double lo = std::max(t[a] - box[a][1], t_star[a] - box[a][1]);
        double hi = std::min(t[a] - box[a][0], t_star[a] - box[a][0]);
        cross_win[a] = axis_range(sg.axes()[a], lo, hi);
    }
    std::vector<double> z1(d), z2(d);
    WeightedNodes cross = collect_window(sg, cross_win, [&](const std::vector<double>& s) {
        double inner = 0.0;
        for (const auto& atom : atoms) {
            for (std::size_t a = 0; a < d; ++a) {
                z1[a] = t[a] - s[a];
                z2[a] = t_star[a] - s[a];
            }
            inner += atom.weight * g.eval(atom.point, z1) * g.eval(atom.point, z2);
        }
        return inner * ds;
    });

    if (!model.volatility) {
        double c = model.constant_variance * cross.total();
        return {2.0 * c * c, 0.0};
    }

    const VolatilityModel& vm = *model.volatility;
    if (!std::isfinite(seed_moments(vm.basis).fourth_cumulant))
        throw std::runtime_error("cov_squares: volatility basis lacks a finite fourth moment");
    if (n_reps < 2) throw std::invalid_argument("cov_squares: need at least two replications");

    WeightedNodes wt = collect_window(sg, lag_window(sg, t, box), [&](const std::vector<double>& s) {
        std::vector<double> z(d);
        for (std::size_t a = 0; a < d; ++a) z[a] = t[a] - s[a];
        return g.g_tilde(z) * ds;
    });
    WeightedNodes wts =
        collect_window(sg, lag_window(sg, t_star, box), [&](const std::vector<double>& s) {
            std::vector<double> z(d);
            for (std::size_t a = 0; a < d; ++a) z[a] = t_star[a] - s[a];
            return g.g_tilde(z) * ds;
        });

    // per-rep aggregates [C^2, V(t), V(t*), V(t) V(t*)]
    const std::size_t m = 4;
    std::vector<double> agg(n_reps * m);
    for (std::size_t r = 0; r < n_reps; ++r) {
        FieldSample vol = simulate_volatility(vm, grids.vol, grids.basis, stream.child(r));
        double c = cross.dot(vol.values);
        double vt = wt.dot(vol.values);
        double vs = wts.dot(vol.values);
        agg[r * m + 0] = c * c;
        agg[r * m + 1] = vt;
        agg[r * m + 2] = vs;
        agg[r * m + 3] = vt * vs;
    }
    auto stat = [](const double* means, double n) {
        // 2 E C^2 + sample Cov(V(t), V(t*))
        return 2.0 * means[0] + (means[3] - means[1] * means[2]) * n / (n - 1.0);
    };
    std::vector<double> colsum(m, 0.0);
    for (std::size_t r = 0; r < n_reps; ++r)
        for (std::size_t k = 0; k < m; ++k) colsum[k] += agg[r * m + k];
    double nr = static_cast<double>(n_reps);
    std::vector<double> means(m);
    for (std::size_t k = 0; k < m; ++k) means[k] = colsum[k] / nr;
    double full = stat(means.data(), nr);

    std::vector<double> loo(n_reps), drop(m);
    double loo_mean = 0.0;
    for (std::size_t r = 0; r < n_reps; ++r) {
        for (std::size_t k = 0; k < m; ++k) drop[k] = (colsum[k] - agg[r * m + k]) / (nr - 1.0);
        loo[r] = stat(drop.data(), nr - 1.0);
        loo_mean += loo[r];
    }
    loo_mean /= nr;
    double var = 0.0;
    for (std::size_t r = 0; r < n_reps; ++r) var += (loo[r] - loo_mean) * (loo[r] - loo_mean);
    return {full, std::sqrt(var * (nr - 1.0) / nr)};
}

MonotonicityReport check_complete_monotonicity(const TypeGLaw& model,
                                               const std::vector<double>& theta_grid,
                                               int max_order) {
    if (max_order < 1)
        throw std::invalid_argument("check_complete_monotonicity: max_order must be positive");
    if (theta_grid.size() < static_cast<std::size_t>(max_order) + 1)
        throw std::invalid_argument("check_complete_monotonicity: theta grid too small");
    if (!(theta_grid.front() > 0.0))
        throw std::invalid_argument("check_complete_monotonicity: theta grid must be positive");
    double step = theta_grid[1] - theta_grid[0];
    if (!(step > 0.0))
        throw std::invalid_argument("check_complete_monotonicity: theta grid must be increasing");
    for (std::size_t i = 0; i + 1 < theta_grid.size(); ++i)
        if (std::abs(theta_grid[i + 1] - theta_grid[i] - step) > 1e-9 * step)
            throw std::invalid_argument("check_complete_monotonicity: theta grid must be uniform");

    double span = theta_grid.back() - theta_grid.front();
    double delta = std::min(span * 1e-3, 0.5 * theta_grid.front());
    std::vector<double> d1(theta_grid.size());
    for (std::size_t i = 0; i < theta_grid.size(); ++i)
        d1[i] = (model.laplace_V(theta_grid[i] - delta) - model.laplace_V(theta_grid[i] + delta)) /
                (2.0 * delta);

    MonotonicityReport report;
    report.pass = true;
    std::vector<double> cur = d1;
    for (int n = 1; n <= max_order; ++n) {
        double sign = (n % 2 == 1) ? 1.0 : -1.0;
        double scale = std::pow(step, n - 1);
        double margin = std::numeric_limits<double>::infinity();
        for (double v : cur) margin = std::min(margin, sign * v / scale);
        bool pass = margin > report.noise_floor;
        report.orders.push_back({n, margin, pass});
        report.pass = report.pass && pass;
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) cur[i] = cur[i + 1] - cur[i];
        cur.pop_back();
    }
    return report;
}

} // namespace vmma
