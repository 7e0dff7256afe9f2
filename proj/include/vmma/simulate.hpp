#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vmma/grid.hpp"
#include "vmma/kernels.hpp"
#include "vmma/levy_basis.hpp"
#include "vmma/rng.hpp"

namespace vmma {

/// Stochastic-volatility layer: sigma^2(s) = int h(y, s-u) B(dy, du) for a
/// subordinator basis B and a nonnegative kernel h. Use
/// make_volatility_model to get the invariants checked.
struct VolatilityModel {
    Kernel kernel_h;
    CharQuadruplet basis;
};

/// Validates that the basis is a subordinator family and that h is
/// nonnegative on a probe lattice over its truncation box.
VolatilityModel make_volatility_model(Kernel kernel_h, CharQuadruplet basis);

/// Moving-average field X(t) = int g(x, t-s) sigma(s) W(dx, ds), with W the
/// centered Gaussian basis of unit variance density and sigma either the
/// stochastic layer above or the constant sqrt(constant_variance).
struct SimulationModel {
    Kernel kernel_g;
    std::optional<VolatilityModel> volatility;
    double constant_variance = 1.0; // sigma^2 when `volatility` is empty
};

/// The nested lattices of one simulation run, all sharing the target's step.
/// Volatility nodes sit at half-step offsets from target nodes so that the
/// jump of a one-sided kernel falls between nodes (midpoint rule, and it
/// keeps Riemann sums second-order accurate), while target-lag differences
/// stay on-grid. The basis lattice reuses the target offsets, so volatility
/// lags s-u are again half-offset.
struct ModelGrids {
    GridSpec target; // t-lattice: where X is reported
    GridSpec vol;    // s-lattice: target dilated by g's lag box, offset by step/2
    GridSpec basis;  // u-lattice: vol dilated by h's lag box (== vol when sigma is constant)
};

/// Dilates `target` by the kernels' truncation boxes at tolerance `tol`.
ModelGrids derive_grids(const SimulationModel& model, const GridSpec& target, double tol = 1e-6);

/// One draw of sigma^2 on `grid` built from independent basis increments on
/// the cells of `extended_grid`. Requires `extended_grid` to cover `grid`
/// dilated by h's lag box (cell-center coverage, matching derive_grids).
/// Basis cell (atom i, cell c) draws from stream.child(i * n_cells + c), so
/// the field is reproducible and independent of traversal order.
FieldSample simulate_volatility(const VolatilityModel& model, const GridSpec& grid,
                                const GridSpec& extended_grid, RngStream stream);

/// sigma^2 on grids.vol for one replication: a basis draw when the model
/// has a stochastic layer, else the constant field (no randomness consumed).
FieldSample volatility_draw(const SimulationModel& model, const ModelGrids& grids,
                            RngStream stream);

/// One draw of X on `grid` given a squared-volatility field. The field's
/// grid must share the target step, sit at half-step offsets, and cover
/// `grid` dilated by g's lag box. Gaussian cell increments are drawn
/// sequentially from `stream`'s engine in (atom, cell) order.
FieldSample simulate_vmmma(const Kernel& kernel_g, const FieldSample& vol, const GridSpec& grid,
                           RngStream stream);

/// Integrated squared volatility V(t) = int g_tilde(t-s) sigma^2(s) ds,
/// evaluated by the midpoint rule on the volatility lattice.
double compute_V(const Kernel& kernel_g, const FieldSample& vol, std::span<const double> t);

/// Point estimate with a delete-one-replication jackknife standard error.
struct EstimateSE {
    double value = 0.0;
    double se = 0.0;
};

/// What replicate() should estimate: covariances of the field and of its
/// square at on-grid lags, and the empirical characteristic function
/// E cos(theta X) at the given angles.
struct ReplicationRequest {
    std::vector<std::vector<double>> lags;
    std::vector<double> thetas;
};

/// Cross-replication estimates. X has exact zero mean (centered Gaussian
/// basis), so covariances are raw product averages; subtracting the sample
/// mean would inject an O(Var(lattice mean)) bias that dominates the Monte
/// Carlo error on strongly correlated lattices. All averages pool lattice
/// pairs within a replication, then replications.
struct MonteCarloSummary {
    std::size_t n_reps = 0;
    EstimateSE mean;                            // E X (should straddle 0)
    EstimateSE second_moment;                   // E X^2
    std::vector<EstimateSE> covariance;         // E X(t) X(t+lag), per lag
    std::vector<EstimateSE> correlation;        // covariance / second_moment
    std::vector<EstimateSE> covariance_squares; // Cov(X^2(t), X^2(t+lag))
    std::vector<EstimateSE> char_fn;            // E cos(theta X), per theta
};

/// Runs n_reps independent replications (n_reps >= 2). Replication r draws
/// its volatility from master.child(r).child(0) and its Gaussian layer from
/// master.child(r).child(1); results depend only on the master seed.
MonteCarloSummary replicate(const SimulationModel& model, const ModelGrids& grids,
                            const ReplicationRequest& request, std::size_t n_reps,
                            RngStream master);

} // namespace vmma
