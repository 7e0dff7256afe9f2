#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vmma/grid.hpp"
#include "vmma/kernels.hpp"
#include "vmma/levy_basis.hpp"
#include "vmma/rng.hpp"
#include "vmma/simulate.hpp"

namespace vmma {

/// Law of the integrated squared volatility V (and through it the type-G law
/// of X): Laplace exponent Lambda_V(theta) = -theta*drift
/// + sum_atoms mass * kappa(-theta * scale), where the atoms tabulate the
/// convolution k(y, t-u) = int g_tilde(t-s) h(y, s-u) ds over the same
/// lattices the simulator uses, so analytic values and Monte Carlo estimates
/// differ only by Monte Carlo error. A deterministic-volatility model
/// contributes only the drift (V is then a constant).
class TypeGLaw {
  public:
    struct MassAtom {
        double scale; // k-value at the (mixing atom, basis cell) node
        double mass;  // mixing weight times basis cell volume
    };

    /// Tabulates the model on the given simulation lattices; the evaluation
    /// point is the first target node (stationarity makes the choice moot).
    TypeGLaw(const SimulationModel& model, const ModelGrids& grids);

    /// Direct construction from a known jump decomposition of V, e.g. a
    /// single atom for a compound-Poisson volatility with degenerate kernel.
    static TypeGLaw from_atoms(std::vector<MassAtom> atoms, CharQuadruplet basis);

    /// Lambda_V(theta) = log E exp(-theta V), theta >= 0.
    double laplace_V(double theta) const;
    /// E exp(i theta X) = exp(Lambda_V(theta^2 / 2)): real, even, in (0,1].
    double char_X(double theta) const;
    /// E V = Var X(0).
    double mean_V() const;
    /// Relative change of Lambda_V(1) when the tabulation is cut to half its
    /// radius around the evaluation point; large values flag truncation
    /// problems and make laplace_V throw.
    double doubling_change() const { return doubling_change_; }

    const std::vector<MassAtom>& atoms() const { return atoms_; }
    const std::optional<CharQuadruplet>& basis() const { return basis_; }

  private:
    TypeGLaw() = default;

    std::vector<MassAtom> atoms_;
    std::optional<CharQuadruplet> basis_; // empty for purely deterministic V
    double drift_v_ = 0.0;                // deterministic part of V
    double doubling_change_ = 0.0;
};

/// Free-function forms of the evaluators above.
double laplace_V(const TypeGLaw& model, double theta);
double char_X(const TypeGLaw& model, double theta);

/// Stationary covariance R_X(lag) = mean_sigma2 * int int g(x, lag+s) g(x, s)
/// p(dx) ds by midpoint quadrature; `quad_grid` overrides the internal
/// lattice (useful to share a lattice with the spectral route).
double covariance_X(const Kernel& kernel_g, double mean_sigma2, std::span<const double> lag,
                    const GridSpec* quad_grid = nullptr);

/// R_X(lag) / R_X(0); independent of the volatility level.
double correlation_X(const Kernel& kernel_g, std::span<const double> lag,
                     const GridSpec* quad_grid = nullptr);

/// Conditional joint characteristic function given the volatility field:
/// exp(-1/2 int int (sum_j theta_j g(x, t_j - s))^2 sigma^2(s) p(dx) ds).
/// With a single point this is exactly exp(-theta^2/2 * compute_V(t)).
double joint_cf_conditional(const Kernel& kernel_g, const FieldSample& vol,
                            const std::vector<std::vector<double>>& points,
                            const std::vector<double>& thetas);

enum class CfMode { mc, kumulant };

/// Unconditional joint characteristic function of (X(t_1), ..., X(t_n)).
/// kumulant mode integrates the seed cumulant against the double-convolution
/// weights on the simulation lattices; mc mode averages the conditional CF
/// over volatility replications (pass n_reps and a stream).
double joint_cf(const SimulationModel& model, const ModelGrids& grids,
                const std::vector<std::vector<double>>& points, const std::vector<double>& thetas,
                CfMode mode, std::size_t n_reps = 0, RngStream stream = RngStream(0));

double joint_cf_kumulant(const SimulationModel& model, const ModelGrids& grids,
                         const std::vector<std::vector<double>>& points,
                         const std::vector<double>& thetas);

EstimateSE joint_cf_mc(const SimulationModel& model, const ModelGrids& grids,
                       const std::vector<std::vector<double>>& points,
                       const std::vector<double>& thetas, std::size_t n_reps, RngStream stream);

/// Cov(X^2(t), X^2(t*)) = 2 E C_sigma(t,t*)^2 + Cov(V(t), V(t*)), where
/// C_sigma is the conditional covariance given sigma. The expectations over
/// the volatility law are estimated from n_reps volatility replications
/// (exact with zero SE for deterministic volatility); the standard error is
/// a delete-one jackknife over replications.
EstimateSE cov_squares(const SimulationModel& model, const ModelGrids& grids,
                       std::span<const double> t, std::span<const double> t_star,
                       std::size_t n_reps, RngStream stream);

/// Sign-alternation check of the finite-difference derivatives of
/// Psi' = -Lambda_V' on a uniform positive theta grid: order n tests
/// (-1)^(n-1) Psi^(n) >= 0, with margins measured in derivative units and a
/// pinned noise floor of -1e-8.
struct MonotonicityOrder {
    int order = 0;
    double worst_margin = 0.0;
    bool pass = false;
};

struct MonotonicityReport {
    std::vector<MonotonicityOrder> orders;
    double noise_floor = -1e-8;
    bool pass = false;
};

MonotonicityReport check_complete_monotonicity(const TypeGLaw& model,
                                               const std::vector<double>& theta_grid,
                                               int max_order = 4);

} // namespace vmma
