#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "vmma/grid.hpp"
#include "vmma/levy_basis.hpp"

namespace vmma {

/// Closed per-axis interval hull, [lo, hi] per axis.
using Box = std::vector<std::array<double, 2>>;

// --- kernel families ---------------------------------------------------------

/// g(x, z) = exp(-<x, z>) on the nonnegative orthant, 0 elsewhere. The decay
/// rate x comes from the mixing measure (dimension d, or 1 for a common rate
/// on all axes).
struct SupOuKernel {};

/// Indicator of a product box (ambit/trawl set), parameter-free.
struct TrawlKernel {
    Box region;
};

/// Green's function of the parabolic operator on the half-plane z2 > 0:
///   -(2 gamma sqrt(pi z2))^{-1} exp(-alpha z1 - beta z2 - z1^2 gamma^2/(4 z2)).
/// The leading minus sign is kept as stated; every second-order quantity
/// squares it away. Requires 0 <= alpha^2 < beta gamma^2. With
/// gamma_from_mixing, gamma is randomized through the 1-D mixing measure.
struct ParabolicGreenKernel {
    double alpha, beta, gamma;
    bool gamma_from_mixing = false;
};

/// Green's function of the elliptic operator: (2 pi)^{-1} e^{alpha z1} K0(gamma |z|),
/// all of R^2; +infinity at the origin. Requires 0 <= alpha < gamma.
struct EllipticGreenKernel {
    double alpha, gamma;
};

/// Green's function of the hyperbolic operator on the first quadrant:
///   e^{-alpha z1 - beta z2} J0(2 gamma sqrt(z1 z2)).
/// Requires alpha, beta > 0 and gamma >= 0 (gamma = 0 gives the separable
/// exponential kernel).
struct HyperbolicGreenKernel {
    double alpha, beta, gamma;
};

/// Values on a lattice with multilinear interpolation, 0 outside the node hull.
struct TabulatedKernel {
    GridSpec grid;
    std::vector<double> values;
};

enum class SupportClass { orthant, half_plane, all_space, box };

/// Deterministic weight function g(x, z) together with its mixing measure
/// over the parameter x. Immutable; evaluation is pure.
class Kernel {
  public:
    using Family = std::variant<SupOuKernel, TrawlKernel, ParabolicGreenKernel,
                                EllipticGreenKernel, HyperbolicGreenKernel, TabulatedKernel>;

    Kernel(Family family, std::size_t dim, MixingMeasure mixing = MixingMeasure::unit());

    std::size_t dim() const { return dim_; }
    std::size_t parameter_dim() const { return mixing_.dimension(); }
    const MixingMeasure& mixing() const { return mixing_; }
    const Family& family() const { return family_; }
    SupportClass support_class() const;

    /// g(x, z); 0 outside the declared support. Total function.
    double eval(std::span<const double> x, std::span<const double> z) const;

    /// g(z) for parameter-free kernels or a single-atom mixing measure.
    double eval(std::span<const double> z) const;

    /// g~(z) = sum_i w_i g(x_i, z)^2 over the mixing atoms.
    double g_tilde(std::span<const double> z) const;

    /// Per-axis hull outside which the relative tail mass of g~ is below tol.
    Box lag_box(double tol = 1e-6) const;

  private:
    Family family_;
    std::size_t dim_;
    MixingMeasure mixing_;
};

/// Condition-3 convolution k(y, z) = sum_cells g~(z - u) h(y, u) cellvol over
/// the integration grid (u-space). Sets *boundary_warning when the outermost
/// cell layer carries more than 1e-6 of the total (the grid truncates mass).
double convolve_k(const Kernel& kernel_g, const Kernel& kernel_h, std::span<const double> y,
                  std::span<const double> z, const GridSpec& grid,
                  bool* boundary_warning = nullptr);

/// Riemann mass sum_z g~(z) cellvol (square-integrability quadrature).
double l2_mass(const Kernel& kernel, const GridSpec& grid);

} // namespace vmma
