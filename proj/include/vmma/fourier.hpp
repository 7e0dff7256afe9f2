#pragma once

#include <cstddef>
#include <vector>

#include "vmma/grid.hpp"
#include "vmma/kernels.hpp"

namespace vmma {

enum class SpectralForm { tabulated, selfsimilar_series };

/// Nonnegative, even spectral density tabulated on a 1-D frequency grid.
struct SpectralDensity {
    GridSpec freq;
    std::vector<double> values;
    SpectralForm form = SpectralForm::tabulated;
    double selfsim_H = 0.0; // meaningful when form == selfsimilar_series
};

struct SpectralDiagnostics {
    bool aliasing_warning = false; // kernel mass at the grid edge above 1e-6 of total
};

/// gamma(u) = sum_i w_i |g^(x_i, u)|^2 from the step-weighted discrete
/// transform of the kernel tabulated on zgrid (d=1). The frequency grid is
/// commensurate with zgrid, du = 2 pi / (N dz): centered (u_l = l du) when N
/// is odd, half-shifted (u_l = (l + 1/2) du) when N is even. Half-shifted
/// grids avoid the zero-frequency bin and make even/odd designed roots exact
/// transform pairs.
SpectralDensity spectral_from_kernel(const Kernel& kernel, const GridSpec& zgrid,
                                     SpectralDiagnostics* diag = nullptr);

/// Inverse transform at the requested lags, normalized to 1 at lag 0:
/// rho(h) = sum_l gamma_l cos(u_l h) / sum_l gamma_l.
std::vector<double> correlation_from_spectral(const SpectralDensity& gamma,
                                              const std::vector<double>& lags);

/// Covariance values on a symmetric 1-D lag grid (origin = -(count-1)/2 * step).
struct CovarianceTable {
    GridSpec grid;
    std::vector<double> values;
};

enum class SpectralRoot { even, odd };

struct DesignResult {
    Kernel kernel;          // d=1 tabulated kernel f with |f^|^2 = gamma
    double roundtrip_error; // sup |rho_reconstructed - R/R(0)| over interior 80% lags
};

/// Spectral-root kernel design: gamma = forward transform of R (negative
/// bins within 1e-3 of the peak are truncation ripple and clip to 0; deeper
/// negatives reject R), f = inverse transform of the even root
/// sqrt(gamma) or the odd root sgn(u) sqrt(gamma). Works on an even node
/// count (the input's top lag node is dropped) so the half-shifted frequency
/// grid applies and both roots reconstruct identically.
DesignResult kernel_from_covariance(const CovarianceTable& R, SpectralRoot root);

/// Separable product design: one spectral root per axis, combined into a
/// d-dimensional tabulated product kernel. roundtrip_error is the worst axis.
DesignResult kernel_from_covariance_separable(const std::vector<CovarianceTable>& axes,
                                              SpectralRoot root);

/// Spectral-density series of the self-similar d=1 correlation: partial sums
/// of (2 pi)^{-1} sum_k C(2H, k) (-1)^{k-1} (k - H) / ((k - H)^2 + w^2),
/// truncated once five consecutive terms fall below tol (after k > 2H + 2,
/// guarding the non-monotone early terms).
double selfsim_spectral(double H, double w, double tol = 1e-10);

} // namespace vmma
