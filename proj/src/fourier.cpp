#include "vmma/fourier.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace vmma {

namespace {

constexpr double pi = 3.14159265358979323846;

// Frequency grid commensurate with a 1-D lattice: du*dz = 2*pi/N, centered
// for odd N, half-sample-shifted for even N (no zero bin).
GridSpec frequency_grid(const GridSpec& zgrid) {
    const auto& ax = zgrid.axis(0);
    double du = 2.0 * pi / (ax.step * static_cast<double>(ax.count));
    double origin = (ax.count % 2 == 1) ? -du * static_cast<double>(ax.count / 2)
                                        : -du * (static_cast<double>(ax.count / 2) - 0.5);
    return GridSpec::line(origin, du, ax.count);
}

void require_1d(const GridSpec& grid, const char* who) {
    if (grid.dim() != 1) throw std::invalid_argument(std::string(who) + ": requires d=1");
}

} // namespace

SpectralDensity spectral_from_kernel(const Kernel& kernel, const GridSpec& zgrid,
                                     SpectralDiagnostics* diag) {
    require_1d(zgrid, "spectral_from_kernel");
    if (kernel.dim() != 1)
        throw std::invalid_argument("spectral_from_kernel: kernel must be 1-dimensional");

    const auto& ax = zgrid.axis(0);
    GridSpec freq = frequency_grid(zgrid);
    std::vector<double> values(ax.count, 0.0);
    std::vector<double> g(ax.count);
    for (const auto& atom : kernel.mixing().atoms()) {
        for (std::size_t j = 0; j < ax.count; ++j) {
            double z = ax.node(j);
            g[j] = kernel.eval(atom.point, std::span<const double>(&z, 1));
        }
        for (std::size_t l = 0; l < freq.axis(0).count; ++l) {
            double u = freq.axis(0).node(l);
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t j = 0; j < ax.count; ++j)
                acc += g[j] * std::polar(1.0, -u * ax.node(j));
            values[l] += atom.weight * std::norm(acc) * ax.step * ax.step;
        }
    }
    // |.|^2 of a transform cannot go negative; clip roundoff dust anyway
    for (double& v : values)
        if (v < 0.0) v = 0.0;

    if (diag) {
        double total = 0.0;
        for (std::size_t j = 0; j < ax.count; ++j) {
            double z = ax.node(j);
            total += kernel.g_tilde(std::span<const double>(&z, 1));
        }
        double zlo = ax.node(0), zhi = ax.node(ax.count - 1);
        double edge = kernel.g_tilde(std::span<const double>(&zlo, 1)) +
                      kernel.g_tilde(std::span<const double>(&zhi, 1));
        diag->aliasing_warning = total > 0.0 && edge > 1e-6 * total;
    }
    return SpectralDensity{std::move(freq), std::move(values), SpectralForm::tabulated, 0.0};
}

std::vector<double> correlation_from_spectral(const SpectralDensity& gamma,
                                              const std::vector<double>& lags) {
    require_1d(gamma.freq, "correlation_from_spectral");
    if (gamma.values.size() != gamma.freq.size())
        throw std::invalid_argument("correlation_from_spectral: value count mismatch");
    const auto& ax = gamma.freq.axis(0);
    double total = 0.0;
    for (double v : gamma.values) total += v;
    if (!(total > 0.0))
        throw std::invalid_argument("correlation_from_spectral: spectral density has zero mass");
    std::vector<double> out;
    out.reserve(lags.size());
    for (double h : lags) {
        double s = 0.0;
        for (std::size_t l = 0; l < ax.count; ++l) s += gamma.values[l] * std::cos(ax.node(l) * h);
        out.push_back(s / total);
    }
    return out;
}

DesignResult kernel_from_covariance(const CovarianceTable& R, SpectralRoot root) {
    require_1d(R.grid, "kernel_from_covariance");
    if (R.values.size() != R.grid.size())
        throw std::invalid_argument("kernel_from_covariance: value count mismatch");
    const auto& in = R.grid.axis(0);
    if (in.count < 8 || in.count % 2 == 0)
        throw std::invalid_argument("kernel_from_covariance: lag grid must be symmetric (odd count >= 9)");
    if (std::abs(in.origin + 0.5 * in.step * static_cast<double>(in.count - 1)) > 1e-9 * in.step)
        throw std::invalid_argument("kernel_from_covariance: lag grid must be symmetric about 0");

    // Work on the even node count N = count-1 (drop the unpaired top lag);
    // the half-shifted frequency grid then has no zero bin and a real odd
    // root exists as an exact transform pair.
    std::size_t n = in.count - 1;
    GridSpec zgrid = GridSpec::line(in.origin, in.step, n);
    GridSpec freq = frequency_grid(zgrid);
    double dz = in.step;

    std::vector<double> gamma(n, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
        double u = freq.axis(0).node(l);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += R.values[j] * std::cos(u * zgrid.axis(0).node(j));
        gamma[l] = s * dz;
    }
    // Truncating R to the lag window ripples the transform by O(tail mass),
    // so negatives within 1e-3 of the peak are clipped as ripple; anything
    // more negative means R is not a covariance function.
    double peak = 0.0;
    for (double v : gamma) peak = std::max(peak, std::abs(v));
    for (double& v : gamma) {
        if (v < -1e-3 * peak)
            throw std::invalid_argument(
                "kernel_from_covariance: not a covariance function (transform significantly negative)");
        if (v < 0.0) v = 0.0;
    }

    std::vector<double> f(n, 0.0);
    double norm = 1.0 / (static_cast<double>(n) * dz);
    for (std::size_t j = 0; j < n; ++j) {
        double z = zgrid.axis(0).node(j);
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            double u = freq.axis(0).node(l);
            double rootval = std::sqrt(gamma[l]);
            s += (root == SpectralRoot::even) ? rootval * std::cos(u * z)
                                              : rootval * (u > 0.0 ? 1.0 : -1.0) * std::sin(u * z);
        }
        f[j] = s * norm;
    }

    Kernel kernel(TabulatedKernel{zgrid, std::move(f)}, 1);

    // roundtrip on the interior 80% of the lag range
    SpectralDensity sp = spectral_from_kernel(kernel, zgrid);
    std::size_t zero_node = R.grid.locate({0.0});
    if (zero_node == GridSpec::npos)
        throw std::invalid_argument("kernel_from_covariance: lag grid must contain 0");
    double r0 = R.values[zero_node];
    if (!(r0 > 0.0)) throw std::invalid_argument("kernel_from_covariance: R(0) must be positive");
    std::vector<double> interior_lags;
    std::vector<double> target;
    double reach = 0.8 * std::abs(in.origin);
    for (std::size_t j = 0; j < n; ++j) {
        double z = zgrid.axis(0).node(j);
        if (std::abs(z) <= reach) {
            interior_lags.push_back(z);
            target.push_back(R.values[j] / r0);
        }
    }
    std::vector<double> rho = correlation_from_spectral(sp, interior_lags);
    double err = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) err = std::max(err, std::abs(rho[i] - target[i]));
    return DesignResult{std::move(kernel), err};
}

DesignResult kernel_from_covariance_separable(const std::vector<CovarianceTable>& axes,
                                              SpectralRoot root) {
    if (axes.empty()) throw std::invalid_argument("kernel_from_covariance_separable: no axes");
    std::vector<DesignResult> parts;
    parts.reserve(axes.size());
    for (const auto& ax : axes) parts.push_back(kernel_from_covariance(ax, root));

    std::vector<GridAxis> grid_axes;
    double err = 0.0;
    for (const auto& part : parts) {
        const auto& tab = std::get<TabulatedKernel>(part.kernel.family());
        grid_axes.push_back(tab.grid.axis(0));
        err = std::max(err, part.roundtrip_error);
    }
    GridSpec grid(grid_axes);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto idx = grid.unravel(i);
        double v = 1.0;
        for (std::size_t a = 0; a < axes.size(); ++a)
            v *= std::get<TabulatedKernel>(parts[a].kernel.family()).values[idx[a]];
        values[i] = v;
    }
    return DesignResult{Kernel(TabulatedKernel{std::move(grid), std::move(values)}, axes.size()), err};
}

double selfsim_spectral(double H, double w, double tol) {
    if (!(H > 0.0 && H < 1.0)) throw std::domain_error("selfsim_spectral: H must be in (0,1)");
    if (!(tol > 0.0)) throw std::invalid_argument("selfsim_spectral: tol must be positive");

    double sum = 0.0;
    double binom = 1.0; // C(2H, k) via product recursion
    int consecutive = 0;
    for (long k = 0; k < 100'000'000; ++k) {
        if (k > 0) binom *= (2.0 * H - static_cast<double>(k) + 1.0) / static_cast<double>(k);
        double kmh = static_cast<double>(k) - H;
        double sign = (k % 2 == 0) ? -1.0 : 1.0; // (-1)^{k-1}
        double term = binom * sign * kmh / (kmh * kmh + w * w);
        sum += term;
        if (static_cast<double>(k) > 2.0 * H + 2.0) {
            if (std::abs(term) < tol) {
                if (++consecutive >= 5) break;
            } else {
                consecutive = 0;
            }
        }
    }
    return sum / (2.0 * pi);
}

} // namespace vmma
