#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vmma/fourier.hpp"

using namespace vmma;

namespace {

CovarianceTable sampled_covariance(double step, std::size_t count, double (*f)(double)) {
    double origin = -0.5 * static_cast<double>(count - 1) * step;
    GridSpec grid = GridSpec::line(origin, step, count);
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = f(grid.node(i)[0]);
    return {grid, values};
}

double gaussian_cov(double h) { return std::exp(-0.5 * h * h); }
double exponential_cov(double h) { return std::exp(-std::abs(h)); }

} // namespace

TEST_CASE("self-similar spectral density: closed form at H = 1/2") {
    // rho(h) = e^{-h/2} transforms to (2/pi) / (1 + 4 w^2)
    for (double w : {0.0, 0.3, 1.0, 4.0, 10.0}) {
        double want = 2.0 / (std::numbers::pi * (1.0 + 4.0 * w * w));
        CHECK(selfsim_spectral(0.5, w) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("self-similar spectral density is even and rejects H outside (0,1)") {
    for (double H : {0.2, 0.5, 0.8})
        CHECK(selfsim_spectral(H, 1.7) == doctest::Approx(selfsim_spectral(H, -1.7)).epsilon(1e-14));
    CHECK_THROWS_AS(selfsim_spectral(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(selfsim_spectral(1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(selfsim_spectral(-0.3, 1.0), std::domain_error);
}

TEST_CASE("forward transform satisfies the discrete Parseval identity") {
    Kernel k(SupOuKernel{}, 1, MixingMeasure::dirac({1.0}));
    GridSpec zgrid = GridSpec::line(0.0, 0.05, 257);
    std::vector<double> tab(zgrid.size());
    for (std::size_t i = 0; i < tab.size(); ++i) tab[i] = k.eval({{zgrid.node(i)[0]}});
    Kernel kt(TabulatedKernel{zgrid, tab}, 1);

    SpectralDensity gamma = spectral_from_kernel(kt, zgrid);
    REQUIRE(gamma.freq.dim() == 1);
    CHECK(gamma.freq.axis(0).count == zgrid.axis(0).count);

    double du = gamma.freq.axis(0).step;
    double dz = zgrid.axis(0).step;
    double lhs = 0.0;
    for (double v : gamma.values) lhs += v * du;
    double rhs = 0.0;
    for (std::size_t i = 0; i < zgrid.size(); ++i) rhs += kt.g_tilde({{zgrid.node(i)[0]}});
    rhs *= 2.0 * std::numbers::pi * dz;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    for (double v : gamma.values) CHECK(v >= 0.0);
}

TEST_CASE("frequency grids are centered on odd counts, half-shifted on even") {
    GridSpec odd = GridSpec::line(0.0, 0.1, 9);
    SpectralDensity so = spectral_from_kernel(
        Kernel(TabulatedKernel{odd, std::vector<double>(9, 1.0)}, 1), odd);
    double du_o = 2.0 * std::numbers::pi / (0.1 * 9);
    CHECK(so.freq.axis(0).step == doctest::Approx(du_o).epsilon(1e-14));
    CHECK(so.freq.node(4)[0] == doctest::Approx(0.0).epsilon(1e-12)); // carries a zero bin

    GridSpec even = GridSpec::line(0.0, 0.1, 8);
    SpectralDensity se = spectral_from_kernel(
        Kernel(TabulatedKernel{even, std::vector<double>(8, 1.0)}, 1), even);
    double du_e = 2.0 * std::numbers::pi / (0.1 * 8);
    for (std::size_t l = 0; l < 8; ++l) // no node sits on zero frequency
        CHECK(std::abs(se.freq.node(l)[0]) > 0.4 * du_e);
}

TEST_CASE("aliasing diagnostic fires when the window truncates the kernel") {
    Kernel k(SupOuKernel{}, 1, MixingMeasure::dirac({1.0}));
    // the window must overhang the support on both sides: the edge probe
    // samples both ends, and an orthant kernel peaks at z = 0
    GridSpec wide = GridSpec::line(-0.5, 0.05, 411); // [-0.5, 20]
    std::vector<double> tab(wide.size());
    for (std::size_t i = 0; i < tab.size(); ++i) tab[i] = k.eval({{wide.node(i)[0]}});
    SpectralDiagnostics diag;
    spectral_from_kernel(Kernel(TabulatedKernel{wide, tab}, 1), wide, &diag);
    CHECK_FALSE(diag.aliasing_warning);

    GridSpec narrow = GridSpec::line(0.0, 0.05, 21); // stops at reach 1
    std::vector<double> short_tab(narrow.size());
    for (std::size_t i = 0; i < short_tab.size(); ++i) short_tab[i] = k.eval({{narrow.node(i)[0]}});
    spectral_from_kernel(Kernel(TabulatedKernel{narrow, short_tab}, 1), narrow, &diag);
    CHECK(diag.aliasing_warning);
}

TEST_CASE("inverse transform is 1 at lag zero and recovers the window correlation") {
    Kernel k(SupOuKernel{}, 1, MixingMeasure::dirac({1.0}));
    GridSpec zgrid = GridSpec::line(0.0, 0.02, 1001); // reach 20, fine enough for e^{-2z}
    std::vector<double> tab(zgrid.size());
    for (std::size_t i = 0; i < tab.size(); ++i) tab[i] = k.eval({{zgrid.node(i)[0]}});
    SpectralDensity gamma = spectral_from_kernel(Kernel(TabulatedKernel{zgrid, tab}, 1), zgrid);

    std::vector<double> rho = correlation_from_spectral(gamma, {0.0, 0.5, 1.0, 2.0});
    CHECK(rho[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rho[1] == doctest::Approx(std::exp(-0.5)).epsilon(2e-3));
    CHECK(rho[2] == doctest::Approx(std::exp(-1.0)).epsilon(2e-3));
    CHECK(rho[3] == doctest::Approx(std::exp(-2.0)).epsilon(2e-3));

    SpectralDensity empty{GridSpec::line(0.0, 0.1, 5), {0.0, 0.0, 0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(correlation_from_spectral(empty, {0.0}), std::invalid_argument);
}

TEST_CASE("designed kernels reproduce Gaussian and exponential covariances") {
    for (auto target : {&gaussian_cov, &exponential_cov}) {
        CovarianceTable R = sampled_covariance(0.25, 65, *target);
        DesignResult even = kernel_from_covariance(R, SpectralRoot::even);
        CHECK(even.roundtrip_error < 1e-3);

        DesignResult odd = kernel_from_covariance(R, SpectralRoot::odd);
        CHECK(odd.roundtrip_error < 1e-3);

        const auto& fe = std::get<TabulatedKernel>(even.kernel.family());
        const auto& fo = std::get<TabulatedKernel>(odd.kernel.family());
        REQUIRE(fe.values.size() == fo.values.size());

        // even root is symmetric and odd root antisymmetric about z = 0; with
        // the top lag node dropped, node j mirrors to node n - j and the
        // leftmost node has no partner
        std::size_t n = fe.values.size();
        for (std::size_t j = 1; j < n / 2; ++j) {
            CHECK(fe.values[j] == doctest::Approx(fe.values[n - j]).epsilon(1e-9).scale(1.0));
            CHECK(fo.values[j] == doctest::Approx(-fo.values[n - j]).epsilon(1e-9).scale(1.0));
        }

        // both roots carry the same spectrum, so the roundtrips agree exactly
        CHECK(std::abs(even.roundtrip_error - odd.roundtrip_error) < 1e-10);
    }
}

TEST_CASE("design rejects inputs that are not covariance functions") {
    CovarianceTable bad = sampled_covariance(0.25, 33, +[](double h) {
        return h == 0.0 ? 1.0 : (std::abs(h) <= 0.25 ? -0.9 : 0.0);
    });
    CHECK_THROWS_WITH_AS(kernel_from_covariance(bad, SpectralRoot::even),
                         doctest::Contains("not a covariance"), std::invalid_argument);
}

TEST_CASE("design validates the lag window") {
    CovarianceTable even_count = sampled_covariance(0.25, 32, exponential_cov);
    CHECK_THROWS_AS(kernel_from_covariance(even_count, SpectralRoot::even), std::invalid_argument);

    CovarianceTable tiny = sampled_covariance(0.25, 7, exponential_cov);
    CHECK_THROWS_AS(kernel_from_covariance(tiny, SpectralRoot::even), std::invalid_argument);

    CovarianceTable shifted = sampled_covariance(0.25, 33, exponential_cov);
    shifted.grid = GridSpec::line(0.0, 0.25, 33); // not symmetric about 0
    CHECK_THROWS_AS(kernel_from_covariance(shifted, SpectralRoot::even), std::invalid_argument);
}

TEST_CASE("separable design combines per-axis roots into a product kernel") {
    CovarianceTable R = sampled_covariance(0.25, 65, gaussian_cov);
    DesignResult res = kernel_from_covariance_separable({R, R}, SpectralRoot::even);
    CHECK(res.kernel.dim() == 2);
    CHECK(res.roundtrip_error < 1e-3);

    const auto& tk = std::get<TabulatedKernel>(res.kernel.family());
    CHECK(tk.grid.dim() == 2);
    // product structure: value at (z1, z2) factors through the 1-D design
    DesignResult axis = kernel_from_covariance(R, SpectralRoot::even);
    const auto& f1 = std::get<TabulatedKernel>(axis.kernel.family());
    std::size_t n = f1.values.size();
    CHECK(tk.values[5 * n + 11] == doctest::Approx(f1.values[5] * f1.values[11]).epsilon(1e-12));
}
