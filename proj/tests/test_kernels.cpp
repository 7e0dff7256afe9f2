#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vmma/kernels.hpp"
#include "vmma/special.hpp"

using namespace vmma;

TEST_CASE("sup-OU kernel is the exponential on the orthant") {
    Kernel k(SupOuKernel{}, 1, MixingMeasure::dirac({2.0}));
    CHECK(k.eval({{0.5}}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(k.eval({{-0.1}}) == 0.0);
    CHECK(k.g_tilde({{0.5}}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(k.support_class() == SupportClass::orthant);

    // a 1-D mixing point supplies a common rate on every axis
    Kernel k2(SupOuKernel{}, 2, MixingMeasure::dirac({2.0}));
    CHECK(k2.eval({{0.5, 1.0}}) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));

    Kernel mix(SupOuKernel{}, 1, MixingMeasure::discrete({{{1.0}, 0.25}, {{2.0}, 0.75}}));
    CHECK(mix.g_tilde({{0.5}}) ==
          doctest::Approx(0.25 * std::exp(-1.0) + 0.75 * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("trawl kernel is the indicator of its region") {
    Kernel k(TrawlKernel{{{-1.0, 0.0}, {0.0, 2.0}}}, 2);
    CHECK(k.eval({{-0.5, 1.0}}) == 1.0);
    CHECK(k.eval({{0.5, 1.0}}) == 0.0);
    CHECK(k.eval({{-0.5, 2.5}}) == 0.0);
    CHECK(k.g_tilde({{-0.5, 1.0}}) == 1.0);
    CHECK(k.support_class() == SupportClass::box);
    CHECK(k.lag_box() == Box{{-1.0, 0.0}, {0.0, 2.0}});
}

TEST_CASE("parabolic Green kernel matches its closed form on z2 > 0") {
    Kernel k(ParabolicGreenKernel{0.5, 1.0, 1.0}, 2);
    double want = -std::exp(-0.5 - 2.0 - 1.0 / 8.0) / (2.0 * std::sqrt(std::numbers::pi * 2.0));
    CHECK(k.eval({{1.0, 2.0}}) == doctest::Approx(want).epsilon(1e-14));
    CHECK(k.eval({{1.0, 0.0}}) == 0.0);
    CHECK(k.eval({{1.0, -0.5}}) == 0.0);
    CHECK(k.g_tilde({{1.0, 2.0}}) == doctest::Approx(want * want).epsilon(1e-14));
    CHECK(k.support_class() == SupportClass::half_plane);
}

TEST_CASE("parabolic Green kernel can draw gamma from the mixing measure") {
    Kernel k(ParabolicGreenKernel{0.5, 1.0, 0.0, true}, 2,
             MixingMeasure::discrete({{{1.0}, 0.5}, {{2.0}, 0.5}}));
    double g = 2.0;
    double want = -std::exp(-0.5 - 2.0 - g * g / 8.0) / (2.0 * g * std::sqrt(std::numbers::pi * 2.0));
    CHECK(k.eval({{2.0}}, {{1.0, 2.0}}) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("elliptic Green kernel matches (2 pi)^{-1} e^{alpha z1} K0(gamma |z|)") {
    Kernel k(EllipticGreenKernel{0.5, 1.0}, 2);
    double r = std::sqrt(2.0);
    double want = std::exp(-0.5) * bessel_k0(r) / (2.0 * std::numbers::pi);
    CHECK(k.eval({{-1.0, 1.0}}) == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::isinf(k.eval({{0.0, 0.0}})));
    CHECK(k.support_class() == SupportClass::all_space);
}

TEST_CASE("hyperbolic Green kernel matches its closed form on the quadrant") {
    Kernel k(HyperbolicGreenKernel{1.0, 1.0, 1.5}, 2);
    double want = std::exp(-3.0) * bessel_j0(3.0 * std::sqrt(2.0));
    CHECK(k.eval({{1.0, 2.0}}) == doctest::Approx(want).epsilon(1e-12));
    CHECK(k.eval({{-0.1, 1.0}}) == 0.0);
    CHECK(k.eval({{1.0, -0.1}}) == 0.0);
    CHECK(k.support_class() == SupportClass::orthant);

    // gamma = 0 degenerates to the separable exponential
    Kernel sep(HyperbolicGreenKernel{1.0, 2.0, 0.0}, 2);
    CHECK(sep.eval({{1.0, 0.5}}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("tabulated kernel interpolates and vanishes off the hull") {
    GridSpec line = GridSpec::line(0.0, 0.5, 5);
    Kernel k(TabulatedKernel{line, {1.0, 2.0, 3.0, 4.0, 5.0}}, 1);
    CHECK(k.eval({{0.5}}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(k.eval({{0.75}}) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(k.eval({{2.0}}) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(k.eval({{2.2}}) == 0.0);
    CHECK(k.eval({{-0.1}}) == 0.0);

    GridSpec square({{0.0, 1.0, 2}, {0.0, 1.0, 2}});
    Kernel b(TabulatedKernel{square, {1.0, 2.0, 3.0, 4.0}}, 2);
    CHECK(b.eval({{0.5, 0.5}}) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("lag box covers the exponential tail to the requested tolerance") {
    Kernel k(SupOuKernel{}, 1, MixingMeasure::dirac({2.0}));
    Box box = k.lag_box(1e-6);
    CHECK(box[0][0] == 0.0);
    CHECK(box[0][1] == doctest::Approx(std::log(1e6) / 4.0).epsilon(1e-3));
    CHECK_THROWS_AS(k.lag_box(0.0), std::invalid_argument);
    CHECK_THROWS_AS(k.lag_box(1.0), std::invalid_argument);
}

TEST_CASE("convolution against the volatility kernel matches the closed form") {
    Kernel g(SupOuKernel{}, 1, MixingMeasure::dirac({1.0}));
    Kernel h(SupOuKernel{}, 1, MixingMeasure::dirac({1.0}));
    // overhang the support edge by one cell so the edge layer carries nothing
    GridSpec grid = GridSpec::line(-0.005, 0.01, 2002);
    bool warn = true;
    double z = 1.5;
    double got = convolve_k(g, h, {{1.0}}, {{z}}, grid, &warn);
    double want = std::exp(-z) - std::exp(-2.0 * z); // int_0^z e^{-2(z-u)} e^{-u} du
    CHECK(got == doctest::Approx(want).epsilon(1e-3));
    CHECK_FALSE(warn);
}

TEST_CASE("convolution warns when the grid window truncates mass") {
    Kernel g(SupOuKernel{}, 1, MixingMeasure::dirac({1.0}));
    Kernel h(SupOuKernel{}, 1, MixingMeasure::dirac({1.0}));
    GridSpec flush = GridSpec::line(0.005, 0.01, 100); // stops at u = 1
    bool warn = false;
    convolve_k(g, h, {{1.0}}, {{1.5}}, flush, &warn);
    CHECK(warn);

    GridSpec plane({{0.0, 0.1, 4}, {0.0, 0.1, 4}});
    CHECK_THROWS_AS(convolve_k(g, h, {{1.0}}, {{1.0, 1.0}}, plane), std::invalid_argument);
}

TEST_CASE("squared mass quadrature integrates g~") {
    Kernel k(SupOuKernel{}, 1, MixingMeasure::dirac({1.0}));
    GridSpec grid = GridSpec::line(0.0005, 0.001, 20000);
    CHECK(l2_mass(k, grid) == doctest::Approx(0.5).epsilon(1e-6));
    GridSpec plane({{0.0, 0.1, 4}, {0.0, 0.1, 4}});
    CHECK_THROWS_AS(l2_mass(k, plane), std::invalid_argument);
}

TEST_CASE("kernel constructors reject bad parameters") {
    CHECK_THROWS_AS(Kernel(SupOuKernel{}, 1, MixingMeasure::dirac({-1.0})), std::invalid_argument);
    CHECK_THROWS_AS(Kernel(SupOuKernel{}, 2, MixingMeasure::dirac({1.0, 2.0, 3.0})),
                    std::invalid_argument);
    CHECK_THROWS_AS(Kernel(TrawlKernel{{{0.0, -1.0}}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(Kernel(TrawlKernel{{{0.0, 1.0}}}, 2), std::invalid_argument);
    CHECK_THROWS_AS(Kernel(ParabolicGreenKernel{2.0, 1.0, 1.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(Kernel(ParabolicGreenKernel{0.5, 1.0, 1.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(Kernel(EllipticGreenKernel{1.0, 0.5}, 2), std::invalid_argument);
    CHECK_THROWS_AS(Kernel(HyperbolicGreenKernel{0.0, 1.0, 1.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(Kernel(TabulatedKernel{GridSpec::line(0.0, 0.5, 5), {1.0, 2.0}}, 1),
                    std::invalid_argument);
}
