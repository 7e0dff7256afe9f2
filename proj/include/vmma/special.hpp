#pragma once

namespace vmma {

/// Bessel J0(x); defined for all real x (even function).
double bessel_j0(double x);

/// Modified Bessel K0(x) for x >= 0; K0(0) = +infinity.
double bessel_k0(double x);

/// Modified Bessel K1(x) for x >= 0; K1(0) = +infinity.
double bessel_k1(double x);

} // namespace vmma
