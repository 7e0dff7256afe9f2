#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "vmma/grid.hpp"
#include "vmma/rng.hpp"

namespace vmma {

/// Finite atomic probability measure over the kernel-parameter space: a
/// Dirac point, a discrete mixture, or quadrature nodes standing in for a
/// density. Weights are strictly positive and sum to 1 (within 1e-12).
class MixingMeasure {
  public:
    enum class Tag { dirac, discrete, quadrature };

    struct Atom {
        std::vector<double> point;
        double weight;
    };

    static MixingMeasure dirac(std::vector<double> point);
    static MixingMeasure discrete(std::vector<Atom> atoms);
    static MixingMeasure quadrature(std::vector<Atom> nodes);
    /// Degenerate measure over a zero-dimensional parameter space, for
    /// kernels that take no parameter.
    static MixingMeasure unit();

    Tag tag() const { return tag_; }
    std::size_t dimension() const { return dimension_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

  private:
    MixingMeasure(Tag tag, std::vector<Atom> atoms);

    Tag tag_;
    std::size_t dimension_ = 0;
    std::vector<Atom> atoms_;
};

// ---------------------------------------------------------------------------
// Seed families. The quadruplet is (a, b, nu, control); the control measure
// factorizes as mixing x Lebesgue and is carried by the call sites (cell
// masses), so the quadruplet itself only stores the seed law.

struct GaussianSeed {
    double variance; // b >= 0; no jump part
};

/// nu(dw) = shape * w^{-1} exp(-rate*w) dw on (0, inf).
struct GammaSeed {
    double shape, rate;
};

/// nu(dw) = delta/sqrt(2*pi) * w^{-3/2} exp(-gamma^2 w / 2) dw on (0, inf).
struct InverseGaussianSeed {
    double delta, gamma;
};

/// nu(dw) = intensity * dirac_{jump}(dw); jump > 0.
struct CompoundPoissonSeed {
    double intensity, jump;
};

/// Characteristic quadruplet of a homogeneous Lévy seed. Subordinator
/// families are constructed with the zero-drift convention
/// a = int_{|w|<=1} w nu(dw), so the compensated drift vanishes and the seed
/// is a nonnegative increasing basis; the Gaussian family has a = 0.
class CharQuadruplet {
  public:
    using Seed = std::variant<GaussianSeed, GammaSeed, InverseGaussianSeed, CompoundPoissonSeed>;

    static CharQuadruplet gaussian(double variance);
    static CharQuadruplet gamma_subordinator(double shape, double rate);
    static CharQuadruplet inverse_gaussian_subordinator(double delta, double gamma);
    static CharQuadruplet compound_poisson(double intensity, double jump);

    const Seed& seed() const { return seed_; }
    bool is_subordinator() const { return !std::holds_alternative<GaussianSeed>(seed_); }
    double gaussian_variance() const;
    /// Truncated-jump drift a = int_{|w|<=1} w nu(dw) (zero-drift convention).
    double drift() const;
    /// Largest theta (inclusive) for which seed_cumulant is finite;
    /// +infinity when unrestricted. The Gamma family's bound is exclusive.
    double cumulant_domain_max() const;
    bool cumulant_domain_open() const;

  private:
    explicit CharQuadruplet(Seed seed) : seed_(std::move(seed)) {}
    Seed seed_;
};

/// kappa(theta) = log E exp(theta * seed): int (e^{theta w} - 1) nu(dw) for
/// the jump families, theta^2 b / 2 for the Gaussian one.
double seed_cumulant(const CharQuadruplet& cq, double theta);

/// kappa'(theta); finite strictly inside the cumulant domain.
double seed_cumulant_derivative(const CharQuadruplet& cq, double theta);

struct SeedMoments {
    double mean;            // kappa'(0)
    double variance;        // kappa''(0)
    double fourth_cumulant; // kappa''''(0)
};
SeedMoments seed_moments(const CharQuadruplet& cq);

/// One independent increment of the basis over a cell of control mass
/// `cell_measure`. Cell draws from distinct substreams are independent;
/// identical (quadruplet, mass, stream) gives bit-identical values.
double sample_cell_increment(const CharQuadruplet& cq, double cell_measure, RngStream stream);

/// Numeric check of the Rajput-Rosinski integrability conditions for a
/// kernel tabulation f against the basis: drift/compensator, Gaussian and
/// truncated-second-moment integrals over the grid. Divergence is detected
/// by comparing the full-grid value against the half-radius subgrid (a
/// radius-doubling probe): a relative change above 10% marks the integral
/// as unstable. Never throws on numeric overflow; reports finite=false.
struct IntegrabilityReport {
    double drift_part = 0.0;    // int |U(f)| dz
    double gaussian_part = 0.0; // int f^2 b dz
    double jump_part = 0.0;     // int int min(1, (wf)^2) nu(dw) dz
    double subordinator_part = 0.0; // int int min(1, w|f|) nu(dw) dz (subordinator variant)
    double doubling_change = 0.0;   // max relative change, half-radius vs full grid
    bool finite = false;
};
IntegrabilityReport check_integrability(const std::vector<double>& kernel_values,
                                        const CharQuadruplet& cq, const GridSpec& grid,
                                        double cap = 1e8);

} // namespace vmma
