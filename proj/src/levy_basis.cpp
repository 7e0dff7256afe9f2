#include "vmma/levy_basis.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace vmma {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846); }

// E1(x) = int_x^inf e^-t / t dt for x > 0.
double exp_int_e1(double x) { return -std::expint(-x); }

} // namespace

// --- MixingMeasure -----------------------------------------------------------

MixingMeasure::MixingMeasure(Tag tag, std::vector<Atom> atoms) : tag_(tag), atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("MixingMeasure: needs at least one atom");
    dimension_ = atoms_.front().point.size();
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (a.point.size() != dimension_)
            throw std::invalid_argument("MixingMeasure: inconsistent atom dimensions");
        if (!(a.weight > 0.0)) throw std::invalid_argument("MixingMeasure: weights must be positive");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("MixingMeasure: weights must sum to 1");
}

MixingMeasure MixingMeasure::dirac(std::vector<double> point) {
    return MixingMeasure(Tag::dirac, {Atom{std::move(point), 1.0}});
}

MixingMeasure MixingMeasure::discrete(std::vector<Atom> atoms) {
    if (atoms.size() < 1) throw std::invalid_argument("MixingMeasure: empty atom list");
    return MixingMeasure(Tag::discrete, std::move(atoms));
}

MixingMeasure MixingMeasure::quadrature(std::vector<Atom> nodes) {
    return MixingMeasure(Tag::quadrature, std::move(nodes));
}

MixingMeasure MixingMeasure::unit() { return MixingMeasure(Tag::dirac, {Atom{{}, 1.0}}); }

// --- CharQuadruplet ----------------------------------------------------------

CharQuadruplet CharQuadruplet::gaussian(double variance) {
    if (!(variance >= 0.0)) throw std::invalid_argument("CharQuadruplet: variance must be >= 0");
    return CharQuadruplet(GaussianSeed{variance});
}

CharQuadruplet CharQuadruplet::gamma_subordinator(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("CharQuadruplet: Gamma parameters must be positive");
    return CharQuadruplet(GammaSeed{shape, rate});
}

CharQuadruplet CharQuadruplet::inverse_gaussian_subordinator(double delta, double gamma) {
    if (!(delta > 0.0) || !(gamma > 0.0))
        throw std::invalid_argument("CharQuadruplet: IG parameters must be positive");
    return CharQuadruplet(InverseGaussianSeed{delta, gamma});
}

CharQuadruplet CharQuadruplet::compound_poisson(double intensity, double jump) {
    if (!(intensity > 0.0) || !(jump > 0.0))
        throw std::invalid_argument("CharQuadruplet: compound-Poisson parameters must be positive");
    return CharQuadruplet(CompoundPoissonSeed{intensity, jump});
}

double CharQuadruplet::gaussian_variance() const {
    if (auto* g = std::get_if<GaussianSeed>(&seed_)) return g->variance;
    return 0.0;
}

namespace {

// Truncated first moment M(T) = int_0^T w nu(dw) of the jump measure.
double truncated_mean(const CharQuadruplet::Seed& seed, double T) {
    struct V {
        double T;
        double operator()(const GaussianSeed&) const { return 0.0; }
        double operator()(const GammaSeed& s) const {
            return s.shape / s.rate * (1.0 - std::exp(-s.rate * T));
        }
        double operator()(const InverseGaussianSeed& s) const {
            return 2.0 * s.delta / s.gamma * (normal_cdf(s.gamma * std::sqrt(T)) - 0.5);
        }
        double operator()(const CompoundPoissonSeed& s) const {
            return (s.jump <= T) ? s.intensity * s.jump : 0.0;
        }
    };
    return std::visit(V{T}, seed);
}

// Truncated second moment M2(T) = int_0^T w^2 nu(dw).
double truncated_second(const CharQuadruplet::Seed& seed, double T) {
    struct V {
        double T;
        double operator()(const GaussianSeed&) const { return 0.0; }
        double operator()(const GammaSeed& s) const {
            double lt = s.rate * T;
            return s.shape / (s.rate * s.rate) * (1.0 - std::exp(-lt) * (1.0 + lt));
        }
        double operator()(const InverseGaussianSeed& s) const {
            double b = s.gamma * std::sqrt(T);
            return 2.0 * s.delta / (s.gamma * s.gamma * s.gamma) *
                   (normal_cdf(b) - 0.5 - b * normal_pdf(b));
        }
        double operator()(const CompoundPoissonSeed& s) const {
            return (s.jump <= T) ? s.intensity * s.jump * s.jump : 0.0;
        }
    };
    return std::visit(V{T}, seed);
}

// Tail mass nu((T, inf)).
double jump_tail(const CharQuadruplet::Seed& seed, double T) {
    struct V {
        double T;
        double operator()(const GaussianSeed&) const { return 0.0; }
        double operator()(const GammaSeed& s) const { return s.shape * exp_int_e1(s.rate * T); }
        double operator()(const InverseGaussianSeed& s) const {
            double b = s.gamma * std::sqrt(T);
            return 2.0 * s.delta * (normal_pdf(b) / std::sqrt(T) - s.gamma * (1.0 - normal_cdf(b)));
        }
        double operator()(const CompoundPoissonSeed& s) const {
            return (s.jump > T) ? s.intensity : 0.0;
        }
    };
    return std::visit(V{T}, seed);
}

} // namespace

double CharQuadruplet::drift() const { return truncated_mean(seed_, 1.0); }

double CharQuadruplet::cumulant_domain_max() const {
    if (auto* g = std::get_if<GammaSeed>(&seed_)) return g->rate;
    if (auto* ig = std::get_if<InverseGaussianSeed>(&seed_)) return 0.5 * ig->gamma * ig->gamma;
    return inf;
}

bool CharQuadruplet::cumulant_domain_open() const {
    return std::holds_alternative<GammaSeed>(seed_);
}

double seed_cumulant(const CharQuadruplet& cq, double theta) {
    double bound = cq.cumulant_domain_max();
    if (theta > bound || (cq.cumulant_domain_open() && theta >= bound))
        throw std::domain_error("seed_cumulant: theta outside the domain of finiteness");
    struct V {
        double theta;
        double operator()(const GaussianSeed& s) const { return 0.5 * theta * theta * s.variance; }
        double operator()(const GammaSeed& s) const {
            return -s.shape * std::log1p(-theta / s.rate);
        }
        double operator()(const InverseGaussianSeed& s) const {
            return s.delta * (s.gamma - std::sqrt(s.gamma * s.gamma - 2.0 * theta));
        }
        double operator()(const CompoundPoissonSeed& s) const {
            return s.intensity * std::expm1(theta * s.jump);
        }
    };
    return std::visit(V{theta}, cq.seed());
}

double seed_cumulant_derivative(const CharQuadruplet& cq, double theta) {
    if (theta >= cq.cumulant_domain_max() && !std::holds_alternative<GaussianSeed>(cq.seed()) &&
        !std::holds_alternative<CompoundPoissonSeed>(cq.seed()))
        throw std::domain_error("seed_cumulant_derivative: theta outside the open domain");
    struct V {
        double theta;
        double operator()(const GaussianSeed& s) const { return theta * s.variance; }
        double operator()(const GammaSeed& s) const { return s.shape / (s.rate - theta); }
        double operator()(const InverseGaussianSeed& s) const {
            return s.delta / std::sqrt(s.gamma * s.gamma - 2.0 * theta);
        }
        double operator()(const CompoundPoissonSeed& s) const {
            return s.intensity * s.jump * std::exp(theta * s.jump);
        }
    };
    return std::visit(V{theta}, cq.seed());
}

SeedMoments seed_moments(const CharQuadruplet& cq) {
    struct V {
        SeedMoments operator()(const GaussianSeed& s) const { return {0.0, s.variance, 0.0}; }
        SeedMoments operator()(const GammaSeed& s) const {
            double r2 = s.rate * s.rate;
            return {s.shape / s.rate, s.shape / r2, 6.0 * s.shape / (r2 * r2)};
        }
        SeedMoments operator()(const InverseGaussianSeed& s) const {
            double g3 = s.gamma * s.gamma * s.gamma;
            return {s.delta / s.gamma, s.delta / g3, 15.0 * s.delta / (g3 * g3 * s.gamma)};
        }
        SeedMoments operator()(const CompoundPoissonSeed& s) const {
            double c2 = s.jump * s.jump;
            return {s.intensity * s.jump, s.intensity * c2, s.intensity * c2 * c2};
        }
    };
    return std::visit(V{}, cq.seed());
}

double sample_cell_increment(const CharQuadruplet& cq, double cell_measure, RngStream stream) {
    if (!(cell_measure >= 0.0))
        throw std::invalid_argument("sample_cell_increment: cell_measure must be >= 0");
    if (cell_measure == 0.0) return 0.0;
    auto engine = stream.engine();
    struct V {
        double m;
        std::mt19937_64& eng;
        double operator()(const GaussianSeed& s) const {
            if (s.variance == 0.0) return 0.0;
            std::normal_distribution<double> d(0.0, std::sqrt(s.variance * m));
            return d(eng);
        }
        double operator()(const GammaSeed& s) const {
            std::gamma_distribution<double> d(s.shape * m, 1.0 / s.rate);
            return d(eng);
        }
        double operator()(const InverseGaussianSeed& s) const {
            // Michael-Schucany-Haas: IG with mean mu = delta*m/gamma, shape (delta*m)^2
            double mu = s.delta * m / s.gamma;
            double lam = s.delta * m * s.delta * m;
            std::normal_distribution<double> norm(0.0, 1.0);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            double n = norm(eng);
            double v = n * n;
            double w = mu + 0.5 * mu * mu * v / lam -
                       0.5 * mu / lam * std::sqrt(4.0 * mu * lam * v + mu * mu * v * v);
            return (unif(eng) <= mu / (mu + w)) ? w : mu * mu / w;
        }
        double operator()(const CompoundPoissonSeed& s) const {
            std::poisson_distribution<long long> d(s.intensity * m);
            return s.jump * static_cast<double>(d(eng));
        }
    };
    return std::visit(V{cell_measure, engine}, cq.seed());
}

// --- Integrability -----------------------------------------------------------

namespace {

struct IntegralParts {
    double drift = 0.0, gaussian = 0.0, jump = 0.0, subordinator = 0.0;
};

// Closed-form inner integrals of the Rajput-Rosinski conditions for one cell
// value f (the compensator integrand carries w factors inside both
// indicators; with the zero-drift convention it collapses to f*M(1/|f|)).
IntegralParts accumulate(const CharQuadruplet& cq, const std::vector<double>& values,
                         const GridSpec& grid, const std::vector<bool>& mask) {
    IntegralParts parts;
    double dv = grid.cell_volume();
    double b = cq.gaussian_variance();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!mask.empty() && !mask[i]) continue;
        double f = std::abs(values[i]);
        if (f == 0.0) continue;
        double inv = 1.0 / f;
        parts.drift += f * truncated_mean(cq.seed(), inv) * dv;
        parts.gaussian += f * f * b * dv;
        parts.jump += (f * f * truncated_second(cq.seed(), inv) + jump_tail(cq.seed(), inv)) * dv;
        parts.subordinator += (f * truncated_mean(cq.seed(), inv) + jump_tail(cq.seed(), inv)) * dv;
    }
    return parts;
}

} // namespace

IntegrabilityReport check_integrability(const std::vector<double>& kernel_values,
                                        const CharQuadruplet& cq, const GridSpec& grid,
                                        double cap) {
    if (kernel_values.size() != grid.size())
        throw std::invalid_argument("check_integrability: value count does not match grid");

    IntegralParts full = accumulate(cq, kernel_values, grid, {});

    // Half-radius probe, anchored at the lag origin: restrict to cells within
    // half of the grid's reach from 0 on every axis. A large value change
    // between the two means the integral is still growing with the radius.
    std::vector<double> reach(grid.dim());
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        const auto& ax = grid.axis(a);
        reach[a] = std::max(std::abs(ax.node(0)), std::abs(ax.node(ax.count - 1)));
    }
    std::vector<bool> mask(grid.size(), true);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto x = grid.node(i);
        for (std::size_t a = 0; a < grid.dim(); ++a)
            if (std::abs(x[a]) > 0.5 * reach[a] + 1e-12 * reach[a]) {
                mask[i] = false;
                break;
            }
    }
    IntegralParts half = accumulate(cq, kernel_values, grid, mask);

    auto rel_change = [](double h, double f) {
        double scale = std::max(std::abs(f), 1e-300);
        return std::abs(f - h) / scale;
    };
    IntegrabilityReport report;
    report.drift_part = full.drift;
    report.gaussian_part = full.gaussian;
    report.jump_part = full.jump;
    report.subordinator_part = full.subordinator;
    report.doubling_change =
        std::max(std::max(rel_change(half.drift, full.drift), rel_change(half.gaussian, full.gaussian)),
                 std::max(rel_change(half.jump, full.jump), rel_change(half.subordinator, full.subordinator)));
    bool all_zero = full.drift == 0.0 && full.gaussian == 0.0 && full.jump == 0.0 && full.subordinator == 0.0;
    bool bounded = std::isfinite(full.drift) && std::isfinite(full.gaussian) &&
                   std::isfinite(full.jump) && std::isfinite(full.subordinator) &&
                   full.drift <= cap && full.gaussian <= cap && full.jump <= cap &&
                   full.subordinator <= cap;
    report.finite = bounded && (all_zero || report.doubling_change <= 0.10);
    return report;
}

} // namespace vmma
