#include "vmma/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vmma/special.hpp"

namespace vmma {

namespace {

constexpr double pi = 3.14159265358979323846;

// Smallest R >= 0 with tail(R) <= target, for strictly decreasing tail.
double bisect_radius(double target, double hi, const auto& tail) {
    if (tail(0.0) <= target) return 0.0;
    double lo = 0.0;
    while (tail(hi) > target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) return hi; // pathological parameters; caller's tolerance absorbs it
    }
    for (int it = 0; it < 200 && hi - lo > 1e-9 * (1.0 + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (tail(mid) > target ? lo : hi) = mid;
    }
    return hi;
}

} // namespace

Kernel::Kernel(Family family, std::size_t dim, MixingMeasure mixing)
    : family_(std::move(family)), dim_(dim), mixing_(std::move(mixing)) {
    if (dim_ == 0) throw std::invalid_argument("Kernel: dimension must be positive");

    std::size_t want_param = 0;
    if (std::holds_alternative<SupOuKernel>(family_)) {
        want_param = mixing_.dimension(); // d or 1, checked below
        if (want_param != dim_ && want_param != 1)
            throw std::invalid_argument("Kernel: supOU mixing dimension must be 1 or d");
        for (const auto& atom : mixing_.atoms())
            for (double r : atom.point)
                if (!(r > 0.0)) throw std::invalid_argument("Kernel: supOU rates must be positive");
    } else if (auto* t = std::get_if<TrawlKernel>(&family_)) {
        if (t->region.size() != dim_)
            throw std::invalid_argument("Kernel: trawl region dimension mismatch");
        for (const auto& [lo, hi] : t->region)
            if (!(lo < hi)) throw std::invalid_argument("Kernel: trawl region must have lo < hi");
    } else if (auto* p = std::get_if<ParabolicGreenKernel>(&family_)) {
        if (dim_ != 2) throw std::invalid_argument("Kernel: parabolic Green kernel requires d=2");
        if (!(p->beta > 0.0) || p->alpha < 0.0)
            throw std::invalid_argument("Kernel: parabolic parameters out of range");
        if (p->gamma_from_mixing) {
            want_param = 1;
            if (mixing_.dimension() != 1)
                throw std::invalid_argument("Kernel: gamma randomization needs a 1-D mixing measure");
            for (const auto& atom : mixing_.atoms())
                if (!(p->alpha * p->alpha < p->beta * atom.point[0] * atom.point[0]))
                    throw std::invalid_argument("Kernel: parabolic constraint alpha^2 < beta gamma^2");
        } else {
            if (!(p->alpha * p->alpha < p->beta * p->gamma * p->gamma))
                throw std::invalid_argument("Kernel: parabolic constraint alpha^2 < beta gamma^2");
        }
    } else if (auto* e = std::get_if<EllipticGreenKernel>(&family_)) {
        if (dim_ != 2) throw std::invalid_argument("Kernel: elliptic Green kernel requires d=2");
        if (!(e->alpha >= 0.0) || !(e->alpha < e->gamma))
            throw std::invalid_argument("Kernel: elliptic constraint 0 <= alpha < gamma");
    } else if (auto* hk = std::get_if<HyperbolicGreenKernel>(&family_)) {
        if (dim_ != 2) throw std::invalid_argument("Kernel: hyperbolic Green kernel requires d=2");
        if (!(hk->alpha > 0.0) || !(hk->beta > 0.0) || hk->gamma < 0.0)
            throw std::invalid_argument("Kernel: hyperbolic parameters out of range");
    } else if (auto* tab = std::get_if<TabulatedKernel>(&family_)) {
        if (tab->grid.dim() != dim_)
            throw std::invalid_argument("Kernel: tabulation grid dimension mismatch");
        if (tab->values.size() != tab->grid.size())
            throw std::invalid_argument("Kernel: tabulation value count mismatch");
    }

    if (mixing_.dimension() != want_param)
        throw std::invalid_argument("Kernel: mixing dimension does not match the family's parameter");
}

SupportClass Kernel::support_class() const {
    struct V {
        SupportClass operator()(const SupOuKernel&) const { return SupportClass::orthant; }
        SupportClass operator()(const TrawlKernel&) const { return SupportClass::box; }
        SupportClass operator()(const ParabolicGreenKernel&) const { return SupportClass::half_plane; }
        SupportClass operator()(const EllipticGreenKernel&) const { return SupportClass::all_space; }
        SupportClass operator()(const HyperbolicGreenKernel&) const { return SupportClass::orthant; }
        SupportClass operator()(const TabulatedKernel&) const { return SupportClass::box; }
    };
    return std::visit(V{}, family_);
}

double Kernel::eval(std::span<const double> x, std::span<const double> z) const {
    if (z.size() != dim_) throw std::invalid_argument("Kernel::eval: lag dimension mismatch");
    if (x.size() != parameter_dim())
        throw std::invalid_argument("Kernel::eval: parameter dimension mismatch");

    if (std::holds_alternative<SupOuKernel>(family_)) {
        double s = 0.0;
        for (std::size_t a = 0; a < dim_; ++a) {
            if (z[a] < 0.0) return 0.0;
            s += (x.size() == 1 ? x[0] : x[a]) * z[a];
        }
        return std::exp(-s);
    }
    if (auto* t = std::get_if<TrawlKernel>(&family_)) {
        for (std::size_t a = 0; a < dim_; ++a)
            if (z[a] < t->region[a][0] || z[a] > t->region[a][1]) return 0.0;
        return 1.0;
    }
    if (auto* p = std::get_if<ParabolicGreenKernel>(&family_)) {
        double z1 = z[0], z2 = z[1];
        if (z2 <= 0.0) return 0.0;
        double gam = p->gamma_from_mixing ? x[0] : p->gamma;
        double expo = -p->alpha * z1 - p->beta * z2 - z1 * z1 * gam * gam / (4.0 * z2);
        return -std::exp(expo) / (2.0 * gam * std::sqrt(pi * z2));
    }
    if (auto* e = std::get_if<EllipticGreenKernel>(&family_)) {
        double r = std::hypot(z[0], z[1]);
        if (r == 0.0) return std::numeric_limits<double>::infinity();
        return std::exp(e->alpha * z[0]) / (2.0 * pi) * bessel_k0(e->gamma * r);
    }
    if (auto* hk = std::get_if<HyperbolicGreenKernel>(&family_)) {
        double z1 = z[0], z2 = z[1];
        if (z1 < 0.0 || z2 < 0.0) return 0.0;
        return std::exp(-hk->alpha * z1 - hk->beta * z2) *
               bessel_j0(2.0 * hk->gamma * std::sqrt(z1 * z2));
    }
    const auto& tab = std::get<TabulatedKernel>(family_);
    // multilinear interpolation inside the node hull, 0 outside
    std::vector<std::size_t> base(dim_);
    std::vector<double> frac(dim_);
    for (std::size_t a = 0; a < dim_; ++a) {
        const auto& ax = tab.grid.axis(a);
        double pos = (z[a] - ax.origin) / ax.step;
        if (pos < 0.0 || pos > static_cast<double>(ax.count - 1)) return 0.0;
        std::size_t i = std::min(static_cast<std::size_t>(pos), ax.count >= 2 ? ax.count - 2 : 0);
        base[a] = i;
        frac[a] = (ax.count >= 2) ? pos - static_cast<double>(i) : 0.0;
    }
    double value = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << dim_); ++corner) {
        double w = 1.0;
        std::vector<std::size_t> idx(dim_);
        for (std::size_t a = 0; a < dim_; ++a) {
            bool upper = (corner >> a) & 1;
            if (upper && tab.grid.axis(a).count < 2) {
                w = 0.0;
                break;
            }
            idx[a] = base[a] + (upper ? 1 : 0);
            w *= upper ? frac[a] : 1.0 - frac[a];
        }
        if (w != 0.0) value += w * tab.values[tab.grid.ravel(idx)];
    }
    return value;
}

double Kernel::eval(std::span<const double> z) const {
    if (mixing_.atoms().size() != 1)
        throw std::invalid_argument("Kernel::eval(z): mixing has more than one atom; pass x");
    return eval(mixing_.atoms().front().point, z);
}

double Kernel::g_tilde(std::span<const double> z) const {
    double s = 0.0;
    for (const auto& atom : mixing_.atoms()) {
        double g = eval(atom.point, z);
        s += atom.weight * g * g;
    }
    return s;
}

Box Kernel::lag_box(double tol) const {
    if (!(tol > 0.0) || tol >= 1.0) throw std::invalid_argument("Kernel::lag_box: tol in (0,1)");
    double log_tol = std::log(1.0 / tol);

    if (std::holds_alternative<SupOuKernel>(family_)) {
        // exact mixture tails per axis: int_{z_a > R} g~ = sum_i c_i exp(-2 x_ia R)
        Box box(dim_);
        for (std::size_t a = 0; a < dim_; ++a) {
            std::vector<double> coef, rate;
            double total = 0.0;
            for (const auto& atom : mixing_.atoms()) {
                double c = atom.weight;
                for (std::size_t b = 0; b < dim_; ++b)
                    c /= 2.0 * (atom.point.size() == 1 ? atom.point[0] : atom.point[b]);
                coef.push_back(c);
                rate.push_back(2.0 * (atom.point.size() == 1 ? atom.point[0] : atom.point[a]));
                total += c;
            }
            auto tail = [&](double R) {
                double s = 0.0;
                for (std::size_t i = 0; i < coef.size(); ++i) s += coef[i] * std::exp(-rate[i] * R);
                return s;
            };
            box[a] = {0.0, bisect_radius(tol * total, 1.0, tail)};
        }
        return box;
    }
    if (auto* t = std::get_if<TrawlKernel>(&family_)) return t->region;
    if (auto* p = std::get_if<ParabolicGreenKernel>(&family_)) {
        double gam_min = p->gamma;
        if (p->gamma_from_mixing) {
            gam_min = std::numeric_limits<double>::infinity();
            for (const auto& atom : mixing_.atoms()) gam_min = std::min(gam_min, atom.point[0]);
        }
        // z2-marginal of G^2 decays like z2^{-1/2} exp(-c z2), c = 2(beta - alpha^2/gamma^2)
        double c = 2.0 * (p->beta - p->alpha * p->alpha / (gam_min * gam_min));
        double r2 = (log_tol + 3.0) / c;
        for (int it = 0; it < 3; ++it) r2 = (log_tol + 3.0 + 0.5 * std::log(1.0 + r2)) / c;
        // z1: Gaussian of width sqrt(z2)/gamma centered at -2 alpha z2 / gamma^2
        double width = std::sqrt(2.0 * (log_tol + 3.0) * r2) / gam_min;
        double shift = 2.0 * p->alpha * r2 / (gam_min * gam_min);
        return {{-shift - width, width}, {0.0, r2}};
    }
    if (auto* e = std::get_if<EllipticGreenKernel>(&family_)) {
        double r = (log_tol + 5.0) / (2.0 * (e->gamma - e->alpha));
        return {{-r, r}, {-r, r}};
    }
    if (auto* hk = std::get_if<HyperbolicGreenKernel>(&family_)) {
        // |J0| <= 1, so the separable exponential bounds the tails
        return {{0.0, (log_tol + 3.0) / (2.0 * hk->alpha)}, {0.0, (log_tol + 3.0) / (2.0 * hk->beta)}};
    }
    const auto& tab = std::get<TabulatedKernel>(family_);
    Box box(dim_);
    for (std::size_t a = 0; a < dim_; ++a) {
        const auto& ax = tab.grid.axis(a);
        box[a] = {ax.node(0), ax.node(ax.count - 1)};
    }
    return box;
}

double convolve_k(const Kernel& kernel_g, const Kernel& kernel_h, std::span<const double> y,
                  std::span<const double> z, const GridSpec& grid, bool* boundary_warning) {
    if (kernel_g.dim() != kernel_h.dim() || grid.dim() != kernel_g.dim() || z.size() != grid.dim())
        throw std::invalid_argument("convolve_k: dimension mismatch");
    double dv = grid.cell_volume();
    double total = 0.0, boundary = 0.0;
    std::vector<double> diff(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto u = grid.node(i);
        double h = kernel_h.eval(y, u);
        if (h == 0.0) continue;
        for (std::size_t a = 0; a < grid.dim(); ++a) diff[a] = z[a] - u[a];
        double term = kernel_g.g_tilde(diff) * h * dv;
        total += term;
        auto idx = grid.unravel(i);
        for (std::size_t a = 0; a < grid.dim(); ++a)
            if (idx[a] == 0 || idx[a] + 1 == grid.axis(a).count) {
                boundary += std::abs(term);
                break;
            }
    }
    if (boundary_warning)
        *boundary_warning = std::abs(total) > 0.0 && boundary > 1e-6 * std::abs(total);
    return total;
}

double l2_mass(const Kernel& kernel, const GridSpec& grid) {
    if (grid.dim() != kernel.dim()) throw std::invalid_argument("l2_mass: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto z = grid.node(i);
        s += kernel.g_tilde(z);
    }
    return s * grid.cell_volume();
}

} // namespace vmma
