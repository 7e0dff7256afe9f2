#include "vmma/lamperti.hpp"

#include <cmath>
#include <stdexcept>

namespace vmma {

MssIndex::MssIndex(std::vector<double> exponents) : h_(std::move(exponents)) {
    if (h_.empty()) throw std::invalid_argument("MssIndex: needs at least one exponent");
    for (double h : h_)
        if (!(h > 0.0) || !std::isfinite(h))
            throw std::invalid_argument("MssIndex: exponents must be strictly positive");
}

double MssIndex::weight(std::span<const double> t) const {
    if (t.size() != h_.size()) throw std::invalid_argument("MssIndex: dimension mismatch");
    double w = 1.0;
    for (std::size_t j = 0; j < h_.size(); ++j) {
        if (!(t[j] > 0.0))
            throw std::domain_error("MssIndex: coordinates must be strictly positive");
        w *= std::pow(t[j], h_[j]);
    }
    return w;
}

double MssIndex::squared_weight(std::span<const double> t) const {
    double w = weight(t);
    return w * w;
}

FieldSample to_mss(const FieldSample& x, const MssIndex& index) {
    if (x.scale != CoordinateScale::linear)
        throw std::invalid_argument("to_mss: field is already on an exponential lattice");
    if (x.kind != FieldKind::field)
        throw std::invalid_argument("to_mss: expected a plain field sample");
    if (index.dim() != x.grid.dim()) throw std::invalid_argument("to_mss: dimension mismatch");

    FieldSample y = x;
    y.scale = CoordinateScale::exponential;
    for (std::size_t i = 0; i < y.values.size(); ++i) {
        std::vector<double> log_t = x.grid.node(i);
        std::vector<double> t(log_t.size());
        for (std::size_t a = 0; a < t.size(); ++a) t[a] = std::exp(log_t[a]);
        y.values[i] = index.weight(t) * x.values[i];
    }
    return y;
}

FieldSample from_mss(const FieldSample& y, const MssIndex& index) {
    if (y.scale != CoordinateScale::exponential)
        throw std::invalid_argument("from_mss: field is not on an exponential lattice");
    if (index.dim() != y.grid.dim()) throw std::invalid_argument("from_mss: dimension mismatch");

    FieldSample x = y;
    x.scale = CoordinateScale::linear;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        std::vector<double> log_t = y.grid.node(i);
        std::vector<double> t(log_t.size());
        for (std::size_t a = 0; a < t.size(); ++a) t[a] = std::exp(log_t[a]);
        x.values[i] = y.values[i] / index.weight(t);
    }
    return x;
}

double mss_covariance(const std::function<double(std::span<const double>)>& r_x,
                      const MssIndex& index, std::span<const double> t,
                      std::span<const double> t_star) {
    const std::size_t d = index.dim();
    if (t.size() != d || t_star.size() != d)
        throw std::invalid_argument("mss_covariance: dimension mismatch");
    std::vector<double> log_lag(d);
    double w = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        if (!(t[j] > 0.0) || !(t_star[j] > 0.0))
            throw std::domain_error("mss_covariance: coordinates must be strictly positive");
        log_lag[j] = std::log(t[j]) - std::log(t_star[j]);
        w *= std::pow(t[j] * t_star[j], index.exponents()[j]);
    }
    return w * r_x(log_lag);
}

double mss_cf(const TypeGLaw& model, const MssIndex& index, std::span<const double> t,
              double theta) {
    return model.char_X(theta * index.weight(t));
}

double stat_incr_covariance(const MssIndex& index, double var_x0, std::span<const double> t,
                            std::span<const double> s) {
    const std::size_t d = index.dim();
    if (t.size() != d || s.size() != d)
        throw std::invalid_argument("stat_incr_covariance: dimension mismatch");
    double pt = 1.0, ps = 1.0, pd = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        if (!(t[j] > 0.0) || !(s[j] > 0.0))
            throw std::domain_error("stat_incr_covariance: coordinates must be strictly positive");
        double e = 2.0 * index.exponents()[j];
        pt *= std::pow(t[j], e);
        ps *= std::pow(s[j], e);
        pd *= std::pow(std::abs(t[j] - s[j]), e);
    }
    return 0.5 * (pt + ps - pd) * var_x0;
}

double rho_translation_invariant(const MssIndex& index, std::span<const double> lag) {
    const std::size_t d = index.dim();
    if (lag.size() != d)
        throw std::invalid_argument("rho_translation_invariant: dimension mismatch");
    // cosh(sum a_j H_j) - 2^(2 sum H - 1) prod sinh^{2H_j}(a_j / 2) evaluated
    // as (e^{-S} + e^{S} u) / 2 with u = 1 - prod (1 - e^{-a_j})^{2H_j}; the
    // direct form cancels catastrophically once the lags exceed ~30.
    double dot = 0.0, log_prod = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double hj = index.exponents()[j];
        double a = std::abs(lag[j]);
        dot += a * hj;
        log_prod += 2.0 * hj * std::log1p(-std::exp(-a)); // -inf when a == 0
    }
    double u = -std::expm1(log_prod);
    double rho = 0.5 * std::exp(-dot);
    // exp(dot) can overflow while u underflows to 0; combine in log space.
    if (u > 0.0) rho += 0.5 * std::exp(dot + std::log(u));
    return rho;
}

} // namespace vmma
