#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "vmma/analytics.hpp"
#include "vmma/grid.hpp"

namespace vmma {

/// Componentwise self-similarity exponents H = (H_1, ..., H_d), all > 0.
class MssIndex {
  public:
    explicit MssIndex(std::vector<double> exponents);

    std::size_t dim() const { return h_.size(); }
    const std::vector<double>& exponents() const { return h_; }

    /// prod_j t_j^{H_j}; requires t strictly positive componentwise.
    double weight(std::span<const double> t) const;
    /// prod_j t_j^{2 H_j}.
    double squared_weight(std::span<const double> t) const;

  private:
    std::vector<double> h_;
};

/// Y(t) = prod t_j^{H_j} * X(log t): maps a stationary field sampled on a
/// uniform log-lattice to the multi-self-similar field on the exponentiated
/// lattice. The returned sample keeps the log-lattice as its grid and marks
/// the coordinates as exponential, so the map is a lattice bijection.
FieldSample to_mss(const FieldSample& x, const MssIndex& index);

/// X(t) = exp(-t.H) Y(exp t): inverse of to_mss; roundtrips within 1e-12
/// relative (the weights cancel multiplicatively).
FieldSample from_mss(const FieldSample& y, const MssIndex& index);

/// Cov(Y(t), Y(t*)) = prod (t_j t*_j)^{H_j} * R_X(log t - log t*) for a
/// stationary covariance evaluator R_X over log-lags.
double mss_covariance(const std::function<double(std::span<const double>)>& r_x,
                      const MssIndex& index, std::span<const double> t,
                      std::span<const double> t_star);

/// E exp(i theta Y(t)) = char_X(theta * prod t_j^{H_j}): the type-G law of
/// Y(t), an algebraic identity at the evaluator level.
double mss_cf(const TypeGLaw& model, const MssIndex& index, std::span<const double> t,
              double theta);

/// Covariance under second-order translation-invariant increments:
/// 1/2 [prod t^2H + prod s^2H - prod |t_j - s_j|^2H] * Var X(0). At d=1,
/// H=1/2 this is min(t,s) * Var X(0).
double stat_incr_covariance(const MssIndex& index, double var_x0, std::span<const double> t,
                            std::span<const double> s);

/// Correlation of the stationary field underlying a translation-invariant-
/// increment Y: cosh(sum |h_k| H_k) - 2^(2 sum H - 1) prod sinh^{2H_k}(|h_k|/2).
/// Lags enter through |h_k| (the correlation is symmetric; fractional powers
/// of negative sinh values would be undefined).
double rho_translation_invariant(const MssIndex& index, std::span<const double> lag);

} // namespace vmma
