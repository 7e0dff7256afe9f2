#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vmma {

/// One axis of a uniform lattice: nodes origin, origin+step, ...,
/// origin+(count-1)*step. Nodes are cell centres; the cell length equals
/// the step.
struct GridAxis {
    double origin = 0.0;
    double step = 1.0;
    std::size_t count = 1;

    double node(std::size_t i) const { return origin + step * static_cast<double>(i); }
    double extent() const { return step * static_cast<double>(count); }
};

/// Uniform rectangular lattice in d dimensions (product of axes).
class GridSpec {
  public:
    GridSpec() = default;

    explicit GridSpec(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
        if (axes_.empty()) throw std::invalid_argument("GridSpec: needs at least one axis");
        for (const auto& ax : axes_) {
            if (!(ax.step > 0.0)) throw std::invalid_argument("GridSpec: step must be positive");
            if (ax.count == 0) throw std::invalid_argument("GridSpec: count must be positive");
        }
    }

    /// Convenience: 1-D grid.
    static GridSpec line(double origin, double step, std::size_t count) {
        return GridSpec({GridAxis{origin, step, count}});
    }

    std::size_t dim() const { return axes_.size(); }
    const GridAxis& axis(std::size_t a) const { return axes_.at(a); }
    const std::vector<GridAxis>& axes() const { return axes_; }

    /// Total number of lattice nodes.
    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& ax : axes_) n *= ax.count;
        return n;
    }

    /// Volume of one cell (product of steps).
    double cell_volume() const {
        double v = 1.0;
        for (const auto& ax : axes_) v *= ax.step;
        return v;
    }

    /// Coordinates of the node with flat index `i` (row-major, last axis fastest).
    std::vector<double> node(std::size_t i) const {
        std::vector<double> x(dim());
        for (std::size_t a = dim(); a-- > 0;) {
            const auto& ax = axes_[a];
            x[a] = ax.node(i % ax.count);
            i /= ax.count;
        }
        return x;
    }

    /// Multi-index of the node with flat index `i`.
    std::vector<std::size_t> unravel(std::size_t i) const {
        std::vector<std::size_t> idx(dim());
        for (std::size_t a = dim(); a-- > 0;) {
            idx[a] = i % axes_[a].count;
            i /= axes_[a].count;
        }
        return idx;
    }

    std::size_t ravel(const std::vector<std::size_t>& idx) const {
        std::size_t i = 0;
        for (std::size_t a = 0; a < dim(); ++a) i = i * axes_[a].count + idx[a];
        return i;
    }

    /// Flat index of the node nearest to `x`, or npos when `x` falls outside
    /// the lattice by more than half a step on some axis.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t locate(const std::vector<double>& x, double tol = 1e-9) const {
        if (x.size() != dim()) throw std::invalid_argument("GridSpec::locate: dimension mismatch");
        std::size_t i = 0;
        for (std::size_t a = 0; a < dim(); ++a) {
            const auto& ax = axes_[a];
            double pos = (x[a] - ax.origin) / ax.step;
            double rounded = static_cast<double>(static_cast<long long>(pos + (pos >= 0 ? 0.5 : -0.5)));
            if (std::abs(pos - rounded) > tol || rounded < -0.5 ||
                rounded > static_cast<double>(ax.count - 1) + 0.5)
                return npos;
            long long k = static_cast<long long>(rounded);
            if (k < 0 || k >= static_cast<long long>(ax.count)) return npos;
            i = i * ax.count + static_cast<std::size_t>(k);
        }
        return i;
    }

    bool operator==(const GridSpec& other) const {
        if (dim() != other.dim()) return false;
        for (std::size_t a = 0; a < dim(); ++a) {
            const auto &x = axes_[a], &y = other.axes_[a];
            if (x.origin != y.origin || x.step != y.step || x.count != y.count) return false;
        }
        return true;
    }

  private:
    std::vector<GridAxis> axes_;
};

/// Inclusive index window of axis nodes falling inside [lo, hi] (with a tiny
/// slack so interval ends landing on nodes are kept).
struct IndexRange {
    std::size_t first = 0, last = 0;
    bool empty = true;
};

inline IndexRange axis_range(const GridAxis& ax, double lo, double hi) {
    double slack = 1e-9 * ax.step;
    double a = std::ceil((lo - ax.origin - slack) / ax.step);
    double b = std::floor((hi - ax.origin + slack) / ax.step);
    a = std::max(a, 0.0);
    b = std::min(b, static_cast<double>(ax.count - 1));
    if (a > b) return {};
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b), false};
}

/// How lattice coordinates map to physical coordinates. `exponential` marks
/// fields sampled on the exponential image of a uniform log-lattice (the
/// natural sampling set for multi-self-similar fields); the stored grid is
/// the log-lattice and physical coordinates are exp(node).
enum class CoordinateScale { linear, exponential };

/// What a field's values represent. Volatility fields are squared volatility
/// and must be nonnegative.
enum class FieldKind { field, volatility };

/// Sampled scalar field on a lattice: values in row-major node order.
struct FieldSample {
    GridSpec grid;
    std::vector<double> values;
    FieldKind kind = FieldKind::field;
    CoordinateScale scale = CoordinateScale::linear;

    FieldSample() = default;
    FieldSample(GridSpec g, std::vector<double> v, FieldKind k = FieldKind::field,
                CoordinateScale s = CoordinateScale::linear)
        : grid(std::move(g)), values(std::move(v)), kind(k), scale(s) {
        if (values.size() != grid.size())
            throw std::invalid_argument("FieldSample: value count does not match grid");
        if (kind == FieldKind::volatility)
            for (double x : values)
                if (!(x >= 0.0)) throw std::invalid_argument("FieldSample: volatility must be nonnegative");
    }

    static FieldSample constant(GridSpec g, double value, FieldKind k = FieldKind::field) {
        std::size_t n = g.size();
        return FieldSample(std::move(g), std::vector<double>(n, value), k);
    }

    /// Physical coordinates of node `i` (applies the exponential map if set).
    std::vector<double> coordinates(std::size_t i) const {
        std::vector<double> x = grid.node(i);
        if (scale == CoordinateScale::exponential)
            for (double& c : x) c = std::exp(c);
        return x;
    }
};

} // namespace vmma
