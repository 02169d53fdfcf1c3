#ifndef FUNREG_GRID_HPP
#define FUNREG_GRID_HPP

#include <memory>
#include <span>
#include <vector>

#include "funreg/errors.hpp"

namespace funreg {

/// Shared discretization of [0, 1]: strictly increasing abscissae plus
/// composite-trapezoid quadrature weights. Immutable after construction and
/// shared between curves via shared_ptr, so grid compatibility is usually a
/// pointer comparison.
class Grid {
public:
    Grid(std::vector<double> points, std::vector<double> weights);

    std::size_t size() const noexcept { return points_.size(); }
    std::span<const double> points() const noexcept { return points_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double point(std::size_t m) const { return points_[m]; }
    double weight(std::size_t m) const { return weights_[m]; }

    bool same_as(const Grid& other) const;

private:
    std::vector<double> points_;
    std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// M equispaced points spanning [0, 1] with trapezoid weights
/// (h/2 at the ends, h inside, h = 1/(M-1)).
GridPtr make_uniform_grid(std::size_t point_count);

/// Grid over an arbitrary strictly increasing point set; weights are the
/// composite trapezoid rule on those points.
GridPtr make_grid(std::vector<double> points);

/// One function discretized on a grid.
struct Curve {
    GridPtr grid;
    std::vector<double> values;

    Curve() = default;
    Curve(GridPtr g, std::vector<double> v);

    std::size_t size() const noexcept { return values.size(); }
};

/// n curves on one shared grid, stored row-major.
class FunctionalSample {
public:
    FunctionalSample(GridPtr grid, std::vector<double> data, std::size_t curve_count);

    std::size_t size() const noexcept { return n_; }
    std::size_t grid_size() const noexcept { return grid_->size(); }
    const GridPtr& grid() const noexcept { return grid_; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * grid_->size(), grid_->size()};
    }
    std::span<const double> data() const noexcept { return data_; }

    Curve curve(std::size_t i) const;

    /// Pointwise mean curve.
    Curve mean_curve() const;

    /// Rows [begin, end) as a new sample on the same grid.
    FunctionalSample slice(std::size_t begin, std::size_t end) const;

private:
    GridPtr grid_;
    std::vector<double> data_;
    std::size_t n_;
};

void check_same_grid(const Grid& a, const Grid& b);

/// Quadrature inner product sum_m w_m f(t_m) g(t_m) of two same-grid vectors.
double inner_product_raw(std::span<const double> weights, std::span<const double> f,
                         std::span<const double> g) noexcept;

double inner_product(const Curve& f, const Curve& g);
double norm(const Curve& f);

/// ||f - g|| under the quadrature metric; f and g must share the weights' grid.
double distance_raw(std::span<const double> weights, std::span<const double> f,
                    std::span<const double> g) noexcept;

} // namespace funreg

#endif
