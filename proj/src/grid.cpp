#include "funreg/grid.hpp"

#include <cmath>

namespace funreg {

namespace {

void validate_grid(const std::vector<double>& points, const std::vector<double>& weights) {
    if (points.size() < 2) raise(errc::invalid_argument, "grid needs at least 2 points");
    if (weights.size() != points.size())
        raise(errc::invalid_argument, "grid weights/points length mismatch");
    if (points.front() < 0.0 || points.back() > 1.0)
        raise(errc::invalid_argument, "grid points must lie in [0,1]");
    double wsum = 0.0;
    for (std::size_t m = 0; m < points.size(); ++m) {
        if (m > 0 && !(points[m] > points[m - 1]))
            raise(errc::invalid_argument, "grid points must be strictly increasing");
        if (weights[m] < 0.0) raise(errc::invalid_argument, "grid weights must be nonnegative");
        wsum += weights[m];
    }
    const double span = points.back() - points.front();
    if (std::fabs(wsum - span) > 1e-12)
        raise(errc::invalid_argument, "grid weights must sum to the covered span");
}

std::vector<double> trapezoid_weights(const std::vector<double>& points) {
    const std::size_t m = points.size();
    std::vector<double> w(m, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double h = points[i + 1] - points[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

} // namespace

Grid::Grid(std::vector<double> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    validate_grid(points_, weights_);
}

bool Grid::same_as(const Grid& other) const {
    if (this == &other) return true;
    return points_ == other.points_ && weights_ == other.weights_;
}

GridPtr make_uniform_grid(std::size_t point_count) {
    if (point_count < 2) raise(errc::invalid_argument, "uniform grid needs at least 2 points");
    std::vector<double> pts(point_count);
    const double h = 1.0 / static_cast<double>(point_count - 1);
    for (std::size_t m = 0; m < point_count; ++m) pts[m] = static_cast<double>(m) * h;
    pts.back() = 1.0;
    auto weights = trapezoid_weights(pts);
    return std::make_shared<const Grid>(std::move(pts), std::move(weights));
}

GridPtr make_grid(std::vector<double> points) {
    auto weights = trapezoid_weights(points);
    return std::make_shared<const Grid>(std::move(points), std::move(weights));
}

Curve::Curve(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) raise(errc::invalid_argument, "curve needs a grid");
    if (values.size() != grid->size())
        raise(errc::invalid_argument, "curve length does not match its grid");
    for (double x : values)
        if (!std::isfinite(x)) raise(errc::invalid_argument, "curve values must be finite");
}

FunctionalSample::FunctionalSample(GridPtr grid, std::vector<double> data, std::size_t curve_count)
    : grid_(std::move(grid)), data_(std::move(data)), n_(curve_count) {
    if (!grid_) raise(errc::invalid_argument, "sample needs a grid");
    if (n_ < 1) raise(errc::invalid_argument, "sample needs at least one curve");
    if (data_.size() != n_ * grid_->size())
        raise(errc::invalid_argument, "sample data size does not match n x M");
    for (double x : data_)
        if (!std::isfinite(x)) raise(errc::invalid_argument, "sample values must be finite");
}

Curve FunctionalSample::curve(std::size_t i) const {
    auto r = row(i);
    return Curve(grid_, std::vector<double>(r.begin(), r.end()));
}

Curve FunctionalSample::mean_curve() const {
    const std::size_t m = grid_->size();
    std::vector<double> mean(m, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const double* r = data_.data() + i * m;
        for (std::size_t t = 0; t < m; ++t) mean[t] += r[t];
    }
    for (double& v : mean) v /= static_cast<double>(n_);
    return Curve(grid_, std::move(mean));
}

FunctionalSample FunctionalSample::slice(std::size_t begin, std::size_t end) const {
    if (begin >= end || end > n_) raise(errc::invalid_argument, "invalid sample slice");
    const std::size_t m = grid_->size();
    std::vector<double> part(data_.begin() + static_cast<std::ptrdiff_t>(begin * m),
                             data_.begin() + static_cast<std::ptrdiff_t>(end * m));
    return FunctionalSample(grid_, std::move(part), end - begin);
}

void check_same_grid(const Grid& a, const Grid& b) {
    if (!a.same_as(b)) raise(errc::incompatible_grids, "curves live on different grids");
}

double inner_product_raw(std::span<const double> weights, std::span<const double> f,
                         std::span<const double> g) noexcept {
    double acc = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) acc += weights[m] * f[m] * g[m];
    return acc;
}

double inner_product(const Curve& f, const Curve& g) {
    check_same_grid(*f.grid, *g.grid);
    return inner_product_raw(f.grid->weights(), f.values, g.values);
}

double norm(const Curve& f) {
    const double sq = inner_product_raw(f.grid->weights(), f.values, f.values);
    return sq > 0.0 ? std::sqrt(sq) : 0.0;
}

double distance_raw(std::span<const double> weights, std::span<const double> f,
                    std::span<const double> g) noexcept {
    double acc = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
        const double d = f[m] - g[m];
        acc += weights[m] * d * d;
    }
    return acc > 0.0 ? std::sqrt(acc) : 0.0;
}

const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::invalid_argument: return "INVALID_ARGUMENT";
        case errc::incompatible_grids: return "INCOMPATIBLE_GRIDS";
        case errc::insufficient_data: return "INSUFFICIENT_DATA";
        case errc::insufficient_local_data: return "INSUFFICIENT_LOCAL_DATA";
        case errc::singular_design: return "SINGULAR_DESIGN";
        case errc::degenerate_sample: return "DEGENERATE_SAMPLE";
        case errc::degenerate_truth: return "DEGENERATE_TRUTH";
        case errc::degenerate_direction: return "DEGENERATE_DIRECTION";
        case errc::degenerate_index: return "DEGENERATE_INDEX";
        case errc::no_admissible_model: return "NO_ADMISSIBLE_MODEL";
        case errc::id_join: return "ID_JOIN";
        case errc::parse_error: return "PARSE_ERROR";
        case errc::io_error: return "IO_ERROR";
    }
    return "UNKNOWN";
}

} // namespace funreg
