#include "funreg/basis.hpp"

#include <cmath>

namespace funreg {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kOrthTol = 1e-8;
constexpr double kReorthTrigger = 1e-10;
} // namespace

const char* basis_kind_name(BasisKind kind) noexcept {
    switch (kind) {
        case BasisKind::fourier: return "fourier";
        case BasisKind::fpca: return "fpca";
        case BasisKind::custom: return "custom";
    }
    return "custom";
}

BasisSet::BasisSet(GridPtr grid, std::vector<double> functions, std::size_t count, BasisKind kind)
    : grid_(std::move(grid)), functions_(std::move(functions)), j_(count), kind_(kind) {
    if (!grid_) raise(errc::invalid_argument, "basis needs a grid");
    if (j_ < 1) raise(errc::invalid_argument, "basis needs at least one function");
    if (functions_.size() != j_ * grid_->size())
        raise(errc::invalid_argument, "basis data size does not match J x M");
    if (gram_defect() > kReorthTrigger) {
        gram_schmidt(grid_->weights(), functions_, j_, grid_->size());
        if (gram_defect() > kOrthTol)
            raise(errc::degenerate_sample, "basis could not be orthonormalized");
    }
}

Curve BasisSet::curve(std::size_t j) const {
    auto f = function(j);
    return Curve(grid_, std::vector<double>(f.begin(), f.end()));
}

double BasisSet::gram_defect() const {
    const auto w = grid_->weights();
    double worst = 0.0;
    for (std::size_t j = 0; j < j_; ++j) {
        for (std::size_t k = j; k < j_; ++k) {
            const double g = inner_product_raw(w, function(j), function(k));
            const double target = (j == k) ? 1.0 : 0.0;
            worst = std::max(worst, std::fabs(g - target));
        }
    }
    return worst;
}

BasisSet BasisSet::truncated(std::size_t count) const {
    if (count < 1 || count > j_) raise(errc::invalid_argument, "invalid basis truncation");
    std::vector<double> part(functions_.begin(),
                             functions_.begin() + static_cast<std::ptrdiff_t>(count * grid_->size()));
    return BasisSet(grid_, std::move(part), count, kind_);
}

BasisSet fourier_basis(std::size_t count, const GridPtr& grid) {
    if (count < 1) raise(errc::invalid_argument, "fourier basis needs J >= 1");
    if (!grid) raise(errc::invalid_argument, "fourier basis needs a grid");
    const std::size_t m = grid->size();
    const double sqrt2 = std::sqrt(2.0);
    std::vector<double> funcs(count * m);
    for (std::size_t j = 0; j < count; ++j) {
        double* row = funcs.data() + j * m;
        for (std::size_t t = 0; t < m; ++t) {
            const double u = grid->point(t);
            if (j == 0) {
                row[t] = 1.0;
            } else if (j % 2 == 1) {
                const double freq = static_cast<double>((j + 1) / 2);
                row[t] = sqrt2 * std::sin(kTwoPi * freq * u);
            } else {
                const double freq = static_cast<double>(j / 2);
                row[t] = sqrt2 * std::cos(kTwoPi * freq * u);
            }
        }
    }
    return BasisSet(grid, std::move(funcs), count, BasisKind::fourier);
}

std::vector<double> project_coeffs(const Curve& x, const BasisSet& basis) {
    check_same_grid(*x.grid, *basis.grid());
    const auto w = basis.grid()->weights();
    std::vector<double> coeffs(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j)
        coeffs[j] = inner_product_raw(w, x.values, basis.function(j));
    return coeffs;
}

Curve reconstruct(std::span<const double> coeffs, const BasisSet& basis) {
    if (coeffs.size() != basis.size())
        raise(errc::invalid_argument, "coefficient count does not match basis size");
    const std::size_t m = basis.grid()->size();
    std::vector<double> values(m, 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const auto f = basis.function(j);
        const double c = coeffs[j];
        for (std::size_t t = 0; t < m; ++t) values[t] += c * f[t];
    }
    return Curve(basis.grid(), std::move(values));
}

void gram_schmidt(std::span<const double> weights, std::vector<double>& functions,
                  std::size_t count, std::size_t grid_size) {
    for (std::size_t j = 0; j < count; ++j) {
        double* fj = functions.data() + j * grid_size;
        std::span<double> rowj(fj, grid_size);
        // Two passes of projection removal for numerical safety.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                const double* fk = functions.data() + k * grid_size;
                const double proj = inner_product_raw(weights, rowj, {fk, grid_size});
                for (std::size_t t = 0; t < grid_size; ++t) fj[t] -= proj * fk[t];
            }
        }
        const double nrm = std::sqrt(inner_product_raw(weights, rowj, rowj));
        if (!(nrm > 1e-13))
            raise(errc::degenerate_sample, "basis function numerically null during orthonormalization");
        for (std::size_t t = 0; t < grid_size; ++t) fj[t] /= nrm;
    }
}

} // namespace funreg
