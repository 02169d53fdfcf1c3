#ifndef FUNREG_BASIS_HPP
#define FUNREG_BASIS_HPP

#include <span>
#include <string>
#include <vector>

#include "funreg/grid.hpp"

namespace funreg {

enum class BasisKind { fourier, fpca, custom };

const char* basis_kind_name(BasisKind kind) noexcept;

/// J functions on a shared grid, orthonormal under the quadrature inner
/// product (Gram defect below 1e-8 entrywise; enforced at construction by
/// modified Gram-Schmidt when the raw defect exceeds 1e-10).
class BasisSet {
public:
    BasisSet(GridPtr grid, std::vector<double> functions, std::size_t count, BasisKind kind);

    std::size_t size() const noexcept { return j_; }
    const GridPtr& grid() const noexcept { return grid_; }
    BasisKind kind() const noexcept { return kind_; }
    std::span<const double> function(std::size_t j) const {
        return {functions_.data() + j * grid_->size(), grid_->size()};
    }

    Curve curve(std::size_t j) const;

    /// Largest |<phi_j, phi_k> - delta_jk| over all pairs.
    double gram_defect() const;

    /// First J functions as a new basis (prefix of this one).
    BasisSet truncated(std::size_t count) const;

private:
    GridPtr grid_;
    std::vector<double> functions_;
    std::size_t j_;
    BasisKind kind_;
};

/// First J elements of the Fourier system on [0,1]:
/// phi_1 = 1, phi_{2j} = sqrt2 sin(2 pi j t), phi_{2j+1} = sqrt2 cos(2 pi j t).
BasisSet fourier_basis(std::size_t count, const GridPtr& grid);

/// Coefficients <x, phi_j> for j = 1..J.
std::vector<double> project_coeffs(const Curve& x, const BasisSet& basis);

/// Pointwise sum_j c_j phi_j.
Curve reconstruct(std::span<const double> coeffs, const BasisSet& basis);

/// In-place modified Gram-Schmidt under the quadrature inner product.
/// Rows of `functions` are the basis functions. Throws degenerate_sample if a
/// row becomes numerically null.
void gram_schmidt(std::span<const double> weights, std::vector<double>& functions,
                  std::size_t count, std::size_t grid_size);

} // namespace funreg

#endif
