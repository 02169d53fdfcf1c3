#ifndef FUNREG_LOCAL_LINEAR_HPP
#define FUNREG_LOCAL_LINEAR_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "funreg/basis.hpp"
#include "funreg/grid.hpp"
#include "funreg/kernels.hpp"

namespace funreg {

/// Result of one functional local-linear solve at a point x: the regression
/// value a_hat, the coefficient vector b_hat of the derivative in the basis,
/// and the reconstructed derivative curve.
struct LocalFit {
    double a_hat = 0.0;
    std::vector<double> b_hat;
    Curve derivative;
    std::vector<double> effective_weights;
    /// Smoother-matrix diagonal entry when x is a sample point (self
    /// included in the fit); absent otherwise.
    std::optional<double> trace_contribution;
};

/// Minimizer of the kernel-weighted sum of squared errors over the local
/// affine model in the first J basis coefficients. Solved by a rank-revealing
/// orthogonal factorization of the sqrt-weighted design; throws
/// insufficient_local_data / singular_design per the contract.
LocalFit local_linear_fit(const FunctionalSample& sample, std::span<const double> y,
                          const Curve& x, const BasisSet& basis, std::size_t J, double h,
                          const KernelSpec& kernel);

/// Nadaraya-Watson value sum y_i K_i / sum K_i.
double local_constant_fit(const FunctionalSample& sample, std::span<const double> y,
                          const Curve& x, double h, const KernelSpec& kernel);

/// Hat-matrix diagonal of the local-linear smoother evaluated at every sample
/// point with the self distance included in the k-NN radius. Entry i is the
/// coefficient of Y_i in m_hat(X_i).
std::vector<double> ll_hat_diagonal(const FunctionalSample& sample, std::span<const double> y,
                                    const BasisSet& basis, std::size_t J, std::size_t k,
                                    const KernelSpec& kernel);

/// Multiplier law for the wild bootstrap.
enum class MultiplierLaw { mammen, rademacher };

/// Precomputed machinery for repeated local-linear solves on one training
/// sample: basis projections of every curve, the pairwise distance matrix,
/// and per-point sorted neighbor distances. All heavy scans are OpenMP
/// parallel with slot-per-index writes, so results do not depend on thread
/// count; each has a serial reference twin used by tests and the kernel
/// benchmark.
class LocalLinearEngine {
public:
    LocalLinearEngine(const FunctionalSample& sample, BasisSet basis, KernelSpec kernel);

    std::size_t sample_size() const noexcept { return n_; }
    std::size_t max_dimension() const noexcept { return basis_.size(); }
    const BasisSet& basis() const noexcept { return basis_; }
    const KernelSpec& kernel() const noexcept { return kernel_; }
    const FunctionalSample& sample() const noexcept { return *sample_; }
    const DistanceMatrix& distances() const noexcept { return dist_; }

    /// Leave-one-out CV trace: result[ji][ki] = mean squared LOO prediction
    /// error for (js[ji], ks[ki]); +inf where any local fit degenerates.
    /// The k-NN radius is recomputed on the reduced sample.
    std::vector<double> loo_cv_trace(std::span<const double> y, std::span<const std::size_t> js,
                                     std::span<const std::size_t> ks) const;
    std::vector<double> loo_cv_trace_serial(std::span<const double> y,
                                            std::span<const std::size_t> js,
                                            std::span<const std::size_t> ks) const;

    /// Corrected-AIC trace on the same (J, k) lattice (in-sample fits, self
    /// included): log(sigma2) + 1 + 2(trH+1)/(n - trH - 2).
    std::vector<double> aicc_trace(std::span<const double> y, std::span<const std::size_t> js,
                                   std::span<const std::size_t> ks) const;

    /// In-sample fit at every sample point (self included). Fills fitted
    /// values and/or derivative coefficients (n x J row-major). Throws
    /// singular_design if any point degenerates.
    void insample_fits(std::span<const double> y, std::size_t J, std::size_t k,
                       std::vector<double>* fitted, std::vector<double>* deriv_coeffs) const;

    /// Wild-bootstrap pilot of the derivative coefficients at every sample
    /// point: average over B replicate fits of y_hat + resid * V at fixed
    /// (J, k). One factorization per point, B streamed right-hand sides.
    std::vector<double> bootstrap_pilot_coeffs(std::span<const double> fitted,
                                               std::span<const double> residuals, std::size_t J,
                                               std::size_t k, std::size_t B, std::uint64_t seed,
                                               MultiplierLaw law) const;

    /// Leave-one-out derivative coefficients at every sample point for (J, k);
    /// ok[i] = 0 marks a degenerate fit.
    void loo_derivative_coeffs(std::span<const double> y, std::size_t J, std::size_t k,
                               std::vector<double>& coeffs, std::vector<std::uint8_t>& ok) const;

    /// Fit at an external evaluation point with a k-NN bandwidth.
    LocalFit fit_at(std::span<const double> y, const Curve& x, std::size_t J, std::size_t k) const;

    /// Batch prediction at every row of xs (parallel over points). Optional
    /// outputs may be null. ok[i] = 0 marks a degenerate local fit (value
    /// falls back to the global response mean).
    void predict_batch(std::span<const double> y, const FunctionalSample& xs, std::size_t J,
                       std::size_t k_value, std::size_t k_deriv, std::vector<double>* values,
                       std::vector<double>* deriv_coeffs, std::vector<std::uint8_t>* ok) const;

    /// Hat diagonal (self included) for aicc and diagnostics.
    std::vector<double> hat_diagonal(std::size_t J, std::size_t k) const;

    /// k-NN radius at sample point i over the other n-1 curves.
    double loo_radius(std::size_t i, std::size_t k) const;
    /// k-NN radius at sample point i with the zero self distance included.
    double insample_radius(std::size_t i, std::size_t k) const;

private:
    template <bool Parallel>
    std::vector<double> cv_trace_impl(std::span<const double> y, std::span<const std::size_t> js,
                                      std::span<const std::size_t> ks) const;

    const FunctionalSample* sample_;
    BasisSet basis_;
    KernelSpec kernel_;
    std::size_t n_;
    std::vector<double> proj_;        // n x J_max raw projections <phi_j, X_i>
    DistanceMatrix dist_;
    std::vector<double> sorted_offdiag_; // n x (n-1), row i = sorted distances to others

    std::span<const double> proj_row(std::size_t i) const {
        return {proj_.data() + i * basis_.size(), basis_.size()};
    }
};

} // namespace funreg

#endif
