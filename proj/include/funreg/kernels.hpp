#ifndef FUNREG_KERNELS_HPP
#define FUNREG_KERNELS_HPP

#include <span>
#include <vector>

#include "funreg/grid.hpp"

namespace funreg {

/// Asymmetric kernels supported on [0, 1], nonincreasing there, zero outside.
enum class KernelKind { epanechnikov_asym, uniform, triangle_asym };

struct KernelSpec {
    KernelKind kind = KernelKind::epanechnikov_asym;
};

const char* kernel_kind_name(KernelKind kind) noexcept;
KernelKind kernel_kind_from_name(const std::string& name);

/// K(t): epanechnikov 0.5(1-t^2), uniform 1, triangle (1-t); all on [0,1],
/// zero elsewhere. Total function, no error paths.
double kernel_eval(const KernelSpec& spec, double t) noexcept;

/// Kernel weight for a curve at distance d under bandwidth h. Handles the
/// h = 0 tie case (duplicate curves): weight K(0) at d = 0, zero otherwise.
inline double kernel_weight(const KernelSpec& spec, double d, double h) noexcept {
    if (h > 0.0) return kernel_eval(spec, d / h);
    return d == 0.0 ? kernel_eval(spec, 0.0) : 0.0;
}

/// Symmetric matrix of pairwise L2 curve distances, zero diagonal.
class DistanceMatrix {
public:
    explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

private:
    std::size_t n_;
    std::vector<double> data_;
};

/// Pairwise quadrature distances, parallel over row blocks.
DistanceMatrix pairwise_distances(const FunctionalSample& sample);

/// Serial reference for tests and the kernel benchmark.
DistanceMatrix pairwise_distances_serial(const FunctionalSample& sample);

/// Distances from one curve to every row of the sample.
std::vector<double> distances_to(const FunctionalSample& sample, const Curve& x);

/// k-nearest-neighbor bandwidth: the k-th smallest distance (closed-ball
/// convention, so at least k points satisfy d <= h). Does not modify input.
double knn_bandwidth(std::span<const double> distances, std::size_t k);

} // namespace funreg

#endif
