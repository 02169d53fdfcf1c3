#include "funreg/kernels.hpp"

#include <algorithm>
#include <string>

#include "funreg/parallel.hpp"

namespace funreg {

const char* kernel_kind_name(KernelKind kind) noexcept {
    switch (kind) {
        case KernelKind::epanechnikov_asym: return "epanechnikov";
        case KernelKind::uniform: return "uniform";
        case KernelKind::triangle_asym: return "triangle";
    }
    return "epanechnikov";
}

KernelKind kernel_kind_from_name(const std::string& name) {
    if (name == "epanechnikov") return KernelKind::epanechnikov_asym;
    if (name == "uniform") return KernelKind::uniform;
    if (name == "triangle") return KernelKind::triangle_asym;
    raise(errc::invalid_argument, "unknown kernel kind: " + name);
}

double kernel_eval(const KernelSpec& spec, double t) noexcept {
    if (t < 0.0 || t > 1.0) return 0.0;
    switch (spec.kind) {
        case KernelKind::epanechnikov_asym: return 0.5 * (1.0 - t * t);
        case KernelKind::uniform: return 1.0;
        case KernelKind::triangle_asym: return 1.0 - t;
    }
    return 0.0;
}

namespace {

template <typename ForEach>
DistanceMatrix pairwise_impl(const FunctionalSample& sample, const ForEach& for_each) {
    const std::size_t n = sample.size();
    const auto weights = sample.grid()->weights();
    DistanceMatrix dist(n);
    // Upper triangle by row; each row writes only its own slots.
    for_each(static_cast<std::ptrdiff_t>(n), [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j)
            dist.at(i, j) = distance_raw(weights, sample.row(i), sample.row(j));
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) dist.at(i, j) = dist(j, i);
    return dist;
}

} // namespace

DistanceMatrix pairwise_distances(const FunctionalSample& sample) {
    return pairwise_impl(sample, [](std::ptrdiff_t count, auto&& body) {
        parallel_for(count, body);
    });
}

DistanceMatrix pairwise_distances_serial(const FunctionalSample& sample) {
    return pairwise_impl(sample, [](std::ptrdiff_t count, auto&& body) {
        serial_for(count, body);
    });
}

std::vector<double> distances_to(const FunctionalSample& sample, const Curve& x) {
    check_same_grid(*sample.grid(), *x.grid);
    const auto weights = sample.grid()->weights();
    std::vector<double> d(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i)
        d[i] = distance_raw(weights, sample.row(i), x.values);
    return d;
}

double knn_bandwidth(std::span<const double> distances, std::size_t k) {
    const std::size_t n = distances.size();
    if (k < 1 || k > n) raise(errc::invalid_argument, "knn neighbor count out of range");
    std::vector<double> sorted(distances.begin(), distances.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
    return sorted[k - 1];
}

} // namespace funreg
