#include "funreg/local_linear.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "funreg/parallel.hpp"
#include "funreg/rng.hpp"
#include "funreg/wls.hpp"

namespace funreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);

/// Fills the staged sqrt-weighted design [1 | proj(j,.) - cx] over the rows
/// with positive kernel weight, optionally leaving one index out. Returns the
/// active row count; active indices and sqrt-weights go to the workspace
/// vectors (needed by RHS streaming).
std::size_t build_design(NestedWls& wls, std::size_t cols, const double* proj,
                         std::size_t stride, std::span<const double> cx,
                         std::span<const double> dists, double h, std::size_t skip,
                         const KernelSpec& kernel, std::vector<std::size_t>& active,
                         std::vector<double>& sqrtw) {
    const std::size_t n = dists.size();
    active.clear();
    sqrtw.clear();
    for (std::size_t j = 0; j < n; ++j) {
        if (j == skip) continue;
        const double w = kernel_weight(kernel, dists[j], h);
        if (w > 0.0) {
            active.push_back(j);
            sqrtw.push_back(std::sqrt(w));
        }
    }
    const std::size_t rows = active.size();
    auto a = wls.stage(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) a[r] = sqrtw[r]; // intercept column
    for (std::size_t c = 1; c < cols; ++c) {
        double* col = a.data() + c * rows;
        for (std::size_t r = 0; r < rows; ++r)
            col[r] = sqrtw[r] * (proj[active[r] * stride + (c - 1)] - cx[c - 1]);
    }
    return rows;
}

void fill_rhs(NestedWls& wls, std::span<const double> y, const std::vector<std::size_t>& active,
              const std::vector<double>& sqrtw) {
    auto rhs = wls.stage_rhs();
    for (std::size_t r = 0; r < active.size(); ++r) rhs[r] = sqrtw[r] * y[active[r]];
}

double mean_of(std::span<const double> y) {
    double s = 0.0;
    for (double v : y) s += v;
    return y.empty() ? 0.0 : s / static_cast<double>(y.size());
}

} // namespace

// ---------------------------------------------------------------------------
// Public one-shot operations (rank-revealing Eigen path).
// ---------------------------------------------------------------------------

LocalFit local_linear_fit(const FunctionalSample& sample, std::span<const double> y,
                          const Curve& x, const BasisSet& basis, std::size_t J, double h,
                          const KernelSpec& kernel) {
    if (h <= 0.0) raise(errc::invalid_argument, "bandwidth must be positive");
    if (J > basis.size()) raise(errc::invalid_argument, "J exceeds basis size");
    if (y.size() != sample.size()) raise(errc::invalid_argument, "response length mismatch");
    check_same_grid(*sample.grid(), *x.grid);

    const std::size_t n = sample.size();
    const auto dists = distances_to(sample, x);
    std::vector<double> weights(n);
    std::size_t positive = 0;
    for (std::size_t i = 0; i < n; ++i) {
        weights[i] = kernel_weight(kernel, dists[i], h);
        if (weights[i] > 0.0) ++positive;
    }
    const std::size_t p = J + 1;
    if (positive < p)
        raise(errc::insufficient_local_data,
              "fewer than J+1 positively weighted curves in the local ball");

    const auto cx = project_coeffs(x, basis);

    Eigen::MatrixXd a(static_cast<Eigen::Index>(positive), static_cast<Eigen::Index>(p));
    Eigen::VectorXd b(static_cast<Eigen::Index>(positive));
    Eigen::Index r = 0;
    // Row j of the design is [1, <phi_1, X_j - x>, ..., <phi_J, X_j - x>],
    // scaled by sqrt of its kernel weight.
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i] <= 0.0) continue;
        const double sw = std::sqrt(weights[i]);
        a(r, 0) = sw;
        const auto row = sample.row(i);
        for (std::size_t j = 0; j < J; ++j) {
            const double s = inner_product_raw(sample.grid()->weights(), row, basis.function(j));
            a(r, static_cast<Eigen::Index>(j + 1)) = sw * (s - cx[j]);
        }
        b(r) = sw * y[i];
        ++r;
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    const auto rank = static_cast<std::size_t>(cod.rank());
    if (rank < p) raise_singular(static_cast<int>(rank), "weighted local design is rank-deficient");
    const Eigen::VectorXd theta = cod.solve(b);

    LocalFit fit;
    fit.a_hat = theta(0);
    fit.b_hat.assign(theta.data() + 1, theta.data() + static_cast<Eigen::Index>(p));
    if (J > 0) {
        fit.derivative = reconstruct(fit.b_hat, basis.truncated(J));
    } else {
        fit.derivative = Curve(sample.grid(), std::vector<double>(sample.grid_size(), 0.0));
    }
    fit.effective_weights = std::move(weights);

    // When x coincides with a sample curve the design row of that curve is
    // e1, so the smoother diagonal entry is K(0) * [(A^T A)^{-1}]_00.
    if (std::any_of(dists.begin(), dists.end(), [](double d) { return d == 0.0; })) {
        const Eigen::MatrixXd pinv = cod.pseudoInverse();
        fit.trace_contribution = kernel_eval(kernel, 0.0) * pinv.row(0).squaredNorm();
    }
    return fit;
}

double local_constant_fit(const FunctionalSample& sample, std::span<const double> y,
                          const Curve& x, double h, const KernelSpec& kernel) {
    if (h <= 0.0) raise(errc::invalid_argument, "bandwidth must be positive");
    if (y.size() != sample.size()) raise(errc::invalid_argument, "response length mismatch");
    const auto dists = distances_to(sample, x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double w = kernel_weight(kernel, dists[i], h);
        num += w * y[i];
        den += w;
    }
    if (!(den > 0.0))
        raise(errc::insufficient_local_data, "all kernel weights vanish at the evaluation point");
    return num / den;
}

std::vector<double> ll_hat_diagonal(const FunctionalSample& sample, std::span<const double> y,
                                    const BasisSet& basis, std::size_t J, std::size_t k,
                                    const KernelSpec& kernel) {
    (void)y; // the smoother is linear in Y; its diagonal depends on X only
    LocalLinearEngine engine(sample, basis, kernel);
    return engine.hat_diagonal(J, k);
}

// ---------------------------------------------------------------------------
// LocalLinearEngine
// ---------------------------------------------------------------------------

LocalLinearEngine::LocalLinearEngine(const FunctionalSample& sample, BasisSet basis,
                                     KernelSpec kernel)
    : sample_(&sample), basis_(std::move(basis)), kernel_(kernel), n_(sample.size()),
      dist_(pairwise_distances(sample)) {
    check_same_grid(*sample.grid(), *basis_.grid());
    const std::size_t jmax = basis_.size();
    proj_.resize(n_ * jmax);
    const auto w = sample.grid()->weights();
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < jmax; ++j)
            proj_[i * jmax + j] = inner_product_raw(w, sample.row(i), basis_.function(j));

    if (n_ > 1) {
        sorted_offdiag_.resize(n_ * (n_ - 1));
        parallel_for(static_cast<std::ptrdiff_t>(n_), [&](std::size_t i) {
            double* out = sorted_offdiag_.data() + i * (n_ - 1);
            std::size_t c = 0;
            for (std::size_t j = 0; j < n_; ++j)
                if (j != i) out[c++] = dist_(i, j);
            std::sort(out, out + (n_ - 1));
        });
    }
}

double LocalLinearEngine::loo_radius(std::size_t i, std::size_t k) const {
    if (n_ < 2 || k < 1 || k > n_ - 1)
        raise(errc::invalid_argument, "loo neighbor count out of range");
    return sorted_offdiag_[i * (n_ - 1) + (k - 1)];
}

double LocalLinearEngine::insample_radius(std::size_t i, std::size_t k) const {
    if (k < 1 || k > n_) raise(errc::invalid_argument, "neighbor count out of range");
    return k == 1 ? 0.0 : sorted_offdiag_[i * (n_ - 1) + (k - 2)];
}

namespace {

void check_lattice(std::size_t n, std::size_t j_max, std::span<const std::size_t> js,
                   std::span<const std::size_t> ks, bool leave_one_out) {
    if (js.empty() || ks.empty()) raise(errc::invalid_argument, "empty selection lattice");
    const std::size_t k_cap = leave_one_out ? n - 1 : n;
    for (std::size_t j : js)
        if (j > j_max) raise(errc::invalid_argument, "J candidate exceeds basis size");
    for (std::size_t k : ks)
        if (k < 1 || k > k_cap) raise(errc::invalid_argument, "k candidate out of range");
}

void check_jk(std::size_t n, std::size_t j_max, std::size_t J, std::size_t k,
              bool leave_one_out) {
    const std::size_t one_j[] = {J};
    const std::size_t one_k[] = {k};
    check_lattice(n, j_max, one_j, one_k, leave_one_out);
}

} // namespace

template <bool Parallel>
std::vector<double> LocalLinearEngine::cv_trace_impl(std::span<const double> y,
                                                     std::span<const std::size_t> js,
                                                     std::span<const std::size_t> ks) const {
    check_lattice(n_, basis_.size(), js, ks, /*leave_one_out=*/true);
    if (y.size() != n_) raise(errc::invalid_argument, "response length mismatch");
    const std::size_t cells = js.size() * ks.size();
    const std::size_t cols = *std::max_element(js.begin(), js.end()) + 1;
    std::vector<double> slab(n_ * cells, 0.0);

    auto body = [&](std::size_t i) {
        NestedWls wls;
        wls.reserve(n_, cols);
        std::vector<std::size_t> active;
        std::vector<double> sqrtw;
        std::vector<double> theta(cols);
        double* out = slab.data() + i * cells;
        const auto cx = proj_row(i);
        const auto dists = dist_.row(i);
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            const double h = loo_radius(i, ks[ki]);
            build_design(wls, cols, proj_.data(), basis_.size(), cx, dists, h, i, kernel_,
                         active, sqrtw);
            fill_rhs(wls, y, active, sqrtw);
            wls.factor();
            for (std::size_t ji = 0; ji < js.size(); ++ji) {
                const std::size_t p = js[ji] + 1;
                double errsq = kInf;
                if (wls.solve(p, theta)) {
                    const double e = y[i] - theta[0];
                    errsq = e * e;
                }
                out[ji * ks.size() + ki] = errsq;
            }
        }
    };

    if constexpr (Parallel) {
        parallel_for(static_cast<std::ptrdiff_t>(n_), body);
    } else {
        serial_for(static_cast<std::ptrdiff_t>(n_), body);
    }

    // Deterministic reduction in sample order.
    std::vector<double> trace(cells, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = slab.data() + i * cells;
        for (std::size_t c = 0; c < cells; ++c) trace[c] += row[c];
    }
    for (double& v : trace) v /= static_cast<double>(n_);
    return trace;
}

std::vector<double> LocalLinearEngine::loo_cv_trace(std::span<const double> y,
                                                    std::span<const std::size_t> js,
                                                    std::span<const std::size_t> ks) const {
    return cv_trace_impl<true>(y, js, ks);
}

std::vector<double> LocalLinearEngine::loo_cv_trace_serial(std::span<const double> y,
                                                           std::span<const std::size_t> js,
                                                           std::span<const std::size_t> ks) const {
    return cv_trace_impl<false>(y, js, ks);
}

std::vector<double> LocalLinearEngine::aicc_trace(std::span<const double> y,
                                                  std::span<const std::size_t> js,
                                                  std::span<const std::size_t> ks) const {
    check_lattice(n_, basis_.size(), js, ks, /*leave_one_out=*/false);
    if (y.size() != n_) raise(errc::invalid_argument, "response length mismatch");
    const std::size_t cells = js.size() * ks.size();
    const std::size_t cols = *std::max_element(js.begin(), js.end()) + 1;
    // Two accumulators per (i, cell): squared residual and hat diagonal.
    std::vector<double> slab(n_ * cells * 2, 0.0);

    parallel_for(static_cast<std::ptrdiff_t>(n_), [&](std::size_t i) {
        NestedWls wls;
        wls.reserve(n_, cols);
        std::vector<std::size_t> active;
        std::vector<double> sqrtw;
        std::vector<double> theta(cols);
        double* out = slab.data() + i * cells * 2;
        const auto cx = proj_row(i);
        const auto dists = dist_.row(i);
        const double w_self = kernel_eval(kernel_, 0.0);
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            const double h = insample_radius(i, ks[ki]);
            build_design(wls, cols, proj_.data(), basis_.size(), cx, dists, h, kNoSkip, kernel_,
                         active, sqrtw);
            fill_rhs(wls, y, active, sqrtw);
            wls.factor();
            for (std::size_t ji = 0; ji < js.size(); ++ji) {
                const std::size_t p = js[ji] + 1;
                double errsq = kInf, hat = kInf;
                double inv00 = 0.0;
                if (wls.solve(p, theta) && wls.leading_inverse_00(p, inv00)) {
                    const double e = y[i] - theta[0];
                    errsq = e * e;
                    hat = w_self * inv00;
                }
                out[(ji * ks.size() + ki) * 2] = errsq;
                out[(ji * ks.size() + ki) * 2 + 1] = hat;
            }
        }
    });

    std::vector<double> rss(cells, 0.0), trh(cells, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = slab.data() + i * cells * 2;
        for (std::size_t c = 0; c < cells; ++c) {
            rss[c] += row[c * 2];
            trh[c] += row[c * 2 + 1];
        }
    }
    const double n = static_cast<double>(n_);
    std::vector<double> trace(cells, kInf);
    for (std::size_t c = 0; c < cells; ++c) {
        if (!std::isfinite(rss[c]) || !std::isfinite(trh[c])) continue;
        if (trh[c] + 2.0 >= n) continue; // overparameterized
        const double sigma2 = std::max(rss[c] / n, 1e-300);
        trace[c] = std::log(sigma2) + 1.0 + 2.0 * (trh[c] + 1.0) / (n - trh[c] - 2.0);
    }
    return trace;
}

void LocalLinearEngine::insample_fits(std::span<const double> y, std::size_t J, std::size_t k,
                                      std::vector<double>* fitted,
                                      std::vector<double>* deriv_coeffs) const {
    const std::size_t p = J + 1;
    if (fitted) fitted->assign(n_, 0.0);
    if (deriv_coeffs) deriv_coeffs->assign(n_ * J, 0.0);
    std::vector<std::uint8_t> ok(n_, 1);
    std::vector<int> ranks(n_, 0);

    parallel_for(static_cast<std::ptrdiff_t>(n_), [&](std::size_t i) {
        NestedWls wls;
        wls.reserve(n_, p);
        std::vector<std::size_t> active;
        std::vector<double> sqrtw;
        std::vector<double> theta(p);
        const double h = insample_radius(i, k);
        build_design(wls, p, proj_.data(), basis_.size(), proj_row(i), dist_.row(i), h, kNoSkip,
                     kernel_, active, sqrtw);
        fill_rhs(wls, y, active, sqrtw);
        wls.factor();
        if (!wls.solve(p, theta)) {
            ok[i] = 0;
            ranks[i] = static_cast<int>(wls.rank(p));
            return;
        }
        if (fitted) (*fitted)[i] = theta[0];
        if (deriv_coeffs)
            for (std::size_t j = 0; j < J; ++j) (*deriv_coeffs)[i * J + j] = theta[j + 1];
    });

    for (std::size_t i = 0; i < n_; ++i)
        if (!ok[i])
            raise_singular(ranks[i], "in-sample local design is rank-deficient");
}

std::vector<double> LocalLinearEngine::bootstrap_pilot_coeffs(
    std::span<const double> fitted, std::span<const double> residuals, std::size_t J,
    std::size_t k, std::size_t B, std::uint64_t seed, MultiplierLaw law) const {
    if (B < 1) raise(errc::invalid_argument, "bootstrap needs B >= 1");
    const std::size_t p = J + 1;

    // Multiplier slab, shared read-only across threads.
    std::vector<double> mult(B * n_);
    const std::uint64_t stream = rng_stream(seed, 0x626f6f74ULL); // bootstrap multipliers
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t i = 0; i < n_; ++i)
            mult[b * n_ + i] = law == MultiplierLaw::mammen
                                   ? mammen_multiplier(stream, b * n_ + i)
                                   : rademacher_multiplier(stream, b * n_ + i);

    std::vector<double> pilot(n_ * J, 0.0);
    std::vector<std::uint8_t> ok(n_, 1);
    std::vector<int> ranks(n_, 0);

    parallel_for(static_cast<std::ptrdiff_t>(n_), [&](std::size_t i) {
        NestedWls wls;
        wls.reserve(n_, p);
        std::vector<std::size_t> active;
        std::vector<double> sqrtw;
        std::vector<double> theta(p);
        std::vector<double> rhs;
        const double h = insample_radius(i, k);
        const std::size_t rows =
            build_design(wls, p, proj_.data(), basis_.size(), proj_row(i), dist_.row(i), h,
                         kNoSkip, kernel_, active, sqrtw);
        fill_rhs(wls, fitted, active, sqrtw);
        wls.factor();
        if (!wls.solve(p, theta)) {
            ok[i] = 0;
            ranks[i] = static_cast<int>(wls.rank(p));
            return;
        }
        rhs.resize(rows);
        std::vector<double> acc(J, 0.0);
        for (std::size_t b = 0; b < B; ++b) {
            const double* v = mult.data() + b * n_;
            for (std::size_t r = 0; r < rows; ++r) {
                const std::size_t j = active[r];
                rhs[r] = sqrtw[r] * (fitted[j] + residuals[j] * v[j]);
            }
            wls.apply_qt(rhs);
            wls.solve(p, theta);
            for (std::size_t j = 0; j < J; ++j) acc[j] += theta[j + 1];
        }
        for (std::size_t j = 0; j < J; ++j) pilot[i * J + j] = acc[j] / static_cast<double>(B);
    });

    for (std::size_t i = 0; i < n_; ++i)
        if (!ok[i]) raise_singular(ranks[i], "bootstrap pilot design is rank-deficient");
    return pilot;
}

void LocalLinearEngine::loo_derivative_coeffs(std::span<const double> y, std::size_t J,
                                              std::size_t k, std::vector<double>& coeffs,
                                              std::vector<std::uint8_t>& ok) const {
    const std::size_t p = J + 1;
    coeffs.assign(n_ * J, 0.0);
    ok.assign(n_, 1);
    parallel_for(static_cast<std::ptrdiff_t>(n_), [&](std::size_t i) {
        NestedWls wls;
        wls.reserve(n_, p);
        std::vector<std::size_t> active;
        std::vector<double> sqrtw;
        std::vector<double> theta(p);
        const double h = loo_radius(i, k);
        build_design(wls, p, proj_.data(), basis_.size(), proj_row(i), dist_.row(i), h, i,
                     kernel_, active, sqrtw);
        fill_rhs(wls, y, active, sqrtw);
        wls.factor();
        if (!wls.solve(p, theta)) {
            ok[i] = 0;
            return;
        }
        for (std::size_t j = 0; j < J; ++j) coeffs[i * J + j] = theta[j + 1];
    });
}

LocalFit LocalLinearEngine::fit_at(std::span<const double> y, const Curve& x, std::size_t J,
                                   std::size_t k) const {
    const auto dists = distances_to(*sample_, x);
    const double h = knn_bandwidth(dists, k);
    return local_linear_fit(*sample_, y, x, basis_.truncated(std::max<std::size_t>(J, 1)).truncated(J == 0 ? 1 : J), J,
                            h <= 0.0 ? std::numeric_limits<double>::min() : h, kernel_);
}

void LocalLinearEngine::predict_batch(std::span<const double> y, const FunctionalSample& xs,
                                      std::size_t J, std::size_t k_value, std::size_t k_deriv,
                                      std::vector<double>* values,
                                      std::vector<double>* deriv_coeffs,
                                      std::vector<std::uint8_t>* ok) const {
    check_same_grid(*sample_->grid(), *xs.grid());
    const std::size_t m = xs.size();
    const std::size_t p = J + 1;
    if (values) values->assign(m, 0.0);
    if (deriv_coeffs) deriv_coeffs->assign(m * J, 0.0);
    if (ok) ok->assign(m, 1);
    const double fallback = mean_of(y);
    const auto gw = sample_->grid()->weights();

    parallel_for(static_cast<std::ptrdiff_t>(m), [&](std::size_t t) {
        NestedWls wls;
        wls.reserve(n_, p);
        std::vector<std::size_t> active;
        std::vector<double> sqrtw;
        std::vector<double> theta(p);
        std::vector<double> dists(n_), scratch(n_);
        std::vector<double> cx(basis_.size());
        const auto xr = xs.row(t);
        for (std::size_t i = 0; i < n_; ++i) dists[i] = distance_raw(gw, sample_->row(i), xr);
        for (std::size_t j = 0; j < basis_.size(); ++j)
            cx[j] = inner_product_raw(gw, xr, basis_.function(j));

        bool good = true;
        if (values) {
            scratch = dists;
            std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k_value - 1),
                             scratch.end());
            const double h = scratch[k_value - 1];
            build_design(wls, p, proj_.data(), basis_.size(), cx, dists, h, kNoSkip, kernel_,
                         active, sqrtw);
            fill_rhs(wls, y, active, sqrtw);
            wls.factor();
            if (wls.solve(p, theta)) {
                (*values)[t] = theta[0];
            } else {
                (*values)[t] = fallback;
                good = false;
            }
        }
        if (deriv_coeffs && J > 0) {
            const bool same = (k_deriv == k_value) && values;
            if (!same) {
                scratch = dists;
                std::nth_element(scratch.begin(),
                                 scratch.begin() + static_cast<std::ptrdiff_t>(k_deriv - 1),
                                 scratch.end());
                const double h = scratch[k_deriv - 1];
                build_design(wls, p, proj_.data(), basis_.size(), cx, dists, h, kNoSkip, kernel_,
                             active, sqrtw);
                fill_rhs(wls, y, active, sqrtw);
                wls.factor();
            }
            if (wls.solve(p, theta)) {
                for (std::size_t j = 0; j < J; ++j) (*deriv_coeffs)[t * J + j] = theta[j + 1];
            } else {
                good = false;
            }
        }
        if (ok && !good) (*ok)[t] = 0;
    });
}

std::vector<double> LocalLinearEngine::hat_diagonal(std::size_t J, std::size_t k) const {
    const std::size_t p = J + 1;
    std::vector<double> diag(n_, 0.0);
    std::vector<std::uint8_t> ok(n_, 1);
    parallel_for(static_cast<std::ptrdiff_t>(n_), [&](std::size_t i) {
        NestedWls wls;
        wls.reserve(n_, p);
        std::vector<std::size_t> active;
        std::vector<double> sqrtw;
        const double h = insample_radius(i, k);
        build_design(wls, p, proj_.data(), basis_.size(), proj_row(i), dist_.row(i), h, kNoSkip,
                     kernel_, active, sqrtw);
        wls.factor();
        double inv00 = 0.0;
        if (!wls.leading_inverse_00(p, inv00)) {
            ok[i] = 0;
            return;
        }
        diag[i] = kernel_eval(kernel_, 0.0) * inv00;
    });
    for (std::size_t i = 0; i < n_; ++i)
        if (!ok[i]) raise_singular(-1, "hat diagonal undefined: rank-deficient local design");
    return diag;
}

} // namespace funreg
