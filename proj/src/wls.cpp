#include "funreg/wls.hpp"

#include <cmath>

namespace funreg {

void NestedWls::reserve(std::size_t max_rows, std::size_t max_cols) {
    a_.reserve(max_rows * max_cols);
    tau_.reserve(max_cols);
    colnorm_.reserve(max_cols);
    qty_.reserve(max_rows);
    rhs_.reserve(max_rows);
}

std::span<double> NestedWls::stage(std::size_t rows, std::size_t cols) {
    rows_ = rows;
    cols_ = cols;
    a_.assign(rows * cols, 0.0);
    rhs_.assign(rows, 0.0);
    return a_;
}

std::span<double> NestedWls::stage_rhs() { return rhs_; }

void NestedWls::factor() {
    const std::size_t m = rows_, n = cols_;
    tau_.assign(n, 0.0);
    colnorm_.assign(n, 0.0);

    // Column equilibration.
    for (std::size_t j = 0; j < n; ++j) {
        double* col = a_.data() + j * m;
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += col[i] * col[i];
        const double nrm = std::sqrt(s);
        colnorm_[j] = nrm;
        if (nrm > 0.0)
            for (std::size_t i = 0; i < m; ++i) col[i] /= nrm;
    }

    const std::size_t steps = m < n ? m : n;
    for (std::size_t j = 0; j < steps; ++j) {
        double* col = a_.data() + j * m;
        // Householder vector for col[j..m).
        double sigma = 0.0;
        for (std::size_t i = j + 1; i < m; ++i) sigma += col[i] * col[i];
        const double alpha = col[j];
        if (sigma == 0.0) {
            tau_[j] = 0.0;
            continue;
        }
        const double mu = std::sqrt(alpha * alpha + sigma);
        const double v0 = alpha <= 0.0 ? alpha - mu : -sigma / (alpha + mu);
        const double v0sq = v0 * v0;
        tau_[j] = 2.0 * v0sq / (sigma + v0sq);
        const double inv_v0 = 1.0 / v0;
        for (std::size_t i = j + 1; i < m; ++i) col[i] *= inv_v0;
        col[j] = mu; // R diagonal

        // Apply reflector to the remaining columns.
        for (std::size_t c = j + 1; c < n; ++c) {
            double* colc = a_.data() + c * m;
            double dot = colc[j];
            for (std::size_t i = j + 1; i < m; ++i) dot += col[i] * colc[i];
            dot *= tau_[j];
            colc[j] -= dot;
            for (std::size_t i = j + 1; i < m; ++i) colc[i] -= dot * col[i];
        }
    }
    apply_qt(rhs_);
}

void NestedWls::apply_qt(std::span<const double> rhs) {
    const std::size_t m = rows_, n = cols_;
    qty_.assign(rhs.begin(), rhs.end());
    const std::size_t steps = m < n ? m : n;
    for (std::size_t j = 0; j < steps; ++j) {
        if (tau_[j] == 0.0) continue;
        const double* col = a_.data() + j * m;
        double dot = qty_[j];
        for (std::size_t i = j + 1; i < m; ++i) dot += col[i] * qty_[i];
        dot *= tau_[j];
        qty_[j] -= dot;
        for (std::size_t i = j + 1; i < m; ++i) qty_[i] -= dot * col[i];
    }
}

bool NestedWls::solve(std::size_t p, std::span<double> theta) const {
    const std::size_t m = rows_;
    if (p > cols_ || p > m) return false;
    for (std::size_t j = 0; j < p; ++j) {
        if (colnorm_[j] == 0.0) return false;
        if (std::fabs(a_[j * m + j]) < kRankTol) return false;
    }
    // Back substitution on the leading p x p block of R.
    for (std::size_t jj = p; jj-- > 0;) {
        double s = qty_[jj];
        for (std::size_t c = jj + 1; c < p; ++c) s -= a_[c * m + jj] * theta[c];
        theta[jj] = s / a_[jj * m + jj];
    }
    // Undo equilibration.
    for (std::size_t j = 0; j < p; ++j) theta[j] /= colnorm_[j];
    return true;
}

bool NestedWls::leading_inverse_00(std::size_t p, double& out) const {
    const std::size_t m = rows_;
    if (p > cols_ || p > m) return false;
    for (std::size_t j = 0; j < p; ++j) {
        if (colnorm_[j] == 0.0) return false;
        if (std::fabs(a_[j * m + j]) < kRankTol) return false;
    }
    // (A_p^T A_p)^{-1} = R_p^{-1} R_p^{-T}; want ||R_p^{-T} e1||^2 with the
    // equilibration of column 0 undone on both sides.
    // Forward solve R_p^T z = e1 (R^T is lower triangular).
    std::vector<double> z(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        double s = (i == 0) ? 1.0 : 0.0;
        for (std::size_t c = 0; c < i; ++c) s -= a_[i * m + c] * z[c];
        z[i] = s / a_[i * m + i];
    }
    double sq = 0.0;
    for (double v : z) sq += v * v;
    out = sq / (colnorm_[0] * colnorm_[0]);
    return true;
}

std::size_t NestedWls::rank(std::size_t p) const {
    const std::size_t m = rows_;
    std::size_t r = 0;
    const std::size_t steps = p < m ? p : m;
    for (std::size_t j = 0; j < steps; ++j)
        if (colnorm_[j] != 0.0 && std::fabs(a_[j * m + j]) >= kRankTol) ++r;
    return r;
}

} // namespace funreg
