#ifndef FUNREG_WLS_HPP
#define FUNREG_WLS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace funreg {

/// Householder QR of a sqrt-weight-scaled design matrix with *nested column
/// subsets*: after one factorization of the full p_max-column design, the
/// least-squares solution restricted to the leading p columns is available
/// for every p <= p_max from the same R factor. Columns are equilibrated to
/// unit norm internally so the rank test is scale-invariant.
///
/// This is the workhorse behind the (J, k) selection scans, where the design
/// columns for dimension J are exactly the leading J+1 columns of the
/// dimension-J_max design.
class NestedWls {
public:
    /// Reserve workspace for up to max_rows x max_cols problems.
    void reserve(std::size_t max_rows, std::size_t max_cols);

    /// Begin a new problem with the given shape; returns the column-major
    /// design buffer (rows x cols) to fill. Contents are overwritten.
    std::span<double> stage(std::size_t rows, std::size_t cols);
    std::span<double> stage_rhs();

    /// Factor the staged design and reduce the staged RHS by Q^T.
    void factor();

    /// Reduce a fresh RHS (length rows) by the stored reflectors; replaces
    /// the staged RHS. Used to stream many responses through one design.
    void apply_qt(std::span<const double> rhs);

    /// Solve for the leading p columns into theta[0..p). Returns false when
    /// the equilibrated R factor has a diagonal entry below tol (the design
    /// restricted to p columns is numerically rank-deficient).
    bool solve(std::size_t p, std::span<double> theta) const;

    /// e1^T (A_p^T A_p)^{-1} e1 for the leading-p design: the multiplier that
    /// turns the self kernel weight into the smoother-matrix diagonal entry.
    /// Returns false on rank deficiency.
    bool leading_inverse_00(std::size_t p, double& out) const;

    /// Numerical rank of the leading-p design under the same tolerance.
    std::size_t rank(std::size_t p) const;

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    static constexpr double kRankTol = 1e-8;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;      // rows x cols column-major; reflectors below diag, R above
    std::vector<double> tau_;    // Householder scalars
    std::vector<double> colnorm_; // equilibration factors
    std::vector<double> qty_;    // Q^T * rhs
    std::vector<double> rhs_;    // staging buffer
};

} // namespace funreg

#endif
