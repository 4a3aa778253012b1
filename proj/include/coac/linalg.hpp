#pragma once

// Dense real linear algebra for tall least-squares problems.
//
// Everything here is built on Householder QR. The hat matrix H = A(AᵀA)⁻¹Aᵀ
// is never formed: projections are evaluated as ‖Qᵀv‖² on the reflected
// vector, which costs O(n·m) once the factorization exists.

#include <cstddef>
#include <span>
#include <vector>

namespace coac {

using Vector = std::vector<double>;

/// Row-major dense matrix. Public constructors reject empty shapes and
/// non-finite entries.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

    std::span<const double> entries() const noexcept { return data_; }
    Vector column(std::size_t c) const;
    double max_abs() const noexcept;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix multiply(const Matrix& a, const Matrix& b);
Vector multiply(const Matrix& a, std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> v);
double frobenius_norm(const Matrix& a);

/// Throws InvalidArgument when any entry is NaN or infinite.
void require_finite(std::span<const double> v, const char* what);

/// Thin factors: q is rows×cols with orthonormal columns, r is cols×cols
/// upper triangular.
struct QrFactors {
    Matrix q;
    Matrix r;
};

/// Compact Householder factorization of a tall matrix.
///
/// Reflector k only depends on columns 0..k, so one factorization of A_M
/// also factors every column prefix A_m, m ≤ M. That is what makes the
/// nested-order scan O(n·M²) in total.
///
/// With `scale_columns` each column is normalised to unit 2-norm first;
/// `solve` undoes the scaling on the returned coefficients.
class HouseholderQr {
public:
    explicit HouseholderQr(const Matrix& a, bool scale_columns = false);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    /// Number of leading columns whose pivots pass the rank tolerance.
    /// Prefix m is full column rank iff m ≤ leading_rank().
    std::size_t leading_rank() const noexcept { return leading_rank_; }

    /// Diagonal of R in scaled coordinates.
    double r_diag(std::size_t k) const noexcept { return packed_(k, k); }

    /// v ← H_{m-1}…H_0 v, i.e. Qᵀv restricted to the first m reflectors.
    void apply_qt(std::span<double> v, std::size_t m) const;
    /// v ← H_0…H_{m-1} v.
    void apply_q(std::span<double> v, std::size_t m) const;

    /// Least-squares coefficients for the first m columns (original scaling).
    /// `qty` must already hold Qᵀy (at least its first m entries).
    Vector solve_from_qty(std::span<const double> qty, std::size_t m) const;
    Vector solve(std::span<const double> y, std::size_t m) const;

    Matrix thin_q(std::size_t m) const;
    /// R of the unscaled prefix A_m.
    Matrix r(std::size_t m) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    Matrix packed_;                       // R above the diagonal, reflectors below
    std::vector<double> reflector_head_;  // first entry of each unit reflector
    std::vector<double> scale_;           // column norms when scaling, else 1
    std::size_t leading_rank_ = 0;
};

/// Householder QR returning explicit thin factors with q·r = a.
/// Throws RankDeficient if some |r_kk| < 1e-12 · max|a| · rows.
QrFactors qr_decompose(const Matrix& a);

/// argmin ‖aθ − y‖₂ via column-scaled QR. Never forms AᵀA.
Vector solve_least_squares(const Matrix& a, std::span<const double> y);

struct ProjectionSplit {
    double proj_norm_sq;   // ‖H v‖²
    double resid_norm_sq;  // ‖(I − H) v‖²
};

ProjectionSplit residual_quadratic_form(const Matrix& a, std::span<const double> v);

} // namespace coac
