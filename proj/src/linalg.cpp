#include "coac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coac/error.hpp"

namespace coac {

namespace {

constexpr double kRankTolerance = 1e-12;

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0)
{
    if (rows == 0 || cols == 0) {
        throw Error(ErrorCode::bad_shape, "matrix must have at least one row and one column");
    }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries))
{
    if (rows == 0 || cols == 0) {
        throw Error(ErrorCode::bad_shape, "matrix must have at least one row and one column");
    }
    if (data_.size() != rows * cols) {
        throw Error(ErrorCode::bad_shape, "entry count " + std::to_string(data_.size()) + " != " +
                                              std::to_string(rows) + "x" + std::to_string(cols));
    }
    require_finite(data_, "matrix");
}

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Vector Matrix::column(std::size_t c) const
{
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out[r] = (*this)(r, c);
    }
    return out;
}

double Matrix::max_abs() const noexcept
{
    double best = 0.0;
    for (double v : data_) {
        best = std::max(best, std::abs(v));
    }
    return best;
}

Matrix transpose(const Matrix& a)
{
    Matrix t(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            t(c, r) = a(r, c);
        }
    }
    return t;
}

Matrix multiply(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows()) {
        throw Error(ErrorCode::length_mismatch, "inner dimensions differ");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

Vector multiply(const Matrix& a, std::span<const double> v)
{
    if (a.cols() != v.size()) {
        throw Error(ErrorCode::length_mismatch, "matrix columns != vector length");
    }
    Vector out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            acc += a(i, j) * v[j];
        }
        out[i] = acc;
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw Error(ErrorCode::length_mismatch, "dot product of unequal lengths");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double squared_norm(std::span<const double> v)
{
    double acc = 0.0;
    for (double x : v) {
        acc += x * x;
    }
    return acc;
}

double frobenius_norm(const Matrix& a)
{
    return std::sqrt(squared_norm(a.entries()));
}

void require_finite(std::span<const double> v, const char* what)
{
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw Error(ErrorCode::invalid_argument,
                        std::string(what) + " entry " + std::to_string(i) + " is not finite");
        }
    }
}

HouseholderQr::HouseholderQr(const Matrix& a, bool scale_columns)
    : rows_(a.rows()), cols_(a.cols()), packed_(a), reflector_head_(a.cols(), 0.0), scale_(a.cols(), 1.0)
{
    if (rows_ < cols_) {
        throw Error(ErrorCode::bad_shape, "QR needs rows >= cols (" + std::to_string(rows_) + " < " +
                                              std::to_string(cols_) + ")");
    }
    if (scale_columns) {
        for (std::size_t c = 0; c < cols_; ++c) {
            double norm_sq = 0.0;
            for (std::size_t r = 0; r < rows_; ++r) {
                norm_sq += packed_(r, c) * packed_(r, c);
            }
            const double norm = std::sqrt(norm_sq);
            if (norm > 0.0) {
                scale_[c] = norm;
                for (std::size_t r = 0; r < rows_; ++r) {
                    packed_(r, c) /= norm;
                }
            }
        }
    }
    const double tolerance = kRankTolerance * packed_.max_abs() * static_cast<double>(rows_);

    std::vector<double> v(rows_);
    for (std::size_t j = 0; j < cols_; ++j) {
        double norm_sq = 0.0;
        for (std::size_t i = j; i < rows_; ++i) {
            norm_sq += packed_(i, j) * packed_(i, j);
        }
        const double norm = std::sqrt(norm_sq);
        if (norm == 0.0) {
            // Zero column below the diagonal: identity reflector, zero pivot.
            reflector_head_[j] = 0.0;
            for (std::size_t i = j + 1; i < rows_; ++i) {
                packed_(i, j) = 0.0;
            }
            continue;
        }
        const double x0 = packed_(j, j);
        const double alpha = x0 >= 0.0 ? -norm : norm;
        v[j] = x0 - alpha;
        for (std::size_t i = j + 1; i < rows_; ++i) {
            v[i] = packed_(i, j);
        }
        const double v_norm = std::sqrt(2.0 * norm * (norm + std::abs(x0)));
        for (std::size_t i = j; i < rows_; ++i) {
            v[i] /= v_norm;
        }
        for (std::size_t k = j + 1; k < cols_; ++k) {
            double s = 0.0;
            for (std::size_t i = j; i < rows_; ++i) {
                s += v[i] * packed_(i, k);
            }
            s *= 2.0;
            for (std::size_t i = j; i < rows_; ++i) {
                packed_(i, k) -= s * v[i];
            }
        }
        packed_(j, j) = alpha;
        reflector_head_[j] = v[j];
        for (std::size_t i = j + 1; i < rows_; ++i) {
            packed_(i, j) = v[i];
        }
    }

    leading_rank_ = cols_;
    for (std::size_t k = 0; k < cols_; ++k) {
        if (!(std::abs(packed_(k, k)) >= tolerance) || tolerance == 0.0) {
            leading_rank_ = k;
            break;
        }
    }
}

void HouseholderQr::apply_qt(std::span<double> v, std::size_t m) const
{
    if (v.size() != rows_) {
        throw Error(ErrorCode::length_mismatch, "vector length != QR rows");
    }
    m = std::min(m, cols_);
    for (std::size_t j = 0; j < m; ++j) {
        double s = reflector_head_[j] * v[j];
        for (std::size_t i = j + 1; i < rows_; ++i) {
            s += packed_(i, j) * v[i];
        }
        s *= 2.0;
        v[j] -= s * reflector_head_[j];
        for (std::size_t i = j + 1; i < rows_; ++i) {
            v[i] -= s * packed_(i, j);
        }
    }
}

void HouseholderQr::apply_q(std::span<double> v, std::size_t m) const
{
    if (v.size() != rows_) {
        throw Error(ErrorCode::length_mismatch, "vector length != QR rows");
    }
    m = std::min(m, cols_);
    for (std::size_t jj = m; jj-- > 0;) {
        double s = reflector_head_[jj] * v[jj];
        for (std::size_t i = jj + 1; i < rows_; ++i) {
            s += packed_(i, jj) * v[i];
        }
        s *= 2.0;
        v[jj] -= s * reflector_head_[jj];
        for (std::size_t i = jj + 1; i < rows_; ++i) {
            v[i] -= s * packed_(i, jj);
        }
    }
}

Vector HouseholderQr::solve_from_qty(std::span<const double> qty, std::size_t m) const
{
    if (m == 0 || m > cols_) {
        throw Error(ErrorCode::bad_shape, "order " + std::to_string(m) + " outside factored columns");
    }
    if (m > leading_rank_) {
        throw Error(ErrorCode::rank_deficient,
                    "column " + std::to_string(leading_rank_ + 1) + " is numerically dependent on earlier columns");
    }
    if (qty.size() < m) {
        throw Error(ErrorCode::length_mismatch, "Q^T y shorter than order");
    }
    Vector theta(m);
    for (std::size_t ii = m; ii-- > 0;) {
        double acc = qty[ii];
        for (std::size_t k = ii + 1; k < m; ++k) {
            acc -= packed_(ii, k) * theta[k];
        }
        theta[ii] = acc / packed_(ii, ii);
    }
    for (std::size_t k = 0; k < m; ++k) {
        theta[k] /= scale_[k];
    }
    return theta;
}

Vector HouseholderQr::solve(std::span<const double> y, std::size_t m) const
{
    Vector qty(y.begin(), y.end());
    apply_qt(qty, m);
    return solve_from_qty(qty, m);
}

Matrix HouseholderQr::thin_q(std::size_t m) const
{
    m = std::min(m, cols_);
    Matrix q(rows_, m);
    Vector e(rows_);
    for (std::size_t c = 0; c < m; ++c) {
        std::fill(e.begin(), e.end(), 0.0);
        e[c] = 1.0;
        apply_q(e, m);
        for (std::size_t r = 0; r < rows_; ++r) {
            q(r, c) = e[r];
        }
    }
    return q;
}

Matrix HouseholderQr::r(std::size_t m) const
{
    m = std::min(m, cols_);
    Matrix out(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            out(i, j) = packed_(i, j) * scale_[j];
        }
    }
    return out;
}

QrFactors qr_decompose(const Matrix& a)
{
    HouseholderQr qr(a, false);
    if (qr.leading_rank() < a.cols()) {
        throw Error(ErrorCode::rank_deficient, "pivot " + std::to_string(qr.leading_rank() + 1) +
                                                   " below 1e-12 * max|a| * rows");
    }
    return QrFactors{qr.thin_q(a.cols()), qr.r(a.cols())};
}

Vector solve_least_squares(const Matrix& a, std::span<const double> y)
{
    if (a.rows() != y.size()) {
        throw Error(ErrorCode::length_mismatch, "design rows != target length");
    }
    require_finite(y, "target");
    HouseholderQr qr(a, true);
    return qr.solve(y, a.cols());
}

ProjectionSplit residual_quadratic_form(const Matrix& a, std::span<const double> v)
{
    if (a.rows() != v.size()) {
        throw Error(ErrorCode::length_mismatch, "design rows != vector length");
    }
    require_finite(v, "vector");
    HouseholderQr qr(a, true);
    if (qr.leading_rank() < a.cols()) {
        throw Error(ErrorCode::rank_deficient, "design matrix is not full column rank");
    }
    Vector z(v.begin(), v.end());
    qr.apply_qt(z, a.cols());
    const std::span<const double> zs(z);
    return ProjectionSplit{squared_norm(zs.first(a.cols())), squared_norm(zs.subspan(a.cols()))};
}

} // namespace coac
