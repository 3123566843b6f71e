#ifndef EXACTNMF_MATRIX_HPP
#define EXACTNMF_MATRIX_HPP
//------------------------------------------------------------------------------
// Dense row-major matrices over double, plus the tolerance type used by every
// approximate comparison in this library.
//------------------------------------------------------------------------------
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace exactnmf {

using Vec = std::vector<double>;

//------------------------------------------------------------------------------
// Errors
//------------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class RankMismatch : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

//------------------------------------------------------------------------------
// Tolerance
//------------------------------------------------------------------------------

// Hybrid absolute/relative threshold: comparisons against a quantity of
// magnitude `scale` use eps * max(1, scale).
struct Tolerance {
    double eps = 1e-9;

    double threshold(double scale) const {
        return eps * std::max(1.0, std::abs(scale));
    }
    bool is_zero(double value, double scale) const {
        return std::abs(value) <= threshold(scale);
    }
};

//------------------------------------------------------------------------------
// Vector helpers
//------------------------------------------------------------------------------

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw InvalidArgument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline bool all_finite(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

//------------------------------------------------------------------------------
// Matrix
//------------------------------------------------------------------------------

// Row-major dense matrix. Degenerate shapes (0 x n, m x 0) and non-finite
// entries are rejected at construction.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
        check_shape();
    }

    Matrix(std::size_t rows, std::size_t cols, Vec entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        check_shape();
        if (data_.size() != rows_ * cols_)
            throw InvalidArgument("Matrix: entry count does not match shape");
        check_finite();
    }

    Matrix(std::initializer_list<std::initializer_list<double>> rows)
        : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
        check_shape();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw InvalidArgument("Matrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
        check_finite();
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    const Vec& entries() const { return data_; }

    bool operator==(const Matrix& o) const = default;

    Vec row(std::size_t i) const {
        return Vec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                   data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
    }

    Vec col(std::size_t j) const {
        Vec c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_row(std::size_t i, const Vec& r) {
        if (r.size() != cols_)
            throw InvalidArgument("set_row: size mismatch");
        std::copy(r.begin(), r.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
    }

    // Largest absolute entry; the scale used in tolerance comparisons.
    double max_abs() const { return exactnmf::max_abs(data_); }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_)
            throw InvalidArgument("Matrix multiply: inner dimension mismatch");
        Matrix out(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t l = 0; l < cols_; ++l) {
                const double a = (*this)(i, l);
                if (a == 0.0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    out(i, j) += a * o(l, j);
            }
        }
        return out;
    }

    Vec operator*(const Vec& v) const {
        if (v.size() != cols_)
            throw InvalidArgument("Matrix-vector multiply: size mismatch");
        Vec out(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
        return out;
    }

    Matrix operator-(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw InvalidArgument("Matrix subtract: shape mismatch");
        Matrix out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - o.data_[i];
        return out;
    }

    double min_entry() const { return *std::min_element(data_.begin(), data_.end()); }

private:
    void check_shape() const {
        if (rows_ == 0 || cols_ == 0)
            throw InvalidArgument("Matrix: degenerate shape rejected");
    }
    void check_finite() const {
        if (!all_finite(data_))
            throw InvalidArgument("Matrix: non-finite entry");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

} // namespace exactnmf

#endif
