#ifndef EXACTNMF_LINALG_HPP
#define EXACTNMF_LINALG_HPP
//------------------------------------------------------------------------------
// Tolerance-aware Gaussian elimination: rank, rank factorization, inversion,
// linear solves, and completion of a vector to a nonsingular basis.
//------------------------------------------------------------------------------
#include <cstddef>
#include <numeric>
#include <vector>

#include "exactnmf/matrix.hpp"

namespace exactnmf {

// Row-echelon decomposition with partial pivoting. Rows of `upper` are the
// echelon rows; `lower` holds the unit lower-triangular multipliers in the
// pivoted row order, so that input.row(perm[i]) = sum_j lower(i,j)*upper.row(j).
struct Echelon {
    Matrix lower;                        // m x m, unit lower triangular
    Matrix upper;                        // m x n, echelon form
    std::vector<std::size_t> perm;       // upper row i came from input row perm[i]
    std::vector<std::size_t> pivot_cols; // one per pivot, strictly increasing
};

inline Echelon row_echelon(const Matrix& a, Tolerance tol) {
    const std::size_t m = a.rows(), n = a.cols();
    Echelon e{Matrix::identity(m), a, std::vector<std::size_t>(m), {}};
    std::iota(e.perm.begin(), e.perm.end(), std::size_t{0});
    const double zero_cut = tol.threshold(a.max_abs());

    std::size_t r = 0; // next pivot row
    for (std::size_t c = 0; c < n && r < m; ++c) {
        std::size_t best = r;
        for (std::size_t i = r + 1; i < m; ++i)
            if (std::abs(e.upper(i, c)) > std::abs(e.upper(best, c))) best = i;
        if (std::abs(e.upper(best, c)) <= zero_cut) {
            for (std::size_t i = r; i < m; ++i) e.upper(i, c) = 0.0;
            continue;
        }
        if (best != r) {
            for (std::size_t j = 0; j < n; ++j) std::swap(e.upper(r, j), e.upper(best, j));
            for (std::size_t j = 0; j < r; ++j) std::swap(e.lower(r, j), e.lower(best, j));
            std::swap(e.perm[r], e.perm[best]);
        }
        for (std::size_t i = r + 1; i < m; ++i) {
            const double mult = e.upper(i, c) / e.upper(r, c);
            e.lower(i, r) = mult;
            e.upper(i, c) = 0.0;
            if (mult != 0.0)
                for (std::size_t j = c + 1; j < n; ++j) e.upper(i, j) -= mult * e.upper(r, j);
        }
        e.pivot_cols.push_back(c);
        ++r;
    }
    return e;
}

inline std::size_t rank(const Matrix& a, Tolerance tol = {}) {
    return row_echelon(a, tol).pivot_cols.size();
}

struct RankFactorization {
    Matrix w0; // m x k, full column rank
    Matrix h0; // k x n, full row rank
};

// Factor a = w0 * h0 with k = rank(a): w0 collects the elimination
// multipliers of the pivot rows, h0 the echelon rows.
inline RankFactorization rank_factor(const Matrix& a, std::size_t k, Tolerance tol = {}) {
    if (k < 1)
        throw InvalidArgument("rank_factor: k must be at least 1");
    Echelon e = row_echelon(a, tol);
    if (e.pivot_cols.size() != k)
        throw RankMismatch("rank_factor: rank(A) = " + std::to_string(e.pivot_cols.size()) +
                           ", expected " + std::to_string(k));
    Matrix w0(a.rows(), k);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) w0(e.perm[i], j) = e.lower(i, j);
    Matrix h0(k, a.cols());
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) h0(i, j) = e.upper(i, j);
    return {std::move(w0), std::move(h0)};
}

// Gauss-Jordan with partial pivoting on [q | rhs]; shared by invert and solve.
namespace detail {
inline void gauss_jordan(Matrix& q, Matrix& rhs, Tolerance tol) {
    const std::size_t n = q.rows();
    const double zero_cut = tol.threshold(q.max_abs());
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::abs(q(i, c)) > std::abs(q(best, c))) best = i;
        if (std::abs(q(best, c)) <= zero_cut)
            throw SingularMatrix("singular matrix (pivot column " + std::to_string(c) + ")");
        if (best != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(q(c, j), q(best, j));
            for (std::size_t j = 0; j < rhs.cols(); ++j) std::swap(rhs(c, j), rhs(best, j));
        }
        const double inv_p = 1.0 / q(c, c);
        for (std::size_t j = 0; j < n; ++j) q(c, j) *= inv_p;
        for (std::size_t j = 0; j < rhs.cols(); ++j) rhs(c, j) *= inv_p;
        q(c, c) = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c) continue;
            const double f = q(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) q(i, j) -= f * q(c, j);
            for (std::size_t j = 0; j < rhs.cols(); ++j) rhs(i, j) -= f * rhs(c, j);
            q(i, c) = 0.0;
        }
    }
}
} // namespace detail

inline Matrix invert(const Matrix& q, Tolerance tol = {}) {
    if (q.rows() != q.cols())
        throw InvalidArgument("invert: matrix not square");
    Matrix work = q;
    Matrix result = Matrix::identity(q.rows());
    detail::gauss_jordan(work, result, tol);
    return result;
}

inline Vec solve_linear(const Matrix& m, const Vec& rhs, Tolerance tol = {}) {
    if (m.rows() != m.cols())
        throw InvalidArgument("solve_linear: matrix not square");
    if (rhs.size() != m.rows())
        throw InvalidArgument("solve_linear: rhs size mismatch");
    Matrix work = m;
    Matrix r(m.rows(), 1, rhs);
    detail::gauss_jordan(work, r, tol);
    return r.col(0);
}

inline double determinant(const Matrix& q, Tolerance tol = {}) {
    if (q.rows() != q.cols())
        throw InvalidArgument("determinant: matrix not square");
    Echelon e = row_echelon(q, tol);
    if (e.pivot_cols.size() != q.rows()) return 0.0;
    double det = 1.0;
    for (std::size_t i = 0; i < q.rows(); ++i) det *= e.upper(i, i);
    // parity of the row permutation
    std::vector<std::size_t> p = e.perm;
    for (std::size_t i = 0; i < p.size(); ++i)
        while (p[i] != i) {
            std::swap(p[i], p[p[i]]);
            det = -det;
        }
    return det;
}

// Nonsingular k x k matrix whose last column is v; the remaining columns are
// the standard basis vectors other than the pivot position of v.
inline Matrix complete_to_basis(const Vec& v, Tolerance tol = {}) {
    const std::size_t k = v.size();
    if (k == 0 || !all_finite(v))
        throw InvalidArgument("complete_to_basis: bad vector");
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < k; ++i)
        if (std::abs(v[i]) > std::abs(v[pivot])) pivot = i;
    if (tol.is_zero(v[pivot], max_abs(v)))
        throw ZeroVector("complete_to_basis: zero vector");
    Matrix b(k, k);
    std::size_t c = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (i == pivot) continue;
        b(i, c++) = 1.0;
    }
    for (std::size_t i = 0; i < k; ++i) b(i, k - 1) = v[i];
    return b;
}

} // namespace exactnmf

#endif
