#ifndef EXACTNMF_TEST_ORACLES_HPP
#define EXACTNMF_TEST_ORACLES_HPP
// Independent oracles used by the tests: brute-force vertex enumeration for
// small LPs, and conversion of a simplex to its halfspace form. These stay
// deliberately separate from the solver paths they check.
#include <optional>
#include <vector>

#include "exactnmf/geometry.hpp"
#include "exactnmf/linalg.hpp"
#include "exactnmf/linprog.hpp"

namespace oracles {

using namespace exactnmf;

// Best objective value over all basic feasible points of an LP, found by
// enumerating every d-subset of constraints as a candidate active set.
// Only meaningful when the feasible region is bounded (callers arrange that).
inline std::optional<double> best_vertex_value(const LpProblem& p, double tol = 1e-7) {
    const std::size_t d = p.num_vars;
    std::vector<Vec> rows = p.ge.rows;
    Vec rhs = p.ge.rhs;
    for (std::size_t i = 0; i < p.eq.size(); ++i) {
        rows.push_back(p.eq.rows[i]);
        rhs.push_back(p.eq.rhs[i]);
    }
    const std::size_t n = rows.size();
    if (n < d) return std::nullopt;

    std::optional<double> best;
    std::vector<std::size_t> pick(d);
    // iterate over all d-combinations of row indices
    for (std::size_t i = 0; i < d; ++i) pick[i] = i;
    for (;;) {
        Matrix m(d, d);
        Vec b(d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) m(i, j) = rows[pick[i]][j];
            b[i] = rhs[pick[i]];
        }
        try {
            Vec x = solve_linear(m, b);
            bool feasible = true;
            for (std::size_t i = 0; i < p.ge.size() && feasible; ++i)
                if (dot(p.ge.rows[i], x) < p.ge.rhs[i] - tol) feasible = false;
            for (std::size_t i = 0; i < p.eq.size() && feasible; ++i)
                if (std::abs(dot(p.eq.rows[i], x) - p.eq.rhs[i]) > tol) feasible = false;
            if (feasible) {
                const double v = dot(p.objective, x);
                if (!best || v < *best) best = v;
            }
        } catch (const SingularMatrix&) {
        }
        // next combination
        std::size_t i = d;
        while (i > 0 && pick[i - 1] == n - d + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < d; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

// One nonzero kernel vector of a matrix with exactly one free column.
inline Vec kernel_vector(const Matrix& m, Tolerance tol = {}) {
    Echelon e = row_echelon(m, tol);
    const std::size_t n = m.cols();
    std::vector<bool> is_pivot(n, false);
    for (std::size_t c : e.pivot_cols) is_pivot[c] = true;
    std::size_t free_col = n;
    for (std::size_t c = 0; c < n; ++c)
        if (!is_pivot[c]) {
            free_col = c;
            break;
        }
    if (free_col == n) throw std::runtime_error("kernel_vector: matrix has full column rank");
    Vec x(n, 0.0);
    x[free_col] = 1.0;
    for (std::size_t r = e.pivot_cols.size(); r-- > 0;) {
        const std::size_t pc = e.pivot_cols[r];
        double s = 0.0;
        for (std::size_t j = pc + 1; j < n; ++j) s += e.upper(r, j) * x[j];
        x[pc] = -s / e.upper(r, pc);
    }
    return x;
}

// Halfspace form of a nondegenerate simplex: one facet per omitted vertex,
// oriented so the omitted vertex is strictly inside.
inline Polyhedron simplex_to_halfspaces(const Simplex& t) {
    const std::size_t k = t.k(), d = k - 1;
    Matrix a(k, d);
    Vec b(k);
    for (std::size_t skip = 0; skip < k; ++skip) {
        Matrix sys(d, d + 1); // rows: [v_j^T, -1] over the kept vertices
        std::size_t r = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == skip) continue;
            for (std::size_t c = 0; c < d; ++c) sys(r, c) = t.vertices[j][c];
            sys(r, d) = -1.0;
            ++r;
        }
        Vec nc = kernel_vector(sys); // (normal, offset)
        double side = -nc[d];
        for (std::size_t c = 0; c < d; ++c) side += nc[c] * t.vertices[skip][c];
        const double flip = side < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < d; ++c) a(skip, c) = flip * nc[c];
        b[skip] = flip * nc[d];
    }
    return {a, b};
}

} // namespace oracles

#endif
