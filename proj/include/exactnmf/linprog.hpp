#ifndef EXACTNMF_LINPROG_HPP
#define EXACTNMF_LINPROG_HPP
//------------------------------------------------------------------------------
// Self-contained two-phase primal simplex for small dense LPs:
//
//     minimize c*x   subject to   G*x >= h,   E*x = f,
//     x[j] >= 0 where marked, free otherwise.
//
// Free variables are split into differences of nonnegatives, inequalities get
// surplus variables, and phase 1 minimizes the sum of one artificial per row.
// Rows are equilibrated on load. Entering columns are picked by most-negative
// reduced cost with a Bland's-rule fallback against degenerate cycling, and
// the tableau is recomputed from the loaded data both periodically and before
// any unboundedness verdict is believed.
//------------------------------------------------------------------------------
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "exactnmf/geometry.hpp"
#include "exactnmf/matrix.hpp"

namespace exactnmf {

class IterationLimit : public Error {
public:
    using Error::Error;
};

// The tableau degraded past the point of trust (e.g. phase 1 claims an
// unbounded artificial sum). Callers treat this like an exhausted solve.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

// Constraint block; rows may be empty.
struct LinearConstraints {
    std::vector<Vec> rows;
    Vec rhs;

    void add(Vec row, double b) {
        rows.push_back(std::move(row));
        rhs.push_back(b);
    }
    std::size_t size() const { return rows.size(); }
};

struct LpProblem {
    std::size_t num_vars = 0;
    Vec objective;            // minimized
    LinearConstraints ge;     // G*x >= h
    LinearConstraints eq;     // E*x = f
    std::vector<bool> nonneg; // per-variable x >= 0 marks; empty means all free
};

inline LpProblem lp_from_polyhedron(const Polyhedron& p, Vec objective) {
    LpProblem lp;
    lp.num_vars = p.dim();
    lp.objective = std::move(objective);
    for (std::size_t i = 0; i < p.facets(); ++i) lp.ge.add(p.a.row(i), p.b[i]);
    return lp;
}

struct LpOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-7; // admissible pivot elements, relative to the column's largest entry
    std::size_t max_pivots = 10000;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpOutcome {
    LpStatus status = LpStatus::infeasible;
    Vec x;                      // optimal point when status == optimal
    double value = 0.0;         // objective at x
    Vec certificate;            // unbounded: improving ray; infeasible: row multipliers
    double infeasibility = 0.0; // infeasible: smallest attainable total violation
    std::size_t pivots = 0;
};

namespace detail {

// Dense tableau, one row per constraint plus an objective row kept separately.
// The as-loaded body is retained so the representation can be recomputed from
// scratch for the current basis when roundoff accumulates.
struct Tableau {
    std::size_t nrows = 0, ncols = 0; // ncols excludes rhs
    std::vector<double> body;         // nrows x (ncols+1), row-major, rhs last
    std::vector<double> obj;          // ncols+1 reduced-cost row, rhs = -objective value
    std::vector<std::size_t> basis;   // column basic in each row
    std::vector<double> original;     // body as loaded, before any pivot
    std::vector<double> cost;         // per-column cost of the current phase

    double& at(std::size_t i, std::size_t j) { return body[i * (ncols + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return body[i * (ncols + 1) + j]; }
    double& rhs(std::size_t i) { return body[i * (ncols + 1) + ncols]; }
    double rhs(std::size_t i) const { return body[i * (ncols + 1) + ncols]; }

    void pivot(std::size_t pr, std::size_t pc) {
        const std::size_t stride = ncols + 1;
        double* prow = body.data() + pr * stride;
        const double inv = 1.0 / prow[pc];
        for (std::size_t j = 0; j <= ncols; ++j) prow[j] *= inv;
        prow[pc] = 1.0;
        for (std::size_t i = 0; i < nrows; ++i) {
            if (i == pr) continue;
            double* row = body.data() + i * stride;
            const double f = row[pc];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= ncols; ++j) row[j] -= f * prow[j];
            row[pc] = 0.0;
        }
        const double f = obj[pc];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= ncols; ++j) obj[j] -= f * prow[j];
            obj[pc] = 0.0;
        }
        basis[pr] = pc;
    }

    // Rebuild the reduced-cost row for the current phase's costs against the
    // current body (used after loading and after a refresh).
    void price() {
        for (std::size_t j = 0; j <= ncols; ++j) obj[j] = j < ncols ? cost[j] : 0.0;
        for (std::size_t i = 0; i < nrows; ++i) {
            const double cb = cost[basis[i]];
            if (cb == 0.0) continue;
            const double* row = body.data() + i * (ncols + 1);
            for (std::size_t j = 0; j <= ncols; ++j) obj[j] -= cb * row[j];
        }
        for (std::size_t i = 0; i < nrows; ++i) obj[basis[i]] = 0.0;
    }

    // Recompute body = B^{-1} * original for the current basis by Gauss-Jordan
    // with partial pivoting, then re-price. Throws when the basis matrix has
    // degraded to (numerical) singularity.
    void refresh() {
        const std::size_t stride = ncols + 1;
        std::vector<double> b(nrows * nrows);
        for (std::size_t i = 0; i < nrows; ++i)
            for (std::size_t r = 0; r < nrows; ++r) b[i * nrows + r] = original[i * stride + basis[r]];
        body = original;
        for (std::size_t c = 0; c < nrows; ++c) {
            std::size_t best = c;
            for (std::size_t i = c + 1; i < nrows; ++i)
                if (std::abs(b[i * nrows + c]) > std::abs(b[best * nrows + c])) best = i;
            if (std::abs(b[best * nrows + c]) < 1e-12)
                throw NumericalFailure("lp_solve: basis matrix became singular");
            if (best != c) {
                for (std::size_t j = 0; j < nrows; ++j) std::swap(b[c * nrows + j], b[best * nrows + j]);
                for (std::size_t j = 0; j <= ncols; ++j)
                    std::swap(body[c * stride + j], body[best * stride + j]);
            }
            const double inv = 1.0 / b[c * nrows + c];
            for (std::size_t j = 0; j < nrows; ++j) b[c * nrows + j] *= inv;
            for (std::size_t j = 0; j <= ncols; ++j) body[c * stride + j] *= inv;
            for (std::size_t i = 0; i < nrows; ++i) {
                if (i == c) continue;
                const double f = b[i * nrows + c];
                if (f == 0.0) continue;
                for (std::size_t j = 0; j < nrows; ++j) b[i * nrows + j] -= f * b[c * nrows + j];
                for (std::size_t j = 0; j <= ncols; ++j) body[i * stride + j] -= f * body[c * stride + j];
            }
        }
        // basis columns are identity columns by construction
        for (std::size_t r = 0; r < nrows; ++r)
            for (std::size_t i = 0; i < nrows; ++i) at(i, basis[r]) = i == r ? 1.0 : 0.0;
        price();
    }
};

enum class SimplexStop { optimal, unbounded };

// Entering: most-negative reduced cost, falling back to Bland's lowest-index
// rule (which cannot cycle) after a long streak of degenerate pivots.
// Leaving: minimum ratio; among near-ties prefer the largest pivot element
// for stability, or the lowest basic index while in Bland mode. When a
// negative column has no admissible pivot element the tableau is recomputed
// from the original data before unboundedness is believed; the representation
// is also refreshed periodically.
inline SimplexStop run_simplex(Tableau& t, std::size_t allowed, const LpOptions& opt,
                               std::size_t& pivots, std::size_t* unbounded_col = nullptr) {
    std::size_t degenerate_streak = 0;
    std::size_t since_refresh = 0;
    int refreshes_left = 16;
    double last_value = -t.obj[t.ncols];
    std::vector<bool> converged(allowed, false);
    for (;;) {
        const bool bland = degenerate_streak >= 50;
        std::size_t enter = allowed;
        if (bland) {
            for (std::size_t j = 0; j < allowed; ++j)
                if (!converged[j] && t.obj[j] < -opt.optimality_tol) {
                    enter = j;
                    break;
                }
        } else {
            double best = -opt.optimality_tol;
            for (std::size_t j = 0; j < allowed; ++j)
                if (!converged[j] && t.obj[j] < best) {
                    best = t.obj[j];
                    enter = j;
                }
        }
        if (enter == allowed) return SimplexStop::optimal;

        double colmax = 0.0;
        for (std::size_t i = 0; i < t.nrows; ++i) colmax = std::max(colmax, std::abs(t.at(i, enter)));
        const double pivot_cut = std::max(opt.pivot_tol * colmax, 1e-10);

        std::size_t leave = t.nrows;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.nrows; ++i) {
            const double a = t.at(i, enter);
            if (a <= pivot_cut) continue;
            const double ratio = t.rhs(i) / a;
            if (leave == t.nrows) {
                best_ratio = ratio;
                leave = i;
                continue;
            }
            const double band = 1e-12 * (1.0 + std::abs(best_ratio));
            if (ratio < best_ratio - band) {
                best_ratio = ratio;
                leave = i;
            } else if (ratio <= best_ratio + band) {
                const bool better = bland ? t.basis[i] < t.basis[leave]
                                          : t.at(i, enter) > t.at(leave, enter);
                if (better) {
                    best_ratio = std::min(best_ratio, ratio);
                    leave = i;
                }
            }
        }
        if (leave == t.nrows) {
            // no blocking row: recompute the representation before believing
            // it, then treat a marginal column as converged and a decisive one
            // as a genuine ray
            if (since_refresh > 0 && refreshes_left > 0) {
                --refreshes_left;
                t.refresh();
                since_refresh = 0;
                converged.assign(allowed, false);
                last_value = -t.obj[t.ncols];
                continue;
            }
            if (t.obj[enter] < -std::max(1e-6, 100.0 * opt.optimality_tol)) {
                if (unbounded_col) *unbounded_col = enter;
                return SimplexStop::unbounded;
            }
            converged[enter] = true;
            continue;
        }
        if (++pivots > opt.max_pivots)
            throw IterationLimit("lp_solve: pivot limit exceeded");
        t.pivot(leave, enter);
        converged.assign(allowed, false);
        if (++since_refresh >= 500) {
            t.refresh();
            since_refresh = 0;
            last_value = -t.obj[t.ncols];
        }
        const double value = -t.obj[t.ncols];
        if (value < last_value - 1e-12 * (1.0 + std::abs(last_value))) {
            degenerate_streak = 0;
            last_value = value;
        } else {
            ++degenerate_streak;
        }
    }
}

} // namespace detail

inline LpOutcome lp_solve(const LpProblem& p, const LpOptions& opt = {}) {
    const std::size_t d = p.num_vars;
    if (p.objective.size() != d)
        throw InvalidArgument("lp_solve: objective size mismatch");
    if (!p.nonneg.empty() && p.nonneg.size() != d)
        throw InvalidArgument("lp_solve: nonneg mask size mismatch");
    for (const Vec& r : p.ge.rows)
        if (r.size() != d) throw InvalidArgument("lp_solve: ge row size mismatch");
    for (const Vec& r : p.eq.rows)
        if (r.size() != d) throw InvalidArgument("lp_solve: eq row size mismatch");
    if (p.ge.rhs.size() != p.ge.rows.size() || p.eq.rhs.size() != p.eq.rows.size())
        throw InvalidArgument("lp_solve: rhs size mismatch");

    // Column layout: nonnegative variables get one column, free variables a
    // plus/minus pair, then one surplus per >= row, then one artificial per row.
    std::vector<std::size_t> pos_col(d), neg_col(d, SIZE_MAX);
    std::size_t next = 0;
    for (std::size_t j = 0; j < d; ++j) {
        pos_col[j] = next++;
        if (p.nonneg.empty() || !p.nonneg[j]) neg_col[j] = next++;
    }
    const std::size_t n_ge = p.ge.size(), n_eq = p.eq.size();
    const std::size_t nrows = n_ge + n_eq;
    const std::size_t var_cols = next, n_struct = var_cols + n_ge, ncols = n_struct + nrows;

    detail::Tableau t;
    t.nrows = nrows;
    t.ncols = ncols;
    t.body.assign(nrows * (ncols + 1), 0.0);
    t.obj.assign(ncols + 1, 0.0);
    t.basis.resize(nrows);

    // Row r: each constraint is equilibrated to unit max coefficient and sign
    // flipped so the right-hand side is nonnegative, then gets one artificial
    // with coefficient 1. Surplus columns (for >= rows) travel with the row.
    Vec row_sign(nrows, 1.0);
    auto load_row = [&](std::size_t r, const Vec& coeffs, double b, bool with_surplus, std::size_t surplus_idx) {
        double scale = 0.0;
        for (double c : coeffs) scale = std::max(scale, std::abs(c));
        if (scale == 0.0) scale = 1.0;
        const double sign = (b < 0.0 ? -1.0 : 1.0) / scale;
        row_sign[r] = sign;
        for (std::size_t j = 0; j < d; ++j) {
            t.at(r, pos_col[j]) = sign * coeffs[j];
            if (neg_col[j] != SIZE_MAX) t.at(r, neg_col[j]) = -sign * coeffs[j];
        }
        if (with_surplus) t.at(r, var_cols + surplus_idx) = -sign;
        t.at(r, n_struct + r) = 1.0;
        t.rhs(r) = sign * b;
        t.basis[r] = n_struct + r;
    };
    for (std::size_t i = 0; i < n_ge; ++i) load_row(i, p.ge.rows[i], p.ge.rhs[i], true, i);
    for (std::size_t i = 0; i < n_eq; ++i) load_row(n_ge + i, p.eq.rows[i], p.eq.rhs[i], false, 0);
    t.original = t.body;

    // Phase 1: minimize the artificial sum.
    t.cost.assign(ncols, 0.0);
    for (std::size_t j = n_struct; j < ncols; ++j) t.cost[j] = 1.0;
    t.price();

    double rhs_scale = 0.0;
    for (std::size_t i = 0; i < nrows; ++i) rhs_scale = std::max(rhs_scale, t.rhs(i));

    LpOutcome out;
    // artificials never re-enter; a sum of artificials cannot be unbounded
    if (detail::run_simplex(t, n_struct, opt, out.pivots) != detail::SimplexStop::optimal)
        throw NumericalFailure("lp_solve: phase 1 lost boundedness");
    double phase1 = -t.obj[ncols];
    if (phase1 > opt.feasibility_tol * std::max(1.0, rhs_scale) * static_cast<double>(std::max<std::size_t>(nrows, 1))) {
        out.status = LpStatus::infeasible;
        out.infeasibility = phase1;
        // Row multipliers, in ge-then-eq order, combining the constraints into
        // a contradiction: nonnegative on the ge rows, zero net coefficient on
        // every variable, positive net right-hand side. Read off the phase-1
        // duals from the artificial columns and undo the sign normalization.
        out.certificate.assign(nrows, 0.0);
        for (std::size_t i = 0; i < nrows; ++i)
            out.certificate[i] = row_sign[i] * (1.0 - t.obj[n_struct + i]);
        return out;
    }

    // Drive leftover artificials out of the basis; rows that cannot pivot are
    // redundant and harmless (they stay at zero).
    for (std::size_t i = 0; i < nrows; ++i) {
        if (t.basis[i] < n_struct) continue;
        double rowmax = 0.0;
        for (std::size_t j = 0; j < n_struct; ++j) rowmax = std::max(rowmax, std::abs(t.at(i, j)));
        const double cut = std::max(opt.pivot_tol * rowmax, 1e-10);
        for (std::size_t j = 0; j < n_struct; ++j) {
            if (std::abs(t.at(i, j)) > cut) {
                ++out.pivots;
                t.pivot(i, j);
                break;
            }
        }
    }

    // Phase 2: reprice for the real objective.
    t.cost.assign(ncols, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        t.cost[pos_col[j]] = p.objective[j];
        if (neg_col[j] != SIZE_MAX) t.cost[neg_col[j]] = -p.objective[j];
    }
    t.price();

    std::size_t bad_col = 0;
    if (detail::run_simplex(t, n_struct, opt, out.pivots, &bad_col) == detail::SimplexStop::unbounded) {
        out.status = LpStatus::unbounded;
        // Ray: entering variable moves +1, basic variables move by minus the
        // tableau column; collapse the columns back to the original variables.
        Vec ray_full(n_struct, 0.0);
        ray_full[bad_col] = 1.0;
        for (std::size_t i = 0; i < nrows; ++i)
            if (t.basis[i] < n_struct) ray_full[t.basis[i]] = -t.at(i, bad_col);
        out.certificate.assign(d, 0.0);
        for (std::size_t j = 0; j < d; ++j)
            out.certificate[j] =
                ray_full[pos_col[j]] - (neg_col[j] != SIZE_MAX ? ray_full[neg_col[j]] : 0.0);
        return out;
    }

    out.status = LpStatus::optimal;
    Vec full(n_struct, 0.0);
    for (std::size_t i = 0; i < nrows; ++i)
        if (t.basis[i] < n_struct) full[t.basis[i]] = t.rhs(i);
    out.x.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
        out.x[j] = full[pos_col[j]] - (neg_col[j] != SIZE_MAX ? full[neg_col[j]] : 0.0);
    out.value = dot(p.objective, out.x);
    return out;
}

} // namespace exactnmf

#endif
