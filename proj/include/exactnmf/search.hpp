#ifndef EXACTNMF_SEARCH_HPP
#define EXACTNMF_SEARCH_HPP
//------------------------------------------------------------------------------
// Solvers for the nested simplex problem: the 1-dimensional interval case, the
// feasible region of a single vertex with the others held fixed, and the
// round-robin local search that repositions one vertex at a time with an LP.
//
// With vertices v_1..v_{k-1} fixed, a covering position for v_k must satisfy,
// for every point b of S not already in the hull of the fixed vertices,
//
//     alpha_1 v_1 + ... + alpha_{k-1} v_{k-1} + v_k = alpha* b,
//     alpha_i >= 0,  alpha* >= 0,  alpha_1 + ... + alpha_{k-1} + 1 = alpha*,
//
// together with v_k inside P. Points already in the fixed hull keep their
// block's row count with vacuous rows so the emitted system always has m*k
// equalities and n + m*k inequalities.
//------------------------------------------------------------------------------
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "exactnmf/geometry.hpp"
#include "exactnmf/linprog.hpp"

namespace exactnmf {

class EmptyPolyhedron : public Error {
public:
    using Error::Error;
};

class DegenerateSpan : public Error {
public:
    using Error::Error;
};

class CoverageInfeasible : public Error {
public:
    using Error::Error;
};

struct SearchConfig {
    std::size_t max_sweeps = 200;
    double infeasibility_tol = 1e-8;
    std::size_t stall_sweeps = 5;
    double init_margin = 2.0;
    std::uint64_t rng_seed = 0;
    std::size_t restarts = 3;            // re-randomized attempts after a stall
    std::optional<Simplex> initial;      // warm start for the first attempt
    std::function<void(std::size_t, double)> progress; // (sweep, total infeasibility)
    LpOptions lp;
};

struct VerifyReport {
    bool ok = false;
    double worst_s_violation = 0.0; // max over S of -(min barycentric coefficient)
    double worst_p_violation = 0.0; // max over vertices of (b - A*v)
};

inline VerifyReport verify_solution(const IntermediateSimplexInstance& inst, const Simplex& t,
                                    Tolerance tol = {}) {
    if (t.dim() != inst.dim() || t.k() != inst.k())
        throw InvalidArgument("verify_solution: simplex dimension mismatch");
    VerifyReport rep;
    rep.worst_s_violation = -std::numeric_limits<double>::infinity();
    rep.worst_p_violation = -std::numeric_limits<double>::infinity();
    for (const Vec& s : inst.s) {
        Vec lambda = barycentric(t, s, tol);
        rep.worst_s_violation =
            std::max(rep.worst_s_violation, -*std::min_element(lambda.begin(), lambda.end()));
    }
    for (const Vec& v : t.vertices)
        rep.worst_p_violation =
            std::max(rep.worst_p_violation, point_in_polyhedron(inst.p, v, tol).worst_violation);
    const double scale = std::max({inst.p.a.max_abs(), max_abs(inst.p.b), 1.0});
    rep.ok = rep.worst_s_violation <= tol.threshold(1.0) && rep.worst_p_violation <= tol.threshold(scale);
    return rep;
}

// 1-dimensional instances: P is an interval, so the interval itself (clamped
// to the extremes of S on any unbounded side) is a solution.
inline Simplex solve_rank2(const IntermediateSimplexInstance& inst, Tolerance tol = {}) {
    if (inst.dim() != 1)
        throw InvalidArgument("solve_rank2: instance is not 1-dimensional");
    const double scale = std::max(inst.p.a.max_abs(), max_abs(inst.p.b));
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < inst.p.facets(); ++i) {
        const double a = inst.p.a(i, 0), b = inst.p.b[i];
        if (tol.is_zero(a, scale)) {
            if (b > tol.threshold(scale))
                throw EmptyPolyhedron("solve_rank2: contradictory constraint row");
            continue;
        }
        if (a > 0.0)
            lo = std::max(lo, b / a);
        else
            hi = std::min(hi, b / a);
    }
    if (lo > hi + tol.threshold(scale))
        throw EmptyPolyhedron("solve_rank2: empty interval");
    double s_min = inst.s.front()[0], s_max = s_min;
    for (const Vec& s : inst.s) {
        s_min = std::min(s_min, s[0]);
        s_max = std::max(s_max, s[0]);
    }
    if (!std::isfinite(lo)) lo = s_min;
    if (!std::isfinite(hi)) hi = s_max;
    return {{Vec{lo}, Vec{hi}}};
}

// Oversized axis-aligned simplex containing every point of S strictly: take
// the bounding box [l,u], push the base vertex below it by a margin-scaled
// offset, and stretch one vertex per axis far enough to cover the box.
inline Simplex initial_simplex(const std::vector<Vec>& s, double margin, Tolerance tol = {}) {
    if (s.empty())
        throw InvalidArgument("initial_simplex: no points");
    const std::size_t d = s.front().size();
    if (affine_span_rank(s, tol) != d)
        throw DegenerateSpan("initial_simplex: points do not affinely span");
    Vec lo = s.front(), hi = s.front();
    for (const Vec& p : s)
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], p[j]);
            hi[j] = std::max(hi[j], p[j]);
        }
    double diag = 0.0;
    for (std::size_t j = 0; j < d; ++j) diag += (hi[j] - lo[j]) * (hi[j] - lo[j]);
    const double delta = margin * (std::sqrt(diag) + 1.0);
    Vec base(d);
    double reach = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        base[j] = lo[j] - delta;
        reach = std::max(reach, hi[j] - base[j]);
    }
    const double stretch = static_cast<double>(d) * reach + delta;
    Simplex t;
    t.vertices.push_back(base);
    for (std::size_t j = 0; j < d; ++j) {
        Vec v = base;
        v[j] += stretch;
        t.vertices.push_back(v);
    }
    return t;
}

struct VertexFeasibleRegion {
    std::size_t dim = 0;        // k - 1
    std::size_t num_points = 0; // m
    std::size_t num_facets = 0; // n
    LinearConstraints eq;       // m*k rows
    LinearConstraints ineq;     // n + m*k rows; the first n are P-membership
    std::vector<bool> vacuous;  // point already inside the hull of fixed vertices

    std::size_t k() const { return dim + 1; }
    // variables: [ v_k (dim) | per point: alpha_1..alpha_{k-1}, alpha_star ]
    std::size_t num_vars() const { return dim + num_points * k(); }
    std::size_t alpha_index(std::size_t point, std::size_t i) const { return dim + point * k() + i; }
};

namespace detail {

// Barycentric coefficients of b over the k-1 affinely independent fixed
// vertices (an overdetermined system solved by normal equations), or nullopt
// when b is not in their hull.
inline std::optional<Vec> hull_coefficients(const std::vector<Vec>& fixed, const Vec& b,
                                            Tolerance tol) {
    const std::size_t r = fixed.size(), d = b.size();
    Matrix m(d + 1, r);
    Vec rhs(d + 1);
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t i = 0; i < d; ++i) m(i, j) = fixed[j][i];
        m(d, j) = 1.0;
    }
    for (std::size_t i = 0; i < d; ++i) rhs[i] = b[i];
    rhs[d] = 1.0;
    Matrix mt = m.transposed();
    Vec beta;
    try {
        beta = solve_linear(mt * m, mt * rhs, tol);
    } catch (const SingularMatrix&) {
        throw DegenerateSpan("fixed vertices are affinely dependent");
    }
    Vec residual = m * beta;
    double scale = std::max(1.0, std::max(m.max_abs(), max_abs(b)));
    const double cut = tol.threshold(scale);
    for (std::size_t i = 0; i <= d; ++i)
        if (std::abs(residual[i] - rhs[i]) > cut) return std::nullopt;
    for (double c : beta)
        if (c < -cut) return std::nullopt;
    return beta;
}

} // namespace detail

inline VertexFeasibleRegion feasible_region_last_vertex(const IntermediateSimplexInstance& inst,
                                                        const std::vector<Vec>& fixed,
                                                        Tolerance tol = {}) {
    const std::size_t d = inst.dim(), k = d + 1;
    if (fixed.size() != k - 1)
        throw InvalidArgument("feasible_region_last_vertex: need k-1 fixed vertices");
    for (const Vec& v : fixed)
        if (v.size() != d)
            throw InvalidArgument("feasible_region_last_vertex: fixed vertex dimension mismatch");

    VertexFeasibleRegion region;
    region.dim = d;
    region.num_points = inst.num_points();
    region.num_facets = inst.p.facets();
    const std::size_t nv = region.num_vars();

    // P-membership block first: A*v_k >= b.
    for (std::size_t i = 0; i < inst.p.facets(); ++i) {
        Vec row(nv, 0.0);
        for (std::size_t j = 0; j < d; ++j) row[j] = inst.p.a(i, j);
        region.ineq.add(std::move(row), inst.p.b[i]);
    }

    for (std::size_t pt = 0; pt < inst.s.size(); ++pt) {
        const Vec& b = inst.s[pt];
        const bool in_hull = detail::hull_coefficients(fixed, b, tol).has_value();
        region.vacuous.push_back(in_hull);

        if (in_hull) {
            // The point is covered whatever v_k is; keep the block shape with
            // vacuous rows so the advertised counts hold.
            for (std::size_t r = 0; r < k; ++r) region.eq.add(Vec(nv, 0.0), 0.0);
        } else {
            for (std::size_t r = 0; r < d; ++r) {
                Vec row(nv, 0.0);
                row[r] = 1.0; // v_k coordinate r
                for (std::size_t i = 0; i + 1 < k; ++i) row[region.alpha_index(pt, i)] = fixed[i][r];
                row[region.alpha_index(pt, k - 1)] = -b[r]; // alpha_star
                region.eq.add(std::move(row), 0.0);
            }
            Vec sum_row(nv, 0.0);
            for (std::size_t i = 0; i + 1 < k; ++i) sum_row[region.alpha_index(pt, i)] = 1.0;
            sum_row[region.alpha_index(pt, k - 1)] = -1.0;
            region.eq.add(std::move(sum_row), -1.0); // sum alpha + 1 = alpha_star
        }
        for (std::size_t i = 0; i < k; ++i) {
            Vec row(nv, 0.0);
            row[region.alpha_index(pt, i)] = 1.0;
            region.ineq.add(std::move(row), 0.0);
        }
    }
    return region;
}

// Optimal position for one vertex with the others fixed: minimize the largest
// violation t of the P rows subject to hard S coverage. If the current vertex
// is already both covering and feasible it is returned unchanged.
struct RepositionResult {
    Vec vertex;
    double infeasibility = 0.0;
};

inline RepositionResult reposition_vertex(const IntermediateSimplexInstance& inst, const Simplex& t,
                                          std::size_t vertex_index, double tol,
                                          const LpOptions& lp_opt = {},
                                          const Vec* tiebreak = nullptr) {
    if (vertex_index >= t.k())
        throw InvalidArgument("reposition_vertex: vertex index out of range");
    Tolerance tt{tol};

    bool covers = true;
    try {
        for (const Vec& s : inst.s) {
            Vec lambda = barycentric(t, s, tt);
            if (*std::min_element(lambda.begin(), lambda.end()) < -tol) {
                covers = false;
                break;
            }
        }
    } catch (const DegenerateSimplex&) {
        covers = false;
    }
    const double current_violation =
        std::max(0.0, point_in_polyhedron(inst.p, t.vertices[vertex_index], tt).worst_violation);
    if (covers && current_violation <= tol)
        return {t.vertices[vertex_index], current_violation};

    std::vector<Vec> fixed;
    for (std::size_t i = 0; i < t.k(); ++i)
        if (i != vertex_index) fixed.push_back(t.vertices[i]);
    VertexFeasibleRegion region = feasible_region_last_vertex(inst, fixed, tt);

    // LP variables: v_k free, every alpha and the slack t nonnegative. The
    // region's single-variable sign rows become variable bounds here; only
    // the P-membership rows stay as constraint rows, relaxed by t.
    const std::size_t nv = region.num_vars();
    LpProblem lp;
    lp.num_vars = nv + 1; // slack t last
    lp.objective.assign(nv + 1, 0.0);
    lp.objective[nv] = 1.0;
    lp.nonneg.assign(nv + 1, true);
    for (std::size_t c = 0; c < inst.dim(); ++c) lp.nonneg[c] = false;
    for (std::size_t r = 0; r < region.eq.size(); ++r) {
        Vec row = region.eq.rows[r];
        row.push_back(0.0);
        lp.eq.add(std::move(row), region.eq.rhs[r]);
    }
    for (std::size_t r = 0; r < region.num_facets; ++r) {
        Vec row = region.ineq.rows[r];
        row.push_back(1.0);
        lp.ge.add(std::move(row), region.ineq.rhs[r]);
    }

    LpOutcome out = lp_solve(lp, lp_opt);
    if (out.status == LpStatus::infeasible) {
        // A covering simplex always admits its own position, so an infeasible
        // verdict on one is solver exhaustion: keep the vertex where it is.
        if (covers) return {t.vertices[vertex_index], current_violation};
        throw CoverageInfeasible("reposition_vertex: no covering position for this vertex");
    }
    if (out.status != LpStatus::optimal) // minimize t >= 0 cannot be unbounded
        throw NumericalFailure("reposition_vertex: LP lost boundedness");
    const double t_star = std::max(0.0, out.x[nv]);

    // Optional second stage: the optimal positions usually form a whole face,
    // and coordinate descent freezes if the same point of it is returned
    // every sweep. A caller-supplied direction picks the face's vertex that
    // minimizes r*v instead, without giving up more than a hair of t.
    if (tiebreak && tiebreak->size() == inst.dim()) {
        LpProblem explore = lp;
        explore.objective.assign(nv + 1, 0.0);
        for (std::size_t c = 0; c < inst.dim(); ++c) explore.objective[c] = (*tiebreak)[c];
        Vec cap(nv + 1, 0.0);
        cap[nv] = -1.0; // t <= t_star (+slop)
        explore.ge.add(std::move(cap), -(t_star + 1e-12 * (1.0 + t_star)));
        try {
            LpOutcome moved = lp_solve(explore, lp_opt);
            if (moved.status == LpStatus::optimal) {
                Vec v(moved.x.begin(), moved.x.begin() + static_cast<std::ptrdiff_t>(inst.dim()));
                const double violation =
                    std::max(0.0, point_in_polyhedron(inst.p, v, tt).worst_violation);
                return {std::move(v), std::max(violation, t_star)};
            }
        } catch (const Error&) {
            // fall back to the first-stage optimum
        }
    }
    Vec v(out.x.begin(), out.x.begin() + static_cast<std::ptrdiff_t>(inst.dim()));
    return {std::move(v), t_star};
}

struct SearchOutcome {
    bool solved = false;
    Simplex simplex;
    Vec vertex_infeasibility; // per vertex, after the last sweep
    std::size_t sweeps = 0;   // total sweeps across all attempts
    std::size_t attempts = 0;
};

namespace detail {

inline Matrix random_rotation(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        Matrix q(d, d);
        bool ok = true;
        for (std::size_t j = 0; j < d && ok; ++j) {
            Vec v(d);
            for (double& x : v) x = gauss(rng);
            for (std::size_t prev = 0; prev < j; ++prev) {
                double proj = 0.0;
                for (std::size_t i = 0; i < d; ++i) proj += q(i, prev) * v[i];
                for (std::size_t i = 0; i < d; ++i) v[i] -= proj * q(i, prev);
            }
            const double norm = std::sqrt(dot(v, v));
            if (norm < 1e-8) {
                ok = false;
                break;
            }
            for (std::size_t i = 0; i < d; ++i) q(i, j) = v[i] / norm;
        }
        if (ok) return q;
    }
}

} // namespace detail

// Round-robin single-vertex local search. Each reposition never increases its
// own vertex's infeasibility, so the total is nonincreasing within an attempt;
// a stall triggers a restart from a randomly rotated oversized simplex.
inline SearchOutcome local_search(const IntermediateSimplexInstance& inst, const SearchConfig& cfg = {}) {
    const std::size_t d = inst.dim(), k = inst.k();
    Tolerance tol{cfg.infeasibility_tol};

    if (d == 1) {
        Simplex t = solve_rank2(inst, tol);
        SearchOutcome out;
        out.solved = verify_solution(inst, t, tol).ok;
        out.simplex = t;
        out.vertex_infeasibility.assign(2, 0.0);
        out.attempts = 1;
        return out;
    }

    std::mt19937_64 rng(cfg.rng_seed);
    SearchOutcome best;
    double best_total = std::numeric_limits<double>::infinity();

    for (std::size_t attempt = 0; attempt <= cfg.restarts; ++attempt) {
        Simplex t;
        if (attempt == 0 && cfg.initial) {
            t = *cfg.initial;
            if (t.k() != k || t.dim() != d)
                throw InvalidArgument("local_search: warm-start simplex dimension mismatch");
        } else if (attempt == 0) {
            t = initial_simplex(inst.s, cfg.init_margin, tol);
        } else {
            Matrix rot = detail::random_rotation(d, rng);
            std::vector<Vec> rotated;
            rotated.reserve(inst.s.size());
            for (const Vec& s : inst.s) rotated.push_back(rot * s);
            Simplex tr = initial_simplex(rotated, cfg.init_margin, tol);
            Matrix back = rot.transposed();
            for (const Vec& v : tr.vertices) t.vertices.push_back(back * v);
        }

        Vec infeas(k, std::numeric_limits<double>::infinity());
        double prev_total = std::numeric_limits<double>::infinity();
        std::size_t no_improve = 0;
        bool abandoned = false;
        std::normal_distribution<double> gauss(0.0, 1.0);

        for (std::size_t sweep = 0; sweep < cfg.max_sweeps && !abandoned; ++sweep) {
            for (std::size_t v = 0; v < k; ++v) {
                // a fresh direction each time keeps the walk over each LP's
                // optimal face from repeating itself
                Vec dir(d);
                for (double& x : dir) x = gauss(rng);
                try {
                    RepositionResult r =
                        reposition_vertex(inst, t, v, cfg.infeasibility_tol, cfg.lp, &dir);
                    t.vertices[v] = r.vertex;
                    infeas[v] = r.infeasibility;
                } catch (const CoverageInfeasible&) {
                    abandoned = true;
                    break;
                } catch (const IterationLimit&) {
                    abandoned = true; // treat an exhausted LP like a stall
                    break;
                } catch (const NumericalFailure&) {
                    abandoned = true;
                    break;
                }
            }
            if (abandoned) break;
            ++best.sweeps;

            double total = 0.0;
            for (double x : infeas) total += x;
            if (cfg.progress) cfg.progress(sweep, total);

            if (total < best_total) {
                best_total = total;
                best.simplex = t;
                best.vertex_infeasibility = infeas;
            }
            bool all_feasible = true;
            for (double x : infeas)
                if (x > cfg.infeasibility_tol) all_feasible = false;
            if (all_feasible && verify_solution(inst, t, tol).ok) {
                best.solved = true;
                best.simplex = t;
                best.vertex_infeasibility = infeas;
                best.attempts = attempt + 1;
                return best;
            }
            if (prev_total - total <= cfg.infeasibility_tol) {
                if (++no_improve >= cfg.stall_sweeps) break;
            } else {
                no_improve = 0;
            }
            prev_total = total;
        }
        best.attempts = attempt + 1;
    }
    return best;
}

} // namespace exactnmf

#endif
