#ifndef EXACTNMF_REDUCTIONS_HPP
#define EXACTNMF_REDUCTIONS_HPP
//------------------------------------------------------------------------------
// The constructive chain between exact nonnegative factorization and the
// nested simplex problem:
//
//   NMF (A, k)  <->  P1 (W0, H0)  <->  restricted P1  <->  simplex instance
//
// plus transcripts that map any simplex solution back to a factorization.
// Restricted-P1 <-> simplex is a pure data rearrangement and is exact; the
// other two steps are elimination-based and carry the usual tolerances.
//------------------------------------------------------------------------------
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "exactnmf/geometry.hpp"
#include "exactnmf/linalg.hpp"
#include "exactnmf/matrix.hpp"
#include "exactnmf/search.hpp"

namespace exactnmf {

class NegativeEntries : public Error {
public:
    NegativeEntries(const std::string& where, std::size_t row, std::size_t col, double value)
        : Error(where + ": negative entry " + std::to_string(value) + " at (" +
                std::to_string(row) + "," + std::to_string(col) + ")"),
          row(row), col(col), value(value) {}
    std::size_t row, col;
    double value;
};

class DegenerateRow : public Error {
public:
    using Error::Error;
};

class NotNormalized : public Error {
public:
    using Error::Error;
};

//------------------------------------------------------------------------------
// Instance types
//------------------------------------------------------------------------------

struct NmfInstance {
    Matrix a;
    std::size_t k = 0;
};

struct FactorPair {
    Matrix w;
    Matrix h;
};

struct P1Instance {
    Matrix w0;
    Matrix h0;
};

struct RestrictedP1Instance {
    Matrix w0; // last column all ones
    Matrix h0;
};

struct ReductionTranscript {
    std::vector<std::size_t> deleted_rows; // identically-zero rows of the original w0
    Matrix qhat;
    Vec d_diag; // strictly positive row scalings of the surviving rows
    P1Instance original;
};

// Location and size of the most negative entry, or nullopt if none beyond cut.
inline std::optional<NegativeEntries> worst_negative(const Matrix& m, double cut,
                                                     const std::string& where) {
    std::optional<NegativeEntries> worst;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) < -cut && (!worst || m(i, j) < worst->value))
                worst = NegativeEntries(where, i, j, m(i, j));
    return worst;
}

// Clamps negligible negatives to zero and validates rank(a) == k.
inline NmfInstance make_nmf_instance(Matrix a, std::size_t k, Tolerance tol = {}) {
    if (k < 1 || k > std::min(a.rows(), a.cols()))
        throw InvalidArgument("NmfInstance: k out of range");
    const double cut = tol.threshold(a.max_abs());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j) < -cut)
                throw NegativeEntries("NmfInstance", i, j, a(i, j));
            if (a(i, j) < 0.0) a(i, j) = 0.0;
        }
    if (rank(a, tol) != k)
        throw RankMismatch("NmfInstance: rank(A) != k");
    return {std::move(a), k};
}

inline void validate_p1(const P1Instance& inst, Tolerance tol = {}) {
    const std::size_t k = inst.w0.cols();
    if (inst.h0.rows() != k)
        throw InvalidArgument("P1Instance: factor inner dimensions disagree");
    if (rank(inst.w0, tol) != k || rank(inst.h0, tol) != k)
        throw RankMismatch("P1Instance: factors must both have rank k");
    Matrix prod = inst.w0 * inst.h0;
    if (auto bad = worst_negative(prod, tol.threshold(prod.max_abs()), "P1Instance product"))
        throw *bad;
}

inline void validate_restricted(const RestrictedP1Instance& inst, Tolerance tol = {}) {
    validate_p1({inst.w0, inst.h0}, tol);
    const std::size_t k = inst.w0.cols();
    for (std::size_t i = 0; i < inst.w0.rows(); ++i)
        if (std::abs(inst.w0(i, k - 1) - 1.0) > tol.threshold(1.0))
            throw InvalidArgument("RestrictedP1Instance: last column of W0 must be all ones");
}

//------------------------------------------------------------------------------
// NMF <-> P1
//------------------------------------------------------------------------------

inline P1Instance nmf_to_p1(const NmfInstance& inst, Tolerance tol = {}) {
    auto [w0, h0] = rank_factor(inst.a, inst.k, tol);
    return {std::move(w0), std::move(h0)};
}

// (W0*Q^-1, Q*H0), validated nonnegative and product-preserving.
inline FactorPair p1_solution_to_nmf(const P1Instance& inst, const Matrix& q, Tolerance tol = {}) {
    Matrix w = inst.w0 * invert(q, tol);
    Matrix h = q * inst.h0;
    if (auto bad = worst_negative(w, tol.threshold(w.max_abs()), "W = W0*Q^-1"))
        throw *bad;
    if (auto bad = worst_negative(h, tol.threshold(h.max_abs()), "H = Q*H0"))
        throw *bad;
    Matrix original = inst.w0 * inst.h0;
    if ((w * h - original).max_abs() > tol.threshold(original.max_abs()) * 100.0)
        throw Error("p1_solution_to_nmf: product not preserved");
    return {std::move(w), std::move(h)};
}

//------------------------------------------------------------------------------
// P1 <-> restricted P1
//------------------------------------------------------------------------------

struct RestrictionResult {
    RestrictedP1Instance instance;
    ReductionTranscript transcript;
};

// Delete identically-zero rows of W0, map H0*e onto the last coordinate with
// Qhat, then rescale rows so the last column of W0*Qhat^-1 becomes exactly 1.
inline RestrictionResult p1_to_restricted(const P1Instance& inst, Tolerance tol = {}) {
    validate_p1(inst, tol);
    const std::size_t m = inst.w0.rows(), k = inst.w0.cols(), n = inst.h0.cols();

    const double row_cut = tol.eps * inst.w0.max_abs();
    std::vector<std::size_t> deleted;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < m; ++i) {
        double row_max = 0.0;
        for (std::size_t j = 0; j < k; ++j) row_max = std::max(row_max, std::abs(inst.w0(i, j)));
        (row_max <= row_cut ? deleted : kept).push_back(i);
    }
    if (kept.empty())
        throw DegenerateRow("p1_to_restricted: all rows of W0 are zero");
    Matrix w_kept(kept.size(), k);
    for (std::size_t i = 0; i < kept.size(); ++i)
        for (std::size_t j = 0; j < k; ++j) w_kept(i, j) = inst.w0(kept[i], j);

    Vec h_row_sums(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < n; ++j) h_row_sums[i] += inst.h0(i, j);
    Matrix qhat_inv = complete_to_basis(h_row_sums, tol); // last column is H0*e
    Matrix qhat = invert(qhat_inv, tol);

    Matrix w1 = w_kept * qhat_inv; // last column = W0*H0*e, positive after deletion
    Vec d_diag(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const double last = w1(i, k - 1);
        if (last <= tol.threshold(w1.max_abs()))
            throw DegenerateRow("p1_to_restricted: nonpositive row sum in W0*H0 at kept row " +
                                std::to_string(kept[i]));
        d_diag[i] = 1.0 / last;
    }
    Matrix w2(kept.size(), k);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        for (std::size_t j = 0; j < k; ++j) w2(i, j) = d_diag[i] * w1(i, j);
        w2(i, k - 1) = 1.0; // exact by construction
    }
    RestrictedP1Instance out{std::move(w2), qhat * inst.h0};
    validate_restricted(out, tol);
    return {std::move(out), {std::move(deleted), std::move(qhat), std::move(d_diag), inst}};
}

// Compose a restricted solution back into a solution of the original P1
// instance and validate it there.
inline Matrix restricted_solution_to_p1(const ReductionTranscript& transcript, const Matrix& qprime,
                                        Tolerance tol = {}) {
    Matrix q = qprime * transcript.qhat;
    p1_solution_to_nmf(transcript.original, q, tol); // throws NegativeEntries on failure
    return q;
}

//------------------------------------------------------------------------------
// restricted P1 <-> nested simplex instance (exact bijection)
//------------------------------------------------------------------------------

inline IntermediateSimplexInstance restricted_to_simplex(const RestrictedP1Instance& inst) {
    const std::size_t k = inst.w0.cols(), n = inst.h0.cols(), m = inst.w0.rows();
    if (k < 2)
        throw InvalidArgument("restricted_to_simplex: k must be at least 2 (no geometry in R^0)");
    Matrix a(n, k - 1);
    Vec b(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j + 1 < k; ++j) a(i, j) = inst.h0(j, i);
        b[i] = -inst.h0(k - 1, i);
    }
    std::vector<Vec> s(m);
    for (std::size_t i = 0; i < m; ++i) {
        s[i].resize(k - 1);
        for (std::size_t j = 0; j + 1 < k; ++j) s[i][j] = inst.w0(i, j);
    }
    return {{std::move(a), std::move(b)}, std::move(s)};
}

inline RestrictedP1Instance simplex_to_restricted(const IntermediateSimplexInstance& inst) {
    const std::size_t d = inst.dim(), k = d + 1, n = inst.p.facets(), m = inst.num_points();
    Matrix w0(m, k);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < d; ++j) w0(i, j) = inst.s[i][j];
        w0(i, k - 1) = 1.0;
    }
    Matrix h0(k, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) h0(j, i) = inst.p.a(i, j);
        h0(k - 1, i) = -inst.p.b[i];
    }
    return {std::move(w0), std::move(h0)};
}

//------------------------------------------------------------------------------
// Solution transport: simplex T <-> matrix Q = G^T
//------------------------------------------------------------------------------

inline Matrix simplex_solution_to_q(const Simplex& t, Tolerance tol = {}) {
    Matrix g = g_matrix(t);
    if (rank(g, tol) != g.rows())
        throw DegenerateSimplex("simplex_solution_to_q: degenerate simplex");
    return g.transposed();
}

inline Simplex q_to_simplex_solution(const Matrix& q, Tolerance tol = {}) {
    if (q.rows() != q.cols())
        throw InvalidArgument("q_to_simplex_solution: Q must be square");
    const std::size_t k = q.rows();
    for (std::size_t i = 0; i < k; ++i)
        if (std::abs(q(i, k - 1) - 1.0) > tol.threshold(1.0))
            throw NotNormalized("q_to_simplex_solution: last column of Q must be all ones");
    if (rank(q, tol) != k)
        throw DegenerateSimplex("q_to_simplex_solution: Q is singular");
    Simplex t;
    t.vertices.resize(k, Vec(k - 1));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j + 1 < k; ++j) t.vertices[i][j] = q(i, j);
    return t;
}

//------------------------------------------------------------------------------
// Top-level solve
//------------------------------------------------------------------------------

struct NmfSolveConfig {
    Tolerance tol;
    SearchConfig search;
    std::optional<FactorPair> warm_start;
};

struct NmfOutcome {
    bool solved = false;
    std::optional<FactorPair> factors;
    double residual = 0.0;      // ||A - W*H||_inf of the returned factors
    Vec vertex_infeasibility;   // stall diagnostics from the local search
    std::size_t sweeps = 0;
    std::size_t attempts = 0;
    bool warm_start_used = false;
};

namespace detail {

// Map a claimed factorization A = W*H onto a simplex solution of the reduced
// instance; returns nullopt when the factors do not line up with W0's range.
inline std::optional<Simplex> warm_start_simplex(const P1Instance& p1,
                                                 const ReductionTranscript& transcript,
                                                 const FactorPair& warm, Tolerance tol) {
    const std::size_t k = p1.w0.cols();
    if (warm.w.rows() != p1.w0.rows() || warm.w.cols() != k) return std::nullopt;
    try {
        // Least squares W0*P = W via normal equations; exact when ranges match.
        Matrix wt = p1.w0.transposed();
        Matrix gram = wt * p1.w0;
        Matrix rhs = wt * warm.w;
        Matrix p = invert(gram, tol) * rhs;
        if ((p1.w0 * p - warm.w).max_abs() > 1e-6 * std::max(1.0, warm.w.max_abs()))
            return std::nullopt;
        Matrix qprime = invert(p, tol) * invert(transcript.qhat, tol);
        Matrix normalized = qprime;
        for (std::size_t i = 0; i < k; ++i) {
            const double last = qprime(i, k - 1);
            if (last <= tol.threshold(qprime.max_abs())) return std::nullopt;
            for (std::size_t j = 0; j < k; ++j) normalized(i, j) = qprime(i, j) / last;
        }
        return q_to_simplex_solution(normalized, tol);
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace detail

// Assemble the whole pipeline. Failure to find a simplex is a heuristic
// stall, not a certificate that no factorization exists.
inline NmfOutcome solve_exact_nmf(const NmfInstance& inst, NmfSolveConfig config = {}) {
    const Tolerance tol = config.tol;
    NmfOutcome out;

    if (inst.k == 1) {
        // A is a nonnegative outer product; split it at its largest entry.
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < inst.a.rows(); ++i)
            for (std::size_t j = 0; j < inst.a.cols(); ++j)
                if (inst.a(i, j) > inst.a(bi, bj)) bi = i, bj = j;
        Matrix w(inst.a.rows(), 1), h(1, inst.a.cols());
        for (std::size_t i = 0; i < inst.a.rows(); ++i) w(i, 0) = inst.a(i, bj);
        for (std::size_t j = 0; j < inst.a.cols(); ++j) h(0, j) = inst.a(bi, j) / inst.a(bi, bj);
        out.residual = (w * h - inst.a).max_abs();
        out.factors = FactorPair{std::move(w), std::move(h)};
        out.solved = out.residual <= tol.threshold(inst.a.max_abs());
        return out;
    }

    P1Instance p1 = nmf_to_p1(inst, tol);
    RestrictionResult restriction = p1_to_restricted(p1, tol);
    IntermediateSimplexInstance simplex_inst = restricted_to_simplex(restriction.instance);

    Simplex t;
    if (inst.k == 2) {
        t = solve_rank2(simplex_inst, tol);
        out.attempts = 1;
    } else {
        SearchConfig search = config.search;
        if (config.warm_start) {
            auto warm = detail::warm_start_simplex(p1, restriction.transcript, *config.warm_start, tol);
            if (warm && verify_solution(simplex_inst, *warm, Tolerance{search.infeasibility_tol}).ok) {
                search.initial = std::move(*warm);
                out.warm_start_used = true;
            }
        }
        SearchOutcome so = local_search(simplex_inst, search);
        out.sweeps = so.sweeps;
        out.attempts = so.attempts;
        if (!so.solved) {
            out.vertex_infeasibility = so.vertex_infeasibility;
            return out;
        }
        t = so.simplex;
    }

    Matrix qprime = simplex_solution_to_q(t, tol);
    Matrix q = restricted_solution_to_p1(restriction.transcript, qprime, tol);
    FactorPair factors = p1_solution_to_nmf(p1, q, tol);
    out.residual = (factors.w * factors.h - inst.a).max_abs();
    out.solved = out.residual <= tol.threshold(inst.a.max_abs());
    out.factors = std::move(factors);
    return out;
}

} // namespace exactnmf

#endif
