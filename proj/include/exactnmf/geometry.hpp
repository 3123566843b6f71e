#ifndef EXACTNMF_GEOMETRY_HPP
#define EXACTNMF_GEOMETRY_HPP
//------------------------------------------------------------------------------
// Halfspace polyhedra, simplexes with their G matrix, barycentric coordinates,
// and the nested point-set / polyhedron instance they combine into.
//------------------------------------------------------------------------------
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "exactnmf/linalg.hpp"
#include "exactnmf/matrix.hpp"

namespace exactnmf {

class DegenerateSimplex : public Error {
public:
    using Error::Error;
};

class InvalidInstance : public Error {
public:
    using Error::Error;
};

// {x in R^d : a*x >= b}, one row per facet.
struct Polyhedron {
    Matrix a;
    Vec b;

    std::size_t facets() const { return a.rows(); }
    std::size_t dim() const { return a.cols(); }
};

inline void check_polyhedron(const Polyhedron& p) {
    if (p.b.size() != p.a.rows())
        throw InvalidArgument("Polyhedron: rhs size does not match constraint rows");
    if (!all_finite(p.b))
        throw InvalidArgument("Polyhedron: non-finite rhs");
}

struct MembershipReport {
    bool inside = false;
    double worst_violation = 0.0; // max over rows of (b - a*x); <= 0 when interior
};

inline MembershipReport point_in_polyhedron(const Polyhedron& p, const Vec& x, Tolerance tol = {}) {
    check_polyhedron(p);
    if (x.size() != p.dim())
        throw InvalidArgument("point_in_polyhedron: dimension mismatch");
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.facets(); ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < p.dim(); ++j) lhs += p.a(i, j) * x[j];
        worst = std::max(worst, p.b[i] - lhs);
    }
    const double scale = std::max(p.a.max_abs(), max_abs(p.b));
    return {worst <= tol.threshold(scale), worst};
}

// A (k-1)-simplex: k vertices in R^{k-1}.
struct Simplex {
    std::vector<Vec> vertices;

    std::size_t k() const { return vertices.size(); }
    std::size_t dim() const { return vertices.empty() ? 0 : vertices.front().size(); }
};

inline void check_simplex_shape(const Simplex& t) {
    if (t.k() < 2)
        throw InvalidArgument("Simplex: needs at least 2 vertices");
    for (const Vec& v : t.vertices)
        if (v.size() != t.k() - 1 || !all_finite(v))
            throw InvalidArgument("Simplex: vertex dimension must be k-1 and finite");
}

// Vertices as columns with an appended row of ones (k x k).
inline Matrix g_matrix(const Simplex& t) {
    check_simplex_shape(t);
    const std::size_t k = t.k();
    Matrix g(k, k);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i + 1 < k; ++i) g(i, j) = t.vertices[j][i];
        g(k - 1, j) = 1.0;
    }
    return g;
}

// Coefficients lambda with G*lambda = [x;1]. They sum to 1 by construction;
// membership amounts to lambda >= -eps, which is the caller's test.
inline Vec barycentric(const Simplex& t, const Vec& x, Tolerance tol = {}) {
    if (x.size() != t.dim())
        throw InvalidArgument("barycentric: point dimension mismatch");
    Matrix g = g_matrix(t);
    Vec rhs(t.k());
    for (std::size_t i = 0; i + 1 < t.k(); ++i) rhs[i] = x[i];
    rhs[t.k() - 1] = 1.0;
    try {
        return solve_linear(g, rhs, tol);
    } catch (const SingularMatrix&) {
        throw DegenerateSimplex("barycentric: simplex G matrix is singular");
    }
}

// Points S living inside a polyhedron P in R^{k-1}; the question is whether a
// simplex T fits with S inside T inside P.
struct IntermediateSimplexInstance {
    Polyhedron p;
    std::vector<Vec> s;

    std::size_t dim() const { return p.dim(); }
    std::size_t k() const { return p.dim() + 1; }
    std::size_t num_points() const { return s.size(); }
};

// Rank of the translated point set; equals dim(span{s_i - s_0}).
inline std::size_t affine_span_rank(const std::vector<Vec>& pts, Tolerance tol = {}) {
    if (pts.size() < 2) return 0;
    const std::size_t d = pts.front().size();
    Matrix diffs(pts.size() - 1, d);
    for (std::size_t i = 1; i < pts.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) diffs(i - 1, j) = pts[i][j] - pts[0][j];
    return rank(diffs, tol);
}

// Side constraints: [A,b] has rank k, S is inside P, and S affinely spans.
inline void validate_instance(const IntermediateSimplexInstance& inst, Tolerance tol = {}) {
    check_polyhedron(inst.p);
    const std::size_t d = inst.dim();
    Matrix ab(inst.p.facets(), d + 1);
    for (std::size_t i = 0; i < inst.p.facets(); ++i) {
        for (std::size_t j = 0; j < d; ++j) ab(i, j) = inst.p.a(i, j);
        ab(i, d) = inst.p.b[i];
    }
    if (rank(ab, tol) != inst.k())
        throw InvalidInstance("instance: [A,b] must have rank k");
    if (inst.s.size() < d + 1)
        throw InvalidInstance("instance: too few points to span");
    for (std::size_t i = 0; i < inst.s.size(); ++i) {
        if (inst.s[i].size() != d)
            throw InvalidInstance("instance: point dimension mismatch");
        MembershipReport rep = point_in_polyhedron(inst.p, inst.s[i], tol);
        if (!rep.inside)
            throw InvalidInstance("instance: point " + std::to_string(i) +
                                  " outside polyhedron by " + std::to_string(rep.worst_violation));
    }
    if (affine_span_rank(inst.s, tol) != d)
        throw InvalidInstance("instance: points do not affinely span");
}

} // namespace exactnmf

#endif
