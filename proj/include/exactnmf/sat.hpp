#ifndef EXACTNMF_SAT_HPP
#define EXACTNMF_SAT_HPP
//------------------------------------------------------------------------------
// 3-SAT gadget: encode a formula as a nested simplex instance, build a witness
// simplex from a satisfying assignment, and decode an assignment back out of
// any solution simplex.
//
// Coordinates of R^{3p+q} are laid out as s_1..s_p, t_1..t_p, u_1..u_p,
// v_1..v_q. The polyhedron rows are, in order:
//
//     s_i >= 0, u_i - s_i >= 0, t_i >= 0, u_i - t_i >= 0,
//     u_i >= 0, 1 - u_i >= 0                      (6p rows, i ascending)
//     v_j >= 0                                    (q rows)
//     per clause j, per literal in stored order:  (3q rows)
//         v_j - s_i + 2 t_i           >= 0        for a negated literal
//         v_j - 2 t_i + 2 s_i + u_i   >= 0        for a plain literal
//
// The point set is the origin, the blended point b, one ray point h_j per
// clause, and four probe points per variable pinned to (s_i,t_i,u_i):
// (0,1/4,1/2), (1/2,1/4,1/2), (1/4,1/8,1/2), (1/4,3/8,1/2), with all v
// coordinates 1.
//------------------------------------------------------------------------------
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "exactnmf/geometry.hpp"

namespace exactnmf {

class StructureMismatch : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

struct Literal {
    int var = 0; // 1-based
    bool negated = false;
};

struct Cnf3 {
    int num_vars = 0;
    std::vector<std::array<Literal, 3>> clauses;

    int p() const { return num_vars; }
    int q() const { return static_cast<int>(clauses.size()); }
};

inline void validate_cnf(const Cnf3& phi) {
    if (phi.num_vars < 1)
        throw InvalidArgument("Cnf3: needs at least one variable");
    for (const auto& clause : phi.clauses) {
        for (const Literal& lit : clause)
            if (lit.var < 1 || lit.var > phi.num_vars)
                throw InvalidArgument("Cnf3: literal variable out of range");
        if (clause[0].var == clause[1].var || clause[0].var == clause[2].var ||
            clause[1].var == clause[2].var)
            throw InvalidArgument("Cnf3: a variable occurs twice in one clause");
    }
}

struct Assignment {
    std::vector<bool> bits; // bits[i-1] is the value of variable i
};

struct GadgetLayout {
    int p = 0;
    int q = 0;
    std::vector<std::array<Literal, 3>> clauses; // kept so decode reports per-clause counts

    std::size_t dimension() const { return static_cast<std::size_t>(3 * p + q); }
    std::size_t s_index(int i) const { return static_cast<std::size_t>(i - 1); }
    std::size_t t_index(int i) const { return static_cast<std::size_t>(p + i - 1); }
    std::size_t u_index(int i) const { return static_cast<std::size_t>(2 * p + i - 1); }
    std::size_t v_index(int j) const { return static_cast<std::size_t>(3 * p + j - 1); }
};

//------------------------------------------------------------------------------
// Evaluation and brute force
//------------------------------------------------------------------------------

struct Evaluation {
    bool satisfied = false;
    std::vector<int> falsified_counts; // m_j per clause
};

inline Evaluation evaluate(const Cnf3& phi, const Assignment& sigma) {
    if (sigma.bits.size() != static_cast<std::size_t>(phi.num_vars))
        throw InvalidArgument("evaluate: assignment length mismatch");
    Evaluation ev;
    ev.satisfied = true;
    for (const auto& clause : phi.clauses) {
        int falsified = 0;
        for (const Literal& lit : clause) {
            const bool value = sigma.bits[static_cast<std::size_t>(lit.var - 1)];
            if (lit.negated ? value : !value) ++falsified;
        }
        ev.falsified_counts.push_back(falsified);
        if (falsified == 3) ev.satisfied = false;
    }
    return ev;
}

// First satisfying assignment in lexicographic order (variable 1 is the most
// significant bit, 0 before 1), or nullopt.
inline std::optional<Assignment> brute_force_sat(const Cnf3& phi) {
    validate_cnf(phi);
    const int p = phi.num_vars;
    if (p > 24)
        throw TooLarge("brute_force_sat: more than 24 variables");
    const std::uint64_t total = std::uint64_t{1} << p;
    for (std::uint64_t word = 0; word < total; ++word) {
        Assignment sigma;
        sigma.bits.resize(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) sigma.bits[static_cast<std::size_t>(i)] = (word >> (p - 1 - i)) & 1;
        if (evaluate(phi, sigma).satisfied) return sigma;
    }
    return std::nullopt;
}

//------------------------------------------------------------------------------
// Encoding
//------------------------------------------------------------------------------

struct EncodedInstance {
    IntermediateSimplexInstance instance;
    GadgetLayout layout;
};

inline EncodedInstance encode(const Cnf3& phi) {
    validate_cnf(phi);
    const int p = phi.p(), q = phi.q();
    GadgetLayout layout{p, q, phi.clauses};
    const std::size_t dim = layout.dimension();
    const std::size_t n = static_cast<std::size_t>(6 * p + 4 * q);

    Matrix a(n, dim);
    Vec b(n, 0.0);
    std::size_t r = 0;
    for (int i = 1; i <= p; ++i) a(r++, layout.s_index(i)) = 1.0; // s >= 0
    for (int i = 1; i <= p; ++i) {                                // s <= u
        a(r, layout.u_index(i)) = 1.0;
        a(r++, layout.s_index(i)) = -1.0;
    }
    for (int i = 1; i <= p; ++i) a(r++, layout.t_index(i)) = 1.0; // t >= 0
    for (int i = 1; i <= p; ++i) {                                // t <= u
        a(r, layout.u_index(i)) = 1.0;
        a(r++, layout.t_index(i)) = -1.0;
    }
    for (int i = 1; i <= p; ++i) a(r++, layout.u_index(i)) = 1.0; // u >= 0
    for (int i = 1; i <= p; ++i) {                                // u <= 1
        a(r, layout.u_index(i)) = -1.0;
        b[r++] = -1.0;
    }
    for (int j = 1; j <= q; ++j) a(r++, layout.v_index(j)) = 1.0; // v >= 0
    for (int j = 1; j <= q; ++j) {
        for (const Literal& lit : phi.clauses[static_cast<std::size_t>(j - 1)]) {
            a(r, layout.v_index(j)) = 1.0;
            if (lit.negated) { // v_j >= s_i - 2 t_i
                a(r, layout.s_index(lit.var)) = -1.0;
                a(r, layout.t_index(lit.var)) = 2.0;
            } else { // v_j >= 2 t_i - 2 s_i - u_i
                a(r, layout.s_index(lit.var)) = 2.0;
                a(r, layout.t_index(lit.var)) = -2.0;
                a(r, layout.u_index(lit.var)) = 1.0;
            }
            ++r;
        }
    }

    std::vector<Vec> s;
    s.emplace_back(dim, 0.0); // the origin
    {
        Vec blended(dim, 0.0);
        for (int i = 1; i <= p; ++i) {
            blended[layout.s_index(i)] = 1.0 / (4.0 * p);
            blended[layout.t_index(i)] = 1.0 / (4.0 * p);
            blended[layout.u_index(i)] = 1.0 / (2.0 * p);
        }
        for (int j = 1; j <= q; ++j) blended[layout.v_index(j)] = 2.5 / (8.0 * p);
        s.push_back(std::move(blended));
    }
    for (int j = 1; j <= q; ++j) {
        Vec ray(dim, 0.0);
        ray[layout.v_index(j)] = 1.0;
        s.push_back(std::move(ray));
    }
    const std::array<std::array<double, 3>, 4> probes{{
        {0.0, 0.25, 0.5}, {0.5, 0.25, 0.5}, {0.25, 0.125, 0.5}, {0.25, 0.375, 0.5}}};
    for (int i = 1; i <= p; ++i) {
        for (const auto& probe : probes) {
            Vec point(dim, 0.0);
            point[layout.s_index(i)] = probe[0];
            point[layout.t_index(i)] = probe[1];
            point[layout.u_index(i)] = probe[2];
            for (int j = 1; j <= q; ++j) point[layout.v_index(j)] = 1.0;
            s.push_back(std::move(point));
        }
    }

    EncodedInstance out{{{std::move(a), std::move(b)}, std::move(s)}, std::move(layout)};
    validate_instance(out.instance); // the side constraints hold by construction
    return out;
}

//------------------------------------------------------------------------------
// Witness
//------------------------------------------------------------------------------

inline double default_ray_scale(const Cnf3& phi) {
    return 8.0 * phi.p() * (3.0 * phi.p() + phi.q());
}

// Vertices: origin, lambda*h_j per clause, and three vertices per variable
// following the two fixed patterns (mu = 5/8) for false/true variables. The
// v_j entry is 5/8 exactly where the corresponding literal is falsified by
// that variable's setting.
inline Simplex witness_simplex(const Cnf3& phi, const Assignment& sigma, double lambda = 0.0) {
    validate_cnf(phi);
    if (sigma.bits.size() != static_cast<std::size_t>(phi.num_vars))
        throw InvalidArgument("witness_simplex: assignment length mismatch");
    if (lambda < 0.0)
        throw InvalidArgument("witness_simplex: lambda must be positive");
    if (lambda == 0.0) lambda = default_ray_scale(phi);
    const int p = phi.p(), q = phi.q();
    GadgetLayout layout{p, q, phi.clauses};
    const std::size_t dim = layout.dimension();
    const double mu = 5.0 / 8.0;

    Simplex t;
    t.vertices.emplace_back(dim, 0.0);
    for (int j = 1; j <= q; ++j) {
        Vec ray(dim, 0.0);
        ray[layout.v_index(j)] = lambda;
        t.vertices.push_back(std::move(ray));
    }
    const std::array<std::array<double, 3>, 3> pattern_false{{{0, 0, 1}, {0, 1, 1}, {1, 0.5, 1}}};
    const std::array<std::array<double, 3>, 3> pattern_true{{{1, 0, 1}, {1, 1, 1}, {0, 0.5, 1}}};
    for (int i = 1; i <= p; ++i) {
        const bool value = sigma.bits[static_cast<std::size_t>(i - 1)];
        const auto& pattern = value ? pattern_true : pattern_false;
        for (int slot = 0; slot < 3; ++slot) {
            Vec g(dim, 0.0);
            g[layout.s_index(i)] = mu * pattern[static_cast<std::size_t>(slot)][0];
            g[layout.t_index(i)] = mu * pattern[static_cast<std::size_t>(slot)][1];
            g[layout.u_index(i)] = mu * pattern[static_cast<std::size_t>(slot)][2];
            for (int j = 1; j <= q; ++j) {
                for (const Literal& lit : phi.clauses[static_cast<std::size_t>(j - 1)]) {
                    if (lit.var != i) continue;
                    // falsified plain literal leans on g_{i,2}; falsified
                    // negated literal on g_{i,1}
                    if (!value && !lit.negated && slot == 1) g[layout.v_index(j)] = mu;
                    if (value && lit.negated && slot == 0) g[layout.v_index(j)] = mu;
                }
            }
            t.vertices.push_back(std::move(g));
        }
    }
    return t;
}

//------------------------------------------------------------------------------
// Decoding
//------------------------------------------------------------------------------

struct DecodeDiagnostics {
    std::vector<int> variable_class;              // 0 or 1 per variable
    std::vector<int> falsified_counts;            // m_j per clause
    std::vector<std::array<double, 3>> mu;        // scale of each matched vertex
    std::vector<double> ray_scales;               // lambda_j per clause
};

struct DecodeResult {
    Assignment assignment;
    DecodeDiagnostics diagnostics;
};

namespace detail {

// Match the three normalized (s,t) pairs against a pattern triple, as sets.
// Returns slot assignment per point, or nullopt if no bijection fits.
inline std::optional<std::array<int, 3>>
match_triple(const std::array<std::array<double, 2>, 3>& points,
             const std::array<std::array<double, 2>, 3>& pattern, double tol) {
    std::array<int, 3> perm{};
    std::array<bool, 3> used{};
    for (int pt = 0; pt < 3; ++pt) {
        int match = -1;
        for (int slot = 0; slot < 3; ++slot) {
            if (used[static_cast<std::size_t>(slot)]) continue;
            if (std::abs(points[static_cast<std::size_t>(pt)][0] - pattern[static_cast<std::size_t>(slot)][0]) <= tol &&
                std::abs(points[static_cast<std::size_t>(pt)][1] - pattern[static_cast<std::size_t>(slot)][1]) <= tol) {
                if (match >= 0) return std::nullopt; // ambiguous
                match = slot;
            }
        }
        if (match < 0) return std::nullopt;
        used[static_cast<std::size_t>(match)] = true;
        perm[static_cast<std::size_t>(pt)] = match;
    }
    return perm;
}

} // namespace detail

// Recover the assignment from a solution simplex: census the vertices (one at
// the origin, one scaled ray per clause, three positive vertices per
// variable), normalize each variable's triple to the u = 1/2 plane and match
// it against the two patterns.
inline DecodeResult decode(const IntermediateSimplexInstance& inst, const GadgetLayout& layout,
                           const Simplex& t, double tol = 1e-6) {
    const int p = layout.p, q = layout.q;
    const std::size_t dim = layout.dimension();
    if (inst.dim() != dim || t.dim() != dim || t.k() != dim + 1)
        throw StructureMismatch("decode: dimensions do not match the layout");

    bool origin_seen = false;
    std::vector<std::size_t> ray_vertex(static_cast<std::size_t>(q), t.k());
    std::vector<std::vector<std::size_t>> var_vertices(static_cast<std::size_t>(p));

    for (std::size_t vx = 0; vx < t.k(); ++vx) {
        const Vec& v = t.vertices[vx];
        double stu_max = 0.0;
        int support = 0; // number of variables with a positive s/t/u block
        int support_var = 0;
        for (int i = 1; i <= p; ++i) {
            const double block = std::max({std::abs(v[layout.s_index(i)]),
                                           std::abs(v[layout.t_index(i)]),
                                           std::abs(v[layout.u_index(i)])});
            stu_max = std::max(stu_max, block);
            if (block > tol) {
                ++support;
                support_var = i;
            }
        }
        if (support > 1)
            throw StructureMismatch("decode: a vertex is positive in two variable blocks");
        if (support == 1) {
            var_vertices[static_cast<std::size_t>(support_var - 1)].push_back(vx);
            continue;
        }
        // no s/t/u support: origin or a clause ray
        int ray = 0;
        for (int j = 1; j <= q; ++j)
            if (std::abs(v[layout.v_index(j)]) > tol) ray = ray == 0 ? j : -1;
        if (ray == 0) {
            if (origin_seen)
                throw StructureMismatch("decode: two vertices at the origin");
            origin_seen = true;
        } else if (ray > 0 && v[layout.v_index(ray)] >= 1.0 - tol) {
            if (ray_vertex[static_cast<std::size_t>(ray - 1)] != t.k())
                throw StructureMismatch("decode: two vertices on the same clause ray");
            ray_vertex[static_cast<std::size_t>(ray - 1)] = vx;
        } else {
            throw StructureMismatch("decode: vertex fits neither the origin nor a clause ray");
        }
    }
    if (!origin_seen)
        throw StructureMismatch("decode: no vertex at the origin");
    for (int j = 1; j <= q; ++j)
        if (ray_vertex[static_cast<std::size_t>(j - 1)] == t.k())
            throw StructureMismatch("decode: clause ray " + std::to_string(j) + " has no vertex");
    for (int i = 1; i <= p; ++i)
        if (var_vertices[static_cast<std::size_t>(i - 1)].size() != 3)
            throw StructureMismatch("decode: variable " + std::to_string(i) + " has " +
                                    std::to_string(var_vertices[static_cast<std::size_t>(i - 1)].size()) +
                                    " positive vertices, expected 3");

    const std::array<std::array<double, 2>, 3> class0{{{0, 0}, {0, 0.5}, {0.5, 0.25}}};
    const std::array<std::array<double, 2>, 3> class1{{{0.5, 0}, {0.5, 0.5}, {0, 0.25}}};

    DecodeResult out;
    out.assignment.bits.resize(static_cast<std::size_t>(p));
    out.diagnostics.variable_class.resize(static_cast<std::size_t>(p));
    out.diagnostics.mu.resize(static_cast<std::size_t>(p));
    for (int j = 1; j <= q; ++j)
        out.diagnostics.ray_scales.push_back(
            t.vertices[ray_vertex[static_cast<std::size_t>(j - 1)]][layout.v_index(j)]);

    for (int i = 1; i <= p; ++i) {
        std::array<std::array<double, 2>, 3> normalized{};
        std::array<double, 3> scale{};
        for (int pt = 0; pt < 3; ++pt) {
            const Vec& v = t.vertices[var_vertices[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(pt)]];
            const double u = v[layout.u_index(i)];
            if (u <= tol)
                throw StructureMismatch("decode: vertex with vanishing u coordinate in block " +
                                        std::to_string(i));
            normalized[static_cast<std::size_t>(pt)] = {v[layout.s_index(i)] / (2.0 * u),
                                                        v[layout.t_index(i)] / (2.0 * u)};
            scale[static_cast<std::size_t>(pt)] = u;
        }
        auto m0 = detail::match_triple(normalized, class0, tol);
        auto m1 = detail::match_triple(normalized, class1, tol);
        if (m0.has_value() == m1.has_value())
            throw StructureMismatch("decode: variable " + std::to_string(i) +
                                    (m0 ? " matches both patterns" : " matches neither pattern"));
        const bool value = m1.has_value();
        const auto& perm = value ? *m1 : *m0;
        out.assignment.bits[static_cast<std::size_t>(i - 1)] = value;
        out.diagnostics.variable_class[static_cast<std::size_t>(i - 1)] = value ? 1 : 0;
        for (int pt = 0; pt < 3; ++pt)
            out.diagnostics.mu[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(perm[static_cast<std::size_t>(pt)])] =
                scale[static_cast<std::size_t>(pt)];
    }

    Cnf3 phi{p, layout.clauses};
    out.diagnostics.falsified_counts = evaluate(phi, out.assignment).falsified_counts;
    return out;
}

//------------------------------------------------------------------------------
// The two-solution square fixture
//------------------------------------------------------------------------------

struct SquareGadget {
    IntermediateSimplexInstance instance;
    Simplex t0;
    Simplex t1;
};

inline SquareGadget square_gadget() {
    Polyhedron p{Matrix{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, Vec{0, 0, -1, -1}};
    IntermediateSimplexInstance inst{p, {Vec{0, 0.5}, Vec{1, 0.5}, Vec{0.5, 0.25}, Vec{0.5, 0.75}}};
    Simplex t0{{Vec{0, 0}, Vec{0, 1}, Vec{1, 0.5}}};
    Simplex t1{{Vec{1, 0}, Vec{1, 1}, Vec{0, 0.5}}};
    return {std::move(inst), std::move(t0), std::move(t1)};
}

//------------------------------------------------------------------------------
// DIMACS
//------------------------------------------------------------------------------

// Standard DIMACS CNF: a 'p cnf <vars> <clauses>' header, then clauses as
// whitespace-separated literals terminated by 0. Clauses must have exactly
// three distinct variables.
inline Cnf3 parse_dimacs(std::istream& in) {
    std::string line;
    int nvars = -1, nclauses = -1;
    std::vector<int> literals;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
        if (line[0] == 'p') {
            std::istringstream header(line);
            std::string tag, fmt;
            header >> tag >> fmt >> nvars >> nclauses;
            if (fmt != "cnf" || header.fail() || nvars < 1 || nclauses < 0)
                throw ParseError("DIMACS: malformed problem line: " + line);
            continue;
        }
        std::istringstream body(line);
        int lit;
        while (body >> lit) literals.push_back(lit);
        if (!body.eof())
            throw ParseError("DIMACS: non-integer token in clause data: " + line);
    }
    if (nvars < 0)
        throw ParseError("DIMACS: missing problem line");

    Cnf3 phi;
    phi.num_vars = nvars;
    std::array<Literal, 3> clause{};
    int in_clause = 0;
    for (int lit : literals) {
        if (lit == 0) {
            if (in_clause != 3)
                throw ParseError("DIMACS: clause with " + std::to_string(in_clause) +
                                 " literals; exactly 3 required");
            phi.clauses.push_back(clause);
            in_clause = 0;
            continue;
        }
        if (in_clause == 3)
            throw ParseError("DIMACS: clause with more than 3 literals");
        clause[static_cast<std::size_t>(in_clause++)] = {std::abs(lit), lit < 0};
    }
    if (in_clause != 0)
        throw ParseError("DIMACS: unterminated clause");
    if (nclauses >= 0 && phi.q() != nclauses)
        throw ParseError("DIMACS: clause count disagrees with the header");
    validate_cnf(phi); // range and distinctness checks
    return phi;
}

inline Cnf3 parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

inline std::string to_dimacs(const Cnf3& phi) {
    std::ostringstream out;
    out << "p cnf " << phi.num_vars << " " << phi.q() << "\n";
    for (const auto& clause : phi.clauses) {
        for (const Literal& lit : clause) out << (lit.negated ? -lit.var : lit.var) << " ";
        out << "0\n";
    }
    return out.str();
}

} // namespace exactnmf

#endif
