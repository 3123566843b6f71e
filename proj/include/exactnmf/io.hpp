#ifndef EXACTNMF_IO_HPP
#define EXACTNMF_IO_HPP
//------------------------------------------------------------------------------
// Text serialization shared by the library and the CLI. Every number is
// written with 17 significant digits so values round trip bit-identically.
//
// Formats (whitespace separated):
//   matrix            "m n" then m rows of n numbers (no tag line)
//   assignment        single line of 0/1 characters, variable i at position i
//   nmf_instance      tag, "m n k", then the matrix rows
//   intermediate_simplex  tag, "d n m", n rows of d+1 ([A | b]), m rows of d
//   simplex           tag, "d k", k rows of d
//   factor_pair       tag, "m k n", W rows then H rows
//   transcript        tag, "m k n deleted_count", deleted indices (if any),
//                     Qhat rows, D diagonal, then the original W0 and H0
//   gadget_layout     tag, "p q", then q clause lines of 3 signed literals
//------------------------------------------------------------------------------
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "exactnmf/matrix.hpp"
#include "exactnmf/reductions.hpp"
#include "exactnmf/sat.hpp"

namespace exactnmf {

inline std::string format_g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline double read_double(std::istream& in, const char* what) {
    double x;
    if (!(in >> x))
        throw ParseError(std::string("expected a number while reading ") + what);
    if (!std::isfinite(x))
        throw ParseError(std::string("non-finite value in ") + what);
    return x;
}

inline long read_count(std::istream& in, const char* what) {
    long n;
    if (!(in >> n) || n < 0)
        throw ParseError(std::string("expected a nonnegative count while reading ") + what);
    return n;
}

inline void expect_tag(std::istream& in, const std::string& tag) {
    std::string seen;
    if (!(in >> seen) || seen != tag)
        throw ParseError("expected '" + tag + "' file, found '" + seen + "'");
}

} // namespace detail

//------------------------------------------------------------------------------
// Matrices
//------------------------------------------------------------------------------

inline void write_matrix(std::ostream& out, const Matrix& m) {
    out << m.rows() << " " << m.cols() << "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j)
            out << (j ? " " : "") << format_g17(m(i, j));
        out << "\n";
    }
}

inline Matrix read_matrix(std::istream& in) {
    const long rows = detail::read_count(in, "matrix rows");
    const long cols = detail::read_count(in, "matrix cols");
    if (rows == 0 || cols == 0)
        throw ParseError("matrix: degenerate shape");
    Matrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = detail::read_double(in, "matrix entry");
    return m;
}

//------------------------------------------------------------------------------
// Assignments
//------------------------------------------------------------------------------

inline void write_assignment(std::ostream& out, const Assignment& sigma) {
    for (bool b : sigma.bits) out << (b ? '1' : '0');
    out << "\n";
}

inline Assignment read_assignment(std::istream& in) {
    std::string line;
    if (!(in >> line) || line.empty())
        throw ParseError("assignment: empty file");
    Assignment sigma;
    for (char c : line) {
        if (c != '0' && c != '1')
            throw ParseError("assignment: expected only 0/1 characters");
        sigma.bits.push_back(c == '1');
    }
    return sigma;
}

//------------------------------------------------------------------------------
// Tagged instance files
//------------------------------------------------------------------------------

inline void write_nmf_instance(std::ostream& out, const NmfInstance& inst) {
    out << "nmf_instance\n" << inst.a.rows() << " " << inst.a.cols() << " " << inst.k << "\n";
    for (std::size_t i = 0; i < inst.a.rows(); ++i) {
        for (std::size_t j = 0; j < inst.a.cols(); ++j)
            out << (j ? " " : "") << format_g17(inst.a(i, j));
        out << "\n";
    }
}

inline NmfInstance read_nmf_instance(std::istream& in, Tolerance tol = {}) {
    detail::expect_tag(in, "nmf_instance");
    const long m = detail::read_count(in, "rows"), n = detail::read_count(in, "cols");
    const long k = detail::read_count(in, "k");
    if (m < 1 || n < 1)
        throw ParseError("nmf_instance: degenerate shape");
    Matrix a(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = detail::read_double(in, "entry");
    return make_nmf_instance(std::move(a), static_cast<std::size_t>(k), tol);
}

inline void write_instance(std::ostream& out, const IntermediateSimplexInstance& inst) {
    out << "intermediate_simplex\n"
        << inst.dim() << " " << inst.p.facets() << " " << inst.num_points() << "\n";
    for (std::size_t i = 0; i < inst.p.facets(); ++i) {
        for (std::size_t j = 0; j < inst.dim(); ++j) out << format_g17(inst.p.a(i, j)) << " ";
        out << format_g17(inst.p.b[i]) << "\n";
    }
    for (const Vec& s : inst.s) {
        for (std::size_t j = 0; j < inst.dim(); ++j) out << (j ? " " : "") << format_g17(s[j]);
        out << "\n";
    }
}

inline IntermediateSimplexInstance read_instance(std::istream& in) {
    detail::expect_tag(in, "intermediate_simplex");
    const long d = detail::read_count(in, "dimension"), n = detail::read_count(in, "facets");
    const long m = detail::read_count(in, "points");
    if (d < 1 || n < 1 || m < 1)
        throw ParseError("intermediate_simplex: degenerate shape");
    Matrix a(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
    Vec b(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = detail::read_double(in, "constraint");
        b[i] = detail::read_double(in, "rhs");
    }
    std::vector<Vec> s(static_cast<std::size_t>(m), Vec(static_cast<std::size_t>(d)));
    for (Vec& point : s)
        for (double& x : point) x = detail::read_double(in, "point");
    return {{std::move(a), std::move(b)}, std::move(s)};
}

inline void write_simplex(std::ostream& out, const Simplex& t) {
    out << "simplex\n" << t.dim() << " " << t.k() << "\n";
    for (const Vec& v : t.vertices) {
        for (std::size_t j = 0; j < t.dim(); ++j) out << (j ? " " : "") << format_g17(v[j]);
        out << "\n";
    }
}

inline Simplex read_simplex(std::istream& in) {
    detail::expect_tag(in, "simplex");
    const long d = detail::read_count(in, "dimension"), k = detail::read_count(in, "vertices");
    if (d < 1 || k != d + 1)
        throw ParseError("simplex: expected k = d + 1 vertices");
    Simplex t;
    t.vertices.assign(static_cast<std::size_t>(k), Vec(static_cast<std::size_t>(d)));
    for (Vec& v : t.vertices)
        for (double& x : v) x = detail::read_double(in, "vertex");
    return t;
}

inline void write_factor_pair(std::ostream& out, const FactorPair& fp) {
    out << "factor_pair\n"
        << fp.w.rows() << " " << fp.w.cols() << " " << fp.h.cols() << "\n";
    for (std::size_t i = 0; i < fp.w.rows(); ++i) {
        for (std::size_t j = 0; j < fp.w.cols(); ++j) out << (j ? " " : "") << format_g17(fp.w(i, j));
        out << "\n";
    }
    for (std::size_t i = 0; i < fp.h.rows(); ++i) {
        for (std::size_t j = 0; j < fp.h.cols(); ++j) out << (j ? " " : "") << format_g17(fp.h(i, j));
        out << "\n";
    }
}

inline FactorPair read_factor_pair(std::istream& in) {
    detail::expect_tag(in, "factor_pair");
    const long m = detail::read_count(in, "rows"), k = detail::read_count(in, "k");
    const long n = detail::read_count(in, "cols");
    if (m < 1 || k < 1 || n < 1)
        throw ParseError("factor_pair: degenerate shape");
    Matrix w(static_cast<std::size_t>(m), static_cast<std::size_t>(k));
    Matrix h(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) = detail::read_double(in, "W entry");
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j) h(i, j) = detail::read_double(in, "H entry");
    return {std::move(w), std::move(h)};
}

inline void write_transcript(std::ostream& out, const ReductionTranscript& tr) {
    const Matrix& w0 = tr.original.w0;
    const Matrix& h0 = tr.original.h0;
    out << "transcript\n"
        << w0.rows() << " " << w0.cols() << " " << h0.cols() << " " << tr.deleted_rows.size() << "\n";
    if (!tr.deleted_rows.empty()) {
        for (std::size_t i = 0; i < tr.deleted_rows.size(); ++i)
            out << (i ? " " : "") << tr.deleted_rows[i];
        out << "\n";
    }
    for (std::size_t i = 0; i < tr.qhat.rows(); ++i) {
        for (std::size_t j = 0; j < tr.qhat.cols(); ++j) out << (j ? " " : "") << format_g17(tr.qhat(i, j));
        out << "\n";
    }
    for (std::size_t i = 0; i < tr.d_diag.size(); ++i) out << (i ? " " : "") << format_g17(tr.d_diag[i]);
    out << "\n";
    for (std::size_t i = 0; i < w0.rows(); ++i) {
        for (std::size_t j = 0; j < w0.cols(); ++j) out << (j ? " " : "") << format_g17(w0(i, j));
        out << "\n";
    }
    for (std::size_t i = 0; i < h0.rows(); ++i) {
        for (std::size_t j = 0; j < h0.cols(); ++j) out << (j ? " " : "") << format_g17(h0(i, j));
        out << "\n";
    }
}

inline ReductionTranscript read_transcript(std::istream& in) {
    detail::expect_tag(in, "transcript");
    const long m = detail::read_count(in, "rows"), k = detail::read_count(in, "k");
    const long n = detail::read_count(in, "cols"), deleted = detail::read_count(in, "deleted");
    if (m < 1 || k < 1 || n < 1 || deleted > m)
        throw ParseError("transcript: inconsistent header");
    ReductionTranscript tr{{}, Matrix(static_cast<std::size_t>(k), static_cast<std::size_t>(k)),
                           Vec(static_cast<std::size_t>(m - deleted)),
                           {Matrix(static_cast<std::size_t>(m), static_cast<std::size_t>(k)),
                            Matrix(static_cast<std::size_t>(k), static_cast<std::size_t>(n))}};
    for (long i = 0; i < deleted; ++i)
        tr.deleted_rows.push_back(static_cast<std::size_t>(detail::read_count(in, "deleted row")));
    for (std::size_t i = 0; i < tr.qhat.rows(); ++i)
        for (std::size_t j = 0; j < tr.qhat.cols(); ++j) tr.qhat(i, j) = detail::read_double(in, "Qhat");
    for (double& x : tr.d_diag) x = detail::read_double(in, "D diagonal");
    for (std::size_t i = 0; i < tr.original.w0.rows(); ++i)
        for (std::size_t j = 0; j < tr.original.w0.cols(); ++j)
            tr.original.w0(i, j) = detail::read_double(in, "W0");
    for (std::size_t i = 0; i < tr.original.h0.rows(); ++i)
        for (std::size_t j = 0; j < tr.original.h0.cols(); ++j)
            tr.original.h0(i, j) = detail::read_double(in, "H0");
    return tr;
}

inline void write_layout(std::ostream& out, const GadgetLayout& layout) {
    out << "gadget_layout\n" << layout.p << " " << layout.q << "\n";
    for (const auto& clause : layout.clauses) {
        for (std::size_t l = 0; l < 3; ++l)
            out << (l ? " " : "") << (clause[l].negated ? -clause[l].var : clause[l].var);
        out << "\n";
    }
}

inline GadgetLayout read_layout(std::istream& in) {
    detail::expect_tag(in, "gadget_layout");
    const long p = detail::read_count(in, "p"), q = detail::read_count(in, "q");
    if (p < 1)
        throw ParseError("gadget_layout: p must be positive");
    GadgetLayout layout{static_cast<int>(p), static_cast<int>(q), {}};
    for (long j = 0; j < q; ++j) {
        std::array<Literal, 3> clause{};
        for (std::size_t l = 0; l < 3; ++l) {
            long lit;
            if (!(in >> lit) || lit == 0 || std::abs(lit) > p)
                throw ParseError("gadget_layout: bad literal");
            clause[l] = {static_cast<int>(std::abs(lit)), lit < 0};
        }
        layout.clauses.push_back(clause);
    }
    return layout;
}

//------------------------------------------------------------------------------
// File helpers
//------------------------------------------------------------------------------

template <typename T, typename Reader>
T read_file(const std::string& path, Reader reader) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open file: " + path);
    try {
        return reader(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

template <typename Writer>
void write_file(const std::string& path, Writer writer) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write file: " + path);
    writer(out);
    if (!out)
        throw Error("write failed: " + path);
}

} // namespace exactnmf

#endif
