// Command-line front end: wires matrices, nested-simplex instances, and the
// 3-SAT gadget through the solve pipeline, with flat key=value reports.
//
// Exit codes: 0 solved/ok, 1 input error, 2 heuristic stall or failed check.
#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "exactnmf/exactnmf.hpp"

using namespace exactnmf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotSolved = 2;

void report(const std::string& key, const std::string& value) {
    std::cout << key << "=" << value << "\n";
}

void report(const std::string& key, double value) { report(key, format_g17(value)); }

void report(const std::string& key, std::size_t value) { report(key, std::to_string(value)); }

struct CommonFlags {
    double tol = 1e-9;
    double search_tol = 1e-8;
    std::uint64_t seed = 0;
    std::size_t max_sweeps = 200;
    std::size_t restarts = 3;
    std::size_t max_pivots = 200000;
};

void add_search_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--tol", flags.tol, "numeric tolerance (default 1e-9)");
    cmd->add_option("--search-tol", flags.search_tol, "search infeasibility tolerance (default 1e-8)");
    cmd->add_option("--seed", flags.seed, "random seed for restarts");
    cmd->add_option("--max-sweeps", flags.max_sweeps, "sweep limit per attempt");
    cmd->add_option("--restarts", flags.restarts, "restart attempts after a stall");
    cmd->add_option("--max-pivots", flags.max_pivots, "LP pivot limit");
}

SearchConfig make_search_config(const CommonFlags& flags) {
    SearchConfig cfg;
    cfg.infeasibility_tol = flags.search_tol;
    cfg.rng_seed = flags.seed;
    cfg.max_sweeps = flags.max_sweeps;
    cfg.restarts = flags.restarts;
    cfg.lp.max_pivots = flags.max_pivots;
    return cfg;
}

int cmd_nmf_solve(const std::string& matrix_path, std::size_t k, const std::string& out_w,
                  const std::string& out_h, const std::string& warm_path, const CommonFlags& flags) {
    Matrix a = read_file<Matrix>(matrix_path, [](std::istream& in) { return read_matrix(in); });
    NmfInstance inst = make_nmf_instance(std::move(a), k, Tolerance{flags.tol});

    NmfSolveConfig config;
    config.tol = Tolerance{flags.tol};
    config.search = make_search_config(flags);
    if (!warm_path.empty())
        config.warm_start =
            read_file<FactorPair>(warm_path, [](std::istream& in) { return read_factor_pair(in); });

    NmfOutcome out = solve_exact_nmf(inst, config);
    report("status", out.solved ? "solved" : "stalled");
    report("sweeps", out.sweeps);
    report("attempts", out.attempts);
    report("warm_start_used", std::string(out.warm_start_used ? "1" : "0"));
    if (!out.solved) {
        double total = 0.0, worst = 0.0;
        for (double x : out.vertex_infeasibility) {
            total += x;
            worst = std::max(worst, x);
        }
        report("total_infeasibility", total);
        report("worst_vertex_infeasibility", worst);
        return kExitNotSolved;
    }
    report("residual", out.residual);
    write_file(out_w, [&](std::ostream& o) { write_matrix(o, out.factors->w); });
    write_file(out_h, [&](std::ostream& o) { write_matrix(o, out.factors->h); });
    return kExitOk;
}

int cmd_reduce(const std::string& matrix_path, std::size_t k, const std::string& out_instance,
               const std::string& out_transcript, const CommonFlags& flags) {
    Tolerance tol{flags.tol};
    Matrix a = read_file<Matrix>(matrix_path, [](std::istream& in) { return read_matrix(in); });
    NmfInstance inst = make_nmf_instance(std::move(a), k, tol);
    if (inst.k < 2)
        throw InvalidArgument("reduce: k = 1 has no geometric form; solve it directly");
    P1Instance p1 = nmf_to_p1(inst, tol);
    RestrictionResult restriction = p1_to_restricted(p1, tol);
    IntermediateSimplexInstance simplex_inst = restricted_to_simplex(restriction.instance);
    validate_instance(simplex_inst, tol);
    write_file(out_instance, [&](std::ostream& o) { write_instance(o, simplex_inst); });
    write_file(out_transcript, [&](std::ostream& o) { write_transcript(o, restriction.transcript); });
    report("status", "ok");
    report("dimension", simplex_inst.dim());
    report("facets", simplex_inst.p.facets());
    report("points", simplex_inst.num_points());
    report("deleted_rows", restriction.transcript.deleted_rows.size());
    return kExitOk;
}

int cmd_is_solve(const std::string& instance_path, const std::string& out_simplex,
                 const std::string& warm_path, const CommonFlags& flags) {
    Tolerance tol{flags.tol};
    IntermediateSimplexInstance inst =
        read_file<IntermediateSimplexInstance>(instance_path, [](std::istream& in) { return read_instance(in); });
    validate_instance(inst, tol);
    SearchConfig cfg = make_search_config(flags);
    if (!warm_path.empty())
        cfg.initial = read_file<Simplex>(warm_path, [](std::istream& in) { return read_simplex(in); });
    SearchOutcome out = local_search(inst, cfg);
    report("status", out.solved ? "solved" : "stalled");
    report("sweeps", out.sweeps);
    report("attempts", out.attempts);
    if (!out.simplex.vertices.empty())
        write_file(out_simplex, [&](std::ostream& o) { write_simplex(o, out.simplex); });
    if (!out.solved) {
        double total = 0.0, worst = 0.0;
        for (double x : out.vertex_infeasibility) {
            total += x;
            worst = std::max(worst, x);
        }
        report("total_infeasibility", total);
        report("worst_vertex_infeasibility", worst);
        return kExitNotSolved;
    }
    VerifyReport rep = verify_solution(inst, out.simplex, Tolerance{flags.search_tol});
    report("worst_s_violation", rep.worst_s_violation);
    report("worst_p_violation", rep.worst_p_violation);
    return kExitOk;
}

int cmd_sat_encode(const std::string& cnf_path, const std::string& out_instance,
                   const std::string& out_layout) {
    Cnf3 phi = read_file<Cnf3>(cnf_path, [](std::istream& in) { return parse_dimacs(in); });
    EncodedInstance enc = encode(phi);
    write_file(out_instance, [&](std::ostream& o) { write_instance(o, enc.instance); });
    write_file(out_layout, [&](std::ostream& o) { write_layout(o, enc.layout); });
    report("status", "ok");
    report("variables", static_cast<std::size_t>(phi.p()));
    report("clauses", static_cast<std::size_t>(phi.q()));
    report("dimension", enc.instance.dim());
    report("facets", enc.instance.p.facets());
    report("points", enc.instance.num_points());
    return kExitOk;
}

int cmd_sat_witness(const std::string& cnf_path, const std::string& assignment_path,
                    const std::string& out_simplex, double lambda, const CommonFlags& flags) {
    Cnf3 phi = read_file<Cnf3>(cnf_path, [](std::istream& in) { return parse_dimacs(in); });
    Assignment sigma =
        read_file<Assignment>(assignment_path, [](std::istream& in) { return read_assignment(in); });
    if (sigma.bits.size() != static_cast<std::size_t>(phi.p()))
        throw InvalidArgument("sat-witness: assignment length does not match the formula");
    Simplex witness = witness_simplex(phi, sigma, lambda);
    write_file(out_simplex, [&](std::ostream& o) { write_simplex(o, witness); });
    EncodedInstance enc = encode(phi);
    VerifyReport rep = verify_solution(enc.instance, witness, Tolerance{flags.search_tol});
    report("status", "ok");
    report("verified", std::string(rep.ok ? "1" : "0"));
    report("worst_s_violation", rep.worst_s_violation);
    report("worst_p_violation", rep.worst_p_violation);
    Evaluation ev = evaluate(phi, sigma);
    report("assignment_satisfies", std::string(ev.satisfied ? "1" : "0"));
    return kExitOk;
}

int cmd_sat_decode(const std::string& instance_path, const std::string& layout_path,
                   const std::string& simplex_path, const std::string& out_assignment,
                   const CommonFlags& flags) {
    IntermediateSimplexInstance inst =
        read_file<IntermediateSimplexInstance>(instance_path, [](std::istream& in) { return read_instance(in); });
    GadgetLayout layout =
        read_file<GadgetLayout>(layout_path, [](std::istream& in) { return read_layout(in); });
    Simplex t = read_file<Simplex>(simplex_path, [](std::istream& in) { return read_simplex(in); });

    VerifyReport rep = verify_solution(inst, t, Tolerance{flags.search_tol});
    report("verified", std::string(rep.ok ? "1" : "0"));
    if (!rep.ok) {
        report("status", "not_a_solution");
        report("worst_s_violation", rep.worst_s_violation);
        report("worst_p_violation", rep.worst_p_violation);
        return kExitNotSolved;
    }
    DecodeResult dec = decode(inst, layout, t, std::max(flags.search_tol, 1e-6));
    write_file(out_assignment, [&](std::ostream& o) { write_assignment(o, dec.assignment); });
    report("status", "ok");
    std::string classes;
    for (int c : dec.diagnostics.variable_class) classes += (c ? '1' : '0');
    report("variable_classes", classes);
    std::string counts;
    for (std::size_t j = 0; j < dec.diagnostics.falsified_counts.size(); ++j)
        counts += (j ? "," : "") + std::to_string(dec.diagnostics.falsified_counts[j]);
    report("falsified_counts", counts);
    Cnf3 phi{layout.p, layout.clauses};
    report("satisfies", std::string(evaluate(phi, dec.assignment).satisfied ? "1" : "0"));
    return kExitOk;
}

int cmd_verify_instance(const std::string& instance_path, const std::string& simplex_path,
                        const CommonFlags& flags) {
    IntermediateSimplexInstance inst =
        read_file<IntermediateSimplexInstance>(instance_path, [](std::istream& in) { return read_instance(in); });
    Simplex t = read_file<Simplex>(simplex_path, [](std::istream& in) { return read_simplex(in); });
    VerifyReport rep = verify_solution(inst, t, Tolerance{flags.search_tol});
    report("ok", std::string(rep.ok ? "1" : "0"));
    report("worst_s_violation", rep.worst_s_violation);
    report("worst_p_violation", rep.worst_p_violation);
    return rep.ok ? kExitOk : kExitNotSolved;
}

int cmd_verify_factors(const std::string& matrix_path, const std::string& w_path,
                       const std::string& h_path, const CommonFlags& flags) {
    Tolerance tol{flags.tol};
    Matrix a = read_file<Matrix>(matrix_path, [](std::istream& in) { return read_matrix(in); });
    Matrix w = read_file<Matrix>(w_path, [](std::istream& in) { return read_matrix(in); });
    Matrix h = read_file<Matrix>(h_path, [](std::istream& in) { return read_matrix(in); });
    if (w.rows() != a.rows() || h.cols() != a.cols() || w.cols() != h.rows())
        throw InvalidArgument("verify: factor shapes do not match the matrix");
    const double residual = (w * h - a).max_abs();
    const double w_min = w.min_entry(), h_min = h.min_entry();
    const bool nonneg = w_min >= -tol.threshold(w.max_abs()) && h_min >= -tol.threshold(h.max_abs());
    const bool ok = nonneg && residual <= tol.threshold(a.max_abs());
    report("ok", std::string(ok ? "1" : "0"));
    report("residual", residual);
    report("min_w_entry", w_min);
    report("min_h_entry", h_min);
    return ok ? kExitOk : kExitNotSolved;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact nonnegative matrix factorization via nested simplexes"};
    app.set_help_flag("--help", "print usage"); // frees -h for the H factor flag
    app.require_subcommand(1);

    CommonFlags flags;

    // nmf-solve
    std::string matrix_path, out_w = "W.txt", out_h = "H.txt", warm_path;
    std::size_t k = 0;
    auto* nmf = app.add_subcommand("nmf-solve", "factor a nonnegative matrix exactly");
    nmf->add_option("--matrix", matrix_path, "matrix file")->required();
    nmf->add_option("--k", k, "rank of the matrix")->required();
    nmf->add_option("--out-w", out_w, "output file for W");
    nmf->add_option("--out-h", out_h, "output file for H");
    nmf->add_option("--warm-start", warm_path, "factor_pair file to warm start from");
    add_search_flags(nmf, flags);

    // reduce
    std::string out_instance = "instance.txt", out_transcript = "transcript.txt";
    auto* reduce = app.add_subcommand("reduce", "map a matrix to its nested-simplex instance");
    reduce->add_option("--matrix", matrix_path, "matrix file")->required();
    reduce->add_option("--k", k, "rank of the matrix")->required();
    reduce->add_option("--out-instance", out_instance, "output instance file");
    reduce->add_option("--out-transcript", out_transcript, "output transcript file");
    reduce->add_option("--tol", flags.tol, "numeric tolerance");

    // is-solve
    std::string instance_path, out_simplex = "simplex.txt";
    auto* issolve = app.add_subcommand("is-solve", "search for a nested simplex");
    issolve->add_option("--instance", instance_path, "instance file")->required();
    issolve->add_option("--out-simplex", out_simplex, "output simplex file");
    issolve->add_option("--warm-start", warm_path, "simplex file to warm start from");
    add_search_flags(issolve, flags);

    // sat-encode
    std::string cnf_path, out_layout = "layout.txt";
    auto* encode_cmd = app.add_subcommand("sat-encode", "encode a DIMACS 3-SAT formula");
    encode_cmd->add_option("--cnf", cnf_path, "DIMACS CNF file")->required();
    encode_cmd->add_option("--out-instance", out_instance, "output instance file");
    encode_cmd->add_option("--out-layout", out_layout, "output layout file");

    // sat-witness
    std::string assignment_path;
    double lambda = 0.0;
    auto* witness_cmd = app.add_subcommand("sat-witness", "build the witness simplex of an assignment");
    witness_cmd->add_option("--cnf", cnf_path, "DIMACS CNF file")->required();
    witness_cmd->add_option("--assignment", assignment_path, "assignment file (0/1 line)")->required();
    witness_cmd->add_option("--out-simplex", out_simplex, "output simplex file");
    witness_cmd->add_option("--lambda", lambda, "ray scale (default 8p(3p+q))");
    witness_cmd->add_option("--search-tol", flags.search_tol, "verification tolerance");

    // sat-decode
    std::string layout_path, simplex_path, out_assignment = "assignment.txt";
    auto* decode_cmd = app.add_subcommand("sat-decode", "decode an assignment from a solution simplex");
    decode_cmd->add_option("--instance", instance_path, "instance file")->required();
    decode_cmd->add_option("--layout", layout_path, "layout file")->required();
    decode_cmd->add_option("--simplex", simplex_path, "simplex file")->required();
    decode_cmd->add_option("--out-assignment", out_assignment, "output assignment file");
    decode_cmd->add_option("--search-tol", flags.search_tol, "verification tolerance");

    // verify
    std::string w_path, h_path;
    auto* verify_cmd = app.add_subcommand("verify", "check a simplex or factor pair");
    verify_cmd->add_option("--instance", instance_path, "instance file");
    verify_cmd->add_option("--simplex", simplex_path, "simplex file");
    verify_cmd->add_option("--matrix", matrix_path, "matrix file (factor mode)");
    verify_cmd->add_option("--w", w_path, "W factor file");
    verify_cmd->add_option("--h", h_path, "H factor file");
    verify_cmd->add_option("--tol", flags.tol, "numeric tolerance");
    verify_cmd->add_option("--search-tol", flags.search_tol, "verification tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (nmf->parsed())
            return cmd_nmf_solve(matrix_path, k, out_w, out_h, warm_path, flags);
        if (reduce->parsed())
            return cmd_reduce(matrix_path, k, out_instance, out_transcript, flags);
        if (issolve->parsed())
            return cmd_is_solve(instance_path, out_simplex, warm_path, flags);
        if (encode_cmd->parsed())
            return cmd_sat_encode(cnf_path, out_instance, out_layout);
        if (witness_cmd->parsed())
            return cmd_sat_witness(cnf_path, assignment_path, out_simplex, lambda, flags);
        if (decode_cmd->parsed())
            return cmd_sat_decode(instance_path, layout_path, simplex_path, out_assignment, flags);
        if (verify_cmd->parsed()) {
            if (!instance_path.empty() && !simplex_path.empty())
                return cmd_verify_instance(instance_path, simplex_path, flags);
            if (!matrix_path.empty() && !w_path.empty() && !h_path.empty())
                return cmd_verify_factors(matrix_path, w_path, h_path, flags);
            throw InvalidArgument("verify: need --instance/--simplex or --matrix/--w/--h");
        }
    } catch (const std::exception& e) {
        std::cerr << "error=" << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
