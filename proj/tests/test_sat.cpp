#include <catch2/catch_amalgamated.hpp>

#include "exactnmf/sat.hpp"
#include "exactnmf/search.hpp"
#include "test_util.hpp"

using namespace exactnmf;
using testutil::Rng;

namespace {

Cnf3 one_clause_all_plain() {
    return {3, {{{Literal{1, false}, Literal{2, false}, Literal{3, false}}}}};
}

Assignment bits(std::initializer_list<int> values) {
    Assignment sigma;
    for (int v : values) sigma.bits.push_back(v != 0);
    return sigma;
}

// Every 3-distinct-variable clause over p variables, in a fixed order.
std::vector<std::array<Literal, 3>> all_clauses(int p) {
    std::vector<std::array<Literal, 3>> out;
    for (int a = 1; a <= p; ++a)
        for (int b = a + 1; b <= p; ++b)
            for (int c = b + 1; c <= p; ++c)
                for (int mask = 0; mask < 8; ++mask)
                    out.push_back({Literal{a, (mask & 1) != 0}, Literal{b, (mask & 2) != 0},
                                   Literal{c, (mask & 4) != 0}});
    return out;
}

} // namespace

TEST_CASE("evaluate counts falsified literals") {
    Cnf3 phi = one_clause_all_plain();
    CHECK(evaluate(phi, bits({1, 1, 1})).falsified_counts == std::vector<int>{0});
    Evaluation all_false = evaluate(phi, bits({0, 0, 0}));
    CHECK(all_false.falsified_counts == std::vector<int>{3});
    CHECK_FALSE(all_false.satisfied);

    Cnf3 mixed{3, {{{Literal{1, false}, Literal{2, true}, Literal{3, false}}}}};
    Evaluation ev = evaluate(mixed, bits({0, 1, 0}));
    CHECK(ev.falsified_counts == std::vector<int>{3});
    CHECK_FALSE(ev.satisfied);
}

TEST_CASE("brute_force_sat finds the first satisfier in lexicographic order") {
    Cnf3 phi = one_clause_all_plain();
    auto sigma = brute_force_sat(phi);
    REQUIRE(sigma.has_value());
    // all-false fails; (0,0,1) is the lexicographically first satisfier
    CHECK(sigma->bits == std::vector<bool>{false, false, true});

    // all 8 sign patterns over 3 variables cannot be satisfied simultaneously
    Cnf3 unsat{3, all_clauses(3)};
    REQUIRE(unsat.q() == 8);
    CHECK_FALSE(brute_force_sat(unsat).has_value());

    Cnf3 big{25, {}};
    CHECK_THROWS_AS(brute_force_sat(big), TooLarge);
}

TEST_CASE("brute_force_sat answers agree with evaluate on random formulas") {
    Rng rng(606);
    auto clauses4 = all_clauses(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::size_t> qq(1, 4), pick(0, clauses4.size() - 1);
        Cnf3 phi{4, {}};
        const std::size_t q = qq(rng);
        for (std::size_t j = 0; j < q; ++j) phi.clauses.push_back(clauses4[pick(rng)]);
        auto sigma = brute_force_sat(phi);
        if (sigma) CHECK(evaluate(phi, *sigma).satisfied);
    }
}

TEST_CASE("cnf validation rejects repeated variables and bad ranges") {
    Cnf3 twice{3, {{{Literal{1, false}, Literal{1, true}, Literal{2, false}}}}};
    CHECK_THROWS_AS(validate_cnf(twice), InvalidArgument);
    Cnf3 out_of_range{2, {{{Literal{1, false}, Literal{2, false}, Literal{3, false}}}}};
    CHECK_THROWS_AS(validate_cnf(out_of_range), InvalidArgument);
}

TEST_CASE("encode emits the documented sizes and point coordinates") {
    Cnf3 phi = one_clause_all_plain(); // p=3, q=1
    EncodedInstance enc = encode(phi);
    CHECK(enc.instance.dim() == 10);
    CHECK(enc.instance.p.facets() == 22); // 6p + 4q
    CHECK(enc.instance.num_points() == 15); // 4p + q + 2

    // the blended point: s,t entries 1/12, u entries 1/6, v entry 2.5/24
    const Vec& b = enc.instance.s[1];
    for (int i = 1; i <= 3; ++i) {
        CHECK(b[enc.layout.s_index(i)] == 1.0 / 12.0);
        CHECK(b[enc.layout.t_index(i)] == 1.0 / 12.0);
        CHECK(b[enc.layout.u_index(i)] == 1.0 / 6.0);
    }
    CHECK(b[enc.layout.v_index(1)] == 2.5 / 24.0);

    // the third probe point of each variable projects to (1/4, 1/8, 1/2)
    for (int i = 1; i <= 3; ++i) {
        const Vec& r3 = enc.instance.s[static_cast<std::size_t>(2 + 1 + 4 * (i - 1) + 2)];
        CHECK(r3[enc.layout.s_index(i)] == 0.25);
        CHECK(r3[enc.layout.t_index(i)] == 0.125);
        CHECK(r3[enc.layout.u_index(i)] == 0.5);
    }
}

TEST_CASE("encodings satisfy the instance side constraints for random formulas") {
    Rng rng(707);
    for (int trial = 0; trial < 25; ++trial) {
        std::uniform_int_distribution<int> pp(3, 5);
        const int p = pp(rng);
        auto clauses = all_clauses(p);
        std::uniform_int_distribution<std::size_t> qq(1, 6), pick(0, clauses.size() - 1);
        Cnf3 phi{p, {}};
        const std::size_t q = qq(rng);
        for (std::size_t j = 0; j < q; ++j) phi.clauses.push_back(clauses[pick(rng)]);
        EncodedInstance enc = encode(phi); // validate_instance runs inside
        CHECK(enc.instance.p.facets() == static_cast<std::size_t>(6 * p) + 4 * q);
        CHECK(enc.instance.num_points() == static_cast<std::size_t>(4 * p) + q + 2);
    }
}

TEST_CASE("witness vertices follow the published patterns") {
    Cnf3 phi = one_clause_all_plain();
    Assignment sigma = bits({0, 0, 0}); // everything in the false class
    Simplex t = witness_simplex(phi, sigma);
    GadgetLayout layout{3, 1, phi.clauses};
    REQUIRE(t.k() == 11); // 3p + q + 1

    // g_{i,3} for a false variable: mu*(1, 1/2, 1) with mu = 5/8
    const Vec& g13 = t.vertices[2 + 3 - 1]; // origin, ray, then g_{1,1..3}
    CHECK(g13[layout.s_index(1)] == 5.0 / 8.0);
    CHECK(g13[layout.t_index(1)] == 5.0 / 16.0);
    CHECK(g13[layout.u_index(1)] == 5.0 / 8.0);

    // plain falsified literal: the second vertex leans on v_j
    const Vec& g12 = t.vertices[2 + 2 - 1];
    CHECK(g12[layout.v_index(1)] == 5.0 / 8.0);
}

TEST_CASE("a satisfying witness verifies; the all-false witness fails at the blended point") {
    Cnf3 phi = one_clause_all_plain();
    EncodedInstance enc = encode(phi);

    Assignment good = bits({1, 0, 0});
    Simplex witness = witness_simplex(phi, good);
    CHECK(verify_solution(enc.instance, witness, Tolerance{1e-8}).ok);

    Assignment bad = bits({0, 0, 0}); // m_1 = 3
    Simplex failing = witness_simplex(phi, bad);
    VerifyReport rep = verify_solution(enc.instance, failing, Tolerance{1e-8});
    CHECK_FALSE(rep.ok);
    // the failure is at the blended point: its ray coefficient goes negative
    Vec lambda = barycentric(failing, enc.instance.s[1]);
    CHECK(*std::min_element(lambda.begin(), lambda.end()) < -1e-9);
    for (std::size_t pt = 0; pt < enc.instance.num_points(); ++pt) {
        if (pt == 1) continue;
        Vec lam = barycentric(failing, enc.instance.s[pt]);
        CHECK(*std::min_element(lam.begin(), lam.end()) >= -1e-9);
    }
}

TEST_CASE("decode inverts the witness and classifies the true pattern") {
    Cnf3 phi = one_clause_all_plain();
    EncodedInstance enc = encode(phi);
    Assignment sigma = bits({1, 0, 1});
    Simplex witness = witness_simplex(phi, sigma);
    DecodeResult dec = decode(enc.instance, enc.layout, witness);
    CHECK(dec.assignment.bits == sigma.bits);
    CHECK(dec.diagnostics.variable_class == std::vector<int>{1, 0, 1});
    CHECK(dec.diagnostics.falsified_counts == std::vector<int>{1});
    for (const auto& m : dec.diagnostics.mu)
        for (double v : m) CHECK(v == 5.0 / 8.0);
    for (double lam : dec.diagnostics.ray_scales) CHECK(lam >= 1.0);

    // a C1 variable's normalized triple contains (1/2, 0)
    GadgetLayout layout = enc.layout;
    bool found = false;
    for (std::size_t vx = 0; vx < witness.k(); ++vx) {
        const Vec& v = witness.vertices[vx];
        const double u = v[layout.u_index(1)];
        if (u > 1e-9 && std::abs(v[layout.s_index(1)] / (2 * u) - 0.5) < 1e-12 &&
            std::abs(v[layout.t_index(1)] / (2 * u)) < 1e-12)
            found = true;
    }
    CHECK(found);
}

TEST_CASE("decode round trips every satisfying assignment at small scale") {
    auto clauses3 = all_clauses(3);
    Rng rng(808);
    std::uniform_int_distribution<std::size_t> pick(0, clauses3.size() - 1), qq(1, 3);
    int round_trips = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Cnf3 phi{3, {}};
        const std::size_t q = qq(rng);
        for (std::size_t j = 0; j < q; ++j) phi.clauses.push_back(clauses3[pick(rng)]);
        EncodedInstance enc = encode(phi);
        for (int word = 0; word < 8; ++word) {
            Assignment sigma = bits({(word >> 2) & 1, (word >> 1) & 1, word & 1});
            if (!evaluate(phi, sigma).satisfied) continue;
            Simplex witness = witness_simplex(phi, sigma);
            DecodeResult dec = decode(enc.instance, enc.layout, witness);
            CHECK(dec.assignment.bits == sigma.bits);
            ++round_trips;
        }
    }
    CHECK(round_trips > 40);
}

TEST_CASE("decode rejects structurally broken simplexes") {
    Cnf3 phi = one_clause_all_plain();
    EncodedInstance enc = encode(phi);
    Simplex witness = witness_simplex(phi, bits({1, 0, 0}));

    Simplex no_origin = witness;
    for (std::size_t c = 0; c < no_origin.dim(); ++c) no_origin.vertices[0][c] = 0.3;
    CHECK_THROWS_AS(decode(enc.instance, enc.layout, no_origin), StructureMismatch);

    Simplex bad_triple = witness;
    bad_triple.vertices[2][enc.layout.t_index(1)] = 0.4; // breaks the pattern match
    CHECK_THROWS_AS(decode(enc.instance, enc.layout, bad_triple), StructureMismatch);
}

TEST_CASE("the square fixture has its two published solutions") {
    SquareGadget gadget = square_gadget();
    validate_instance(gadget.instance);
    CHECK(verify_solution(gadget.instance, gadget.t0).ok);
    CHECK(verify_solution(gadget.instance, gadget.t1).ok);

    Simplex corner{{Vec{0, 0}, Vec{1, 0}, Vec{1, 1}}};
    CHECK_FALSE(verify_solution(gadget.instance, corner).ok);

    Simplex shrunk = gadget.t0;
    Vec centroid{1.0 / 3.0, 0.5};
    for (Vec& v : shrunk.vertices)
        for (std::size_t c = 0; c < 2; ++c) v[c] = centroid[c] + 0.99 * (v[c] - centroid[c]);
    CHECK_FALSE(verify_solution(gadget.instance, shrunk).ok);
}

TEST_CASE("solutions found by local search decode to satisfying assignments") {
    // smallest encoding: p=3, q=1; warm start the search at the witness to
    // keep this test fast, then decode the simplex the search returns
    Cnf3 phi = one_clause_all_plain();
    EncodedInstance enc = encode(phi);
    SearchConfig cfg;
    cfg.initial = witness_simplex(phi, bits({0, 1, 0}));
    SearchOutcome out = local_search(enc.instance, cfg);
    REQUIRE(out.solved);
    CHECK(out.sweeps == 1);
    // the witness is a fixed point: no vertex moves
    for (std::size_t v = 0; v < out.simplex.k(); ++v)
        for (std::size_t c = 0; c < out.simplex.dim(); ++c)
            CHECK(out.simplex.vertices[v][c] == cfg.initial->vertices[v][c]);
    DecodeResult dec = decode(enc.instance, enc.layout, out.simplex);
    CHECK(evaluate(phi, dec.assignment).satisfied);
}

TEST_CASE("DIMACS parsing accepts the standard form and rejects bad clauses") {
    Cnf3 phi = parse_dimacs("c comment\np cnf 3 2\n1 -2 3 0\n-1 2 -3 0\n");
    CHECK(phi.num_vars == 3);
    REQUIRE(phi.q() == 2);
    CHECK(phi.clauses[0][1].var == 2);
    CHECK(phi.clauses[0][1].negated);

    // round trip through the writer
    Cnf3 again = parse_dimacs(to_dimacs(phi));
    CHECK(again.num_vars == phi.num_vars);
    CHECK(again.q() == phi.q());

    CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 -2 0\n"), ParseError);           // 2 literals
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 3 4 0\n"), ParseError);        // 4 literals
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 1 2 0\n"), InvalidArgument);     // repeated var
    CHECK_THROWS_AS(parse_dimacs("1 2 3 0\n"), ParseError);                     // no header
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 2\n1 2 3 0\n"), ParseError);          // count mismatch
}
