#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "exactnmf/reductions.hpp"
#include "exactnmf/search.hpp"
#include "test_util.hpp"

using namespace exactnmf;
using testutil::Rng;

namespace {

// The two-solution unit-square fixture: S pins the triangle to one of two
// mirror-image solutions.
IntermediateSimplexInstance square_instance() {
    Polyhedron p{Matrix{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, Vec{0, 0, -1, -1}};
    return {p, {Vec{0, 0.5}, Vec{1, 0.5}, Vec{0.5, 0.25}, Vec{0.5, 0.75}}};
}

Simplex t0() { return {{Vec{0, 0}, Vec{0, 1}, Vec{1, 0.5}}}; }
Simplex t1() { return {{Vec{1, 0}, Vec{1, 1}, Vec{0, 0.5}}}; }

bool same_up_to_permutation(const Simplex& a, const Simplex& b, double tol) {
    if (a.k() != b.k()) return false;
    std::vector<bool> used(b.k(), false);
    for (const Vec& va : a.vertices) {
        bool matched = false;
        for (std::size_t j = 0; j < b.k() && !matched; ++j) {
            if (used[j]) continue;
            double diff = 0.0;
            for (std::size_t c = 0; c < va.size(); ++c) diff = std::max(diff, std::abs(va[c] - b.vertices[j][c]));
            if (diff <= tol) {
                used[j] = true;
                matched = true;
            }
        }
        if (!matched) return false;
    }
    return true;
}

} // namespace

TEST_CASE("solve_rank2 takes the whole interval when it is bounded") {
    IntermediateSimplexInstance inst{{Matrix{{1}, {-1}}, Vec{0, -1}}, {Vec{0.2}, Vec{0.7}}};
    Simplex t = solve_rank2(inst);
    REQUIRE(t.k() == 2);
    CHECK(t.vertices[0][0] == 0.0);
    CHECK(t.vertices[1][0] == 1.0);
    CHECK(verify_solution(inst, t).ok);
}

TEST_CASE("solve_rank2 clamps an unbounded side to the extreme of S") {
    // x >= 0 and x >= -1: unbounded above, [A,b] still rank 2
    IntermediateSimplexInstance inst{{Matrix{{1}, {1}}, Vec{0, -1}}, {Vec{1}, Vec{3}}};
    Simplex t = solve_rank2(inst);
    CHECK(t.vertices[0][0] == 0.0);
    CHECK(t.vertices[1][0] == 3.0);
    CHECK(verify_solution(inst, t).ok);
}

TEST_CASE("solve_rank2 rejects an empty interval") {
    IntermediateSimplexInstance inst{{Matrix{{1}, {-1}}, Vec{2, -1}}, {Vec{1.5}}};
    CHECK_THROWS_AS(solve_rank2(inst), EmptyPolyhedron);
}

TEST_CASE("initial_simplex strictly contains its points") {
    std::vector<Vec> pts{{0, 0}, {1, 0}, {0, 1}};
    Simplex t = initial_simplex(pts, 2.0);
    REQUIRE(t.k() == 3);
    for (const Vec& p : pts) {
        Vec lambda = barycentric(t, p);
        CHECK(*std::min_element(lambda.begin(), lambda.end()) > 0.0);
    }
}

TEST_CASE("initial_simplex handles a tight cluster and the square fixture") {
    std::vector<Vec> cluster{{0.01, 0.0}, {0.0, 0.01}, {0.01, 0.01}};
    Simplex t = initial_simplex(cluster, 2.0);
    for (const Vec& p : cluster) {
        Vec lambda = barycentric(t, p);
        CHECK(*std::min_element(lambda.begin(), lambda.end()) > 0.0);
    }

    IntermediateSimplexInstance inst = square_instance();
    Simplex big = initial_simplex(inst.s, 2.0);
    for (const Vec& p : inst.s) {
        Vec lambda = barycentric(big, p);
        CHECK(*std::min_element(lambda.begin(), lambda.end()) > 0.0);
    }
}

TEST_CASE("initial_simplex rejects points that do not span") {
    std::vector<Vec> line{{0, 0}, {1, 1}, {2, 2}};
    CHECK_THROWS_AS(initial_simplex(line, 2.0), DegenerateSpan);
}

TEST_CASE("feasible region of the last vertex has the advertised row counts") {
    IntermediateSimplexInstance inst = square_instance(); // k=3, m=4, n=4
    std::vector<Vec> fixed{{0, 0}, {0, 1}};
    VertexFeasibleRegion region = feasible_region_last_vertex(inst, fixed);
    CHECK(region.eq.size() == 12);   // m*k
    CHECK(region.ineq.size() == 16); // n + m*k
    // (0,1/2) lies in the hull of the fixed vertices; its block is vacuous
    REQUIRE(region.vacuous.size() == 4);
    CHECK(region.vacuous[0]);
    CHECK_FALSE(region.vacuous[1]);
    CHECK_FALSE(region.vacuous[2]);
    CHECK_FALSE(region.vacuous[3]);
}

TEST_CASE("feasible region contains the known completing vertex") {
    IntermediateSimplexInstance inst = square_instance();
    std::vector<Vec> fixed{{0, 0}, {0, 1}};
    VertexFeasibleRegion region = feasible_region_last_vertex(inst, fixed);

    // Pin v_k = (1, 1/2) and ask the LP whether the block system is feasible.
    LpProblem lp;
    lp.num_vars = region.num_vars();
    lp.objective.assign(lp.num_vars, 0.0);
    lp.eq = region.eq;
    lp.ge = region.ineq;
    Vec pin(lp.num_vars, 0.0);
    pin[0] = 1.0;
    lp.eq.add(pin, 1.0);
    Vec pin2(lp.num_vars, 0.0);
    pin2[1] = 1.0;
    lp.eq.add(pin2, 0.5);
    CHECK(lp_solve(lp).status == LpStatus::optimal);

    // ...and that a position violating coverage is excluded: v_k = (0.1, 0.5)
    // cannot cover (1, 1/2).
    LpProblem bad = lp;
    bad.eq.rhs[bad.eq.size() - 2] = 0.1;
    CHECK(lp_solve(bad).status == LpStatus::infeasible);
}

TEST_CASE("reposition is a fixed point on a verified solution") {
    IntermediateSimplexInstance inst = square_instance();
    Simplex t = t0();
    for (std::size_t v = 0; v < 3; ++v) {
        RepositionResult r = reposition_vertex(inst, t, v, 1e-8);
        CHECK(r.infeasibility <= 1e-8);
        for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(r.vertex[c] - t.vertices[v][c]) < 1e-9);
    }
}

TEST_CASE("reposition repairs a perturbed vertex") {
    IntermediateSimplexInstance inst = square_instance();
    Simplex t = t0();
    t.vertices[2] = {1.2, 0.5}; // pushed outside the square
    RepositionResult r = reposition_vertex(inst, t, 2, 1e-8);
    CHECK(r.infeasibility <= 1e-8);
    t.vertices[2] = r.vertex;
    CHECK(verify_solution(inst, t).ok);
}

TEST_CASE("first reposition of an oversized simplex strictly reduces that vertex's infeasibility") {
    IntermediateSimplexInstance inst = square_instance();
    Simplex t = initial_simplex(inst.s, 2.0);
    const double before =
        std::max(0.0, point_in_polyhedron(inst.p, t.vertices[0]).worst_violation);
    REQUIRE(before > 0.1); // the oversized simplex pokes out of the square
    RepositionResult r = reposition_vertex(inst, t, 0, 1e-8);
    CHECK(r.infeasibility < before);
}

TEST_CASE("reposition never increases a vertex's infeasibility across a sweep") {
    IntermediateSimplexInstance inst = square_instance();
    Simplex t = initial_simplex(inst.s, 2.0);
    for (std::size_t v = 0; v < t.k(); ++v) {
        const double before =
            std::max(0.0, point_in_polyhedron(inst.p, t.vertices[v]).worst_violation);
        RepositionResult r = reposition_vertex(inst, t, v, 1e-8);
        CHECK(r.infeasibility <= before + 1e-9);
        t.vertices[v] = r.vertex;
    }
}

TEST_CASE("local search solves the square fixture") {
    IntermediateSimplexInstance inst = square_instance();
    SearchConfig cfg;
    cfg.rng_seed = 1;
    SearchOutcome out = local_search(inst, cfg);
    REQUIRE(out.solved);
    CHECK(verify_solution(inst, out.simplex).ok);
    const bool is_t0 = same_up_to_permutation(out.simplex, t0(), 1e-6);
    const bool is_t1 = same_up_to_permutation(out.simplex, t1(), 1e-6);
    CHECK((is_t0 || is_t1));
}

TEST_CASE("warm-started search is a fixed point") {
    IntermediateSimplexInstance inst = square_instance();
    SearchConfig cfg;
    cfg.initial = t0();
    SearchOutcome out = local_search(inst, cfg);
    REQUIRE(out.solved);
    CHECK(out.sweeps == 1);
    CHECK(same_up_to_permutation(out.simplex, t0(), 1e-9));
}

TEST_CASE("verify_solution accepts the two solutions and rejects others") {
    IntermediateSimplexInstance inst = square_instance();
    CHECK(verify_solution(inst, t0()).ok);
    CHECK(verify_solution(inst, t1()).ok);

    Simplex corner{{Vec{0, 0}, Vec{1, 0}, Vec{0, 1}}};
    VerifyReport rep = verify_solution(inst, corner);
    CHECK_FALSE(rep.ok);
    CHECK(rep.worst_s_violation > 0.1); // (1,1/2) and (1/2,3/4) fall outside

    // shrinking toward the centroid loses the boundary point (0,1/2)
    Simplex shrunk = t0();
    Vec centroid{(0.0 + 0.0 + 1.0) / 3.0, (0.0 + 1.0 + 0.5) / 3.0};
    for (Vec& v : shrunk.vertices)
        for (std::size_t c = 0; c < 2; ++c) v[c] = centroid[c] + 0.99 * (v[c] - centroid[c]);
    CHECK_FALSE(verify_solution(inst, shrunk).ok);

    // an oversized simplex fails on the P side but not the S side
    Simplex big = initial_simplex(inst.s, 2.0);
    VerifyReport rep2 = verify_solution(inst, big);
    CHECK_FALSE(rep2.ok);
    CHECK(rep2.worst_s_violation <= 0.0);
    CHECK(rep2.worst_p_violation > 0.1);
}

TEST_CASE("a reduced rank-2 matrix solves through the interval form") {
    Rng rng(616);
    Matrix a = testutil::random_nonneg_matrix(rng, 4, 2) * testutil::random_nonneg_matrix(rng, 2, 4);
    REQUIRE(rank(a) == 2);
    P1Instance p1 = nmf_to_p1(make_nmf_instance(a, 2));
    RestrictionResult restriction = p1_to_restricted(p1);
    IntermediateSimplexInstance inst = restricted_to_simplex(restriction.instance);
    validate_instance(inst);
    REQUIRE(inst.dim() == 1);

    Simplex t = solve_rank2(inst);
    CHECK(verify_solution(inst, t).ok);

    Matrix q = restricted_solution_to_p1(restriction.transcript, simplex_solution_to_q(t));
    FactorPair fp = p1_solution_to_nmf(p1, q);
    CHECK((fp.w * fp.h - a).max_abs() <= 1e-9 * std::max(1.0, a.max_abs()));
    CHECK(fp.w.min_entry() >= -1e-9);
    CHECK(fp.h.min_entry() >= -1e-9);
}

TEST_CASE("the progress callback sees every sweep") {
    IntermediateSimplexInstance inst = square_instance();
    SearchConfig cfg;
    cfg.rng_seed = 1;
    std::vector<std::pair<std::size_t, double>> log;
    cfg.progress = [&](std::size_t sweep, double total) { log.emplace_back(sweep, total); };
    SearchOutcome out = local_search(inst, cfg);
    REQUIRE(out.solved);
    REQUIRE_FALSE(log.empty());
    CHECK(log.front().first == 0);
    CHECK(log.back().second <= 1e-8 * 3);
}

TEST_CASE("a tie-break direction never worsens the repositioned vertex") {
    IntermediateSimplexInstance inst = square_instance();
    Rng rng(717);
    Simplex t = initial_simplex(inst.s, 2.0);
    for (int round = 0; round < 6; ++round) {
        const std::size_t v = static_cast<std::size_t>(round) % t.k();
        const double before =
            std::max(0.0, point_in_polyhedron(inst.p, t.vertices[v]).worst_violation);
        Vec dir = testutil::random_vec(rng, 2);
        RepositionResult r = reposition_vertex(inst, t, v, 1e-8, {}, &dir);
        CHECK(r.infeasibility <= before + 1e-9);
        t.vertices[v] = r.vertex;
    }
}

TEST_CASE("instance validation rejects broken side constraints") {
    // a point outside the polyhedron
    IntermediateSimplexInstance outside{{Matrix{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, Vec{0, 0, -1, -1}},
                                        {Vec{0.5, 0.5}, Vec{2.0, 0.5}, Vec{0.5, 0.25}}};
    CHECK_THROWS_AS(validate_instance(outside), InvalidInstance);

    // points that do not affinely span
    IntermediateSimplexInstance flat{{Matrix{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, Vec{0, 0, -1, -1}},
                                     {Vec{0.2, 0.2}, Vec{0.4, 0.4}, Vec{0.6, 0.6}}};
    CHECK_THROWS_AS(validate_instance(flat), InvalidInstance);

    // [A,b] rank deficient: a cone through the origin has b = 0
    IntermediateSimplexInstance cone{{Matrix{{1, 0}, {0, 1}}, Vec{0, 0}},
                                     {Vec{0.5, 0.5}, Vec{1.0, 0.5}, Vec{0.5, 1.0}}};
    CHECK_THROWS_AS(validate_instance(cone), InvalidInstance);
}

TEST_CASE("region row counts hold on random shapes") {
    Rng rng(515);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<std::size_t> kk(2, 6), mm(3, 20), nn(3, 30);
        const std::size_t k = kk(rng), d = k - 1, m = std::max(mm(rng), d + 1), n = nn(rng);
        Polyhedron p{testutil::random_matrix(rng, n, d), testutil::random_vec(rng, n)};
        std::vector<Vec> s;
        for (std::size_t i = 0; i < m; ++i) s.push_back(testutil::random_vec(rng, d));
        IntermediateSimplexInstance inst{p, s};
        std::vector<Vec> fixed;
        for (std::size_t i = 0; i + 1 < k; ++i) fixed.push_back(testutil::random_vec(rng, d, -2.0, 2.0));
        try {
            VertexFeasibleRegion region = feasible_region_last_vertex(inst, fixed);
            CHECK(region.eq.size() == m * k);
            CHECK(region.ineq.size() == n + m * k);
        } catch (const DegenerateSpan&) {
            // random fixed vertices are affinely independent almost surely
        }
    }
}
