#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "crossbound/relaxations.hpp"
#include "crossbound/sdpa_io.hpp"

using namespace crossbound;

namespace {

std::string export_str(const block_sdp_problem& p) {
    std::ostringstream os;
    export_sdpa(p, os);
    return os.str();
}

void check_same_problem(const block_sdp_problem& a, const block_sdp_problem& b) {
    REQUIRE(a.nvars == b.nvars);
    REQUIRE(a.block_sizes == b.block_sizes);
    CHECK(a.objective == b.objective);  // doubles survive the round trip bitwise
    REQUIRE(a.fvar.size() == b.fvar.size());
    for (std::size_t v = 0; v < a.fvar.size(); ++v) {
        REQUIRE(a.fvar[v].size() == b.fvar[v].size());
        for (std::size_t k = 0; k < a.fvar[v].size(); ++k) {
            CHECK(a.fvar[v][k].block == b.fvar[v][k].block);
            CHECK(a.fvar[v][k].i == b.fvar[v][k].i);
            CHECK(a.fvar[v][k].j == b.fvar[v][k].j);
            CHECK(a.fvar[v][k].val == b.fvar[v][k].val);
        }
    }
    REQUIRE(a.ineqs.size() == b.ineqs.size());
    for (std::size_t r = 0; r < a.ineqs.size(); ++r) {
        CHECK(a.ineqs[r].coeffs == b.ineqs[r].coeffs);
        CHECK(a.ineqs[r].rhs == b.ineqs[r].rhs);
    }
}

}  // namespace

TEST_CASE("trivial instance matches the golden file byte for byte", "[sdpa]") {
    std::ifstream f(std::string(CB_GOLDEN_DIR) + "/trivial.sdpa", std::ios::binary);
    REQUIRE(f.good());
    std::stringstream golden;
    golden << f.rdbuf();
    CHECK(export_str(trivial_instance()) == golden.str());
}

TEST_CASE("export format of a small mixed problem", "[sdpa]") {
    block_sdp_problem p;
    p.nvars = 2;
    p.objective = {1.0, 0.5};
    p.block_sizes = {2};
    p.fvar = {{{0, 0, 1, 1.0}}, {{0, 0, 0, 2.0}}};
    p.f0 = {{0, 0, 0, -1.0}, {0, 1, 1, -1.0}};
    p.ineqs = {{{{0, 1.0}, {1, -2.0}}, 0.25}};
    std::string s = export_str(p);
    // objective row carries the negated maximization coefficients
    CHECK(s.find("-1 -0.5\n") != std::string::npos);
    // the slack block is the last block, written with a negative size
    CHECK(s.find("2 -1\n") != std::string::npos);
    // F0 entry of the slack block encodes the negated right-hand side
    CHECK(s.find("0 2 1 1 -0.25\n") != std::string::npos);
    std::istringstream is(s);
    check_same_problem(parse_sdpa(is), p);
}

TEST_CASE("round trip through a real reduced instance is lossless", "[sdpa]") {
    pi_index pi(4);
    q_matrix q = build_q_matrix(pi);
    group_generators gens = build_generators(pi);
    orbit_basis basis = symmetrize_basis(compute_two_orbits(gens, q), q);
    block_basis blocks = conjugate_basis(build_pairing(gens), basis);
    block_sdp_problem p = build_k0_problem(basis, blocks);

    std::string first = export_str(p);
    std::istringstream is(first);
    block_sdp_problem back = parse_sdpa(is);
    check_same_problem(back, p);
    // re-export reproduces the identical bytes
    CHECK(export_str(back) == first);

    // parsed problem solves to the same optimum
    sdp_solution s0 = solve(p, 1e-9);
    sdp_solution s1 = solve(back, 1e-9);
    REQUIRE(s0.status == sdp_status::optimal);
    REQUIRE(s1.status == sdp_status::optimal);
    CHECK(s0.objective_value == s1.objective_value);
}

TEST_CASE("parser tolerates comments and punctuation", "[sdpa]") {
    const char* text =
        "\" produced by hand\n"
        "* another comment line\n"
        "2 =ndim\n"
        "2\n"
        "{2, -1}\n"
        "(-1.0, -0.5)\n"
        "0 1 1 1 -1;\n"
        "0 1 2 2 -1\n"
        "1 1 1 2 1.0\n"
        "2 1 1 1 2\n"
        "1 2 1 1 -1\n"
        "2 2 1 1 2\n"
        "0 2 1 1 -0.25\n";
    std::istringstream is(text);
    block_sdp_problem p = parse_sdpa(is);
    CHECK(p.nvars == 2);
    REQUIRE(p.block_sizes == std::vector<int>{2});
    CHECK(p.objective == std::vector<double>{1.0, 0.5});
    REQUIRE(p.ineqs.size() == 1);
    CHECK(p.ineqs[0].rhs == 0.25);
    REQUIRE(p.ineqs[0].coeffs.size() == 2);
    CHECK(p.ineqs[0].coeffs[0] == std::pair<int, double>(0, 1.0));
    CHECK(p.ineqs[0].coeffs[1] == std::pair<int, double>(1, -2.0));
    CHECK_NOTHROW(p.require_consistent());
}

TEST_CASE("file writer matches stream writer", "[sdpa]") {
    block_sdp_problem p = trivial_instance();
    const std::string path = "trivial_rt.sdpa";
    export_sdpa(p, path);
    std::ifstream f(path, std::ios::binary);
    std::stringstream got;
    got << f.rdbuf();
    CHECK(got.str() == export_str(p));
    block_sdp_problem back = load_sdpa(path);
    CHECK(back.nvars == p.nvars);
    CHECK(back.objective == p.objective);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_sdpa(path), std::runtime_error);
}
