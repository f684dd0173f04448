#include <catch2/catch_amalgamated.hpp>

#include "crossbound/blockdiag.hpp"

using namespace crossbound;

namespace {

// plain integer matmul for reference checks
int_matrix mul(const int_matrix& a, const int_matrix& b, bool transpose_b) {
    int_matrix c(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) {
            long long s = 0;
            for (int k = 0; k < a.n; ++k)
                s += static_cast<long long>(a.at(i, k)) * (transpose_b ? b.at(j, k) : b.at(k, j));
            c.at(i, j) = static_cast<int>(s);
        }
    return c;
}

int_matrix dense_element(const orbit_basis& basis, int e) {
    int_matrix a(basis.d);
    for (int i = 0; i < basis.d; ++i)
        for (int j = 0; j < basis.d; ++j)
            if (basis.element_at(i, j) == e) a.at(i, j) = 1;
    return a;
}

}  // namespace

TEST_CASE("inversion pairing has no fixed points and covers Pi", "[blockdiag]") {
    for (int m : {3, 4, 5, 6}) {
        pi_index pi(m);
        group_generators gens = build_generators(pi);
        pairing_transform vp = build_pairing(gens);
        INFO("m=" << m);
        REQUIRE(vp.d == pi.d());
        REQUIRE(vp.h() * 2 == vp.d);
        std::vector<char> seen(static_cast<std::size_t>(vp.d), 0);
        for (int k = 0; k < vp.h(); ++k) {
            int a = vp.first[static_cast<std::size_t>(k)];
            int b = vp.second[static_cast<std::size_t>(k)];
            CHECK(a < b);
            CHECK(gens.g0[static_cast<std::size_t>(a)] == b);
            CHECK(vp.pair_of[static_cast<std::size_t>(a)] == k);
            CHECK(vp.pair_of[static_cast<std::size_t>(b)] == k);
            CHECK(vp.is_first[static_cast<std::size_t>(a)]);
            CHECK_FALSE(vp.is_first[static_cast<std::size_t>(b)]);
            seen[static_cast<std::size_t>(a)] = seen[static_cast<std::size_t>(b)] = 1;
            if (k > 0) CHECK(vp.first[static_cast<std::size_t>(k - 1)] < a);
        }
        CHECK(std::count(seen.begin(), seen.end(), 1) == vp.d);
    }
}

TEST_CASE("V' V'^T = 2I exactly", "[blockdiag]") {
    for (int m : {3, 4, 5}) {
        pairing_transform vp = build_pairing(build_generators(pi_index(m)));
        int_matrix v = vp.vprime();
        int_matrix g = mul(v, v, true);
        INFO("m=" << m);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) CHECK(g.at(i, j) == (i == j ? 2 : 0));
    }
}

TEST_CASE("conjugated elements match the dense transform and are block diagonal",
          "[blockdiag]") {
    for (int m : {4, 5}) {
        pi_index pi(m);
        q_matrix q = build_q_matrix(pi);
        group_generators gens = build_generators(pi);
        orbit_basis basis = symmetrize_basis(compute_two_orbits(gens, q), q);
        pairing_transform vp = build_pairing(gens);
        block_basis blocks = conjugate_basis(vp, basis);
        INFO("m=" << m);
        REQUIRE(blocks.M == basis.M);
        REQUIRE(blocks.h == vp.h());
        CHECK(blocks.provenance == basis.fingerprint());
        const int h = blocks.h;
        int_matrix v = vp.vprime();
        for (int e = 0; e < basis.M; ++e) {
            int_matrix c = mul(mul(v, dense_element(basis, e), false), v, true);
            for (int k = 0; k < h; ++k) {
                for (int l = 0; l < h; ++l) {
                    // V' B V'^T = 2 * diag(block1, block2), off blocks vanish
                    CHECK(c.at(k, l) == 2 * blocks.blocks1[static_cast<std::size_t>(e)].at(k, l));
                    CHECK(c.at(h + k, h + l) ==
                          2 * blocks.blocks2[static_cast<std::size_t>(e)].at(k, l));
                    CHECK(c.at(k, h + l) == 0);
                    CHECK(c.at(h + k, l) == 0);
                }
            }
        }
    }
}

TEST_CASE("block entries are small integers with the expected sums", "[blockdiag]") {
    pi_index pi(5);
    q_matrix q = build_q_matrix(pi);
    group_generators gens = build_generators(pi);
    orbit_basis basis = symmetrize_basis(compute_two_orbits(gens, q), q);
    pairing_transform vp = build_pairing(gens);
    block_basis blocks = conjugate_basis(vp, basis);
    const int h = blocks.h;
    for (int k = 0; k < h; ++k) {
        for (int l = 0; l < h; ++l) {
            int s1 = 0, s2 = 0, q1 = 0;
            for (int e = 0; e < blocks.M; ++e) {
                int b1 = blocks.blocks1[static_cast<std::size_t>(e)].at(k, l);
                int b2 = blocks.blocks2[static_cast<std::size_t>(e)].at(k, l);
                CHECK(b1 >= 0);
                CHECK(b1 <= 2);
                CHECK(b2 >= -1);
                CHECK(b2 <= 1);
                s1 += b1;
                s2 += b2;
                q1 += basis.b[static_cast<std::size_t>(e)] * b1;
            }
            // sum of all elements is the all-ones matrix; its blocks are 2J and 0
            CHECK(s1 == 2);
            CHECK(s2 == 0);
            // weighted sum reconstructs the first block of Q
            int ik = vp.first[static_cast<std::size_t>(k)];
            int il = vp.first[static_cast<std::size_t>(l)];
            int jl = vp.second[static_cast<std::size_t>(l)];
            CHECK(q1 == q.at(ik, il) + q.at(ik, jl));
        }
    }
    // identity element conjugates to the identity in both blocks
    const int id = basis.identity_elem;
    for (int k = 0; k < h; ++k)
        for (int l = 0; l < h; ++l) {
            CHECK(blocks.blocks1[static_cast<std::size_t>(id)].at(k, l) == (k == l ? 1 : 0));
            CHECK(blocks.blocks2[static_cast<std::size_t>(id)].at(k, l) == (k == l ? 1 : 0));
        }
}

TEST_CASE("dimension mismatch is rejected", "[blockdiag]") {
    pairing_transform vp4 = build_pairing(build_generators(pi_index(4)));
    orbit_basis basis5 = build_orbit_basis(5);
    CHECK_THROWS_AS(conjugate_basis(vp4, basis5), std::invalid_argument);
}
