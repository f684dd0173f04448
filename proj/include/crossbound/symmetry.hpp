#ifndef CROSSBOUND_SYMMETRY_HPP
#define CROSSBOUND_SYMMETRY_HPP

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crossbound/cyclic.hpp"
#include "crossbound/util.hpp"

namespace crossbound {

// Index permutations of Pi induced by: inversion (g0), conjugation by the
// m-cycle h1 = (0 1 ... m-1) (g1), conjugation by the transposition
// h2 = (0 1) (g2).  Together they generate the Sym(m) x Sym(2) action.
struct group_generators {
    std::vector<int> g0, g1, g2;
    int d() const { return static_cast<int>(g0.size()); }
};

namespace detail {
inline void check_bijection(const std::vector<int>& g) {
    std::vector<char> seen(g.size(), 0);
    for (int v : g) {
        if (v < 0 || v >= static_cast<int>(g.size()) || seen[static_cast<std::size_t>(v)])
            throw std::logic_error("generator is not a bijection");
        seen[static_cast<std::size_t>(v)] = 1;
    }
}
}  // namespace detail

inline group_generators build_generators(const pi_index& pi) {
    const int m = pi.m;
    const int d = pi.d();
    std::vector<int> h1(static_cast<std::size_t>(m)), h2(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) h1[static_cast<std::size_t>(k)] = (k + 1) % m;
    for (int k = 0; k < m; ++k) h2[static_cast<std::size_t>(k)] = k;
    std::swap(h2[0], h2[1]);
    group_generators g;
    g.g0.resize(static_cast<std::size_t>(d));
    g.g1.resize(static_cast<std::size_t>(d));
    g.g2.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const auto& rho = pi.orderings[static_cast<std::size_t>(i)];
        g.g0[static_cast<std::size_t>(i)] = pi.lookup(invert(rho));
        g.g1[static_cast<std::size_t>(i)] = pi.lookup(conjugate(rho, h1));
        g.g2[static_cast<std::size_t>(i)] = pi.lookup(conjugate(rho, h2));
    }
    detail::check_bijection(g.g0);
    detail::check_bijection(g.g1);
    detail::check_bijection(g.g2);
    return g;
}

// Partition of Pi x Pi into classes on which every invariant matrix is
// constant.  group_orbit_count is the raw spinning count (closure under the
// three generators); r counts the cells after coarsening to the coherent
// closure of {Q, I}, which is what the published reduction uses (for m=5 the
// full combinatorial symmetry of Q exceeds Sym(5) x Sym(2) and merges 8
// spinning orbits into 6 cells; for m=3,4,7 the two partitions coincide).
struct two_orbit_partition {
    int d = 0;
    int r = 0;
    int group_orbit_count = 0;
    std::vector<int> orbit_id;  // row-major d*d
    std::vector<std::pair<int, int>> representatives;

    int at(int i, int j) const {
        return orbit_id[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                        static_cast<std::size_t>(j)];
    }
};

// Raw spinning: closure of pairs under the diagonal action of g0,g1,g2.
// Orbits are numbered by their lexicographically smallest pair.
inline two_orbit_partition spin_two_orbits(const group_generators& gens) {
    const int d = gens.d();
    two_orbit_partition part;
    part.d = d;
    part.orbit_id.assign(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), -1);
    const std::vector<int>* gs[3] = {&gens.g0, &gens.g1, &gens.g2};
    std::vector<int> stack;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            std::size_t start = static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                                static_cast<std::size_t>(j);
            if (part.orbit_id[start] >= 0) continue;
            int id = part.r++;
            part.representatives.emplace_back(i, j);
            part.orbit_id[start] = id;
            stack.assign(1, static_cast<int>(start));
            while (!stack.empty()) {
                int cell = stack.back();
                stack.pop_back();
                int ci = cell / d, cj = cell % d;
                for (const auto* g : gs) {
                    int ni = (*g)[static_cast<std::size_t>(ci)];
                    int nj = (*g)[static_cast<std::size_t>(cj)];
                    std::size_t ncell = static_cast<std::size_t>(ni) * static_cast<std::size_t>(d) +
                                        static_cast<std::size_t>(nj);
                    if (part.orbit_id[ncell] < 0) {
                        part.orbit_id[ncell] = id;
                        stack.push_back(static_cast<int>(ncell));
                    }
                }
            }
        }
    }
    part.group_orbit_count = part.r;
    return part;
}

// Exact Weisfeiler-Leman stabilization on the orbit quotient: start from the
// coloring (Q value, on-diagonal flag) and refine each cell by the multiset,
// over k, of the color pair (color(i,k), color(k,j)) at the cell's
// representative (i,j).  Counts are constant on spinning orbits, so one
// representative per orbit is enough and all arithmetic is integer-exact.
// The fixpoint is the coherent closure of {Q, I}; it can only merge whole
// spinning orbits, never split them.
inline two_orbit_partition coarsen_to_coherent(const two_orbit_partition& spin, const q_matrix& q) {
    const int d = spin.d;
    const int r0 = spin.group_orbit_count;
    std::vector<int> color(static_cast<std::size_t>(r0));
    {
        std::map<std::pair<int, int>, int> lut;
        for (int o = 0; o < r0; ++o) {
            auto [i, j] = spin.representatives[static_cast<std::size_t>(o)];
            std::pair<int, int> key{q.at(i, j), i == j ? 1 : 0};
            auto it = lut.find(key);
            if (it == lut.end()) it = lut.emplace(key, static_cast<int>(lut.size())).first;
            color[static_cast<std::size_t>(o)] = it->second;
        }
    }
    for (;;) {
        // profile per orbit: sorted (color(i,k), color(k,j)) -> count
        std::vector<std::vector<std::pair<std::pair<int, int>, int>>> prof(
            static_cast<std::size_t>(r0));
        parallel_for(static_cast<std::size_t>(r0), [&](std::size_t o) {
            auto [i, j] = spin.representatives[o];
            std::map<std::pair<int, int>, int> acc;
            for (int k = 0; k < d; ++k)
                ++acc[{color[static_cast<std::size_t>(spin.at(i, k))],
                       color[static_cast<std::size_t>(spin.at(k, j))]}];
            prof[o].assign(acc.begin(), acc.end());
        });
        std::map<std::pair<int, std::vector<std::pair<std::pair<int, int>, int>>>, int> lut;
        std::vector<int> next(static_cast<std::size_t>(r0));
        for (int o = 0; o < r0; ++o) {
            auto key = std::make_pair(color[static_cast<std::size_t>(o)],
                                      prof[static_cast<std::size_t>(o)]);
            auto it = lut.find(key);
            if (it == lut.end()) it = lut.emplace(std::move(key), static_cast<int>(lut.size())).first;
            next[static_cast<std::size_t>(o)] = it->second;
        }
        bool stable = lut.size() == static_cast<std::size_t>(
                                        *std::max_element(color.begin(), color.end()) + 1);
        color = std::move(next);
        if (stable) break;
    }
    // relabel cells by their lexicographically smallest representative
    int ncell = *std::max_element(color.begin(), color.end()) + 1;
    std::vector<std::pair<int, int>> cell_rep(static_cast<std::size_t>(ncell), {d, d});
    for (int o = 0; o < r0; ++o) {
        auto rep = spin.representatives[static_cast<std::size_t>(o)];
        auto& best = cell_rep[static_cast<std::size_t>(color[static_cast<std::size_t>(o)])];
        if (rep < best) best = rep;
    }
    std::vector<int> order(static_cast<std::size_t>(ncell));
    for (int c = 0; c < ncell; ++c) order[static_cast<std::size_t>(c)] = c;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return cell_rep[static_cast<std::size_t>(a)] < cell_rep[static_cast<std::size_t>(b)];
    });
    std::vector<int> rank(static_cast<std::size_t>(ncell));
    for (int p = 0; p < ncell; ++p) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = p;

    two_orbit_partition out;
    out.d = d;
    out.r = ncell;
    out.group_orbit_count = spin.group_orbit_count;
    out.orbit_id.resize(spin.orbit_id.size());
    for (std::size_t cell = 0; cell < spin.orbit_id.size(); ++cell)
        out.orbit_id[cell] =
            rank[static_cast<std::size_t>(color[static_cast<std::size_t>(spin.orbit_id[cell])])];
    out.representatives.resize(static_cast<std::size_t>(ncell));
    for (int c = 0; c < ncell; ++c)
        out.representatives[static_cast<std::size_t>(rank[static_cast<std::size_t>(c)])] =
            cell_rep[static_cast<std::size_t>(c)];
    return out;
}

inline two_orbit_partition compute_two_orbits(const group_generators& gens, const q_matrix& q) {
    return coarsen_to_coherent(spin_two_orbits(gens), q);
}

// Symmetrized 0-1 basis: one element per symmetric cell, one per
// transpose-paired cell pair (X + X^T).  Q = sum b_i A_i exactly.
struct orbit_basis {
    int m = 0;
    int d = 0;
    int M = 0;
    two_orbit_partition orbits;
    std::vector<int> b;                                 // per element
    std::vector<char> symmetric;                        // per element
    std::vector<int> elem_of_orbit;                     // orbit id -> element
    std::vector<std::pair<int, int>> transpose_pairing; // merged orbit id pairs
    int identity_elem = -1;

    int element_at(int i, int j) const {
        return elem_of_orbit[static_cast<std::size_t>(orbits.at(i, j))];
    }

    // support cells with i <= j, ascending
    std::vector<std::pair<int, int>> upper_cells(int e) const {
        std::vector<std::pair<int, int>> out;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                if (element_at(i, j) == e) out.emplace_back(i, j);
        return out;
    }

    std::string fingerprint() const {
        fnv1a h;
        h.feed_i64(m);
        h.feed_i64(d);
        h.feed_i64(orbits.r);
        h.feed_i64(M);
        for (int v : b) h.feed_i64(v);
        for (int v : orbits.orbit_id) h.feed_i64(v);
        for (int v : elem_of_orbit) h.feed_i64(v);
        return h.hex();
    }
};

inline orbit_basis symmetrize_basis(const two_orbit_partition& orbits, const q_matrix& q) {
    if (orbits.d != q.d) throw std::invalid_argument("orbit/Q dimension mismatch");
    const int d = q.d;
    orbit_basis basis;
    basis.m = q.m;
    basis.d = d;
    basis.orbits = orbits;

    // Q must be constant on every cell; b value per cell.
    std::vector<int> cell_b(static_cast<std::size_t>(orbits.r), -1);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            int c = orbits.at(i, j);
            int& bv = cell_b[static_cast<std::size_t>(c)];
            if (bv < 0)
                bv = q.at(i, j);
            else if (bv != q.at(i, j))
                throw std::logic_error("Q not constant on a 2-orbit");
        }
    }
    // transpose partner of each cell
    std::vector<int> partner(static_cast<std::size_t>(orbits.r), -1);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            partner[static_cast<std::size_t>(orbits.at(i, j))] = orbits.at(j, i);

    basis.elem_of_orbit.assign(static_cast<std::size_t>(orbits.r), -1);
    for (int c = 0; c < orbits.r; ++c) {
        if (basis.elem_of_orbit[static_cast<std::size_t>(c)] >= 0) continue;
        int e = basis.M++;
        basis.elem_of_orbit[static_cast<std::size_t>(c)] = e;
        int p = partner[static_cast<std::size_t>(c)];
        if (p == c) {
            basis.symmetric.push_back(1);
        } else {
            if (cell_b[static_cast<std::size_t>(p)] != cell_b[static_cast<std::size_t>(c)])
                throw std::logic_error("Q differs between transposed 2-orbits");
            basis.elem_of_orbit[static_cast<std::size_t>(p)] = e;
            basis.symmetric.push_back(0);
            basis.transpose_pairing.emplace_back(c, p);
        }
        basis.b.push_back(cell_b[static_cast<std::size_t>(c)]);
        auto rep = orbits.representatives[static_cast<std::size_t>(c)];
        if (rep.first == rep.second) basis.identity_elem = e;
    }
    if (basis.identity_elem < 0) throw std::logic_error("diagonal element missing from basis");
    return basis;
}

inline orbit_basis build_orbit_basis(int m) {
    pi_index pi(m);
    q_matrix q = build_q_matrix(pi);
    group_generators gens = build_generators(pi);
    return symmetrize_basis(compute_two_orbits(gens, q), q);
}

}  // namespace crossbound

#endif
