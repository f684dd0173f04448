#ifndef CROSSBOUND_BLOCKDIAG_HPP
#define CROSSBOUND_BLOCKDIAG_HPP

#include <atomic>
#include <stdexcept>
#include <utility>
#include <vector>

#include "crossbound/symmetry.hpp"

namespace crossbound {

struct int_matrix {
    int n = 0;
    std::vector<int> v;  // row-major n*n

    explicit int_matrix(int n_ = 0) : n(n_), v(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0) {}
    int at(int i, int j) const {
        return v[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    }
    int& at(int i, int j) {
        return v[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    }
};

// Inversion pairing {g, g0(g)}: pair k is (first[k], second[k]) with
// first[k] < second[k], pairs listed by ascending first index.  V' has the
// pair characteristic vectors as rows 0..h-1 and the twisted rows (with -1 on
// the larger index) as rows h..2h-1, so V'V'^T = 2I.
struct pairing_transform {
    int d = 0;
    std::vector<int> first, second;
    std::vector<int> pair_of;   // point -> pair index
    std::vector<char> is_first; // point -> role in its pair

    int h() const { return static_cast<int>(first.size()); }

    // dense V' for small-m tests (2h x d)
    int_matrix vprime() const {
        int_matrix vp(d);
        for (int k = 0; k < h(); ++k) {
            vp.at(k, first[static_cast<std::size_t>(k)]) = 1;
            vp.at(k, second[static_cast<std::size_t>(k)]) = 1;
            vp.at(h() + k, first[static_cast<std::size_t>(k)]) = 1;
            vp.at(h() + k, second[static_cast<std::size_t>(k)]) = -1;
        }
        return vp;
    }
};

inline pairing_transform build_pairing(const group_generators& gens) {
    const int d = gens.d();
    pairing_transform vp;
    vp.d = d;
    vp.pair_of.assign(static_cast<std::size_t>(d), -1);
    vp.is_first.assign(static_cast<std::size_t>(d), 0);
    for (int i = 0; i < d; ++i) {
        if (vp.pair_of[static_cast<std::size_t>(i)] >= 0) continue;
        int j = gens.g0[static_cast<std::size_t>(i)];
        if (j == i) throw std::logic_error("inversion has a fixed point");
        int k = vp.h();
        vp.first.push_back(i);
        vp.second.push_back(j);
        vp.pair_of[static_cast<std::size_t>(i)] = k;
        vp.pair_of[static_cast<std::size_t>(j)] = k;
        vp.is_first[static_cast<std::size_t>(i)] = 1;
    }
    return vp;
}

// The two diagonal blocks of (1/2) V' A_e V'^T per basis element.  For a
// symmetric basis element invariant under g0, with pairs p_k = (i_k, j_k):
//   block1(k,l) = A(i_k,i_l) + A(i_k,j_l)
//   block2(k,l) = A(i_k,i_l) - A(i_k,j_l)
// and the off-diagonal blocks vanish identically because A(j_k,j_l) =
// A(i_k,i_l) and A(j_k,i_l) = A(i_k,j_l).  Those two identities are checked
// exactly (integer equality) for every cell; together they are equivalent to
// exact block-diagonality of the conjugated element.
struct block_basis {
    int M = 0;
    int h = 0;
    std::vector<int_matrix> blocks1, blocks2;
    std::string provenance;  // fingerprint of the orbit basis these came from
};

inline block_basis conjugate_basis(const pairing_transform& vp, const orbit_basis& basis) {
    if (vp.d != basis.d) throw std::invalid_argument("pairing/basis dimension mismatch");
    const int h = vp.h();
    block_basis out;
    out.M = basis.M;
    out.h = h;
    out.blocks1.assign(static_cast<std::size_t>(basis.M), int_matrix(h));
    out.blocks2.assign(static_cast<std::size_t>(basis.M), int_matrix(h));
    out.provenance = basis.fingerprint();

    std::atomic<bool> bad{false};
    parallel_for(static_cast<std::size_t>(h), [&](std::size_t k) {
        int ik = vp.first[k], jk = vp.second[k];
        for (int l = 0; l < h; ++l) {
            int il = vp.first[static_cast<std::size_t>(l)], jl = vp.second[static_cast<std::size_t>(l)];
            int e_ii = basis.element_at(ik, il);
            int e_ij = basis.element_at(ik, jl);
            if (basis.element_at(jk, jl) != e_ii || basis.element_at(jk, il) != e_ij) {
                bad.store(true, std::memory_order_relaxed);
                return;
            }
            if (e_ii == e_ij) {
                out.blocks1[static_cast<std::size_t>(e_ii)].at(static_cast<int>(k), l) = 2;
            } else {
                out.blocks1[static_cast<std::size_t>(e_ii)].at(static_cast<int>(k), l) = 1;
                out.blocks1[static_cast<std::size_t>(e_ij)].at(static_cast<int>(k), l) = 1;
                out.blocks2[static_cast<std::size_t>(e_ii)].at(static_cast<int>(k), l) = 1;
                out.blocks2[static_cast<std::size_t>(e_ij)].at(static_cast<int>(k), l) = -1;
            }
        }
    });
    if (bad.load()) throw std::logic_error("conjugated basis element is not block diagonal");
    return out;
}

}  // namespace crossbound

#endif
