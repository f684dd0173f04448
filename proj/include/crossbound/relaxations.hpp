#ifndef CROSSBOUND_RELAXATIONS_HPP
#define CROSSBOUND_RELAXATIONS_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "crossbound/blockdiag.hpp"
#include "crossbound/cyclic.hpp"
#include "crossbound/rational.hpp"
#include "crossbound/sdp.hpp"
#include "crossbound/symmetry.hpp"
#include "crossbound/util.hpp"

namespace crossbound {

// min x'Qx over the probability simplex
struct standard_qp {
    int d = 0;
    std::vector<rational> q;  // row-major, symmetric

    const rational& at(int i, int j) const {
        return q[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                 static_cast<std::size_t>(j)];
    }
    rational& at(int i, int j) {
        return q[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                 static_cast<std::size_t>(j)];
    }
};

inline standard_qp to_standard_qp(const q_matrix& qm) {
    standard_qp qp;
    qp.d = qm.d;
    qp.q.reserve(static_cast<std::size_t>(qm.d) * static_cast<std::size_t>(qm.d));
    for (int i = 0; i < qm.d; ++i)
        for (int j = 0; j < qm.d; ++j) qp.q.emplace_back(qm.at(i, j));
    return qp;
}

inline std::string problem_fingerprint(const block_sdp_problem& p) {
    fnv1a h;
    h.feed_i64(p.nvars);
    for (double g : p.objective) h.feed_str(detail::render_double(g));
    for (int s : p.block_sizes) h.feed_i64(s);
    for (int v = 0; v < p.nvars; ++v)
        for (const auto& e : p.fvar[static_cast<std::size_t>(v)]) {
            h.feed_i64(v);
            h.feed_i64(e.block);
            h.feed_i64(e.i);
            h.feed_i64(e.j);
            h.feed_str(detail::render_double(e.val));
        }
    for (const auto& e : p.f0) {
        h.feed_i64(~e.block);
        h.feed_i64(e.i);
        h.feed_i64(e.j);
        h.feed_str(detail::render_double(e.val));
    }
    for (const auto& row : p.ineqs) {
        h.feed_str(detail::render_double(row.rhs));
        for (const auto& [v, c] : row.coeffs) {
            h.feed_i64(v);
            h.feed_str(detail::render_double(c));
        }
    }
    return h.hex();
}

struct relaxation_result {
    int level = 0;
    double p_lower = 0.0;
    sdp_solution solution;
    std::string problem_fingerprint;
};

// p0 = max{ t : y_i + t <= b_i, sum_i y_i A_i PSD } in the block-diagonalized
// form: variables (t, y_1..y_M), two dense PSD blocks.
inline block_sdp_problem build_k0_problem(const orbit_basis& basis, const block_basis& blocks) {
    if (blocks.M != basis.M || blocks.provenance != basis.fingerprint())
        throw std::invalid_argument("basis/blocks mismatch");
    block_sdp_problem p;
    p.nvars = 1 + basis.M;
    p.objective.assign(static_cast<std::size_t>(p.nvars), 0.0);
    p.objective[0] = 1.0;  // maximize t
    p.block_sizes = {blocks.h, blocks.h};
    p.fvar.resize(static_cast<std::size_t>(p.nvars));
    for (int i = 0; i < basis.M; ++i) {
        linear_ineq row;
        row.coeffs = {{0, 1.0}, {i + 1, 1.0}};
        row.rhs = static_cast<double>(basis.b[static_cast<std::size_t>(i)]);
        p.ineqs.push_back(std::move(row));
        for (int bb = 0; bb < 2; ++bb) {
            const int_matrix& blk = (bb == 0 ? blocks.blocks1 : blocks.blocks2)[static_cast<std::size_t>(i)];
            for (int k = 0; k < blocks.h; ++k)
                for (int l = k; l < blocks.h; ++l)
                    if (blk.at(k, l) != 0)
                        p.fvar[static_cast<std::size_t>(i + 1)].push_back(
                            {bb, k, l, static_cast<double>(blk.at(k, l))});
        }
    }
    return p;
}

// strictly feasible point: y = eps on the identity element only, t = min b - 2 eps
inline std::vector<double> k0_strict_witness(const orbit_basis& basis, double eps = 0.25) {
    std::vector<double> y(static_cast<std::size_t>(1 + basis.M), 0.0);
    int bmin = basis.b[0];
    for (int v : basis.b) bmin = std::min(bmin, v);
    y[0] = static_cast<double>(bmin) - 2.0 * eps;
    y[static_cast<std::size_t>(1 + basis.identity_elem)] = eps;
    return y;
}

// p1 via the first sum-of-squares level: S := Q - t ee', find S^(i) with
//   S - S^(i) PSD,  S^(i)_ii = 0,  S^(i)_jj = -2 S^(j)_ij,
//   S^(i)_jk + S^(j)_ik + S^(k)_ij >= 0  (i<j<k).
// The diagonal equalities are eliminated exactly; the kept parameters are the
// off-diagonal entries (integral coefficients).  Variables: t; v(a,{a,x})
// for the entries S^(a)_xa; w(a,{i,j}) for the entries S^(a)_ij, a not in {i,j}.
inline block_sdp_problem build_k1_problem(const standard_qp& qp) {
    const int d = qp.d;
    if (d > 30) throw std::invalid_argument("k1 guard: d too large");
    if (d < 2) throw std::invalid_argument("k1: d too small");

    std::map<std::tuple<int, int, int>, int> vid;  // (a, i, j) i<j -> variable
    auto var = [&](int a, int x, int y) {
        int i = std::min(x, y), j = std::max(x, y);
        auto key = std::make_tuple(a, i, j);
        auto it = vid.find(key);
        if (it != vid.end()) return it->second;
        int id = 1 + static_cast<int>(vid.size());
        vid.emplace(key, id);
        return id;
    };
    // fix the variable order: all (a, i, j) sorted
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) var(a, i, j);

    block_sdp_problem p;
    p.nvars = 1 + static_cast<int>(vid.size());
    p.objective.assign(static_cast<std::size_t>(p.nvars), 0.0);
    p.objective[0] = 1.0;
    p.fvar.resize(static_cast<std::size_t>(p.nvars));
    for (int b = 0; b < d; ++b) p.block_sizes.push_back(d);

    for (int b = 0; b < d; ++b) {
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                p.f0.push_back({b, i, j, -qp.at(i, j).get_d()});
                p.fvar[0].push_back({b, i, j, -1.0});  // -t ee'
            }
        // -S^(b): off-diagonal entries are single variables, diagonal entries
        // (j,j) are -2 S^(j)_bj by the eliminated equality
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                p.fvar[static_cast<std::size_t>(var(b, i, j))].push_back({b, i, j, -1.0});
        for (int j = 0; j < d; ++j)
            if (j != b)
                p.fvar[static_cast<std::size_t>(var(j, b, j))].push_back({b, j, j, 2.0});
    }
    // triple inequalities: -(S^(i)_jk + S^(j)_ik + S^(k)_ij) <= 0
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            for (int k = j + 1; k < d; ++k) {
                linear_ineq row;
                row.rhs = 0.0;
                row.coeffs = {{var(i, j, k), -1.0}, {var(j, i, k), -1.0}, {var(k, i, j), -1.0}};
                p.ineqs.push_back(std::move(row));
            }
    return p;
}

// unreduced S+N form of p0 on the full matrix, used to cross-check the
// symmetry reduction: max{ t : Q - t ee' - N PSD, N >= 0 entrywise }
inline block_sdp_problem build_k0_direct(const standard_qp& qp) {
    const int d = qp.d;
    if (d > 30) throw std::invalid_argument("k0 direct guard: d too large");
    block_sdp_problem p;
    int nv = 1 + d * (d + 1) / 2;
    p.nvars = nv;
    p.objective.assign(static_cast<std::size_t>(nv), 0.0);
    p.objective[0] = 1.0;
    p.block_sizes = {d};
    p.fvar.resize(static_cast<std::size_t>(nv));
    int id = 1;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            p.f0.push_back({0, i, j, -qp.at(i, j).get_d()});
            p.fvar[0].push_back({0, i, j, -1.0});
            p.fvar[static_cast<std::size_t>(id)].push_back({0, i, j, -1.0});
            linear_ineq row;  // -n_ij <= 0
            row.rhs = 0.0;
            row.coeffs = {{id, -1.0}};
            p.ineqs.push_back(std::move(row));
            ++id;
        }
    return p;
}

struct simplex_qp_result {
    rational value;
    std::vector<rational> minimizer;
};

namespace detail {

// exact solve of A z = rhs by Gaussian elimination; returns false if singular
inline bool solve_rational(std::vector<std::vector<rational>>& a, std::vector<rational>& rhs) {
    const int n = static_cast<int>(a.size());
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return false;
        std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(piv)]);
        std::swap(rhs[static_cast<std::size_t>(col)], rhs[static_cast<std::size_t>(piv)]);
        const rational pv = a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        for (int r = col + 1; r < n; ++r) {
            rational f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / pv;
            if (f == 0) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
            rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(col)];
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        rational s = rhs[static_cast<std::size_t>(col)];
        for (int c = col + 1; c < n; ++c)
            s -= a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)] *
                 rhs[static_cast<std::size_t>(c)];
        rhs[static_cast<std::size_t>(col)] = s / a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    }
    return true;
}

}  // namespace detail

// exact minimum of x'Qx over the simplex by face enumeration: on each support
// solve the KKT system Qx = lambda e, sum x = 1; keep nonnegative solutions.
// Faces with singular KKT systems are skipped (their minima live on subfaces).
inline simplex_qp_result simplex_qp_exact(const standard_qp& qp) {
    const int d = qp.d;
    if (d > 12) throw std::invalid_argument("simplex oracle guard: d too large");
    if (d < 1) throw std::invalid_argument("empty qp");
    bool have = false;
    simplex_qp_result best;
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
        std::vector<int> sup;
        for (int i = 0; i < d; ++i)
            if (mask & (1u << i)) sup.push_back(i);
        const int k = static_cast<int>(sup.size());
        // system over (x_sup, lambda)
        std::vector<std::vector<rational>> a(static_cast<std::size_t>(k + 1),
                                             std::vector<rational>(static_cast<std::size_t>(k + 1), rational(0)));
        std::vector<rational> rhs(static_cast<std::size_t>(k + 1), rational(0));
        for (int r = 0; r < k; ++r) {
            for (int c = 0; c < k; ++c) a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = qp.at(sup[static_cast<std::size_t>(r)], sup[static_cast<std::size_t>(c)]);
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] = rational(-1);
        }
        for (int c = 0; c < k; ++c) a[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] = rational(1);
        rhs[static_cast<std::size_t>(k)] = rational(1);
        if (!detail::solve_rational(a, rhs)) continue;
        bool ok = true;
        for (int r = 0; r < k; ++r)
            if (rhs[static_cast<std::size_t>(r)] < 0) {
                ok = false;
                break;
            }
        if (!ok) continue;
        // objective value on the face equals lambda (x'Qx = lambda x'e)
        const rational& val = rhs[static_cast<std::size_t>(k)];
        if (!have || val < best.value) {
            have = true;
            best.value = val;
            best.minimizer.assign(static_cast<std::size_t>(d), rational(0));
            for (int r = 0; r < k; ++r)
                best.minimizer[static_cast<std::size_t>(sup[static_cast<std::size_t>(r)])] =
                    rhs[static_cast<std::size_t>(r)];
        }
    }
    if (!have) throw std::logic_error("no face produced a candidate");
    return best;
}

inline relaxation_result solve_relaxation(const block_sdp_problem& p, int level, double tol = 1e-9) {
    if (level < 0 || level > 1) throw std::invalid_argument("level must be 0 or 1");
    relaxation_result res;
    res.level = level;
    res.problem_fingerprint = problem_fingerprint(p);
    res.solution = solve(p, tol);
    res.p_lower = res.solution.objective_value;
    return res;
}

}  // namespace crossbound

#endif
