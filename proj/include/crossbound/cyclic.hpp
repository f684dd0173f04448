#ifndef CROSSBOUND_CYCLIC_HPP
#define CROSSBOUND_CYCLIC_HPP

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>
#include <vector>

#include "crossbound/util.hpp"

namespace crossbound {

// Cyclic ordering of {0,...,m-1}, stored rotated so seq[0] == 0.
struct cyclic_ordering {
    std::vector<int> seq;

    bool operator==(const cyclic_ordering& o) const { return seq == o.seq; }
    bool operator<(const cyclic_ordering& o) const { return seq < o.seq; }
    int m() const { return static_cast<int>(seq.size()); }
};

inline cyclic_ordering canonicalize(const std::vector<int>& raw) {
    const int m = static_cast<int>(raw.size());
    if (m < 1) throw std::invalid_argument("empty sequence");
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    int zero_pos = -1;
    for (int i = 0; i < m; ++i) {
        int v = raw[static_cast<std::size_t>(i)];
        if (v < 0 || v >= m || seen[static_cast<std::size_t>(v)])
            throw std::invalid_argument("not a permutation of 0..m-1");
        seen[static_cast<std::size_t>(v)] = 1;
        if (v == 0) zero_pos = i;
    }
    cyclic_ordering out;
    out.seq.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        out.seq[static_cast<std::size_t>(i)] = raw[static_cast<std::size_t>((zero_pos + i) % m)];
    return out;
}

// Inverse cyclic permutation = reversed sequence, re-canonicalized.
inline cyclic_ordering invert(const cyclic_ordering& rho) {
    std::vector<int> rev(rho.seq.rbegin(), rho.seq.rend());
    return canonicalize(rev);
}

// h acts by relabeling: position k gets h(seq[k]).
inline cyclic_ordering conjugate(const cyclic_ordering& rho, const std::vector<int>& h) {
    if (h.size() != rho.seq.size()) throw std::invalid_argument("size mismatch");
    std::vector<int> mapped(rho.seq.size());
    for (std::size_t k = 0; k < rho.seq.size(); ++k)
        mapped[k] = h[static_cast<std::size_t>(rho.seq[k])];
    return canonicalize(mapped);
}

// All distinct orderings reachable by one cyclically-adjacent swap
// (positions (k, k+1 mod m), so the wrap-around pair counts too).
inline std::vector<cyclic_ordering> neighbors(const cyclic_ordering& rho) {
    const int m = rho.m();
    std::vector<cyclic_ordering> out;
    for (int k = 0; k < m; ++k) {
        std::vector<int> s = rho.seq;
        std::swap(s[static_cast<std::size_t>(k)], s[static_cast<std::size_t>((k + 1) % m)]);
        cyclic_ordering c = canonicalize(s);
        if (std::find(out.begin(), out.end(), c) == out.end() && !(c == rho))
            out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// All d = (m-1)! cyclic orderings in lexicographic order, with index lookup.
struct pi_index {
    int m = 0;
    std::vector<cyclic_ordering> orderings;
    std::map<std::vector<int>, int> index_of;

    explicit pi_index(int m_) : m(m_) {
        if (m < 3 || m > 8) throw std::invalid_argument("m must be in 3..8");
        std::vector<int> tail;
        for (int v = 1; v < m; ++v) tail.push_back(v);
        do {
            cyclic_ordering c;
            c.seq.push_back(0);
            c.seq.insert(c.seq.end(), tail.begin(), tail.end());
            index_of.emplace(c.seq, static_cast<int>(orderings.size()));
            orderings.push_back(std::move(c));
        } while (std::next_permutation(tail.begin(), tail.end()));
    }

    int d() const { return static_cast<int>(orderings.size()); }

    int lookup(const cyclic_ordering& c) const {
        auto it = index_of.find(c.seq);
        if (it == index_of.end()) throw std::logic_error("ordering not in index");
        return it->second;
    }
};

// Neighbor graph as index adjacency lists.
inline std::vector<std::vector<int>> neighbor_graph(const pi_index& pi) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(pi.d()));
    parallel_for(static_cast<std::size_t>(pi.d()), [&](std::size_t i) {
        for (const auto& nb : neighbors(pi.orderings[i]))
            adj[i].push_back(pi.lookup(nb));
    });
    return adj;
}

inline std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj, int src) {
    std::vector<int> dist(adj.size(), -1);
    std::queue<int> q;
    dist[static_cast<std::size_t>(src)] = 0;
    q.push(src);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (dist[static_cast<std::size_t>(v)] < 0) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                q.push(v);
            }
        }
    }
    return dist;
}

// Swap metric between two orderings (shortest path in the neighbor graph).
inline int distance(const pi_index& pi, const cyclic_ordering& a, const cyclic_ordering& b) {
    if (a.m() != b.m()) throw std::invalid_argument("mixed m");
    auto adj = neighbor_graph(pi);
    return bfs_distances(adj, pi.lookup(a))[static_cast<std::size_t>(pi.lookup(b))];
}

// Q[i][j] = swap distance from ordering i to invert(ordering j).
struct q_matrix {
    int m = 0;
    int d = 0;
    std::vector<int> entries;  // row-major d*d

    int at(int i, int j) const {
        return entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                       static_cast<std::size_t>(j)];
    }
    int& at(int i, int j) {
        return entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                       static_cast<std::size_t>(j)];
    }
};

inline q_matrix build_q_matrix(const pi_index& pi) {
    q_matrix q;
    q.m = pi.m;
    q.d = pi.d();
    q.entries.assign(static_cast<std::size_t>(q.d) * static_cast<std::size_t>(q.d), 0);
    auto adj = neighbor_graph(pi);
    std::vector<int> inv(static_cast<std::size_t>(q.d));
    for (int j = 0; j < q.d; ++j)
        inv[static_cast<std::size_t>(j)] = pi.lookup(invert(pi.orderings[static_cast<std::size_t>(j)]));
    parallel_for(static_cast<std::size_t>(q.d), [&](std::size_t i) {
        auto dist = bfs_distances(adj, static_cast<int>(i));
        for (int j = 0; j < q.d; ++j)
            q.at(static_cast<int>(i), j) = dist[static_cast<std::size_t>(inv[static_cast<std::size_t>(j)])];
    });
    return q;
}

inline q_matrix build_q_matrix(int m) {
    pi_index pi(m);
    return build_q_matrix(pi);
}

}  // namespace crossbound

#endif
