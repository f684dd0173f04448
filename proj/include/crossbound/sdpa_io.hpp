#ifndef CROSSBOUND_SDPA_IO_HPP
#define CROSSBOUND_SDPA_IO_HPP

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "crossbound/sdp.hpp"

namespace crossbound {

// SDPA sparse format.  The file encodes the minimization problem
//   min c.x  s.t.  sum_v x_v F_v - F0  PSD (blockwise),
// so the objective written is the negation of our max objective.  Negative
// block sizes mark diagonal blocks; the linear inequalities a.y <= rhs are
// exported as one trailing diagonal block of slacks (row coefficient -a_v,
// constant term -rhs).
inline void export_sdpa(const block_sdp_problem& p, std::ostream& out) {
    p.require_consistent();
    const int nb = static_cast<int>(p.block_sizes.size());
    const bool has_diag = !p.ineqs.empty();
    out << p.nvars << "\n";
    out << nb + (has_diag ? 1 : 0) << "\n";
    {
        bool first = true;
        for (int s : p.block_sizes) {
            out << (first ? "" : " ") << s;
            first = false;
        }
        if (has_diag) out << (first ? "" : " ") << -static_cast<int>(p.ineqs.size());
        out << "\n";
    }
    {
        bool first = true;
        for (double g : p.objective) {
            out << (first ? "" : " ") << detail::render_double(-g);
            first = false;
        }
        out << "\n";
    }

    struct line {
        int mat, blk, i, j;
        double val;
    };
    std::vector<line> lines;
    auto push = [&](int mat, int blk, int i, int j, double val) {
        if (val != 0.0) lines.push_back({mat, blk, i, j, val});
    };
    for (const auto& e : p.f0) push(0, e.block + 1, e.i + 1, e.j + 1, e.val);
    for (std::size_t r = 0; r < p.ineqs.size(); ++r)
        push(0, nb + 1, static_cast<int>(r) + 1, static_cast<int>(r) + 1, -p.ineqs[r].rhs);
    for (int v = 0; v < p.nvars; ++v) {
        for (const auto& e : p.fvar[static_cast<std::size_t>(v)])
            push(v + 1, e.block + 1, e.i + 1, e.j + 1, e.val);
        for (std::size_t r = 0; r < p.ineqs.size(); ++r)
            for (const auto& [vv, coef] : p.ineqs[r].coeffs)
                if (vv == v)
                    push(v + 1, nb + 1, static_cast<int>(r) + 1, static_cast<int>(r) + 1, -coef);
    }
    std::stable_sort(lines.begin(), lines.end(), [](const line& a, const line& b) {
        if (a.mat != b.mat) return a.mat < b.mat;
        if (a.blk != b.blk) return a.blk < b.blk;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    for (const auto& l : lines)
        out << l.mat << " " << l.blk << " " << l.i << " " << l.j << " "
            << detail::render_double(l.val) << "\n";
}

inline void export_sdpa(const block_sdp_problem& p, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    export_sdpa(p, f);
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline block_sdp_problem parse_sdpa(std::istream& in) {
    auto next_data_line = [&](std::string& s) {
        while (std::getline(in, s)) {
            std::size_t k = s.find_first_not_of(" \t\r");
            if (k == std::string::npos) continue;
            if (s[k] == '"' || s[k] == '*') continue;  // comment line
            return true;
        }
        return false;
    };
    auto clean = [](std::string s) {
        for (char& c : s)
            if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
        return s;
    };
    std::string ln;
    if (!next_data_line(ln)) throw std::runtime_error("sdpa: missing variable count");
    int nvars = std::stoi(clean(ln));
    if (!next_data_line(ln)) throw std::runtime_error("sdpa: missing block count");
    int nblocks = std::stoi(clean(ln));
    if (!next_data_line(ln)) throw std::runtime_error("sdpa: missing block sizes");
    std::vector<int> raw_sizes;
    {
        std::istringstream ss(clean(ln));
        int s;
        while (ss >> s) raw_sizes.push_back(s);
    }
    if (static_cast<int>(raw_sizes.size()) != nblocks)
        throw std::runtime_error("sdpa: block size count mismatch");
    if (!next_data_line(ln)) throw std::runtime_error("sdpa: missing objective");
    block_sdp_problem p;
    p.nvars = nvars;
    p.fvar.resize(static_cast<std::size_t>(nvars));
    {
        std::istringstream ss(clean(ln));
        double c;
        while (ss >> c) p.objective.push_back(-c);
    }
    if (static_cast<int>(p.objective.size()) != nvars)
        throw std::runtime_error("sdpa: objective length mismatch");

    // map raw blocks: positive -> dense block index, negative -> inequality rows
    std::vector<int> dense_of(raw_sizes.size(), -1), ineq_base(raw_sizes.size(), -1);
    for (std::size_t b = 0; b < raw_sizes.size(); ++b) {
        if (raw_sizes[b] > 0) {
            dense_of[b] = static_cast<int>(p.block_sizes.size());
            p.block_sizes.push_back(raw_sizes[b]);
        } else if (raw_sizes[b] < 0) {
            ineq_base[b] = static_cast<int>(p.ineqs.size());
            p.ineqs.resize(p.ineqs.size() + static_cast<std::size_t>(-raw_sizes[b]));
        } else {
            throw std::runtime_error("sdpa: zero block size");
        }
    }

    while (next_data_line(ln)) {
        std::istringstream ss(clean(ln));
        int mat, blk, i, j;
        double val;
        if (!(ss >> mat >> blk >> i >> j >> val)) throw std::runtime_error("sdpa: bad entry line");
        if (mat < 0 || mat > nvars || blk < 1 || blk > nblocks)
            throw std::runtime_error("sdpa: entry out of range");
        std::size_t rb = static_cast<std::size_t>(blk - 1);
        if (raw_sizes[rb] > 0) {
            if (i < 1 || j < i || j > raw_sizes[rb])
                throw std::runtime_error("sdpa: entry index out of range");
            sdp_entry e{dense_of[rb], i - 1, j - 1, val};
            if (mat == 0)
                p.f0.push_back(e);
            else
                p.fvar[static_cast<std::size_t>(mat - 1)].push_back(e);
        } else {
            if (i != j || i < 1 || i > -raw_sizes[rb])
                throw std::runtime_error("sdpa: diagonal entry index out of range");
            auto& row = p.ineqs[static_cast<std::size_t>(ineq_base[rb] + i - 1)];
            if (mat == 0)
                row.rhs = -val;
            else
                row.coeffs.emplace_back(mat - 1, -val);
        }
    }
    p.require_consistent();
    return p;
}

inline block_sdp_problem load_sdpa(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    return parse_sdpa(f);
}

// the 1x1 instance used for the golden-file check: maximize -x with x >= 0
inline block_sdp_problem trivial_instance() {
    block_sdp_problem p;
    p.nvars = 1;
    p.objective = {-1.0};
    p.block_sizes = {1};
    p.fvar = {{sdp_entry{0, 0, 0, 1.0}}};
    return p;
}

}  // namespace crossbound

#endif
