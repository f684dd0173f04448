#ifndef CROSSBOUND_CERTIFY_HPP
#define CROSSBOUND_CERTIFY_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossbound/blockdiag.hpp"
#include "crossbound/rational.hpp"
#include "crossbound/sdp.hpp"
#include "crossbound/symmetry.hpp"

namespace crossbound {

// Exact rational witness for Q - t ee' in S+ + N: scalar slacks b_i - t - y_i
// give the nonnegative part, sum_i y_i A_i the PSD part (checked blockwise).
struct certificate {
    int m = 0;
    int level = 0;
    rational t;
    std::vector<rational> y;
    std::string basis_fingerprint;
};

struct verification_report {
    bool valid = false;
    std::string reason;  // empty when valid
    rational validated_bound;
    rational scalar_margin;                // min_i b_i - t - y_i
    std::vector<std::string> psd_witness;  // per-block factorization diagnostics
};

struct rounding_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct psd_check_result {
    bool psd = false;
    int rank = 0;
    std::string reason;
};

// Fraction-free symmetric Gaussian elimination (Bareiss) with diagonal
// pivoting on an integer matrix.  PSD iff every pivot is positive and any
// all-zero-diagonal tail is entirely zero.
inline psd_check_result exact_psd_check(std::vector<bigint>& a, int n) {
    auto at = [&](int i, int j) -> bigint& {
        return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(j)];
    };
    psd_check_result res;
    bigint prev = 1;
    for (int k = 0; k < n; ++k) {
        int piv = -1;
        for (int q = k; q < n; ++q) {
            int s = sgn(at(q, q));
            if (s < 0) {
                res.reason = "negative diagonal entry during elimination";
                return res;
            }
            if (s > 0 && piv < 0) piv = q;
        }
        if (piv < 0) {
            // all remaining diagonal entries are zero: PSD forces zero tail
            for (int i = k; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (at(i, j) != 0) {
                        res.reason = "zero diagonal with nonzero off-diagonal entry";
                        return res;
                    }
            res.psd = true;
            res.rank = k;
            return res;
        }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
            for (int i = 0; i < n; ++i) std::swap(at(i, k), at(i, piv));
        }
        const bigint d = at(k, k);
        for (int i = k + 1; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                bigint tmp = d * at(i, j) - at(i, k) * at(j, k);
                mpz_divexact(at(i, j).get_mpz_t(), tmp.get_mpz_t(), prev.get_mpz_t());
                if (j != i) at(j, i) = at(i, j);
            }
        }
        prev = d;
        res.rank = k + 1;
    }
    res.psd = true;
    return res;
}

// scaled integer matrix L * sum_i y_i * blocks[i], L = lcm of denominators
inline std::vector<bigint> scaled_block_sum(const std::vector<rational>& y,
                                            const std::vector<int_matrix>& blocks, int h,
                                            const bigint& scale) {
    std::vector<bigint> acc(static_cast<std::size_t>(h) * static_cast<std::size_t>(h), bigint(0));
    for (std::size_t i = 0; i < y.size(); ++i) {
        rational sy = y[i] * rational(scale);
        if (sy.get_den() != 1) throw std::logic_error("scale is not a common denominator");
        const bigint c = sy.get_num();
        if (c == 0) continue;
        const int_matrix& blk = blocks[i];
        for (int k = 0; k < h; ++k)
            for (int l = 0; l < h; ++l) {
                int v = blk.at(k, l);
                if (v != 0)
                    acc[static_cast<std::size_t>(k) * static_cast<std::size_t>(h) +
                        static_cast<std::size_t>(l)] += c * v;
            }
    }
    return acc;
}

}  // namespace detail

inline verification_report verify_certificate(const certificate& cert, const orbit_basis& basis,
                                              const block_basis& blocks) {
    verification_report rep;
    if (cert.basis_fingerprint != basis.fingerprint()) {
        rep.reason = "basis fingerprint mismatch";
        return rep;
    }
    if (cert.m != basis.m || cert.level != 0 ||
        static_cast<int>(cert.y.size()) != basis.M) {
        rep.reason = "certificate shape mismatch";
        return rep;
    }
    bool first = true;
    for (int i = 0; i < basis.M; ++i) {
        rational slack = rational(basis.b[static_cast<std::size_t>(i)]) - cert.t -
                         cert.y[static_cast<std::size_t>(i)];
        if (first || slack < rep.scalar_margin) rep.scalar_margin = slack;
        first = false;
        if (slack < 0) {
            rep.reason = "scalar inequality violated at basis element " + std::to_string(i);
            return rep;
        }
    }
    bigint scale = 1;
    for (const auto& v : cert.y) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), v.get_den_mpz_t());
    for (int b = 0; b < 2; ++b) {
        auto acc = detail::scaled_block_sum(cert.y, b == 0 ? blocks.blocks1 : blocks.blocks2,
                                            blocks.h, scale);
        auto chk = detail::exact_psd_check(acc, blocks.h);
        if (!chk.psd) {
            rep.reason = "block " + std::to_string(b + 1) + " not PSD: " + chk.reason;
            return rep;
        }
        rep.psd_witness.push_back("block " + std::to_string(b + 1) + ": rank " +
                                  std::to_string(chk.rank) + " of " + std::to_string(blocks.h) +
                                  ", all pivots positive (exact)");
    }
    rep.valid = true;
    rep.validated_bound = cert.t;
    return rep;
}

// Round the floating solution (t, y_1..y_M) onto the 1e-6 grid: t moves down
// by the margin, the identity coordinate moves up by margin/2 so the block
// sums gain margin/2 * I of eigenvalue headroom while the identity scalar
// slack stays small and nonnegative.  Margin 0 is the tight attempt: t and y
// are rounded to the nearest grid point with no headroom, which succeeds only
// when the true optimum happens to sit on the grid (the exact verification
// below is the safety net either way).  Throws rounding_error when the exact
// checks fail at this margin.
inline certificate round_to_certificate(const sdp_solution& sol, const orbit_basis& basis,
                                        const block_basis& blocks, const rational& margin) {
    if (sol.status != sdp_status::optimal)
        throw std::invalid_argument("cannot certify a non-optimal solution");
    if (static_cast<int>(sol.y.size()) != 1 + basis.M)
        throw std::invalid_argument("solution shape does not match basis");
    if (margin < 0 || margin >= 1) throw std::invalid_argument("margin must be in [0, 1)");

    const long den = 1000000;
    certificate cert;
    cert.m = basis.m;
    cert.level = 0;
    cert.basis_fingerprint = basis.fingerprint();
    cert.t = margin == 0 ? round_to_den(rational(sol.objective_value), den)
                         : floor_to_den(rational(sol.objective_value) - margin, den);
    cert.y.reserve(static_cast<std::size_t>(basis.M));
    for (int i = 0; i < basis.M; ++i)
        cert.y.push_back(round_to_den(rational(sol.y[static_cast<std::size_t>(i + 1)]), den));
    cert.y[static_cast<std::size_t>(basis.identity_elem)] += margin / 2;

    verification_report rep = verify_certificate(cert, basis, blocks);
    if (!rep.valid) throw rounding_error("rounding failed at margin " + rational_str(margin) +
                                         ": " + rep.reason);
    return cert;
}

inline std::vector<rational> default_margin_ladder() {
    return {rational(0), rational(1, 1000000), rational(1, 100000), rational(1, 10000)};
}

inline certificate certify_with_ladder(const sdp_solution& sol, const orbit_basis& basis,
                                       const block_basis& blocks,
                                       std::vector<rational> ladder = {}) {
    if (ladder.empty()) ladder = default_margin_ladder();
    std::string last;
    for (const auto& margin : ladder) {
        try {
            return round_to_certificate(sol, basis, blocks, margin);
        } catch (const rounding_error& e) {
            last = e.what();
        }
    }
    throw rounding_error("margin ladder exhausted; last: " + last);
}

inline void write_certificate(const certificate& cert, std::ostream& out) {
    out << "crossbound certificate 1\n";
    out << "m " << cert.m << "\n";
    out << "level " << cert.level << "\n";
    out << "basis " << cert.basis_fingerprint << "\n";
    out << "t " << rational_str(cert.t) << "\n";
    out << "y " << cert.y.size() << "\n";
    for (const auto& v : cert.y) out << rational_str(v) << "\n";
}

inline void write_certificate(const certificate& cert, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    write_certificate(cert, f);
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline certificate read_certificate(std::istream& in) {
    certificate cert;
    std::string line;
    if (!std::getline(in, line) || line != "crossbound certificate 1")
        throw std::runtime_error("not a certificate file");
    std::size_t ny = 0;
    bool have_y = false;
    while (!have_y && std::getline(in, line)) {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "m")
            ss >> cert.m;
        else if (key == "level")
            ss >> cert.level;
        else if (key == "basis")
            ss >> cert.basis_fingerprint;
        else if (key == "t") {
            std::string v;
            ss >> v;
            cert.t = parse_rational(v);
        } else if (key == "y") {
            ss >> ny;
            have_y = true;
        } else if (!key.empty())
            throw std::runtime_error("unknown certificate field: " + key);
    }
    if (!have_y) throw std::runtime_error("certificate missing y section");
    for (std::size_t i = 0; i < ny; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("certificate y list truncated");
        cert.y.push_back(parse_rational(line));
    }
    return cert;
}

inline certificate read_certificate(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_certificate(f);
}

}  // namespace crossbound

#endif
