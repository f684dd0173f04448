#ifndef CROSSBOUND_BOUNDS_HPP
#define CROSSBOUND_BOUNDS_HPP

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "crossbound/rational.hpp"

namespace crossbound {

// Z(m,n) = floor((m-1)/2) floor(m/2) floor((n-1)/2) floor(n/2)
inline bigint zarankiewicz(int m, int n) {
    if (m < 1 || n < 1) throw std::invalid_argument("zarankiewicz: m,n >= 1 required");
    auto f = [](int v) { return bigint(v / 2); };
    return f(m - 1) * f(m) * f(n - 1) * f(n);
}

// Z(n) = 1/4 floor(n/2) floor((n-1)/2) floor((n-2)/2) floor((n-3)/2)
inline bigint zarankiewicz_complete(int n) {
    if (n < 1) throw std::invalid_argument("zarankiewicz_complete: n >= 1 required");
    bigint prod = bigint(n / 2) * bigint((n - 1) / 2) * bigint((n - 2) / 2) * bigint((n - 3) / 2);
    if (prod % 4 != 0) throw std::logic_error("zarankiewicz product not divisible by 4");
    return prod / 4;
}

// mpq_class(a, b) keeps the fraction as given; reduce before any arithmetic
inline rational make_rational(long num, long den) {
    rational r(num, den);
    r.canonicalize();
    return r;
}

// cr(K_{m,n}) >= (n/2)(n p - floor(m/2) floor((m-1)/2)), exact
inline rational lemma_bound(const rational& p, int m, int n) {
    if (!(n >= m && m >= 2)) throw std::invalid_argument("lemma_bound: need n >= m >= 2");
    rational inner = rational(n) * p - rational((m / 2) * ((m - 1) / 2));
    return make_rational(n, 2) * inner;
}

// coefficients of the same bound as a polynomial in n: (p/2) n^2 - (...)/2 n
inline std::pair<rational, rational> lemma_coefficients(const rational& p, int m) {
    if (m < 2) throw std::invalid_argument("lemma_coefficients: m >= 2 required");
    return {p / 2, make_rational((m / 2) * ((m - 1) / 2), 2)};
}

// transfer a bound coefficient from K_{r,n} to K_{m,n}:
// multiplier C(m,r)/C(m-2,r-2) = m(m-1)/(r(r-1))
inline rational counting_transfer(const rational& c_base, int r, int m) {
    if (!(2 < r && r < m)) throw std::invalid_argument("counting_transfer: need 2 < r < m");
    return c_base * make_rational(static_cast<long>(m) * (m - 1), static_cast<long>(r) * (r - 1));
}

// n-side analogue: base value becomes the coefficient of n(n-1)
inline rational counting_transfer_coeff(const rational& c_base, int r) {
    if (r <= 2) throw std::invalid_argument("counting_transfer_coeff: need r > 2");
    return c_base / rational(static_cast<long>(r) * (r - 1));
}

// asymptotic factor of the r-based prior bound against Z(m,n):
// lim Z(r,n)/n^2 * m(m-1)/(r(r-1)) vs m^2/16; for r=5 this is 4/5.
inline rational prior_art_factor(int r = 5) {
    if (r < 3 || r % 2 == 0) throw std::invalid_argument("prior_art_factor: odd r >= 3 required");
    return make_rational(4L * ((r - 1) / 2) * (r / 2), static_cast<long>(r) * (r - 1));
}

namespace detail {

// exact decimal with `digits` places, floored toward -infinity, zeros trimmed
inline std::string decimal_floor_str(const rational& x, int digits) {
    bigint scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    bigint n;
    bigint num = x.get_num() * scale;
    mpz_fdiv_q(n.get_mpz_t(), num.get_mpz_t(), x.get_den().get_mpz_t());
    bool neg = n < 0;
    if (neg) n = -n;
    std::string s = n.get_str();
    if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits + 1 - static_cast<int>(s.size())), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return (neg ? "-" : "") + s;
}

// exact decimal if the denominator is 2^a 5^b (a,b <= 30), else "p/q"
inline std::string decimal_exact_str(const rational& x) {
    bigint den = x.get_den();
    int a = 0, b = 0;
    while (den % 2 == 0 && a <= 30) {
        den /= 2;
        ++a;
    }
    while (den % 5 == 0 && b <= 30) {
        den /= 5;
        ++b;
    }
    if (den != 1 || a > 30 || b > 30) return rational_str(x);
    return decimal_floor_str(x, std::max(a, b));
}

}  // namespace detail

struct crossing_bound_report {
    int m = 0;
    rational p_validated;
    rational quadratic_coeff;  // p/2
    rational linear_coeff;     // floor(m/2) floor((m-1)/2) / 2
    bool has_asymptotics = false;  // A/B/C factors come from the m=7 pipeline only
    rational a_base;           // A(m_base) >= 2p/9 for m_base = 7
    rational a_m_factor;       // A(m) >= a_m_factor * m/(m-1), odd m; the headline
    rational a_even_factor;    // A(m) >= a_even_factor * (m-1)/(m-2), even m
    rational b_lower;
    rational c_lower;
    std::string provenance;  // certificate / fingerprint note
};

// coefficient-only report for m != 7
inline crossing_bound_report basic_bound_report(const rational& p_validated, int m,
                                                const std::string& provenance = "") {
    crossing_bound_report rep;
    rep.m = m;
    rep.p_validated = p_validated;
    auto [quad, lin] = lemma_coefficients(p_validated, m);
    rep.quadratic_coeff = quad;
    rep.linear_coeff = lin;
    rep.provenance = provenance;
    return rep;
}

// Asymptotic ratios against the Zarankiewicz numbers, all derived from a
// validated p for m_base = 7: A(7) >= 2p/9 and the counting transfer gives
// A(m) >= (4p/21) m/(m-1) for odd m, (4p/21)(m-1)/(m-2) for even m; the
// headline factor is the smaller parity form, and B, C inherit it.
inline crossing_bound_report asymptotic_report(const rational& p_validated, int m_base,
                                               const std::string& provenance = "") {
    if (m_base != 7) throw std::invalid_argument("asymptotic_report: only m_base = 7 supported");
    crossing_bound_report rep;
    rep.m = m_base;
    rep.p_validated = p_validated;
    auto [quad, lin] = lemma_coefficients(p_validated, m_base);
    rep.quadratic_coeff = quad;
    rep.linear_coeff = lin;
    rep.has_asymptotics = true;
    rep.a_base = rational(2) * p_validated / 9;
    rep.a_m_factor = rational(4) * p_validated / 21;
    rep.a_even_factor = rep.a_m_factor;
    rep.b_lower = rep.a_m_factor;
    rep.c_lower = rep.b_lower;
    rep.provenance = provenance;
    return rep;
}

// Theorem-style summary of the report.
inline std::string render_bound_report(const crossing_bound_report& rep) {
    std::ostringstream out;
    out << "validated lower bound p = " << rational_str(rep.p_validated) << " (= "
        << detail::decimal_floor_str(rep.p_validated, 6) << "...) for m = " << rep.m << "\n\n";
    out << "  cr(K_{" << rep.m << ",n}) > " << detail::decimal_floor_str(rep.quadratic_coeff, 4)
        << "n^2 - " << detail::decimal_exact_str(rep.linear_coeff) << "n\n";
    if (rep.has_asymptotics) {
        out << "  A(" << rep.m << ") >= " << detail::decimal_floor_str(rep.a_base, 4) << "\n";
        out << "  A(m) >= " << detail::decimal_floor_str(rep.a_m_factor, 4)
            << " * m/(m-1)      (odd m >= 7)\n";
        out << "  A(m) >= " << detail::decimal_floor_str(rep.a_even_factor, 4)
            << " * (m-1)/(m-2)  (even m >= 8)\n";
        out << "  B >= " << detail::decimal_floor_str(rep.b_lower, 4) << "\n";
        out << "  C >= " << detail::decimal_floor_str(rep.c_lower, 4) << "\n";
        out << "\n  prior art via r = 5 counting: factor "
            << detail::decimal_exact_str(prior_art_factor(5)) << " of Z(m,n)\n";
    }
    if (!rep.provenance.empty()) out << "\n  certificate: " << rep.provenance << "\n";
    return out.str();
}

}  // namespace crossbound

#endif
