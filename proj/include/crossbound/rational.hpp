#ifndef CROSSBOUND_RATIONAL_HPP
#define CROSSBOUND_RATIONAL_HPP

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace crossbound {

using rational = mpq_class;
using bigint = mpz_class;

// "p/q" or plain integer "p".
inline rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return rational(bigint(s));
        bigint num(s.substr(0, slash));
        bigint den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        rational r(num, den);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("bad rational literal: " + s);
    }
}

inline std::string rational_str(const rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// Largest multiple of 1/den that is <= x, exact.
inline rational floor_to_den(const rational& x, long den) {
    bigint num;
    bigint scaled_num = x.get_num() * den;
    mpz_fdiv_q(num.get_mpz_t(), scaled_num.get_mpz_t(), x.get_den().get_mpz_t());
    rational out(num, den);
    out.canonicalize();
    return out;
}

// Nearest multiple of 1/den (ties toward +infinity), exact.
inline rational round_to_den(const rational& x, long den) {
    rational scaled = x * den;
    bigint num;
    bigint two_num = scaled.get_num() * 2 + scaled.get_den();
    bigint two_den = scaled.get_den() * 2;
    mpz_fdiv_q(num.get_mpz_t(), two_num.get_mpz_t(), two_den.get_mpz_t());
    rational out(num, den);
    out.canonicalize();
    return out;
}

inline rational floor_to_den(double x, long den) { return floor_to_den(rational(x), den); }
inline rational round_to_den(double x, long den) { return round_to_den(rational(x), den); }

}  // namespace crossbound

#endif
