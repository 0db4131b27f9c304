#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

#include "modpair/errors.hpp"

namespace modpair {

// mpq_class keeps numerator/denominator coprime with positive denominator
// as long as every constructor path goes through canonicalize().
using Integer = mpz_class;
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational rat(const Integer& num, const Integer& den = 1) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p", "p/q", "-p/q".
inline Rational parse_rational(const std::string& text) {
    Rational r;
    if (text.empty() || r.set_str(text, 10) != 0)
        throw DomainError("not a rational: '" + text + "'");
    if (r.get_den() == 0) throw DomainError("rational with zero denominator: '" + text + "'");
    r.canonicalize();
    return r;
}

// Serialized as "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& r) { return r.get_str(10); }

inline Integer factorial(long n) {
    if (n < 0) throw DomainError("factorial of a negative integer");
    Integer out;
    mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
    return out;
}

// Zero outside 0 <= k <= n.
inline Integer binomial(long n, long k) {
    if (n < 0 || k < 0 || k > n) return 0;
    Integer out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
}

inline Rational rpow(const Rational& base, long e) {
    if (e < 0) {
        if (base == 0) throw DomainError("zero to a negative power");
        return rpow(Rational(1) / base, -e);
    }
    Rational out = 1, b = base;
    while (e) {
        if (e & 1) out *= b;
        b *= b;
        e >>= 1;
    }
    return out;
}

inline int sign_pow(long e) { return (e % 2 == 0) ? 1 : -1; }

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

// Largest integer <= r.
inline Integer floor_of(const Rational& r) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

// Formal unit markers i^a * pi^b * sqrt(pi)^c carried beside a rational.
// Exponents are compared structurally; no numeric value is ever attached.
struct UnitMarker {
    long i = 0;
    long pi = 0;
    long sqrt_pi = 0;
    auto operator<=>(const UnitMarker&) const = default;
};

inline UnitMarker operator*(const UnitMarker& a, const UnitMarker& b) {
    return {a.i + b.i, a.pi + b.pi, a.sqrt_pi + b.sqrt_pi};
}

struct MarkedRational {
    Rational value;
    UnitMarker marker;
    bool operator==(const MarkedRational& o) const {
        return value == o.value && (value == 0 || marker == o.marker);
    }
};

inline MarkedRational operator*(const MarkedRational& a, const MarkedRational& b) {
    return {a.value * b.value, a.marker * b.marker};
}

inline std::ostream& operator<<(std::ostream& os, const MarkedRational& m) {
    os << to_string(m.value);
    if (m.marker.i) os << " i^" << m.marker.i;
    if (m.marker.pi) os << " pi^" << m.marker.pi;
    if (m.marker.sqrt_pi) os << " sqrt(pi)^" << m.marker.sqrt_pi;
    return os;
}

}  // namespace modpair
