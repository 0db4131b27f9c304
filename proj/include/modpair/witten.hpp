#pragma once

// Rank 2, degree 0 Gaussian partition function Z(eps): numerics with rigorous
// tails, exact zeta values from residues, and the two polynomial-part routes.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <vector>

#include "modpair/errors.hpp"
#include "modpair/rational.hpp"
#include "modpair/series.hpp"

namespace modpair {

using Real = boost::multiprecision::cpp_bin_float_50;

inline Real to_real(const Rational& q) { return Real(q.get_num().get_str()) / Real(q.get_den().get_str()); }
inline Real real_pi() { return boost::math::constants::pi<Real>(); }

struct Bounded {
    Real value;
    Real error;  // |true - value| <= error
};

// Z(eps) = (2 pi^2)^{1-g} sum_{n>=1} exp(-eps pi^2 n^2) / n^{2g-2}, first n_terms terms.
// Terms after N shrink by at least q = exp(-eps pi^2 (2N+3)) each, so the tail is
// at most the first omitted term over 1 - q.
inline Bounded z_eval(int g, const Rational& eps, long n_terms) {
    if (g < 2) throw DomainError("genus must be >= 2");
    if (eps <= 0) throw DomainError("eps must be positive");
    if (n_terms < 1) throw DomainError("need at least one term");
    Real e = to_real(eps), pi2 = real_pi() * real_pi();
    auto term = [&](long n) -> Real { return exp(-e * pi2 * n * n) / pow(Real(n), 2 * g - 2); };
    Real sum = 0;
    for (long n = 1; n <= n_terms; ++n) sum += term(n);
    Real q = exp(-e * pi2 * (2 * n_terms + 3));
    Real tail = term(n_terms + 1) / (1 - q);
    Real scale = 1 / pow(2 * pi2, g - 1);
    return {sum * scale, tail * scale + std::numeric_limits<Real>::epsilon() * n_terms * sum * scale};
}

// zeta(s) for s >= 2 from N terms plus Euler-Maclaurin through B_4;
// the dropped remainder is below the next correction s(s+1)(s+2)(s+3)(s+4) / (30240 N^{s+5}) in size,
// which is added to the bound with a factor 2.
inline Bounded partial_zeta(int s, long N) {
    if (s < 2 || N < 2) throw DomainError("partial_zeta needs s >= 2 and N >= 2");
    Real sum = 0;
    for (long n = 1; n < N; ++n) sum += 1 / pow(Real(n), s);
    Real n = N;
    Real em = pow(n, 1 - s) / (s - 1) + pow(n, -s) / 2 + Real(s) * pow(n, -s - 1) / 12 -
              Real(s) * (s + 1) * (s + 2) * pow(n, -s - 3) / 720;
    Real bound = 2 * Real(s) * (s + 1) * (s + 2) * (s + 3) * (s + 4) * pow(n, -s - 5) / 30240;
    return {sum + em, bound + std::numeric_limits<Real>::epsilon() * N};
}

// res_{X=0} 1/(X^p (e^{2X} - 1)); 0 for p < 0.
inline Rational double_todd_residue(int p) {
    if (p < 0) return 0;
    auto vs = make_varset({laurent_var("X", 1)});
    Series x = Series::variable(vs, "X").scaled(2);
    Series quotient = (x.exp(p + 2) - 1).shifted({-1});
    return quotient.inv(p + 1).coeff({p});
}

// The residue identity read naively gives zeta(2m) = (-1)^m pi^{2m} res; it
// under-counts by a global sign, fixed once against partial sums.
inline int calibrate_zeta_sign() {
    Real naive = -to_real(double_todd_residue(2)) * pow(real_pi(), 2);
    Bounded direct = partial_zeta(2, 1000);
    if (abs(naive - direct.value) < 1e-6) return 1;
    if (abs(naive + direct.value) < 1e-6) return -1;
    throw DomainError("residue route and partial sums differ by more than a sign");
}

constexpr int kZetaResidueSign = -1;

// zeta(2m) = sign (-1)^m pi^{2m} res 1/(X^{2m}(e^{2X} - 1)), as a rational times pi^{2m}.
inline MarkedRational zeta_via_residue(int m) {
    if (m < 1) throw DomainError("zeta_via_residue needs m >= 1");
    Rational q = Rational(kZetaResidueSign * sign_pow(m)) * double_todd_residue(2 * m);
    return {q, UnitMarker{0, 2 * m, 0}};
}

inline Real numeric_value(const MarkedRational& x) {
    if (x.marker.i != 0) throw DomainError("numeric_value of a non-real marker");
    return to_real(x.value) * pow(real_pi(), x.marker.pi) * pow(sqrt(real_pi()), x.marker.sqrt_pi);
}

// ---- polynomial part -------------------------------------------------------

// eps^k coefficient of the residue expression:
//   (-1)^{g-1}/2 * res_X (-X^2)^k int_T e^{i omega} / (k! (2X)^{2g-2} (e^{2X} - 1)),
// with int_T e^{i omega} = (2i)^g carried as 2^g and an i^g marker.
inline MarkedRational jk_polynomial_coefficient(int g, int k) {
    if (g < 2 || k < 0) throw DomainError("need g >= 2 and k >= 0");
    Rational c = Rational(sign_pow(g - 1 + k)) / 2 * rpow(2, g) / Rational(factorial(k)) / rpow(2, 2 * g - 2) *
                 double_todd_residue(2 * g - 2 - 2 * k);
    return {c, UnitMarker{g, 0, 0}};
}

// eps^k coefficient of Z: (2 pi^2)^{1-g} (-pi^2)^k zeta(2g-2-2k) / k!.
// k = g-1 uses zeta(0) = -1/2.
inline MarkedRational witten_polynomial_coefficient(int g, int k) {
    if (g < 2 || k < 0) throw DomainError("need g >= 2 and k >= 0");
    if (k > g - 1) return {0, {}};
    MarkedRational zeta = k == g - 1 ? MarkedRational{rat(-1, 2), {}} : zeta_via_residue(g - 1 - k);
    MarkedRational pre{Rational(sign_pow(k)) / rpow(2, g - 1) / Rational(factorial(k)),
                       UnitMarker{0, 2 * k - 2 * (g - 1), 0}};
    return pre * zeta;
}

// The factor carrying the Witten coefficient to the residue one: i^g from
// omega -> i omega, (-1)^k from rotating the Gaussian variable, and -1 from
// the calibrated zeta sign.
inline MarkedRational convention_transport(int g, int k) {
    return {Rational(kZetaResidueSign * sign_pow(k)), UnitMarker{g, 0, 0}};
}

struct PolynomialRow {
    int k = 0;
    MarkedRational residue_route, zeta_route, transported;
    bool equal = false;
};

// k = 0..g-2.
inline std::vector<PolynomialRow> polynomial_part_compare(int g) {
    if (g < 2) throw DomainError("genus must be >= 2");
    std::vector<PolynomialRow> rows;
    for (int k = 0; k <= g - 2; ++k) {
        PolynomialRow row;
        row.k = k;
        row.residue_route = jk_polynomial_coefficient(g, k);
        row.zeta_route = witten_polynomial_coefficient(g, k);
        row.transported = convention_transport(g, k) * row.zeta_route;
        row.equal = row.transported == row.residue_route;
        rows.push_back(row);
    }
    return rows;
}

// ---- half power --------------------------------------------------------------

// 2 (2/3)(2/5)...(2/(2g-3)) = 2^{g-1}/(2g-3)!!; at g = 2 the bare factor 2.
inline Rational witten_c2(int g) {
    if (g < 2) throw DomainError("genus must be >= 2");
    Rational c = 2;
    for (int j = 3; j <= 2 * g - 3; j += 2) c *= rat(2, j);
    return c;
}

// C_1 = (-1)^{g-1} / (2^g sqrt(pi)).
inline MarkedRational witten_c1(int g) { return {Rational(sign_pow(g - 1)) / rpow(2, g), UnitMarker{0, 0, -1}}; }

// d^{g-1}/d eps^{g-1} eps^{g-3/2} = prod_{j<g-1} (g - 3/2 - j) eps^{-1/2}.
inline Rational half_power_derivative_factor(int g) {
    Rational f = 1;
    for (int j = 0; j < g - 1; ++j) f *= Rational(g - j) - rat(3, 2);
    return f;
}

// eps^{g-3/2} coefficient of the residue-side expansion: (-1)^{g-1} i^g C_2 / (2^g sqrt(pi)).
inline MarkedRational half_power_coefficient(int g) {
    return MarkedRational{witten_c2(g), {}} * witten_c1(g) * MarkedRational{1, UnitMarker{g, 0, 0}};
}

// ---- expansion -----------------------------------------------------------------

// Z(eps) = C_1 C_2 eps^{g-3/2} + sum_{k<g} c_k eps^k + (exponentially small).
// The sum runs through k = g-1, whose coefficient zeta(0)-term is nonzero.
struct AsymptoticExpansion {
    int g = 0;
    MarkedRational half_power;
    std::vector<MarkedRational> polynomial;

    Real evaluate(const Rational& eps) const {
        Real e = to_real(eps);
        Real s = numeric_value(half_power) * pow(e, Real(g) - Real(3) / 2);
        for (size_t k = 0; k < polynomial.size(); ++k) s += numeric_value(polynomial[k]) * pow(e, static_cast<int>(k));
        return s;
    }
};

inline AsymptoticExpansion witten_expansion(int g) {
    AsymptoticExpansion out;
    out.g = g;
    out.half_power = MarkedRational{witten_c2(g), {}} * witten_c1(g);
    for (int k = 0; k <= g - 1; ++k) out.polynomial.push_back(witten_polynomial_coefficient(g, k));
    return out;
}

// Number of terms after which the Gaussian tail of z_eval is below 10^{-digits}.
inline long z_terms_for(const Rational& eps, int digits) {
    Real e = to_real(eps), pi2 = real_pi() * real_pi();
    Real need = sqrt(Real(digits) * log(Real(10)) / (e * pi2));
    return static_cast<long>(need) + 2;
}

}  // namespace modpair
