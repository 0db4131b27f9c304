#pragma once

// Rank 2, degree 0: pairings of a_2^m f_2^n on the partial desingularisation.
// Every entry point requires 2m + n = 4g - 3.

#include <map>
#include <tuple>
#include <vector>

#include "modpair/errors.hpp"
#include "modpair/grassmann.hpp"
#include "modpair/rational.hpp"
#include "modpair/series.hpp"

namespace modpair {

inline void require_desing_degree(int g, int m, int n) {
    if (g < 2) throw DomainError("genus must be >= 2");
    if (m < 0 || n < 0 || 2 * m + n != 4 * g - 3)
        throw DomainError("a_2^m f_2^n needs nonnegative m, n with 2m + n = 4g - 3");
}

// ---- coefficient tables ------------------------------------------------------

// 1/((1+x)^g e^z) = sum B_{a,b} z^a x^b. Negative indices read as 0.
class CoeffTableB {
public:
    CoeffTableB(int g, int a_max, int b_max) : g_(g), a_max_(a_max), b_max_(b_max) {
        if (g < 2) throw DomainError("genus must be >= 2");
        auto vs = make_varset({nilpotent_var("z", a_max + 1), nilpotent_var("x", b_max + 1)});
        Series z = Series::variable(vs, "z"), x = Series::variable(vs, "x");
        Series inverse = ((1 + x).pow(g) * z.exp()).inv();
        for (const auto& [e, c] : inverse.terms()) table_[{e[0], e[1]}] = c;
    }
    Rational operator()(int a, int b) const {
        if (a < 0 || b < 0) return 0;
        if (a > a_max_ || b > b_max_) throw DomainError("B index beyond the computed table");
        auto it = table_.find({a, b});
        return it == table_.end() ? Rational(0) : it->second;
    }
    // (-1)^{a+b} C(g+b-1, b) / a!
    static Rational closed_form(int g, int a, int b) {
        if (a < 0 || b < 0) return 0;
        return Rational(sign_pow(a + b)) * Rational(binomial(g + b - 1, b)) / Rational(factorial(a));
    }
    int genus() const { return g_; }

private:
    int g_, a_max_, b_max_;
    std::map<std::pair<int, int>, Rational> table_;
};

// ((1+2t) sum_{k<g} (1+t)^{g-1-k} sum_{r+s=k} z^r/r! C(g,s) x^s)^{-1} = sum A_{r,s,l} z^r x^s t^l.
class CoeffTableA {
public:
    CoeffTableA(int g, int r_max, int s_max, int l_max)
        : g_(check_genus(g)), r_max_(r_max), s_max_(s_max), l_max_(l_max),
          vars_(make_varset({nilpotent_var("z", r_max + 1), nilpotent_var("x", s_max + 1), nilpotent_var("t", l_max + 1)})),
          inverse_(definition().inv()) {
        for (const auto& [e, c] : inverse_.terms()) table_[{e[0], e[1], e[2]}] = c;
    }
    Rational operator()(int r, int s, int l) const {
        if (r < 0 || s < 0 || l < 0) return 0;
        if (r > r_max_ || s > s_max_ || l > l_max_) throw DomainError("A index beyond the computed table");
        auto it = table_.find({r, s, l});
        return it == table_.end() ? Rational(0) : it->second;
    }
    // The defining product, truncated to the table's orders.
    Series definition() const {
        Series z = Series::variable(vars_, "z"), x = Series::variable(vars_, "x"), t = Series::variable(vars_, "t");
        Series inner = Series::constant(vars_, 0);
        for (int k = 0; k < g_; ++k) {
            Series layer = Series::constant(vars_, 0);
            for (int r = 0; r <= k; ++r) {
                int s = k - r;
                layer += (z.pow(r) * x.pow(s)).scaled(Rational(binomial(g_, s)) / Rational(factorial(r)));
            }
            inner += (1 + t).pow(g_ - 1 - k) * layer;
        }
        return (1 + t.scaled(2)) * inner;
    }
    const Series& inverse() const { return inverse_; }
    int genus() const { return g_; }

private:
    static int check_genus(int g) {
        if (g < 2) throw DomainError("genus must be >= 2");
        return g;
    }
    int g_, r_max_, s_max_, l_max_;
    VarSetPtr vars_;
    Series inverse_;
    std::map<std::tuple<int, int, int>, Rational> table_;
};

inline CoeffTableB coeffs_B(int g, int a_max, int b_max) { return CoeffTableB(g, a_max, b_max); }
inline CoeffTableA coeffs_A(int g, int r_max, int s_max, int l_max) { return CoeffTableA(g, r_max, s_max, l_max); }

// ---- main summand ------------------------------------------------------------

// res_{Y=0} 1/(Y^p (e^Y - 1)): the Y^p coefficient of Y/(e^Y - 1); 0 for p < 0.
inline Rational todd_residue(int p) {
    if (p < 0) return 0;
    auto vs = make_varset({laurent_var("Y", 1)});
    Series y = Series::variable(vs, "Y");
    long cap = p + 2;
    Series quotient = (y.exp(cap) - 1).shifted({-1});
    return quotient.inv(p + 1).coeff({p});
}

inline Rational main_ih_summand(int g, int m, int n) {
    require_desing_degree(g, m, n);
    return Rational(sign_pow(g - 1 - m)) * Rational(factorial(n)) / rpow(2, 2 * m - g + 1) *
           todd_residue(2 * g - 2 - 2 * m);
}

// ---- first blow-up -------------------------------------------------------------

// g!/2^{2g} Coeff_{t^{g-1}} (1-t/2)^{-g-1} (1-t/4)^{-g} when n = g; 0 otherwise.
// n = g forces g odd through 2m = 3g - 3; both conditions are checked.
inline Rational first_blowup_term(int g, int m, int n) {
    require_desing_degree(g, m, n);
    if (g % 2 == 0 || n != g) return 0;
    auto vs = make_varset({nilpotent_var("t", g)});
    Series t = Series::variable(vs, "t");
    Series f = (1 - t.scaled(rat(1, 2))).pow(-(g + 1)) * (1 - t.scaled(rat(1, 4))).pow(-g);
    return Rational(factorial(g)) / rpow(2, 2 * g) * f.coeff({g - 1});
}

// Same term from the Euler class of the fixed component Jac x P^{g-1}:
//   -2^{-3g} int_Jac res_y res_Y Y^{2m}(-2 gamma)^n / (y^g Y^{2g-1}) (1-y/2Y)^{-g-1} (1-y/4Y)^{-g}.
inline Rational first_blowup_direct(int g, int m, int n) {
    require_desing_degree(g, m, n);
    auto jac = jacobian_basis(g);
    Rational fibre = (gamma_class(jac, g).scaled_by(-2)).pow(n).berezin();
    if (fibre == 0) return 0;
    auto vs = make_varset({laurent_var("Y", 8 * g), nilpotent_var("y", g, 1)});
    Series Y = Series::variable(vs, "Y"), y = Series::variable(vs, "y");
    Series u = y * Y.inv();
    Series f = (1 - u.scaled(rat(1, 2))).pow(-(g + 1)) * (1 - u.scaled(rat(1, 4))).pow(-g);
    Series integrand = f.shifted({2 * m - (2 * g - 1), 0});
    return -fibre / rpow(2, 3 * g) * integrand.coeff({-1, g - 1});
}

// ---- second blow-up ------------------------------------------------------------

// A second wall term split by where the integral over the blown-up
// Jac x Jac lands: the h^0 part (all of Jac x Jac) and the h^g part (the diagonal).
struct SecondBlowupParts {
    Rational gamma;
    Rational diagonal;
    Rational total() const { return gamma + diagonal; }
};

// The printed closed form: -(1/2^{4m+1}) sum_{r+s+l=2m-g+1} A_{r,s,l} [ moment * B_{2m-2g+3-r,-s}
//   + (-1)^n 2^{2m-2g+3} g! B_{2m-3g+3-r,g-s} ], moment = int (-gamma_12)^n gamma_hat^{2g-n}.
inline SecondBlowupParts second_blowup_parts(int g, int m, int n) {
    require_desing_degree(g, m, n);
    SecondBlowupParts out;
    int total = 2 * m - g + 1;
    if (total < 0) return out;
    CoeffTableA A(g, total, total, total);
    CoeffTableB B(g, 2 * m + 3, g);
    // The Gamma integral has gamma_hat exponent 2m - 2g + 3 = 2g - n.
    Rational moment = n <= 2 * g ? gamma_moment(g, n) : Rational(0);
    Rational diag = Rational(sign_pow(n)) * rpow(2, 2 * m - 2 * g + 3) * Rational(factorial(g));
    for (int r = 0; r <= total; ++r)
        for (int s = 0; r + s <= total; ++s) {
            Rational a = A(r, s, total - r - s);
            if (a == 0) continue;
            out.gamma += a * moment * B(2 * m - 2 * g + 3 - r, -s);
            if (g - s >= 0) out.diagonal += a * diag * B(2 * m - 3 * g + 3 - r, g - s);
        }
    Rational scale = -1 / rpow(2, 4 * m + 1);
    out.gamma *= scale;
    out.diagonal *= scale;
    return out;
}

inline Rational second_blowup_term(int g, int m, int n) { return second_blowup_parts(g, m, n).total(); }

// Integration over the blow-up of Jac x Jac along the diagonal, on classes
// xi * gamma_hat^p * h^q with xi pulled back from Jac x Jac:
//   q = 0: int_{Jac x Jac} xi gamma_hat^p;  q = g: -int_Jac xi|_diag (gamma_hat|_diag)^p;  else 0.
class BlownUpPairIntegral {
public:
    BlownUpPairIntegral(int g, GrassmannQ xi)
        : g_(g), pair_(xi.basis()), jac_(jacobian_basis(g)), xi_(std::move(xi)),
          hat_(gamma_hat(pair_, g)), xi_diag_(restrict_to_diagonal(xi_, g, jac_)),
          hat_diag_(restrict_to_diagonal(hat_, g, jac_)) {}

    Rational operator()(int p, int q) const {
        if (q == 0) return (xi_ * hat_.pow(p)).berezin();
        if (q == g_) return -(xi_diag_ * hat_diag_.pow(p)).berezin();
        return 0;
    }

private:
    int g_;
    BasisPtr pair_, jac_;
    GrassmannQ xi_, hat_, xi_diag_, hat_diag_;
};

// Direct evaluation of the second wall term for xi = (-gamma_12)^n and Y^{2m}:
//   -int_{P W_+} res_Y xi Y^{2m} / e,  e = (-y+2Y) sum_{k<g} c_k(W) (y-4Y)^{g-1-k},
// the Euler class of the rank g-1 bundle W_- (x) O(1) with c(W) = (1+h)^g exp(gamma_hat)
// cut at its rank. The P W_+ fibre integral is
//   int y^l alpha = int res_y y^l alpha / (y^{g-1}(1+h/y)^g exp(gamma_hat/y)).
inline SecondBlowupParts second_blowup_direct_parts(int g, int m, int n) {
    require_desing_degree(g, m, n);
    int l_order = std::max(2 * m - g + 2, 1);
    auto vs = make_varset({laurent_var("Y", 4 * m + 8 * g), nilpotent_var("y", l_order, 1),
                           nilpotent_var("z", 2 * g + 1, 1), nilpotent_var("x", g + 1, 1)});
    Series Y = Series::variable(vs, "Y"), y = Series::variable(vs, "y");
    Series z = Series::variable(vs, "z"), x = Series::variable(vs, "x");
    Series v = y - Y.scaled(4);
    Series chern = (1 + x).pow(g) * z.exp();
    std::vector<Series> graded(g, Series::constant(vs, 0));
    for (const auto& [ex, c] : chern.terms()) {
        int k = ex[2] + ex[3];
        if (k < g) graded[k].add_term(ex, c);
    }
    Series euler = Series::constant(vs, 0);
    for (int k = 0; k < g; ++k) euler += graded[k] * v.pow(g - 1 - k);
    Series e = (Y.scaled(2) - y) * euler;
    Series after_y = (-(e.inv().shifted({2 * m, 0, 0, 0}))).residue("Y");

    // Fibre of P W_+: y^l -> degree (l-g+2) part of 1/((1+h)^g exp(gamma_hat)).
    auto fs = make_varset({nilpotent_var("z", 2 * g + 1, 1), nilpotent_var("x", g + 1, 1)});
    Series fz = Series::variable(fs, "z"), fx = Series::variable(fs, "x");
    Series segre = ((1 + fx).pow(g) * fz.exp()).inv();

    auto pair = jacobian_pair_basis(g, kPairOrientation);
    BlownUpPairIntegral integral(g, (-gamma_12(pair, g)).pow(n));

    SecondBlowupParts out;
    for (const auto& [ex, c] : after_y.terms()) {
        int l = ex[1], r = ex[2], s = ex[3];
        int k = l - g + 2;
        if (k < 0) continue;
        for (const auto& [fe, fc] : segre.terms()) {
            if (fe[0] + fe[1] != k) continue;
            int q = s + fe[1];
            Rational v_int = c * fc * integral(r + fe[0], q);
            if (q == 0) out.gamma += v_int;
            else out.diagonal += v_int;
        }
    }
    return out;
}

inline Rational second_blowup_direct(int g, int m, int n) { return second_blowup_direct_parts(g, m, n).total(); }

// ---- totals ----------------------------------------------------------------------

struct DesingRow {
    int m = 0, n = 0;
    Rational main, first, second, total;
    // The second wall term by direct evaluation, and the total using it.
    Rational second_direct, total_direct;
};

inline DesingRow desing_row(int g, int m, int n) {
    DesingRow row;
    row.m = m;
    row.n = n;
    row.main = main_ih_summand(g, m, n);
    row.first = first_blowup_term(g, m, n);
    row.second = second_blowup_term(g, m, n);
    row.total = row.main + row.first + row.second;
    row.second_direct = second_blowup_direct(g, m, n);
    row.total_direct = row.main + row.first + row.second_direct;
    return row;
}

inline Rational desing_pairing_rank2(int g, int m, int n) { return desing_row(g, m, n).total; }

// All (m, n) with 2m + n = 4g - 3, by increasing m.
inline std::vector<DesingRow> desing_table(int g) {
    std::vector<DesingRow> rows;
    for (int m = 0; 2 * m <= 4 * g - 3; ++m) rows.push_back(desing_row(g, m, 4 * g - 3 - 2 * m));
    return rows;
}

}  // namespace modpair
