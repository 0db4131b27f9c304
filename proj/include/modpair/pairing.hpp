#pragma once

#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "modpair/errors.hpp"
#include "modpair/grassmann.hpp"
#include "modpair/rational.hpp"
#include "modpair/roots.hpp"
#include "modpair/series.hpp"

namespace modpair {

// ---- classes ---------------------------------------------------------------

// One Atiyah-Bott generator: a_r (kind 'a'), b_r^j (kind 'b'), f_r (kind 'f').
struct Generator {
    char kind;
    int r;
    int j = 0;
    auto operator<=>(const Generator&) const = default;

    int degree() const {
        switch (kind) {
            case 'a': return 2 * r;
            case 'b': return 2 * r - 1;
            case 'f': return 2 * r - 2;
        }
        throw DomainError("unknown generator kind");
    }
};

// a^A b b ... f^K. The b factors are odd, so their order is part of the class.
struct ClassMonomial {
    std::map<int, int> a;  // r -> exponent
    std::vector<Generator> b;
    std::map<int, int> f;  // r -> exponent

    int degree() const {
        int d = 0;
        for (auto [r, e] : a) d += 2 * r * e;
        for (const auto& x : b) d += x.degree();
        for (auto [r, e] : f) d += (2 * r - 2) * e;
        return d;
    }
    int f_power(int r) const {
        auto it = f.find(r);
        return it == f.end() ? 0 : it->second;
    }
    std::string to_string() const {
        std::vector<std::string> parts;
        for (auto [r, e] : a) parts.push_back("a" + std::to_string(r) + "^" + std::to_string(e));
        for (const auto& x : b) parts.push_back("b" + std::to_string(x.r) + "_" + std::to_string(x.j));
        for (auto [r, e] : f) parts.push_back("f" + std::to_string(r) + "^" + std::to_string(e));
        std::string s;
        for (size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
        return s.empty() ? "1" : s;
    }
};

// Comma-separated factors: a2^1, f2^3, b2_4 (b_2^4), b1_1. Exponents default to 1.
inline ClassMonomial parse_monomial(const std::string& text) {
    ClassMonomial m;
    std::stringstream ss(text);
    std::string tok;
    auto number = [&](const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw DomainError("bad number in monomial factor '" + tok + "'");
        return std::stoi(s);
    };
    while (std::getline(ss, tok, ',')) {
        if (tok.empty() || tok == "1") continue;
        char kind = tok[0];
        std::string rest = tok.substr(1);
        int exp = 1;
        if (auto caret = rest.find('^'); caret != std::string::npos) {
            exp = number(rest.substr(caret + 1));
            rest = rest.substr(0, caret);
        }
        if (kind == 'b') {
            auto us = rest.find('_');
            if (us == std::string::npos) throw DomainError("b factors need an index: b<r>_<j>");
            Generator gen{'b', number(rest.substr(0, us)), number(rest.substr(us + 1))};
            for (int k = 0; k < exp; ++k) m.b.push_back(gen);
        } else if (kind == 'a' || kind == 'f') {
            int r = number(rest);
            if (exp > 0) (kind == 'a' ? m.a : m.f)[r] += exp;
        } else {
            throw DomainError("unknown monomial factor '" + tok + "'");
        }
    }
    return m;
}

// ---- fibre integration -----------------------------------------------------

struct FiberContext {
    const RootData& roots;
    const std::vector<Series>& x;      // X_1..X_n in the kernel variables
    const std::vector<Series>& delta;  // delta_3..delta_n, zero when unused
    const BasisPtr& basis;
    Series zero;

    Grassmann<Series> scalar(const Series& s) const { return Grassmann<Series>::scalar(basis, s, zero); }
    Grassmann<Series> gen(int i) const { return Grassmann<Series>::generator(basis, i, zero); }
};

// Restriction of generators to the fixed-point fibre T^{2g} (x Jac when
// `jacobian`), followed by Berezin integration times `normalization`.
struct FiberIntegralRule {
    std::string name;
    int n = 2;
    BasisPtr basis;
    Rational normalization = 1;
    bool jacobian = false;
    std::function<Grassmann<Series>(const Generator&, const FiberContext&)> image;
    // Fibre part of f~_(q) = f~_2 + sum delta_r f~_r.
    std::function<Grassmann<Series>(const FiberContext&)> kahler;
};

// SU(2), fixed determinant: a_2 -> X_1 X_2, b_2^j -> (X_2 - X_1) d^j, f_2 -> 2 gamma.
inline FiberIntegralRule su2_rule(int g) {
    FiberIntegralRule rule;
    rule.name = "su2";
    rule.basis = jacobian_basis(g);
    rule.image = [g](const Generator& x, const FiberContext& c) {
        if (x.kind == 'a' && x.r == 2) return c.scalar(c.x[0] * c.x[1]);
        if (x.kind == 'b' && x.r == 2 && x.j >= 1 && x.j <= 2 * g)
            return c.gen(x.j - 1).scaled(c.x[1] - c.x[0]);
        throw DomainError("su2 rule has no image for this generator");
    };
    rule.kahler = [g](const FiberContext& c) {
        return gamma_class<Series>(c.basis, g, c.zero).scaled_by(2);
    };
    return rule;
}

// U(2) over the product of the torus and the Jacobian, as two determinant
// copies d_1, d_2: a_2 -> X_1 X_2, b_1^j -> d_1^j + d_2^j,
// b_2^j -> X_1 d_2^j + X_2 d_1^j, f_2 -> -gamma_12, normalization 2^g.
inline FiberIntegralRule u2_rule(int g) {
    FiberIntegralRule rule;
    rule.name = "u2";
    rule.basis = jacobian_pair_basis(g, kPairOrientation);
    rule.normalization = rpow(2, g);
    rule.jacobian = true;
    rule.image = [g](const Generator& x, const FiberContext& c) {
        if (x.kind == 'b' && (x.j < 1 || x.j > 2 * g)) throw DomainError("b index outside 1..2g");
        if (x.kind == 'a' && x.r == 2) return c.scalar(c.x[0] * c.x[1]);
        if (x.kind == 'b' && x.r == 1)
            return c.gen(pair_generator(g, 1, x.j)) + c.gen(pair_generator(g, 2, x.j));
        if (x.kind == 'b' && x.r == 2)
            return c.gen(pair_generator(g, 2, x.j)).scaled(c.x[0]) + c.gen(pair_generator(g, 1, x.j)).scaled(c.x[1]);
        throw DomainError("u2 rule has no image for this generator");
    };
    rule.kahler = [g](const FiberContext& c) { return -gamma_12<Series>(c.basis, g, c.zero); };
    return rule;
}

// ---- pairing requests -------------------------------------------------------

enum class PairingMode { coprime, ih, perturbed };

inline std::string mode_name(PairingMode m) {
    switch (m) {
        case PairingMode::coprime: return "coprime";
        case PairingMode::ih: return "ih";
        case PairingMode::perturbed: return "perturbed";
    }
    return "?";
}

struct PairingSpec {
    int n = 2;
    long d = 1;
    int g = 2;
    ClassMonomial monomial;
    PairingMode mode = PairingMode::coprime;
    std::optional<CartanPoint> xi;       // perturbation; defaulted per mode
    std::optional<CartanPoint> c_tilde;  // explicit lift (coprime mode, generic c)
    bool covering_factor = false;        // multiply by n^{2g}
    // Include the Jacobian factor (M(n,d) rather than fixed determinant).
    // Defaults: coprime no, ih yes, perturbed yes exactly when n | d.
    std::optional<bool> jacobian;

    bool uses_jacobian() const {
        if (jacobian) return *jacobian;
        switch (mode) {
            case PairingMode::coprime: return false;
            case PairingMode::ih: return true;
            case PairingMode::perturbed: return d % n == 0;
        }
        return false;
    }
};

struct PairingResult {
    Rational value = 0;
    UnitMarker marker;
    bool degree_mismatch = false;
    std::string note;
    CartanPoint xi_used;
};

inline long moduli_real_dimension(int n, int g, bool jacobian) {
    return jacobian ? 2L * (static_cast<long>(n) * n * (g - 1) + 1) : 2L * (static_cast<long>(n) * n - 1) * (g - 1);
}

inline void validate_monomial(const ClassMonomial& m, int n, int g, bool jacobian) {
    for (auto [r, e] : m.a)
        if (r < 2 || r > n || e < 0) throw DomainError("a_r needs 2 <= r <= n");
    for (auto [r, e] : m.f)
        if (r < 2 || r > n || e < 0) throw DomainError("f_r needs 2 <= r <= n");
    for (const auto& x : m.b) {
        if (x.r < 1 || x.r > n || x.j < 1 || x.j > 2 * g) throw DomainError("b_r^j needs 1 <= r <= n, 1 <= j <= 2g");
        if (x.r == 1 && !jacobian) throw DomainError("b_1^j exists only with the Jacobian factor");
    }
}

// Traceless, and no proper nonempty subset of coordinates sums to an integer.
inline bool generic_central_lift(const CartanPoint& c) {
    size_t n = c.size();
    Rational total = 0;
    for (const auto& v : c) total += v;
    if (total != 0) return false;
    for (uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
        Rational s = 0;
        for (size_t i = 0; i < n; ++i)
            if (mask >> i & 1) s += c[i];
        if (is_integer(s)) return false;
    }
    return true;
}

// ---- the residue kernel ----------------------------------------------------

enum class KernelKind {
    fundamental,  // 1 / prod (exp(-B(-X)_j) - 1), exponent points in the fundamental domain
    periodic      // 1 / prod (1 - exp(B(-X)_j)), exponent points in the window (-1, 0)
};

class ResidueKernel {
public:
    ResidueKernel(int n, int g, const FiberIntegralRule& rule, const ClassMonomial& mono)
        : rd_(n), g_(g), rule_(rule), mono_(mono) {
        if (rule.n != n) throw DomainError("fibre rule is for a different rank");
        std::vector<Variable> v;
        for (int j = 1; j < n; ++j) v.push_back(laurent_var("z" + std::to_string(j), kDepth));
        for (int r = 3; r <= n; ++r)
            if (mono.f_power(r) > 0) v.push_back(nilpotent_var("delta" + std::to_string(r), mono.f_power(r) + 1, n));
        vars_ = make_varset(v);
        std::vector<Series> y;
        for (int j = 1; j < n; ++j) {
            Exponent e(vars_->size(), 0);
            for (int i = 0; i < j; ++i) e[i] = 1;
            y.push_back(Series::monomial(vars_, e));
        }
        x_ = rd_.x_from_simple(y);
        for (int r = 3; r <= n; ++r)
            delta_.push_back(mono.f_power(r) > 0 ? Series::variable(vars_, "delta" + std::to_string(r)) : Series(vars_));
    }

    const RootData& roots() const { return rd_; }
    const VarSetPtr& vars() const { return vars_; }

    // J * Berezin(prod images * exp(fibre Kahler part)): an exact polynomial.
    Series fiber_integral() const {
        FiberContext ctx{rd_, x_, delta_, rule_.basis, Series(vars_)};
        Grassmann<Series> acc = ctx.scalar(Series::constant(vars_, 1));
        for (auto [r, e] : mono_.a)
            for (int k = 0; k < e; ++k) acc = acc * rule_.image({'a', r, 0}, ctx);
        for (const auto& b : mono_.b) acc = acc * rule_.image(b, ctx);
        acc = acc * rule_.kahler(ctx).exp_even();
        return acc.berezin().scaled(rule_.normalization);
    }

    // Coefficient of z^{-1..-1} delta^k in
    //   sum_p e^{<p, X>} F / (D^{2g-2} prod kernel_j) * Jacobian,
    // which is the iterated residue res_{Y_1} ... res_{Y_{n-1}} under Y_j = z_1...z_j.
    Rational evaluate(const std::vector<CartanPoint>& points, KernelKind kind) const {
        int n = rd_.n();
        Series fib = fiber_integral();
        if (fib.is_zero()) return 0;
        Series disc = rd_.discriminant(x_);

        Exponent target(vars_->size(), 0), jac(vars_->size(), 0);
        long t_deg = -(n - 1);
        for (int i = 0; i < n - 1; ++i) {
            target[i] = -1;
            jac[i] = n - 2 - i;
        }
        for (int r = 3; r <= n; ++r)
            if (mono_.f_power(r) > 0) {
                target[vars_->index("delta" + std::to_string(r))] = mono_.f_power(r);
                t_deg += static_cast<long>(n) * mono_.f_power(r);
            }
        long v_jac = 0;
        for (int c : jac) v_jac += c;
        long v_kernel = 0;
        for (int j = 1; j < n; ++j) v_kernel += j;
        long valuation = fib.valuation() - (2L * g_ - 2) * disc.valuation() - v_kernel + v_jac;
        long rel = t_deg + 1 - valuation;
        if (rel <= 0) return 0;

        Series common = fib.shifted(jac);
        if (g_ != 1) {
            Series dinv = disc.inv(rel - disc.valuation());
            common = common * dinv.pow(2L * g_ - 2);
        }
        std::vector<Series> neg_x;
        for (const auto& xi : x_) neg_x.push_back(-xi);
        auto bq = qmap_B(rd_, neg_x, delta_);
        for (int j = 1; j < n; ++j) {
            const Series& bj = bq[j - 1];
            Series den = kind == KernelKind::fundamental ? (-bj).exp(j + rel) - Rational(1)
                                                         : Rational(1) - bj.exp(j + rel);
            common = common * den.inv(rel - j);
        }
        Series expsum(vars_, rel);
        for (const auto& p : points) {
            CartanPoint minus_p(p.size());
            for (size_t i = 0; i < p.size(); ++i) minus_p[i] = -p[i];
            expsum += moment_exponent(rd_, x_, delta_, minus_p).exp(rel);
        }
        return (expsum * common).coeff(target);
    }

private:
    static constexpr int kDepth = 1000;
    RootData rd_;
    int g_;
    const FiberIntegralRule& rule_;
    ClassMonomial mono_;
    VarSetPtr vars_;
    std::vector<Series> x_;
    std::vector<Series> delta_;
};

// (-1)^{n_+(g-1)} / n! * prod_r k_r!, times n^{2g} when requested.
inline Rational pairing_prefactor(int n, int g, const ClassMonomial& m, bool covering) {
    RootData rd(n);
    Rational pre = Rational(sign_pow(static_cast<long>(rd.n_plus()) * (g - 1))) / Rational(factorial(n));
    for (auto [r, e] : m.f) pre *= Rational(factorial(e));
    if (covering) pre *= rpow(n, 2 * g);
    return pre;
}

// Default admissible perturbation: 1/p times the sum of fundamental coweights.
inline CartanPoint default_xi(const RootData& rd, long prime = 1009) {
    return coweight_perturbation(rd, rat(1, prime));
}

namespace detail {

inline long next_prime(long p) {
    auto is_prime = [](long x) {
        for (long q = 2; q * q <= x; ++q)
            if (x % q == 0) return false;
        return x > 1;
    };
    do ++p;
    while (!is_prime(p));
    return p;
}

// Exponent points [[w c~]] (xi = 0) or [[w(c0 + xi)]] - w xi for each w in W_{n-1}.
inline std::vector<CartanPoint> fundamental_points(const RootData& rd, const CartanPoint& c0, const CartanPoint& xi) {
    std::vector<CartanPoint> pts;
    for (const auto& w : rd.weyl_subgroup()) {
        auto br = shifted_representative(rd, w, c0, xi);
        if (br.boundary) throw BoundaryError("exponent point lies on the boundary of the fundamental domain");
        pts.push_back(br.point);
    }
    return pts;
}

inline CartanPoint base_point(const RootData& rd, const PairingSpec& s) {
    if (s.c_tilde) {
        if (static_cast<int>(s.c_tilde->size()) != rd.n()) throw DomainError("c~ needs n coordinates");
        return *s.c_tilde;
    }
    return central_lift(rd, ((s.d % s.n) + s.n) % s.n).point;
}

inline PairingResult mismatch(const PairingSpec& s, long dim, const FiberIntegralRule& rule) {
    PairingResult r;
    r.degree_mismatch = true;
    r.note = "degree " + std::to_string(s.monomial.degree()) + " != dim_R " + std::to_string(dim) + " (" +
             rule.name + ")";
    return r;
}

}  // namespace detail

inline FiberIntegralRule builtin_rule(const PairingSpec& s) {
    if (s.n != 2) throw DomainError("built-in fibre rules exist for rank 2 only; supply a rule for n > 2");
    return s.uses_jacobian() ? u2_rule(s.g) : su2_rule(s.g);
}

// Evaluates the residue formula for s with an explicit fibre rule.
inline PairingResult evaluate_pairing(const PairingSpec& s, const FiberIntegralRule& rule) {
    if (s.n < 2 || s.g < 1) throw DomainError("need n >= 2 and g >= 1");
    validate_monomial(s.monomial, s.n, s.g, rule.jacobian);
    long dim = moduli_real_dimension(s.n, s.g, rule.jacobian);
    if (s.monomial.degree() != dim) return detail::mismatch(s, dim, rule);

    RootData rd(s.n);
    CartanPoint c0 = detail::base_point(rd, s);
    PairingResult out;
    std::vector<CartanPoint> pts;
    switch (s.mode) {
        case PairingMode::coprime: {
            if (s.c_tilde ? !generic_central_lift(c0) : std::gcd(s.d, static_cast<long>(s.n)) != 1)
                throw DomainError("coprime mode needs gcd(n, d) = 1 or a generic c~");
            out.xi_used = CartanPoint(s.n, 0);
            pts = detail::fundamental_points(rd, c0, out.xi_used);
            break;
        }
        case PairingMode::ih: {
            // Retry with smaller perturbations until no exponent point is on a wall.
            long prime = 1009;
            for (int attempt = 0;; ++attempt) {
                out.xi_used = s.xi ? *s.xi : default_xi(rd, prime);
                try {
                    pts = detail::fundamental_points(rd, c0, out.xi_used);
                    break;
                } catch (const BoundaryError&) {
                    if (s.xi || attempt > 8) throw;
                    prime = detail::next_prime(prime * 10);
                }
            }
            break;
        }
        case PairingMode::perturbed: {
            out.xi_used = s.xi ? *s.xi : CartanPoint(s.n, 0);
            pts = detail::fundamental_points(rd, c0, out.xi_used);
            break;
        }
    }
    ResidueKernel kernel(s.n, s.g, rule, s.monomial);
    out.value = pairing_prefactor(s.n, s.g, s.monomial, s.covering_factor) *
                kernel.evaluate(pts, KernelKind::fundamental);
    return out;
}

inline PairingResult evaluate_pairing(const PairingSpec& s) { return evaluate_pairing(s, builtin_rule(s)); }

inline PairingResult coprime_pairing(PairingSpec s) {
    s.mode = PairingMode::coprime;
    return evaluate_pairing(s);
}
inline PairingResult ih_pairing(PairingSpec s) {
    s.mode = PairingMode::ih;
    return evaluate_pairing(s);
}
inline PairingResult perturbed_torus_pairing(PairingSpec s, const CartanPoint& xi) {
    s.mode = PairingMode::perturbed;
    s.xi = xi;
    return evaluate_pairing(s);
}

// Independent route for the coprime formula (q = tau_2): fixed-point
// components are located in the window where every coroot coordinate is in
// (-1, 0), found by scanning integer shifts, with kernel 1/(1 - e^{-Y_j}).
inline PairingResult periodicity_pairing(const PairingSpec& s, const FiberIntegralRule& rule) {
    for (auto [r, e] : s.monomial.f)
        if (r >= 3 && e > 0) throw DomainError("periodicity route is implemented for q = tau_2");
    validate_monomial(s.monomial, s.n, s.g, rule.jacobian);
    long dim = moduli_real_dimension(s.n, s.g, rule.jacobian);
    if (s.monomial.degree() != dim) return detail::mismatch(s, dim, rule);
    RootData rd(s.n);
    CartanPoint c0 = detail::base_point(rd, s);
    if (s.c_tilde ? !generic_central_lift(c0) : std::gcd(s.d, static_cast<long>(s.n)) != 1)
        throw DomainError("periodicity route needs gcd(n, d) = 1 or a generic c~");
    std::vector<CartanPoint> pts;
    for (const auto& w : rd.weyl_subgroup()) {
        auto t = rd.coroot_coordinates(rd.act(w, c0));
        std::vector<Rational> window;
        for (const auto& tj : t) {
            std::optional<Rational> hit;
            for (long shift = -64; shift <= 64; ++shift) {
                Rational s_j = tj + shift;
                if (s_j > -1 && s_j < 0) {
                    if (hit) throw DomainError("window contains two translates");
                    hit = s_j;
                }
            }
            if (!hit) throw BoundaryError("no translate strictly inside the window");
            window.push_back(*hit);
        }
        pts.push_back(rd.from_coroot_coordinates(window));
    }
    ResidueKernel kernel(s.n, s.g, rule, s.monomial);
    PairingResult out;
    out.xi_used = CartanPoint(s.n, 0);
    out.value = pairing_prefactor(s.n, s.g, s.monomial, s.covering_factor) *
                kernel.evaluate(pts, KernelKind::periodic);
    return out;
}

inline PairingResult periodicity_pairing(const PairingSpec& s) {
    PairingSpec c = s;
    c.mode = PairingMode::coprime;
    return periodicity_pairing(c, builtin_rule(c));
}

// Rank 2 wall term for the perturbed torus pairing: the fixed-point residue
//   prefactor * res_Y e^{<mu_E, X>} F / D^{2g-2}
// for the component at exponent point mu_E. Crossing from the chamber with
// exponent point mu_E to the one with mu_E + (e_1 - e_2) changes the pairing by this.
inline Rational guillemin_kalkman_term(const PairingSpec& s, const FiberIntegralRule& rule, const CartanPoint& mu_e) {
    if (s.n != 2) throw DomainError("the crossing term is implemented for rank 2");
    validate_monomial(s.monomial, s.n, s.g, rule.jacobian);
    if (s.monomial.degree() != moduli_real_dimension(s.n, s.g, rule.jacobian)) return 0;
    ResidueKernel kernel(2, s.g, rule, s.monomial);
    Series fib = kernel.fiber_integral();
    if (fib.is_zero()) return 0;
    long rel = 2L * s.g - 2 - fib.valuation();
    if (rel <= 0) return 0;
    RootData rd(2);
    const VarSetPtr& vs = kernel.vars();
    Series y = Series::variable(vs, "z1");
    Series e = rd.pair_with(mu_e, rd.x_from_simple({y})).exp(rel);
    Exponent at(1, 2 * s.g - 3);
    return pairing_prefactor(2, s.g, s.monomial, s.covering_factor) * (e * fib).coeff(at);
}

// Every rank-2 monomial a_2^m f_2^k (prod_{j in B1} b_1^j)(prod_{j in B2} b_2^j)
// of the moduli dimension, with ascending index sets. b_1 appears only with
// the Jacobian factor.
inline std::vector<ClassMonomial> rank2_monomial_sweep(int g, bool jacobian, bool with_b = true) {
    long dim = moduli_real_dimension(2, g, jacobian);
    int nb = 2 * g;
    std::vector<ClassMonomial> out;
    uint64_t b1_limit = (with_b && jacobian) ? (1ULL << nb) : 1;
    uint64_t b2_limit = with_b ? (1ULL << nb) : 1;
    for (uint64_t b1 = 0; b1 < b1_limit; ++b1)
        for (uint64_t b2 = 0; b2 < b2_limit; ++b2) {
            long rest = dim - std::popcount(b1) - 3L * std::popcount(b2);
            if (rest < 0 || rest % 2) continue;
            for (long m = 0; 4 * m <= rest; ++m) {
                ClassMonomial mono;
                if (m) mono.a[2] = static_cast<int>(m);
                long k = (rest - 4 * m) / 2;
                if (k) mono.f[2] = static_cast<int>(k);
                for (int j = 0; j < nb; ++j)
                    if (b1 >> j & 1) mono.b.push_back({'b', 1, j + 1});
                for (int j = 0; j < nb; ++j)
                    if (b2 >> j & 1) mono.b.push_back({'b', 2, j + 1});
                out.push_back(std::move(mono));
            }
        }
    return out;
}

// Main residue term minus (-1)^{n(n-1)/2} times the sum of wall terms.
inline Rational assemble_desing_pairing(int n, const Rational& main_term, const std::vector<Rational>& wall_terms) {
    Rational walls = 0;
    for (const auto& w : wall_terms) walls += w;
    return main_term - Rational(sign_pow(static_cast<long>(n) * (n - 1) / 2)) * walls;
}

}  // namespace modpair
