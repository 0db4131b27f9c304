#pragma once

#include <bit>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "modpair/errors.hpp"
#include "modpair/grassmann.hpp"
#include "modpair/rational.hpp"
#include "modpair/series.hpp"

namespace modpair {

// Cohomology classes on a base: odd generators (degree 1 each) with even
// series variables as coefficients. A series variable of weight w has
// cohomological degree 2w.
using Class = Grassmann<Series>;

inline long real_degree(const Class& x, uint64_t mask, const Exponent& e) {
    return std::popcount(mask) + 2 * x.zero().degree(e);
}

// Homogeneous part of cohomological degree `deg`.
inline Class graded_part(const Class& x, long deg) {
    Class out(x.basis(), x.zero());
    for (const auto& [m, c] : x.terms()) {
        Series s(c.vars(), c.precision());
        for (const auto& [e, v] : c.terms())
            if (real_degree(x, m, e) == deg) s.add_term(e, v);
        out.add(m, s);
    }
    return out;
}

inline long max_real_degree(const Class& x) {
    long d = -1;
    for (const auto& [m, c] : x.terms())
        for (const auto& [e, v] : c.terms()) d = std::max(d, real_degree(x, m, e));
    return d;
}

// Drops everything of cohomological degree above 2 * bound.
inline Class truncate_degree(const Class& x, long bound) {
    Class out(x.basis(), x.zero());
    for (const auto& [m, c] : x.terms()) {
        Series s(c.vars(), c.precision());
        for (const auto& [e, v] : c.terms())
            if (real_degree(x, m, e) <= 2 * bound) s.add_term(e, v);
        out.add(m, s);
    }
    return out;
}

// x -> x_even - x_odd; the sign picked up moving x past an odd symbol.
inline Class parity_twist(const Class& x) {
    Class out(x.basis(), x.zero());
    for (const auto& [m, c] : x.terms()) out.add(m, (std::popcount(m) & 1) ? -c : c);
    return out;
}

inline Class class_scalar(const BasisPtr& b, const Series& zero, const Rational& c) {
    return Class::scalar(b, Series::constant(zero.vars(), c, zero.precision()), zero);
}

// Every coefficient cut to weighted precision `prec`.
inline Class with_precision(const Class& x, long prec) {
    return x.map_coefficients([prec](const Series& c) { return c.truncated(prec); });
}

// Declares the stored terms complete. Only valid once everything above the
// stored degrees is known to vanish.
inline Class as_exact(const Class& x) {
    return x.map_coefficients([](const Series& c) {
        Series s(c.vars());
        for (const auto& [e, v] : c.terms()) s.add_term(e, v);
        return s;
    });
}

// A (possibly virtual) sheaf through its Chern character ch_0 + ch_1 + ...,
// known through complex degree `known_degree`.
struct SheafClass {
    long rank = 0;
    Class ch;
    long known_degree = Series::kExact;

    SheafClass(long r, Class c, long known = Series::kExact) : rank(r), ch(std::move(c)), known_degree(known) {
        Exponent origin(ch.zero().vars()->size(), 0);
        Rational r0 = ch.body().is_zero() ? Rational(0) : ch.body().coeff(origin);
        if (r0 != rank) throw DomainError("ch_0 must equal the rank");
        for (const auto& [m, c2] : ch.terms())
            if (std::popcount(m) & 1) throw DomainError("Chern character must be even");
    }

    static SheafClass trivial(const BasisPtr& b, const Series& zero, long r) {
        return SheafClass(r, class_scalar(b, zero, r));
    }

    friend SheafClass operator+(const SheafClass& a, const SheafClass& b) {
        return SheafClass(a.rank + b.rank, a.ch + b.ch, std::min(a.known_degree, b.known_degree));
    }
    SheafClass operator-() const { return SheafClass(-rank, -ch, known_degree); }
    SheafClass tensor(const SheafClass& o) const {
        return SheafClass(rank * o.rank, ch * o.ch, std::min(known_degree, o.known_degree));
    }
};

// Total Chern class through complex degree `bound` by Newton's identities
// k c_k = sum_{i=1..k} (-1)^{i-1} c_{k-i} p_i with p_i = i! ch_i.
inline Class ch_to_chern(const SheafClass& s, long bound) {
    if (bound > s.known_degree)
        throw TruncationError("Chern character known only through degree " + std::to_string(s.known_degree));
    std::vector<Class> p(bound + 1, Class(s.ch.basis(), s.ch.zero()));
    for (long i = 1; i <= bound; ++i) p[i] = graded_part(s.ch, 2 * i).scaled_by(Rational(factorial(i)));
    std::vector<Class> c(bound + 1, Class(s.ch.basis(), s.ch.zero()));
    c[0] = class_scalar(s.ch.basis(), s.ch.zero(), 1);
    Class total = c[0];
    for (long k = 1; k <= bound; ++k) {
        Class acc(s.ch.basis(), s.ch.zero());
        for (long i = 1; i <= k; ++i) {
            if (p[i].is_zero() || c[k - i].is_zero()) continue;
            Class t = c[k - i] * p[i];
            acc += (i % 2 == 1) ? t : -t;
        }
        c[k] = acc.scaled_by(Rational(1, k));
        total += c[k];
    }
    return total;
}

// Inverse of ch_to_chern: p_k = (-1)^{k-1} (k c_k - sum_{i<k} (-1)^{i-1} c_{k-i} p_i).
inline SheafClass chern_to_ch(long rank, const Class& c, long bound) {
    Exponent origin(c.zero().vars()->size(), 0);
    if (c.body().is_zero() || c.body().coeff(origin) != 1)
        throw DomainError("total Chern class must start with 1");
    std::vector<Class> ck(bound + 1, Class(c.basis(), c.zero()));
    for (long k = 1; k <= bound; ++k) ck[k] = graded_part(c, 2 * k);
    std::vector<Class> p(bound + 1, Class(c.basis(), c.zero()));
    Class ch = class_scalar(c.basis(), c.zero(), rank);
    for (long k = 1; k <= bound; ++k) {
        Class acc = ck[k].scaled_by(Rational(k));
        for (long i = 1; i < k; ++i) {
            if (p[i].is_zero() || ck[k - i].is_zero()) continue;
            Class t = ck[k - i] * p[i];
            acc += (i % 2 == 1) ? -t : t;
        }
        p[k] = (k % 2 == 1) ? acc : -acc;
        ch += p[k].scaled_by(Rational(1) / Rational(factorial(k)));
    }
    return SheafClass(rank, ch, bound);
}

// A class on Sigma x B written as base + sum_i odd_i (x) sigma_i + fiber (x) rho,
// with sigma_i sigma_{i+g} = rho = -sigma_{i+g} sigma_i and all other products of
// odd surface classes zero.
struct SurfaceClass {
    int g;
    Class base;
    std::vector<Class> odd;
    Class fiber;

    SurfaceClass(int genus, Class b, std::vector<Class> o, Class f)
        : g(genus), base(std::move(b)), odd(std::move(o)), fiber(std::move(f)) {
        if (static_cast<int>(odd.size()) != 2 * g) throw DomainError("need 2g odd components");
    }

    static SurfaceClass pullback(int g, const Class& a) {
        Class z(a.basis(), a.zero());
        return SurfaceClass(g, a, std::vector<Class>(2 * g, z), z);
    }

    friend SurfaceClass operator+(const SurfaceClass& x, const SurfaceClass& y) {
        x.require_genus(y);
        std::vector<Class> o;
        for (int i = 0; i < 2 * x.g; ++i) o.push_back(x.odd[i] + y.odd[i]);
        return SurfaceClass(x.g, x.base + y.base, o, x.fiber + y.fiber);
    }
    SurfaceClass operator-() const {
        std::vector<Class> o;
        for (const auto& c : odd) o.push_back(-c);
        return SurfaceClass(g, -base, o, -fiber);
    }

    friend SurfaceClass operator*(const SurfaceClass& x, const SurfaceClass& y) {
        x.require_genus(y);
        int g = x.g;
        std::vector<Class> o;
        for (int i = 0; i < 2 * g; ++i) o.push_back(x.base * y.odd[i] + x.odd[i] * parity_twist(y.base));
        Class f = x.base * y.fiber + x.fiber * y.base;
        for (int i = 0; i < g; ++i) {
            f += x.odd[i] * parity_twist(y.odd[i + g]);
            f -= x.odd[i + g] * parity_twist(y.odd[i]);
        }
        return SurfaceClass(g, x.base * y.base, o, f);
    }

    // exp(a + N) = exp(a)(1 + N + N^2/2) for an even base a; N^3 = 0.
    SurfaceClass exp() const {
        if (base.parity() != 0) throw DomainError("exp needs an even base part");
        Class z(base.basis(), base.zero());
        SurfaceClass nil(g, z, odd, fiber);
        SurfaceClass one = pullback(g, class_scalar(base.basis(), base.zero(), 1));
        SurfaceClass sq = nil * nil;
        SurfaceClass poly = one + nil + SurfaceClass(g, sq.base, sq.odd, sq.fiber.scaled_by(Rational(1, 2)));
        return pullback(g, base.exp_even()) * poly;
    }

private:
    void require_genus(const SurfaceClass& o) const {
        if (g != o.g) throw DomainError("surface classes of different genus");
    }
};

// ch(pi_! alpha) = pi_*(ch(alpha)(1 - (g-1) omega)): the rho-component of the product.
inline Class pushforward_fibration(const SurfaceClass& ch_alpha) {
    return ch_alpha.fiber - ch_alpha.base.scaled_by(Rational(ch_alpha.g - 1));
}

inline SheafClass pushforward_fibration_sheaf(const SurfaceClass& ch_alpha) {
    Class ch = pushforward_fibration(ch_alpha);
    Rational r = graded_part(ch, 0).body().constant_term();
    if (!is_integer(r)) throw DomainError("pushforward rank is not an integer");
    return SheafClass(r.get_num().get_si(), ch);
}

// Inverse of a class with invertible body: b^{-1} sum_k (-b^{-1} n)^k, n nilpotent.
inline Class invert_class(const Class& x) {
    Series b = x.body();
    if (b.is_zero() || b.constant_term() == 0) throw DomainError("class is not a unit");
    Series binv = b.inv();
    Class soul = x;
    soul.add(0, -b);
    Class step = soul.scaled(-binv);
    Class acc = class_scalar(x.basis(), x.zero(), 1);
    Class power = acc;
    while (true) {
        power = power * step;
        if (power.is_zero()) break;
        acc += power;
    }
    return acc.scaled(binv);
}

// td(L)^{-1} = (1 - e^{-x})/x = sum_k (-1)^k x^k/(k+1)! for a line bundle with c_1 = x,
// through complex degree `bound`.
inline Class inverse_todd_line(const Class& x, long bound) {
    Class acc = with_precision(class_scalar(x.basis(), x.zero(), 1), bound + 1);
    Class power = acc;
    for (long k = 1; k <= bound; ++k) {
        power = truncate_degree(power * x, bound);
        acc += power.scaled_by(Rational(sign_pow(k)) / Rational(factorial(k + 1)));
    }
    return with_precision(truncate_degree(acc, bound), bound + 1);
}

// ch(iota_! alpha) = iota_*(ch(alpha) td(N)^{-1}), with iota_* realised as
// multiplication by the class of the subvariety; alpha is given through any lift.
inline SheafClass pushforward_embedding(const SheafClass& alpha, const Class& normal_todd,
                                        const Class& fundamental_class) {
    Class ch = fundamental_class * alpha.ch * invert_class(normal_todd);
    return SheafClass(0, ch, alpha.known_degree);
}

// Cohomology of Jac x Jac blown up along the diagonal Delta, in the normal form
// alpha + sum_{k=1}^{g-1} h^k beta_k with alpha on Jac x Jac and beta_k on Delta.
// h = c_1(O(-E)); relations h . alpha = h . alpha|_Delta, h^g = -[Delta].
// The diagonal is the locus c_1(L_1) = c_1(L_2) where c_1(L_r) = sign_r sum_i d_r^i sigma_i.
class DiagonalBlowup {
public:
    DiagonalBlowup(int g, int sign1, int sign2)
        : g_(g), s1_(sign1), s2_(sign2), pair_(jacobian_pair_basis(g, 1)), jac_(jacobian_basis(g)) {
        if (g < 1) throw DomainError("genus must be >= 1");
        if (std::abs(sign1) != 1 || std::abs(sign2) != 1) throw DomainError("normalization signs are +-1");
        for (int i = 0; i < 2 * g; ++i) images_.push_back(GrassmannQ::generator(jac_, i).scaled_by(s1_));
        for (int i = 0; i < 2 * g; ++i) images_.push_back(GrassmannQ::generator(jac_, i).scaled_by(s2_));
        for (int i = 0; i < 2 * g; ++i) lift_.push_back(GrassmannQ::generator(pair_, pair_generator(g, 2, i + 1)).scaled_by(s2_));
        diagonal_class_ = solve_diagonal_class();
    }

    int genus() const { return g_; }
    const BasisPtr& pair_basis() const { return pair_; }
    const BasisPtr& diagonal_basis() const { return jac_; }
    const GrassmannQ& diagonal_class() const { return diagonal_class_; }

    GrassmannQ restrict(const GrassmannQ& a) const { return a.substitute(jac_, images_); }
    GrassmannQ lift(const GrassmannQ& b) const { return b.substitute(pair_, lift_); }

    struct Element {
        GrassmannQ base;
        std::vector<GrassmannQ> exceptional;  // index k-1 holds beta_k

        // Largest cohomological degree with a nonzero part, or -1.
        long max_degree() const {
            long d = base.is_zero() ? -1 : base.max_degree();
            for (size_t k = 0; k < exceptional.size(); ++k)
                if (!exceptional[k].is_zero())
                    d = std::max<long>(d, exceptional[k].max_degree() + 2 * static_cast<long>(k + 1));
            return d;
        }
        bool operator==(const Element& o) const {
            return base == o.base && exceptional == o.exceptional;
        }
    };

    // Reduces a class over the pair basis whose coefficients are polynomials in h alone.
    Element reduce(const Class& x) const {
        const VarSetPtr& vs = x.zero().vars();
        auto hidx = vs->find("h");
        Element out{GrassmannQ(pair_), std::vector<GrassmannQ>(g_ - 1, GrassmannQ(jac_))};
        for (const auto& [m, c] : x.terms()) {
            if (!c.is_exact()) throw TruncationError("blow-up reduction needs exact coefficients");
            for (const auto& [e, v] : c.terms()) {
                int k = 0;
                for (size_t i = 0; i < e.size(); ++i) {
                    if (hidx && i == *hidx) k = e[i];
                    else if (e[i] != 0) throw DomainError("blow-up reduction: unexpected variable");
                }
                GrassmannQ mono(pair_);
                mono.add(m, v);
                add_power(out, k, mono);
            }
        }
        return out;
    }

    // Integral over the blow-up: only the Jac x Jac part survives in normal form.
    Rational integrate(const Element& e) const { return e.base.berezin(); }
    Rational integrate_diagonal(const GrassmannQ& b) const { return b.berezin(); }

private:
    void add_power(Element& out, int k, const GrassmannQ& a) const {
        if (k == 0) {
            out.base += a;
        } else if (k < g_) {
            out.exceptional[k - 1] += restrict(a);
        } else if (k == g_) {
            out.base += -(diagonal_class_ * lift(restrict(a)));
        }
        // k > g: [Delta] restricted to Delta is the Euler class of a trivial bundle.
    }

    GrassmannQ solve_diagonal_class() const {
        GrassmannQ p = GrassmannQ::scalar(pair_, 1);
        for (int j = 1; j <= g_; ++j)
            for (int i : {j, j + g_}) {
                GrassmannQ u = GrassmannQ::generator(pair_, pair_generator(g_, 1, i)).scaled_by(s1_) -
                               GrassmannQ::generator(pair_, pair_generator(g_, 2, i)).scaled_by(s2_);
                p = p * u;
            }
        GrassmannQ top = GrassmannQ::scalar(jac_, 1);
        for (int j = 1; j <= g_; ++j)
            top = top * GrassmannQ::generator(jac_, j - 1) * GrassmannQ::generator(jac_, j + g_ - 1);
        Rational lhs = (p * lift(top)).berezin();
        if (lhs == 0) throw DomainError("diagonal class solve is degenerate");
        return p.scaled_by(top.berezin() / lhs);
    }

    int g_, s1_, s2_;
    BasisPtr pair_, jac_;
    std::vector<GrassmannQ> images_, lift_;
    GrassmannQ diagonal_class_{jac_};
};

inline GrassmannQ exact_part(const Class& x) {
    GrassmannQ out(x.basis());
    for (const auto& [m, c] : x.terms()) {
        for (const auto& [e, v] : c.terms())
            for (int k : e)
                if (k != 0) throw DomainError("class has even-variable dependence");
        out.add(m, c.constant_term());
    }
    return out;
}

// Inputs of the rank-2 second blow-up: L_1, L_2 on Sigma x Jac x Jac.
struct Rank2WallPipeline {
    int g;
    int sign1 = 1, sign2 = 1;
    VarSetPtr vars;  // contains the exceptional class h
    BasisPtr basis;

    Rank2WallPipeline(int genus, int s1, int s2)
        : g(genus), sign1(s1), sign2(s2), vars(make_varset({ordinary_var("h")})),
          basis(jacobian_pair_basis(genus, 1)) {
        if (g < 2) throw DomainError("rank-2 wall needs g >= 2");
    }

    Series zero() const { return Series(vars); }

    SurfaceClass line_bundle_c1(int copy, int sign) const {
        Class z(basis, zero());
        std::vector<Class> odd;
        for (int i = 1; i <= 2 * g; ++i)
            odd.push_back(Class::generator(basis, pair_generator(g, copy, i), zero()).scaled_by(sign));
        return SurfaceClass(g, z, odd, z);
    }

    // ch(-pi_!(L_b^dual (x) L_a)).
    SheafClass minus_pushforward(int a, int b) const {
        int sa = a == 1 ? sign1 : sign2, sb = b == 1 ? sign1 : sign2;
        SurfaceClass c1 = line_bundle_c1(a, sa) + (-line_bundle_c1(b, sb));
        return -pushforward_fibration_sheaf(c1.exp());
    }

    // ch(iota_! O) for the exceptional divisor E: [E] = -h, c_1(N_E) = -h.
    SheafClass exceptional_structure_sheaf() const {
        Class h = Class::scalar(basis, Series::variable(vars, "h"), zero());
        SheafClass one = SheafClass::trivial(basis, zero(), 1);
        Class todd = invert_class(inverse_todd_line(-h, 2 * g + 1));
        return pushforward_embedding(one, todd, -h);
    }

    // c(W_+) = c(-pi_!(L_2^dual (x) L_1)) / c(iota_!(O^g)). Computed through
    // complex degree 2g, past which both factors' product vanishes in the free ring.
    Class wall_chern() const {
        long bound = 2 * g;
        Class num = ch_to_chern(minus_pushforward(1, 2), bound);
        SheafClass e = exceptional_structure_sheaf();
        SheafClass eg = e;
        for (int i = 1; i < g; ++i) eg = eg + e;
        Class den = ch_to_chern(eg, bound);
        Class quotient = with_precision(num, bound + 1) * invert_class(den);
        return as_exact(truncate_degree(quotient, bound));
    }
};

// e(normal to P W_+) = (-y + 2Y)(y - 4Y)^{g-1} sum_k c_k(W) (y - 4Y)^{-k}, written in
// u = y - 4Y (Laurent), Y and h. c(W) is supplied over the pair basis in h.
inline Class wall_euler_rank2(int g, const Class& wall_chern_class) {
    if (g < 2) throw DomainError("rank-2 wall needs g >= 2");
    auto vs = make_varset({laurent_var("u", 2 * g + 2), ordinary_var("Y"), ordinary_var("h")});
    Series zero(vs);
    const VarSetPtr& src = wall_chern_class.zero().vars();
    auto hsrc = src->find("h");
    Class out(wall_chern_class.basis(), zero);
    for (const auto& [m, c] : wall_chern_class.terms()) {
        if (!c.is_exact()) throw TruncationError("wall Chern class must be exact");
        Series img(vs);
        for (const auto& [e, v] : c.terms()) {
            int hk = hsrc ? e[*hsrc] : 0;
            long k = (std::popcount(m) / 2) + hk;  // complex degree of this piece
            img.add_term({static_cast<int>(g - 1 - k), 0, hk}, v);
        }
        out.add(m, img);
    }
    Series prefactor = -Series::variable(vs, "u") - Series::variable(vs, "Y").scaled(2);
    return out.scaled(prefactor);
}

// Symbolic summand U_a^* (x) U_b of a universal-bundle expression; `prime`
// selects the R' universal bundles.
struct BundleTerm {
    bool prime;
    int dual;
    int plain;
    auto operator<=>(const BundleTerm&) const = default;
};

struct BlockData {
    long m, n, d;  // multiplicity, rank, degree
};

struct NormalChernInput {
    std::vector<BlockData> r_blocks;                // R = prod GL(m_i)
    std::vector<BlockData> r_prime_blocks;          // R' = prod GL(m'_j)
    std::vector<std::vector<long>> multiplicities;  // M_{ij}
    std::vector<std::vector<long>> partition;       // m_i^k, k = 1..t
    long cosets = 0;                                // number of double cosets m'
};

// c(N_R/W)(t) as a formal quotient: c(-pi_! V_0) c(iota_!(-pi_!) V'_0) over
// c(-pi_! V_1) c(iota_!(-pi_!) V'_1), after cancelling common summands.
struct NormalChernQuotient {
    std::map<BundleTerm, long> pushforward;  // net multiplicity in V_0 - V_1
    std::map<BundleTerm, long> embedded;     // net multiplicity in V'_0 - V'_1

    // Expansion in t through degree `bound`, each factor c(X)(t) = 1 + sum_k c_k(X) t^k
    // with c_k(X) abstract generators.
    Series expand(long bound) const {
        std::vector<Variable> v{ordinary_var("t")};
        std::vector<std::pair<std::string, long>> factors;
        auto label = [](const char* kind, const BundleTerm& b) {
            return std::string(kind) + "(U" + (b.prime ? "'" : "") + std::to_string(b.dual) + "*U" +
                   (b.prime ? "'" : "") + std::to_string(b.plain) + ")";
        };
        for (const auto& [b, mult] : pushforward) factors.emplace_back(label("P", b), mult);
        for (const auto& [b, mult] : embedded) factors.emplace_back(label("I", b), mult);
        for (const auto& [name, mult] : factors)
            for (long k = 1; k <= bound; ++k)
                v.push_back(nilpotent_var("c" + std::to_string(k) + "_" + name, static_cast<int>(bound + 1)));
        auto vs = make_varset(v);
        long prec = bound + 1;
        Series num = Series::constant(vs, 1, prec), den = Series::constant(vs, 1, prec);
        auto t = Series::variable(vs, "t", prec);
        for (const auto& [name, mult] : factors) {
            Series f = Series::constant(vs, 1, prec);
            for (long k = 1; k <= bound; ++k)
                f += Series::variable(vs, "c" + std::to_string(k) + "_" + name) * t.pow(k);
            for (long r = 0; r < std::abs(mult); ++r) (mult > 0 ? num : den) *= f;
        }
        return num * den.inv();
    }
};

inline NormalChernQuotient normal_chern_general(const NormalChernInput& in) {
    long q = static_cast<long>(in.r_blocks.size());
    long Q = static_cast<long>(in.r_prime_blocks.size());
    if (static_cast<long>(in.partition.size()) != q) throw DomainError("partition needs one row per R block");
    long t = q ? static_cast<long>(in.partition[0].size()) : 0;
    for (long i = 0; i < q; ++i) {
        if (static_cast<long>(in.partition[i].size()) != t) throw DomainError("ragged partition");
        long s = 0;
        for (long x : in.partition[i]) s += x;
        if (s != in.r_blocks[i].m) throw DomainError("partition sizes must sum to m_i");
    }
    if (Q > 0) {
        if (static_cast<long>(in.multiplicities.size()) != q) throw DomainError("M needs one row per R block");
        for (long j = 0; j < Q; ++j) {
            long s = 0;
            for (long i = 0; i < q; ++i) {
                if (static_cast<long>(in.multiplicities[i].size()) != Q) throw DomainError("ragged M");
                if (in.multiplicities[i][j] < 0) throw DomainError("negative multiplicity");
                s += in.r_blocks[i].m * in.multiplicities[i][j];
            }
            if (s != in.r_prime_blocks[j].m) throw DomainError("inconsistent multiplicities: m'_j != sum_i m_i M_ij");
        }
    } else if (in.cosets != 0) {
        throw DomainError("double cosets given without R' data");
    }

    NormalChernQuotient out;
    auto bump = [](std::map<BundleTerm, long>& mp, BundleTerm b, long k) {
        if (k == 0) return;
        if ((mp[b] += k) == 0) mp.erase(b);
    };
    // V_0: U_{i1}^* U_{i2} with multiplicity m_{i1} m_{i2} - delta.
    for (long a = 0; a < q; ++a)
        for (long b = 0; b < q; ++b)
            bump(out.pushforward, {false, int(a + 1), int(b + 1)},
                 in.r_blocks[a].m * in.r_blocks[b].m - (a == b ? 1 : 0));
    // V_1: U_{i1} U_{i2}^* with multiplicity m_{i1}^k m_{i2}^{k+1}, the eigenbundle W.
    for (long a = 0; a < q; ++a)
        for (long b = 0; b < q; ++b)
            for (long k = 0; k + 1 < t; ++k)
                bump(out.pushforward, {false, int(b + 1), int(a + 1)},
                     -in.partition[a][k] * in.partition[b][k + 1]);
    if (Q > 0) {
        std::vector<std::vector<long>> mk(Q, std::vector<long>(t, 0));  // m'^k_j
        for (long j = 0; j < Q; ++j)
            for (long k = 0; k < t; ++k)
                for (long i = 0; i < q; ++i) mk[j][k] += in.partition[i][k] * in.multiplicities[i][j];
        for (long r = 0; r < in.cosets; ++r)
            for (long a = 0; a < Q; ++a)
                for (long b = 0; b < Q; ++b) {
                    long v0 = 0;
                    for (long i = 0; i < q; ++i) v0 += in.multiplicities[i][a] * in.multiplicities[i][b];
                    bump(out.embedded, {true, int(a + 1), int(b + 1)}, v0);
                    for (long k = 0; k + 1 < t; ++k)
                        bump(out.embedded, {true, int(b + 1), int(a + 1)}, mk[a][k] * mk[b][k + 1]);
                    bump(out.embedded, {true, int(a + 1), int(b + 1)},
                         -in.r_prime_blocks[a].m * in.r_prime_blocks[b].m);
                }
    }
    return out;
}

}  // namespace modpair
