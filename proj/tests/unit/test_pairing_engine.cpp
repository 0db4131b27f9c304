#include "doctest.h"
#include "modpair/pairing.hpp"

using namespace modpair;

namespace {

PairingSpec request(int n, long d, int g, const std::string& mono) {
    PairingSpec s;
    s.n = n;
    s.d = d;
    s.g = g;
    s.monomial = parse_monomial(mono);
    return s;
}

// Bernoulli oracle: res_{Y=0} Y^{-p} / (e^Y - 1) = B_{p}/p!, the Y^{p} coefficient of Y/(e^Y - 1).
Rational bernoulli_residue(int p) {
    if (p < 0) return 0;
    std::vector<Rational> b(p + 1);
    b[0] = 1;
    for (int m = 1; m <= p; ++m) {
        Rational s = 0;
        for (int k = 0; k < m; ++k) s += Rational(binomial(m + 1, k)) * b[k];
        b[m] = -s / Rational(m + 1);
    }
    return b[p] / Rational(factorial(p));
}

// SU(3) test rule: a_2 -> tau_2(X), a_3 -> tau_3(X), f_2 -> 3 gamma, f_3 fibre part 0.
FiberIntegralRule su3_toy_rule(int g) {
    FiberIntegralRule rule;
    rule.name = "su3-toy";
    rule.n = 3;
    rule.basis = jacobian_basis(g);
    rule.image = [](const Generator& x, const FiberContext& c) {
        auto e = elementary_symmetric(c.x, 3, c.zero.vars());
        if (x.kind == 'a' && x.r == 2) return c.scalar(e[2]);
        if (x.kind == 'a' && x.r == 3) return c.scalar(e[3]);
        throw DomainError("toy rule covers a_2 and a_3 only");
    };
    rule.kahler = [g](const FiberContext& c) { return gamma_class<Series>(c.basis, g, c.zero).scaled_by(3); };
    return rule;
}

}  // namespace

TEST_CASE("monomial parsing") {
    auto m = parse_monomial("a2^1,f2^3,b2_4,b1_1");
    CHECK(m.a.at(2) == 1);
    CHECK(m.f.at(2) == 3);
    REQUIRE(m.b.size() == 2);
    CHECK(m.b[0] == Generator{'b', 2, 4});
    CHECK(m.degree() == 4 + 6 + 3 + 1);
    CHECK(parse_monomial(m.to_string()).to_string() == m.to_string());
    CHECK_THROWS_AS(parse_monomial("c2"), DomainError);
    CHECK_THROWS_AS(parse_monomial("b2"), DomainError);
    CHECK(parse_monomial("").degree() == 0);
}

TEST_CASE("coprime rank-2 values") {
    // Degree mismatch: 0 with a note.
    auto miss = coprime_pairing(request(2, 1, 2, "f2^2"));
    CHECK(miss.degree_mismatch);
    CHECK(miss.value == 0);
    CHECK_FALSE(miss.note.empty());

    // Volume term f_2^3 at g = 2: (3g-3)! times 1/12 times... frozen below.
    auto vol = coprime_pairing(request(2, 1, 2, "f2^3"));
    CHECK(vol.value == 6 * rat(1, 12));
    CHECK(vol.value == periodicity_pairing(request(2, 1, 2, "f2^3")).value);
    for (long p : {1009L, 7919L, 104729L}) {
        RootData rd(2);
        CHECK(perturbed_torus_pairing(request(2, 1, 2, "f2^3"), default_xi(rd, p)).value == vol.value);
        CHECK(perturbed_torus_pairing(request(2, 1, 2, "f2^3"), default_xi(rd, -p)).value == vol.value);
    }

    // One unpaired odd class.
    CHECK(coprime_pairing(request(2, 1, 2, "b2_1,a2^0,f2^1,a2^1")).value == 0);
    // b_2^j b_2^{j+g} pairs nontrivially.
    CHECK(coprime_pairing(request(2, 1, 2, "b2_1,b2_3")).value != 0);
    CHECK(coprime_pairing(request(2, 1, 2, "b2_1,b2_3")).value == -coprime_pairing(request(2, 1, 2, "b2_3,b2_1")).value);

    CHECK_THROWS_AS(coprime_pairing(request(2, 0, 2, "f2^3")), DomainError);
    CHECK_THROWS_AS(coprime_pairing(request(2, 1, 2, "b1_1,f2^2,a2^0,b2_1")), DomainError);
}

TEST_CASE("coprime volume against the Bernoulli closed form") {
    // f_2^{3g-3}: (3g-3)! (-1)^{g-1}/2 * 2^g res e^{Y/2} / (Y^{2g-2}(e^Y - 1)).
    for (int g = 2; g <= 4; ++g) {
        Rational kernel = 0;
        // e^{Y/2}/(e^Y - 1) = sum_m (2^{1-m} - 1) B_m Y^{m-1} / m!  (expansion of 1/(2 sinh(Y/2))).
        int m = 2 * g - 2;
        kernel = (rpow(2, 1 - m) - 1) * bernoulli_residue(m);
        Rational expected = Rational(factorial(3 * g - 3)) * sign_pow(g - 1) / 2 * rpow(2, g) * kernel;
        CHECK(coprime_pairing(request(2, 1, g, "f2^" + std::to_string(3 * g - 3))).value == expected);
    }
}

TEST_CASE("intersection cohomology examples") {
    auto r = ih_pairing(request(2, 0, 2, "a2^1,f2^3"));
    CHECK(r.value == 3);
    CHECK(ih_pairing(request(2, 0, 2, "a2^2,f2^1")).value == 0);
    // Main summand closed form (-1)^{g-1-m} k! / 2^{2m-g+1} * B residue.
    for (int g = 2; g <= 3; ++g)
        for (int m = 0; 2 * m <= 4 * g - 3; ++m) {
            int k = 4 * g - 3 - 2 * m;
            Rational expected = Rational(sign_pow(g - 1 - m)) * Rational(factorial(k)) /
                                rpow(2, 2 * m - g + 1) * bernoulli_residue(2 * g - 2 - 2 * m);
            std::string mono = "f2^" + std::to_string(k) + (m ? ",a2^" + std::to_string(m) : "");
            CHECK(ih_pairing(request(2, 0, g, mono)).value == expected);
        }
    // xi and -xi agree on a/f monomials.
    RootData rd(2);
    auto s = request(2, 0, 3, "a2^2,f2^5");
    s.xi = default_xi(rd, 101);
    auto plus = ih_pairing(s);
    s.xi = default_xi(rd, -101);
    CHECK(ih_pairing(s).value == plus.value);
    CHECK_THROWS_AS(perturbed_torus_pairing(request(2, 0, 2, "a2^1,f2^3"), CartanPoint{0, 0}), BoundaryError);
}

TEST_CASE("perturbation invariance across the monomial sweep") {
    RootData rd(2);
    for (int g = 2; g <= 3; ++g) {
        int nonzero = 0;
        for (const auto& mono : rank2_monomial_sweep(g, true)) {
            PairingSpec s;
            s.n = 2;
            s.d = 0;
            s.g = g;
            s.monomial = mono;
            std::optional<Rational> first;
            for (long p : {1009L, 7919L, 104729L}) {
                s.xi = default_xi(rd, p);
                Rational v = ih_pairing(s).value;
                if (!first) first = v;
                CHECK(v == *first);
            }
            if (*first != 0) ++nonzero;
        }
        CHECK(nonzero > 10);
    }
}

TEST_CASE("chamber crossing equals the fixed-point residue") {
    RootData rd(2);
    // d = 0: the built-in U(2) rule only produces even powers of Y, so both
    // chambers next to c~_0 agree and the wall term at mu_E = 0 vanishes.
    for (int g = 2; g <= 3; ++g)
        for (const auto& mono : rank2_monomial_sweep(g, true)) {
            PairingSpec s;
            s.n = 2;
            s.d = 0;
            s.g = g;
            s.monomial = mono;
            Rational pos = perturbed_torus_pairing(s, default_xi(rd, 997)).value;
            Rational neg = perturbed_torus_pairing(s, default_xi(rd, -997)).value;
            CHECK(neg - pos == guillemin_kalkman_term(s, u2_rule(g), CartanPoint{0, 0}));
            CHECK(neg == pos);
        }
    // d = 1: crossing the wall where c~_0 + xi hits the lattice.
    int crossed = 0;
    for (int g = 2; g <= 3; ++g)
        for (const auto& mono : rank2_monomial_sweep(g, false)) {
            PairingSpec s;
            s.n = 2;
            s.d = 1;
            s.g = g;
            s.monomial = mono;
            // Coroot coordinate of xi: -1/2 + 1/997 and -1/2 - 1/997.
            CartanPoint before = rd.from_coroot_coordinates({rat(-1, 2) + rat(1, 997)});
            CartanPoint after = rd.from_coroot_coordinates({rat(-1, 2) - rat(1, 997)});
            Rational a = perturbed_torus_pairing(s, before).value;
            Rational b = perturbed_torus_pairing(s, after).value;
            CHECK(a == coprime_pairing(s).value);
            Rational gk = guillemin_kalkman_term(s, su2_rule(g), central_lift(rd, 1).point);
            CHECK(b - a == gk);
            if (gk != 0) ++crossed;
        }
    CHECK(crossed > 5);
}

TEST_CASE("coprime formula against the periodicity route") {
    for (int g = 2; g <= 3; ++g) {
        int nonzero = 0;
        for (const auto& mono : rank2_monomial_sweep(g, false)) {
            PairingSpec s;
            s.n = 2;
            s.d = 1;
            s.g = g;
            s.monomial = mono;
            Rational a = coprime_pairing(s).value;
            CHECK(a == periodicity_pairing(s).value);
            if (a != 0) ++nonzero;
        }
        CHECK(nonzero > 3);
    }
}

TEST_CASE("rank 3 with a supplied rule") {
    auto rule = su3_toy_rule(2);
    for (long d : {1L, 2L}) {
        for (const char* mono : {"f2^8", "a2^1,f2^6", "a3^1,f2^5", "a2^2,f2^4", "a2^1,a3^2", "a3^2,f2^2"}) {
            PairingSpec s = request(3, d, 2, mono);
            Rational a = evaluate_pairing(s, rule).value;
            CHECK(a == periodicity_pairing(s, rule).value);
        }
    }
    // Generic lift in the spirit of parabolic weights.
    PairingSpec s = request(3, 1, 2, "f2^8");
    s.c_tilde = CartanPoint{rat(1, 5), rat(1, 7), rat(-12, 35)};
    CHECK(evaluate_pairing(s, rule).value == periodicity_pairing(s, rule).value);
    s.c_tilde = CartanPoint{rat(1, 2), rat(1, 2), rat(-1)};
    CHECK_THROWS_AS(evaluate_pairing(s, rule), DomainError);

    // delta bookkeeping: f_3^0 reproduces the plain value, and f_3 classes run.
    PairingSpec t = request(3, 1, 2, "a2^1,f2^4,f3^1");
    CHECK(t.monomial.degree() == 16);
    CHECK_NOTHROW(evaluate_pairing(t, rule));
    CHECK_THROWS_AS(periodicity_pairing(t, rule), DomainError);
    CHECK_THROWS_AS(builtin_rule(request(3, 1, 2, "f2^8")), DomainError);
}

TEST_CASE("desingularisation assembly") {
    CHECK(assemble_desing_pairing(2, 3, {}) == 3);
    CHECK(assemble_desing_pairing(2, 3, {rat(1, 2)}) == 3 + rat(1, 2));
    CHECK(assemble_desing_pairing(3, 3, {rat(1, 2)}) == 3 + rat(1, 2));
    CHECK(assemble_desing_pairing(4, 0, {1, 2}) == -3);
}
