#include "doctest.h"
#include "modpair/witten.hpp"

using namespace modpair;

TEST_CASE("zeta values from residues") {
    CHECK(calibrate_zeta_sign() == kZetaResidueSign);
    CHECK(zeta_via_residue(1).value == rat(1, 6));
    CHECK(zeta_via_residue(1).marker.pi == 2);
    CHECK(zeta_via_residue(2).value == rat(1, 90));
    CHECK(zeta_via_residue(3).value == rat(1, 945));
    CHECK_THROWS_AS(zeta_via_residue(0), DomainError);
    for (int m = 1; m <= 5; ++m) {
        Bounded direct = partial_zeta(2 * m, 1000);
        CHECK(direct.error < Real("1e-20"));
        CHECK(abs(numeric_value(zeta_via_residue(m)) - direct.value) < Real("1e-8"));
    }
}

TEST_CASE("polynomial part: residue route against zeta route") {
    auto g2 = polynomial_part_compare(2);
    REQUIRE(g2.size() == 1);
    CHECK(g2[0].zeta_route == MarkedRational{rat(1, 12), {}});
    // (-1/12) i^2 evaluates to 1/12.
    CHECK(g2[0].residue_route == MarkedRational{rat(-1, 12), UnitMarker{2, 0, 0}});
    CHECK(g2[0].equal);
    auto g3 = polynomial_part_compare(3);
    CHECK(g3[1].zeta_route == MarkedRational{rat(-1, 24), {}});
    CHECK(g3[1].residue_route == MarkedRational{rat(-1, 24), UnitMarker{3, 0, 0}});
    for (int g = 2; g <= 6; ++g)
        for (const auto& row : polynomial_part_compare(g)) {
            INFO("g=" << g << " k=" << row.k);
            CHECK(row.equal);
            CHECK(row.zeta_route.marker.pi == 0);
        }
    // k = g-1 is still matched once zeta(0) = -1/2 enters; k >= g vanishes.
    for (int g = 2; g <= 6; ++g) {
        CHECK(jk_polynomial_coefficient(g, g - 1).value != 0);
        CHECK(jk_polynomial_coefficient(g, g - 1) ==
              convention_transport(g, g - 1) * witten_polynomial_coefficient(g, g - 1));
        for (int k = g; k <= g + 2; ++k) CHECK(jk_polynomial_coefficient(g, k).value == 0);
    }
}

TEST_CASE("half-power coefficient") {
    CHECK(witten_c2(2) == 2);
    CHECK(witten_c2(3) == rat(4, 3));
    CHECK(witten_c2(4) == rat(8, 15));
    for (int g = 2; g <= 8; ++g) CHECK(witten_c2(g) * half_power_derivative_factor(g) == 1);
    auto h = half_power_coefficient(3);
    CHECK(h.value == rat(1, 6));
    CHECK(h.marker.i == 3);
    CHECK(h.marker.sqrt_pi == -1);
    // (d/d eps)^{g-1} Z = (-1/2)^{g-1} sum_{n>=1} exp(-eps pi^2 n^2), against C_1 eps^{-1/2} plus
    // the constant from the eps^{g-1} term.
    Rational eps = rat(1, 100);
    Real e = to_real(eps), pi2 = real_pi() * real_pi();
    Real theta = 0;
    for (long n = 1; n <= z_terms_for(eps, 60); ++n) theta += exp(-e * pi2 * n * n);
    for (int g = 2; g <= 6; ++g) {
        Real derivative = pow(Real(-0.5), g - 1) * theta;
        Real model = numeric_value(witten_c1(g)) / sqrt(e) +
                     numeric_value(witten_polynomial_coefficient(g, g - 1)) * to_real(Rational(factorial(g - 1)));
        CHECK(abs(derivative - model) < Real("1e-30"));
    }
}

TEST_CASE("z_eval") {
    CHECK_THROWS_AS(z_eval(2, 0, 10), DomainError);
    CHECK_THROWS_AS(z_eval(2, rat(-1), 10), DomainError);
    // Large eps: the first term dominates.
    Bounded big = z_eval(3, 5, 50);
    Real first = exp(-5 * real_pi() * real_pi()) / pow(2 * real_pi() * real_pi(), 2);
    CHECK(abs(big.value / first - 1) < Real("1e-30"));
    // Small eps, g = 2: close to zeta(2)/(2 pi^2) = 1/12.
    Rational tiny = rat(1, 100000000);
    Bounded z = z_eval(2, tiny, z_terms_for(tiny, 30));
    CHECK(abs(z.value - Real(1) / 12) < Real("1e-3"));
    // Tail bound at least halves when the term count doubles.
    for (long n : {2L, 4L, 8L, 16L, 32L}) CHECK(z_eval(2, rat(1, 1000), 2 * n).error <= z_eval(2, rat(1, 1000), n).error / 2);
}

TEST_CASE("remainder after the expansion is beyond all orders") {
    for (int g = 2; g <= 6; ++g) {
        auto ex = witten_expansion(g);
        CHECK(ex.polynomial.size() == static_cast<size_t>(g));
        std::vector<Real> residual;
        for (long d : {10L, 100L, 1000L, 10000L}) {
            Rational eps = rat(1, d);
            Bounded z = z_eval(g, eps, z_terms_for(eps, 60));
            residual.push_back(abs(z.value - ex.evaluate(eps)));
        }
        INFO("g=" << g);
        CHECK(residual[0] > Real("1e-25"));
        CHECK(residual[1] < Real("1e-35"));
        CHECK(residual[2] < Real("1e-35"));
        CHECK(residual[3] < Real("1e-35"));
        // log-log slope between the first two decades already exceeds any small power.
        CHECK(log10(residual[0]) - log10(residual[1] + Real("1e-45")) > 10);
    }
}
