#include "doctest.h"
#include "modpair/desing.hpp"
#include "modpair/pairing.hpp"

using namespace modpair;

namespace {

// Coeff_{t^{g-1}} (1-t/2)^{-g-1}(1-t/4)^{-g} by binomial convolution.
Rational blowup_coefficient_oracle(int g) {
    Rational sum = 0;
    for (int j = 0; j <= g - 1; ++j) {
        int i = g - 1 - j;
        sum += Rational(binomial(g + j, j)) / rpow(2, j) * Rational(binomial(g - 1 + i, i)) / rpow(4, i);
    }
    return sum;
}

}  // namespace

TEST_CASE("B table against its closed form") {
    for (int g = 2; g <= 4; ++g) {
        auto B = coeffs_B(g, 6, 6);
        CHECK(B(0, 0) == 1);
        CHECK(B(1, 0) == -1);
        CHECK(B(0, 1) == -g);
        CHECK(B(-1, 0) == 0);
        CHECK(B(2, -3) == 0);
        for (int a = 0; a <= 6; ++a)
            for (int b = 0; b <= 6; ++b) CHECK(B(a, b) == CoeffTableB::closed_form(g, a, b));
    }
}

TEST_CASE("A table inverts its defining series") {
    for (int g = 2; g <= 4; ++g) {
        auto A = coeffs_A(g, 5, 5, 5);
        CHECK(A(0, 0, 0) == 1);
        // At z = x = 0 the definition is (1+2t)(1+t)^{g-1}.
        CHECK(A(0, 0, 1) == -(g + 1));
        Series product = A.definition() * A.inverse();
        CHECK(product.terms().size() == 1);
        CHECK(product.constant_term() == 1);
    }
}

TEST_CASE("main summand values") {
    CHECK(main_ih_summand(2, 1, 3) == 3);
    CHECK(main_ih_summand(2, 2, 1) == 0);
    CHECK(todd_residue(0) == 1);
    CHECK(todd_residue(1) == rat(-1, 2));
    CHECK(todd_residue(2) == rat(1, 12));
    for (int g = 2; g <= 3; ++g)
        for (const auto& row : desing_table(g)) {
            PairingSpec s;
            s.n = 2;
            s.d = 0;
            s.g = g;
            s.monomial = parse_monomial("f2^" + std::to_string(row.n) + (row.m ? ",a2^" + std::to_string(row.m) : ""));
            CHECK(row.main == ih_pairing(s).value);
        }
    CHECK_THROWS_AS(main_ih_summand(2, 1, 2), DomainError);
}

TEST_CASE("first blow-up term") {
    CHECK(first_blowup_term(3, 3, 3) == rat(105, 256));
    CHECK(blowup_coefficient_oracle(3) == rat(35, 8));
    CHECK(first_blowup_term(3, 2, 5) == 0);
    for (int g = 2; g <= 7; ++g)
        for (int m = 0; 2 * m <= 4 * g - 3; ++m) {
            int n = 4 * g - 3 - 2 * m;
            Rational v = first_blowup_term(g, m, n);
            if (g % 2 == 0 || n != g) {
                CHECK(v == 0);
            } else {
                CHECK(v == Rational(factorial(g)) / rpow(2, 2 * g) * blowup_coefficient_oracle(g));
                CHECK(v != 0);
            }
            if (g <= 5) CHECK(v == first_blowup_direct(g, m, n));
        }
    CHECK_THROWS_AS(first_blowup_term(3, 3, 2), DomainError);
}

TEST_CASE("second blow-up term: printed coefficients against direct evaluation") {
    for (int g = 2; g <= 3; ++g)
        for (int m = 0; 2 * m <= 4 * g - 3; ++m) {
            int n = 4 * g - 3 - 2 * m;
            if (n <= 2 * g) CHECK(gamma_moment(g, n) == gamma_moment_berezin(g, n, kPairOrientation));
            INFO("g=" << g << " m=" << m << " n=" << n);
            auto printed = second_blowup_parts(g, m, n);
            auto direct = second_blowup_direct_parts(g, m, n);
            CHECK(printed.gamma == direct.gamma);
            // The printed diagonal part carries +int_diag where the exceptional
            // divisor gives -int_diag; the two routes differ by exactly that sign.
            CHECK(printed.diagonal == -direct.diagonal);
        }
    // Cases where the diagonal part enters, frozen from the direct route.
    CHECK(second_blowup_direct(2, 2, 1) == rat(-1, 2));
    CHECK(second_blowup_term(2, 2, 1) == rat(1, 2));
    CHECK(second_blowup_direct(3, 3, 3) == rat(225, 256));
    CHECK(second_blowup_direct(3, 4, 1) == rat(33, 1024));
    CHECK(second_blowup_direct(2, 1, 3) == rat(3, 2));
    CHECK(second_blowup_term(3, 0, 9) == 0);
}

TEST_CASE("table and assembly") {
    auto rows = desing_table(2);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].m == 0);
    CHECK(rows[0].n == 5);
    CHECK(rows[2].n == 1);
    for (int g = 2; g <= 3; ++g)
        for (const auto& row : desing_table(g)) {
            CHECK(row.total == assemble_desing_pairing(2, row.main, {row.first, row.second}));
            CHECK(row.total == desing_pairing_rank2(g, row.m, row.n));
        }
}
