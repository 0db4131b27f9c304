#include <random>
#include <set>

#include "doctest.h"
#include "modpair/roots.hpp"

using namespace modpair;

namespace {

VarSetPtr simple_vars(int n) {
    std::vector<Variable> v;
    for (int j = 1; j < n; ++j) v.push_back(ordinary_var("Y" + std::to_string(j)));
    return make_varset(v);
}

std::vector<Series> simple_coords(const VarSetPtr& vs) {
    std::vector<Series> y;
    for (size_t j = 0; j < vs->size(); ++j) y.push_back(Series::variable(vs, (*vs)[j].name));
    return y;
}

Rational evaluate(const Series& s, const std::vector<Rational>& point) {
    Rational acc = 0;
    for (const auto& [e, c] : s.terms()) {
        Rational t = c;
        for (size_t i = 0; i < e.size(); ++i) t *= rpow(point[i], e[i]);
        acc += t;
    }
    return acc;
}

// Oracle: q(X) = tau_2 + sum delta_r tau_r evaluated directly from subsets.
Rational q_direct(const std::vector<Rational>& x, const std::vector<Rational>& delta) {
    int n = static_cast<int>(x.size());
    std::vector<Rational> tau(n + 1, 0);
    for (unsigned m = 0; m < (1u << n); ++m) {
        Rational p = 1;
        for (int i = 0; i < n; ++i)
            if (m >> i & 1) p *= x[i];
        tau[std::popcount(m)] += p;
    }
    Rational q = tau[2];
    for (int r = 3; r <= n; ++r) q += delta[r - 3] * tau[r];
    return q;
}

}  // namespace

TEST_CASE("discriminant in simple root coordinates") {
    RootData r2(2);
    auto vs2 = simple_vars(2);
    CHECK(r2.weyl_group().size() == 2);
    CHECK(r2.discriminant(r2.x_from_simple(simple_coords(vs2))) == Series::variable(vs2, "Y1"));

    RootData r3(3);
    auto vs3 = simple_vars(3);
    auto y = simple_coords(vs3);
    Series expected = Series::monomial(vs3, {2, 1}) + Series::monomial(vs3, {1, 2});
    CHECK(r3.discriminant(r3.x_from_simple(y)) == expected);
    CHECK(r3.weyl_subgroup().size() == 2);

    CHECK(RootData(4).n_plus() == 6);
    CHECK(RootData(4).weyl_group().size() == 24);
    CHECK_THROWS_AS(RootData(1), DomainError);
}

TEST_CASE("discriminant is Weyl antisymmetric and squares to the full root product") {
    for (int n = 2; n <= 4; ++n) {
        RootData rd(n);
        std::vector<Variable> v;
        for (int i = 1; i <= n; ++i) v.push_back(ordinary_var("X" + std::to_string(i)));
        auto vs = make_varset(v);
        std::vector<Series> x;
        for (int i = 1; i <= n; ++i) x.push_back(Series::variable(vs, "X" + std::to_string(i)));
        Series d = rd.discriminant(x);
        for (const auto& w : rd.weyl_group()) CHECK(rd.discriminant(rd.act_on(w, x)) == d.scaled(permutation_sign(w)));
        Series all = Series::constant(vs, 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) all = all * (x[i] - x[j]);
        CHECK(d * d * Rational(sign_pow(rd.n_plus())) == all);
    }
}

TEST_CASE("bracket reduction") {
    RootData r2(2);
    auto zero = bracket_reduce(r2, {0, 0});
    CHECK(zero.point == CartanPoint{0, 0});
    CHECK(zero.boundary);

    auto c0 = central_lift(r2, 1);
    CHECK_FALSE(c0.boundary);
    CHECK(c0.point == CartanPoint{rat(1, 2), rat(-1, 2)});

    // Oracle: scan lattice translates for the one inside the half-open box.
    for (int n = 2; n <= 4; ++n) {
        RootData rd(n);
        for (long d = 1; d < n; ++d) {
            CartanPoint v(n, rat(d, n));
            v[n - 1] -= d;
            std::vector<CartanPoint> hits;
            std::vector<int> shift(n - 1, -3);
            while (true) {
                auto t = rd.coroot_coordinates(v);
                bool inside = true;
                for (int j = 0; j < n - 1; ++j) {
                    t[j] += shift[j];
                    if (t[j] < 0 || t[j] >= 1) inside = false;
                }
                if (inside) hits.push_back(rd.from_coroot_coordinates(t));
                int k = 0;
                while (k < n - 1 && ++shift[k] > 3) shift[k++] = -3;
                if (k == n - 1) break;
            }
            REQUIRE(hits.size() == 1);
            CHECK(central_lift(rd, d).point == hits[0]);
        }
    }
}

TEST_CASE("bracket is idempotent and lattice invariant") {
    std::mt19937_64 rng(5);
    for (int n = 2; n <= 4; ++n) {
        RootData rd(n);
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<Rational> t(n - 1), lam(n - 1);
            for (int j = 0; j < n - 1; ++j) {
                t[j] = rat(static_cast<long>(rng() % 41) - 20, 7);
                lam[j] = static_cast<long>(rng() % 9) - 4;
            }
            auto v = rd.from_coroot_coordinates(t);
            auto shifted = t;
            for (int j = 0; j < n - 1; ++j) shifted[j] += lam[j];
            auto once = bracket_reduce(rd, v);
            CHECK(bracket_reduce(rd, once.point).point == once.point);
            CHECK(bracket_reduce(rd, rd.from_coroot_coordinates(shifted)).point == once.point);
        }
    }
}

TEST_CASE("Weyl sums") {
    RootData r2(2);
    auto vs = simple_vars(3);
    CHECK(weyl_sum(r2, vs, [&](const Permutation&) { return Series::constant(vs, 5); }) ==
          Series::constant(vs, 5));
    RootData r3(3);
    CHECK(weyl_sum(r3, vs, [&](const Permutation&) { return Series::constant(vs, 5); }) ==
          Series::constant(vs, 10));
    auto x = r3.x_from_simple(simple_coords(vs));
    CartanPoint c = {rat(1, 5), rat(1, 7), rat(-12, 35)};
    std::set<std::vector<Rational>> exps;
    for (const auto& w : r3.weyl_subgroup()) exps.insert(bracket_reduce(r3, r3.act(w, c)).point);
    CHECK(exps.size() == 2);
}

TEST_CASE("q map at delta = 0 is the simple coordinate map") {
    for (int n = 2; n <= 4; ++n) {
        RootData rd(n);
        auto vs = simple_vars(n);
        auto y = simple_coords(vs);
        auto x = rd.x_from_simple(y);
        std::vector<Series> delta(n - 2, Series(vs));
        auto b = qmap_B(rd, x, delta);
        for (int j = 0; j < n - 1; ++j) CHECK(b[j] == y[j]);
        // B(0) = 0.
        std::vector<Rational> origin(n - 1, 0);
        for (int j = 0; j < n - 1; ++j) CHECK(evaluate(b[j], origin) == 0);
        CHECK_THROWS_AS(qmap_B(rd, x, std::vector<Series>(n - 1, Series(vs))), DomainError);
    }
}

TEST_CASE("q map against Richardson central differences") {
    std::mt19937_64 rng(17);
    for (int n = 3; n <= 4; ++n) {
        RootData rd(n);
        auto vs = simple_vars(n);
        auto x = rd.x_from_simple(simple_coords(vs));
        std::vector<Rational> dval;
        std::vector<Series> delta;
        for (int r = 3; r <= n; ++r) {
            dval.push_back(rat(static_cast<long>(rng() % 11) - 5, 3));
            delta.push_back(Series::constant(vs, dval.back()));
        }
        auto b = qmap_B(rd, x, delta);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Rational> yp(n - 1);
            for (auto& c : yp) c = rat(static_cast<long>(rng() % 21) - 10, 1 + static_cast<long>(rng() % 4));
            std::vector<Rational> xp(n);
            for (int i = 0; i < n; ++i) xp[i] = evaluate(x[i], yp);
            for (int j = 0; j < n - 1; ++j) {
                auto diff = [&](const Rational& h) -> Rational {
                    auto plus = xp, minus = xp;
                    plus[j] += h, plus[j + 1] -= h;
                    minus[j] -= h, minus[j + 1] += h;
                    return (q_direct(plus, dval) - q_direct(minus, dval)) / (2 * h);
                };
                Rational h = rat(1, 10);
                Rational richardson = (4 * diff(h / 2) - diff(h)) / 3;
                CHECK(evaluate(b[j], yp) == -richardson);
            }
        }
    }
}
