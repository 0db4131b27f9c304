#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "modpair/errors.hpp"
#include "modpair/rational.hpp"
#include "modpair/series.hpp"

namespace modpair {

// Diagonal Cartan element in the e_1..e_n coordinates.
using CartanPoint = std::vector<Rational>;
using Permutation = std::vector<int>;

inline int permutation_sign(const Permutation& p) {
    int inv = 0;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inv;
    return (inv & 1) ? -1 : 1;
}

// Root data of SU(n): positive roots X_i - X_j (i < j), the Weyl group S_n,
// and the copy of S_{n-1} permuting the first n-1 coordinates.
class RootData {
public:
    explicit RootData(int n) : n_(n) {
        if (n < 2) throw DomainError("root data needs n >= 2");
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) roots_.emplace_back(i, j);
        Permutation p(n);
        std::iota(p.begin(), p.end(), 0);
        do {
            weyl_.push_back(p);
            if (p[n - 1] == n - 1) sub_.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
    }

    int n() const { return n_; }
    int n_plus() const { return n_ * (n_ - 1) / 2; }
    const std::vector<std::pair<int, int>>& positive_roots() const { return roots_; }
    const std::vector<Permutation>& weyl_group() const { return weyl_; }
    const std::vector<Permutation>& weyl_subgroup() const { return sub_; }

    // (w v)_{w(i)} = v_i.
    CartanPoint act(const Permutation& w, const CartanPoint& v) const {
        check(v);
        CartanPoint out(n_);
        for (int i = 0; i < n_; ++i) out[w[i]] = v[i];
        return out;
    }
    template <class T>
    std::vector<T> act_on(const Permutation& w, const std::vector<T>& v) const {
        std::vector<T> out(v);
        for (int i = 0; i < n_; ++i) out[w[i]] = v[i];
        return out;
    }

    Rational inner(const CartanPoint& a, const CartanPoint& b) const {
        check(a);
        check(b);
        Rational s = 0;
        for (int i = 0; i < n_; ++i) s += a[i] * b[i];
        return s;
    }

    // X_i = sum_{j >= i} Y_j - (1/n) sum_j j Y_j, so X_i - X_{i+1} = Y_i and sum X_i = 0.
    std::vector<Series> x_from_simple(const std::vector<Series>& y) const {
        if (static_cast<int>(y.size()) != n_ - 1) throw DomainError("need n-1 simple coordinates");
        Series weighted = y[0].scaled(0);
        for (int j = 0; j < n_ - 1; ++j) weighted += y[j].scaled(j + 1);
        weighted = weighted.scaled(Rational(1, n_));
        std::vector<Series> x;
        for (int i = 0; i < n_; ++i) {
            Series xi = -weighted;
            for (int j = i; j < n_ - 1; ++j) xi += y[j];
            x.push_back(std::move(xi));
        }
        return x;
    }

    // Product of the positive roots evaluated on x.
    Series discriminant(const std::vector<Series>& x) const {
        if (static_cast<int>(x.size()) != n_) throw DomainError("need n coordinates");
        Series d = Series::constant(x[0].vars(), 1);
        for (auto [i, j] : roots_) d = d * (x[i] - x[j]);
        return d;
    }

    // <v, X> as a series in whatever x is expressed in.
    Series pair_with(const CartanPoint& v, const std::vector<Series>& x) const {
        check(v);
        Series s(x[0].vars());
        for (int i = 0; i < n_; ++i) s += x[i].scaled(v[i]);
        return s;
    }

    // Coordinates of a traceless v in the simple coroot basis e_j - e_{j+1}.
    std::vector<Rational> coroot_coordinates(const CartanPoint& v) const {
        check(v);
        Rational trace = 0;
        for (const auto& c : v) trace += c;
        if (trace != 0) throw DomainError("Cartan point is not traceless");
        std::vector<Rational> t(n_ - 1);
        Rational run = 0;
        for (int j = 0; j < n_ - 1; ++j) {
            run += v[j];
            t[j] = run;
        }
        return t;
    }
    CartanPoint from_coroot_coordinates(const std::vector<Rational>& t) const {
        if (static_cast<int>(t.size()) != n_ - 1) throw DomainError("need n-1 coroot coordinates");
        CartanPoint v(n_);
        Rational prev = 0;
        for (int j = 0; j < n_ - 1; ++j) {
            v[j] = t[j] - prev;
            prev = t[j];
        }
        v[n_ - 1] = -prev;
        return v;
    }

private:
    void check(const CartanPoint& v) const {
        if (static_cast<int>(v.size()) != n_) throw DomainError("Cartan point has wrong length");
    }

    int n_;
    std::vector<std::pair<int, int>> roots_;
    std::vector<Permutation> weyl_;
    std::vector<Permutation> sub_;
};

struct BracketResult {
    CartanPoint point;
    // Some coroot coordinate is an integer: the point sits on a wall of the domain.
    bool boundary = false;
};

// [[v]]: the lattice translate of v with every coroot coordinate in [0, 1).
inline BracketResult bracket_reduce(const RootData& rd, const CartanPoint& v) {
    auto t = rd.coroot_coordinates(v);
    BracketResult out;
    for (auto& c : t) {
        c -= Rational(floor_of(c));
        if (c == 0) out.boundary = true;
    }
    out.point = rd.from_coroot_coordinates(t);
    return out;
}

// Lift of the central element diag(e^{2 pi i d/n}) placed in the fundamental domain.
inline BracketResult central_lift(const RootData& rd, long d) {
    int n = rd.n();
    CartanPoint v(n, Rational(d, n));
    v[n - 1] -= d;
    for (auto& c : v) c.canonicalize();
    return bracket_reduce(rd, v);
}

// A small regular perturbation: lambda times the sum of the fundamental
// coweights, i.e. every coroot coordinate equal to lambda.
inline CartanPoint coweight_perturbation(const RootData& rd, const Rational& lambda) {
    return rd.from_coroot_coordinates(std::vector<Rational>(rd.n() - 1, lambda));
}

// Exponent point [[w(c0 + xi)]] - w xi: a lattice translate of w c0 whose
// choice is fixed by the chamber of xi.
inline BracketResult shifted_representative(const RootData& rd, const Permutation& w,
                                            const CartanPoint& c0, const CartanPoint& xi) {
    CartanPoint c(c0.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = c0[i] + xi[i];
    auto wc = rd.act(w, c);
    auto br = bracket_reduce(rd, wc);
    auto wxi = rd.act(w, xi);
    for (size_t i = 0; i < c.size(); ++i) br.point[i] -= wxi[i];
    return br;
}

template <class F>
Series weyl_sum(const RootData& rd, const VarSetPtr& vars, F&& term) {
    Series acc(vars);
    for (const auto& w : rd.weyl_subgroup()) acc += term(w);
    return acc;
}

// Elementary symmetric polynomials e_0..e_k of the given entries.
inline std::vector<Series> elementary_symmetric(const std::vector<Series>& xs, int k, const VarSetPtr& vars) {
    std::vector<Series> e(k + 1, Series(vars));
    e[0] = Series::constant(vars, 1);
    for (const auto& x : xs)
        for (int r = k; r >= 1; --r) e[r] = e[r] + e[r - 1] * x;
    return e;
}

// Gradient of q = tau_2 + sum_{r=3}^n delta_r tau_r at x, using
// d tau_r / d x_i = e_{r-1}(x without x_i). delta[r-3] stands for delta_r.
inline std::vector<Series> q_gradient(const RootData& rd, const std::vector<Series>& x,
                                      const std::vector<Series>& delta) {
    int n = rd.n();
    if (static_cast<int>(x.size()) != n) throw DomainError("q gradient needs n coordinates");
    if (static_cast<int>(delta.size()) != n - 2)
        throw DomainError("q must carry exactly n-2 parameters delta_3..delta_n");
    const VarSetPtr& vars = x[0].vars();
    std::vector<Series> grad;
    for (int i = 0; i < n; ++i) {
        std::vector<Series> rest;
        for (int k = 0; k < n; ++k)
            if (k != i) rest.push_back(x[k]);
        auto e = elementary_symmetric(rest, n - 1, vars);
        Series gi = e[1];
        for (int r = 3; r <= n; ++r) gi += delta[r - 3] * e[r - 1];
        grad.push_back(std::move(gi));
    }
    return grad;
}

// B(X)_j = -(dq)_X(e_j - e_{j+1}).
inline std::vector<Series> qmap_B(const RootData& rd, const std::vector<Series>& x,
                                  const std::vector<Series>& delta) {
    auto grad = q_gradient(rd, x, delta);
    std::vector<Series> b;
    for (int j = 0; j + 1 < rd.n(); ++j) b.push_back(grad[j + 1] - grad[j]);
    return b;
}

// Moment exponent sum_i (dq)_X(e_i) * p_i at the fixed point p
// (with p = -[[w c]] this is <[[w c]], X> when q = tau_2).
inline Series moment_exponent(const RootData& rd, const std::vector<Series>& x,
                              const std::vector<Series>& delta, const CartanPoint& p) {
    auto grad = q_gradient(rd, x, delta);
    Series s(x[0].vars());
    for (int i = 0; i < rd.n(); ++i) s += grad[i].scaled(p[i]);
    return s;
}

}  // namespace modpair
