#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "modpair/errors.hpp"
#include "modpair/rational.hpp"
#include "modpair/series.hpp"

namespace modpair {

// Ordered odd generators plus the Berezin normalization: the product of the
// generators in `top_order` integrates to `orientation`.
struct GeneratorBasis {
    std::vector<std::string> names;
    std::vector<int> top_order;
    int orientation = 1;

    GeneratorBasis(std::vector<std::string> n, std::vector<int> top, int orient = 1)
        : names(std::move(n)), top_order(std::move(top)), orientation(orient) {
        if (names.size() > 63) throw DomainError("at most 63 odd generators");
        if (orientation != 1 && orientation != -1) throw DomainError("orientation must be +1 or -1");
        if (top_order.size() != names.size())
            throw DomainError("top monomial must use every generator once");
        std::vector<bool> seen(names.size(), false);
        for (int i : top_order) {
            if (i < 0 || i >= static_cast<int>(names.size()) || seen[i])
                throw DomainError("top monomial must use every generator once");
            seen[i] = true;
        }
        for (size_t i = 0; i < names.size(); ++i)
            for (size_t j = 0; j < i; ++j)
                if (names[i] == names[j]) throw DomainError("duplicate generator " + names[i]);
    }

    int size() const { return static_cast<int>(names.size()); }
    uint64_t full_mask() const { return names.empty() ? 0 : (~0ULL >> (64 - names.size())); }

    // Sign s with (ascending product) = s * (product in top_order).
    int top_sign() const {
        int inv = 0;
        for (size_t i = 0; i < top_order.size(); ++i)
            for (size_t j = i + 1; j < top_order.size(); ++j)
                if (top_order[i] > top_order[j]) ++inv;
        return (inv & 1) ? -1 : 1;
    }

    bool operator==(const GeneratorBasis& o) const {
        return names == o.names && top_order == o.top_order && orientation == o.orientation;
    }
};

using BasisPtr = std::shared_ptr<const GeneratorBasis>;

// Sign of m_a * m_b rewritten in ascending order; 0 when they share a generator.
inline int koszul_sign(uint64_t a, uint64_t b) {
    if (a & b) return 0;
    int swaps = 0;
    for (uint64_t rest = b; rest; rest &= rest - 1) {
        int j = std::countr_zero(rest);
        swaps += std::popcount(j == 63 ? 0ULL : (a >> (j + 1)));
    }
    return (swaps & 1) ? -1 : 1;
}

inline bool coeff_is_zero(const Rational& c) { return c == 0; }
inline bool coeff_is_zero(const Series& c) { return c.is_zero(); }

// Element of Lambda(generators) (x) C, keyed by ascending generator subsets.
template <class C>
class Grassmann {
public:
    explicit Grassmann(BasisPtr basis, C zero = C()) : basis_(std::move(basis)), zero_(std::move(zero)) {
        if (!basis_) throw DomainError("grassmann element without basis");
    }

    static Grassmann scalar(BasisPtr basis, const C& c, C zero = C()) {
        Grassmann g(std::move(basis), std::move(zero));
        g.add(0, c);
        return g;
    }
    static Grassmann generator(BasisPtr basis, int i, C zero = C()) {
        Grassmann g(std::move(basis), std::move(zero));
        if (i < 0 || i >= g.basis_->size()) throw DomainError("generator index out of range");
        g.add(1ULL << i, g.zero_ + 1);
        return g;
    }
    // The ordered product of the listed generators.
    static Grassmann monomial(BasisPtr basis, const std::vector<int>& gens, C zero = C()) {
        Grassmann out = scalar(basis, zero + 1, zero);
        for (int i : gens) out = out * generator(basis, i, zero);
        return out;
    }

    const BasisPtr& basis() const { return basis_; }
    const std::map<uint64_t, C>& terms() const { return terms_; }
    const C& zero() const { return zero_; }
    bool is_zero() const { return terms_.empty(); }

    void add(uint64_t mask, const C& c) {
        if (mask & ~basis_->full_mask()) throw DomainError("monomial outside basis");
        if (coeff_is_zero(c)) return;
        auto it = terms_.find(mask);
        if (it == terms_.end()) {
            terms_.emplace(mask, c);
        } else {
            it->second = it->second + c;
            if (coeff_is_zero(it->second)) terms_.erase(it);
        }
    }

    C coeff(uint64_t mask) const {
        auto it = terms_.find(mask);
        return it == terms_.end() ? zero_ : it->second;
    }
    C body() const { return coeff(0); }

    // 0 even, 1 odd, -1 mixed; the zero element counts as even.
    int parity() const {
        int p = -2;
        for (const auto& [m, c] : terms_) {
            int q = std::popcount(m) & 1;
            if (p == -2) p = q;
            else if (p != q) return -1;
        }
        return p == -2 ? 0 : p;
    }

    Grassmann component(int degree) const {
        Grassmann out(basis_, zero_);
        for (const auto& [m, c] : terms_)
            if (std::popcount(m) == degree) out.terms_.emplace(m, c);
        return out;
    }
    int max_degree() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, std::popcount(m));
        return d;
    }

    Grassmann operator-() const {
        Grassmann out(basis_, zero_);
        for (const auto& [m, c] : terms_) out.terms_.emplace(m, zero_ - c);
        return out;
    }
    friend Grassmann operator+(const Grassmann& a, const Grassmann& b) {
        a.require_same(b);
        Grassmann out = a;
        for (const auto& [m, c] : b.terms_) out.add(m, c);
        return out;
    }
    friend Grassmann operator-(const Grassmann& a, const Grassmann& b) { return a + (-b); }

    friend Grassmann operator*(const Grassmann& a, const Grassmann& b) {
        a.require_same(b);
        Grassmann out(a.basis_, a.zero_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                int s = koszul_sign(ma, mb);
                if (s == 0) continue;
                C prod = ca * cb;
                out.add(ma | mb, s > 0 ? prod : out.zero_ - prod);
            }
        return out;
    }
    Grassmann& operator+=(const Grassmann& b) { return *this = *this + b; }
    Grassmann& operator*=(const Grassmann& b) { return *this = *this * b; }
    Grassmann& operator-=(const Grassmann& b) { return *this = *this - b; }

    Grassmann scaled(const C& k) const {
        Grassmann out(basis_, zero_);
        for (const auto& [m, c] : terms_) out.add(m, c * k);
        return out;
    }
    Grassmann scaled_by(const Rational& k) const {
        Grassmann out(basis_, zero_);
        for (const auto& [m, c] : terms_) out.add(m, c * k);
        return out;
    }

    Grassmann pow(int k) const {
        if (k < 0) throw DomainError("negative power in exterior algebra");
        Grassmann out = scalar(basis_, zero_ + 1, zero_);
        for (int i = 0; i < k; ++i) out = out * *this;
        return out;
    }

    // Sum a^k/k!. The body must vanish (Rational) or be exponentiable (Series).
    Grassmann exp_even() const {
        if (parity() != 0) throw DomainError("exp_even needs an even element");
        C b = body();
        Grassmann soul = *this;
        soul.terms_.erase(0);
        Grassmann acc = scalar(basis_, zero_ + 1, zero_);
        Grassmann term = acc;
        for (int k = 1; !soul.is_zero(); ++k) {
            term = (term * soul).scaled_by(Rational(1, k));
            if (term.is_zero()) break;
            acc += term;
        }
        if (!coeff_is_zero(b)) acc = acc.scaled(exp_body(b));
        return acc;
    }

    // Coefficient of the top monomial, under the basis normalization.
    C berezin() const {
        C top = coeff(basis_->full_mask());
        int s = basis_->top_sign() * basis_->orientation;
        return s > 0 ? top : zero_ - top;
    }

    // Algebra map sending generator i to images[i] (odd elements of `target`).
    Grassmann substitute(const BasisPtr& target, const std::vector<Grassmann>& images) const {
        if (static_cast<int>(images.size()) != basis_->size())
            throw DomainError("substitute: one image per generator required");
        Grassmann out(target, zero_);
        for (const auto& [m, c] : terms_) {
            Grassmann t = scalar(target, c, zero_);
            for (uint64_t rest = m; rest; rest &= rest - 1) t = t * images[std::countr_zero(rest)];
            out += t;
        }
        return out;
    }

    template <class F>
    Grassmann map_coefficients(F&& f) const {
        Grassmann out(basis_, f(zero_));
        for (const auto& [m, c] : terms_) out.add(m, f(c));
        return out;
    }

    bool operator==(const Grassmann& o) const {
        if (!(*basis_ == *o.basis_) || terms_.size() != o.terms_.size()) return false;
        for (const auto& [m, c] : terms_) {
            auto it = o.terms_.find(m);
            if (it == o.terms_.end() || !(it->second == c)) return false;
        }
        return true;
    }

private:
    static C exp_body(const C& b) {
        if constexpr (std::is_same_v<C, Series>) {
            return b.exp();
        } else {
            throw DomainError("exp_even: nonzero rational body");
        }
    }
    void require_same(const Grassmann& o) const {
        if (basis_ != o.basis_ && !(*basis_ == *o.basis_))
            throw DomainError("grassmann elements over different bases");
    }

    BasisPtr basis_;
    C zero_;
    std::map<uint64_t, C> terms_;
};

using GrassmannQ = Grassmann<Rational>;

// H^*(Jac): generators d^1..d^{2g}; top monomial prod_j d^j d^{j+g}.
inline BasisPtr jacobian_basis(int g, const std::string& stem = "d") {
    if (g < 1) throw DomainError("genus must be >= 1");
    std::vector<std::string> names;
    for (int i = 1; i <= 2 * g; ++i) names.push_back(stem + "^" + std::to_string(i));
    std::vector<int> top;
    for (int j = 0; j < g; ++j) {
        top.push_back(j);
        top.push_back(j + g);
    }
    return std::make_shared<const GeneratorBasis>(std::move(names), std::move(top), 1);
}

// H^*(Jac x Jac): d_1^i at index i-1, d_2^i at index 2g+i-1. The product
// prod_j d_1^j d_1^{j+g} d_2^j d_2^{j+g} integrates to pair_orientation^g.
inline BasisPtr jacobian_pair_basis(int g, int pair_orientation) {
    if (g < 1) throw DomainError("genus must be >= 1");
    std::vector<std::string> names;
    for (int r = 1; r <= 2; ++r)
        for (int i = 1; i <= 2 * g; ++i)
            names.push_back("d" + std::to_string(r) + "^" + std::to_string(i));
    std::vector<int> top;
    for (int j = 0; j < g; ++j) {
        top.push_back(j);
        top.push_back(j + g);
        top.push_back(2 * g + j);
        top.push_back(2 * g + j + g);
    }
    int orient = (g % 2 == 1) ? pair_orientation : 1;
    return std::make_shared<const GeneratorBasis>(std::move(names), std::move(top), orient);
}

inline int pair_generator(int g, int copy, int i) { return (copy - 1) * 2 * g + (i - 1); }

template <class C = Rational>
Grassmann<C> symplectic_pairing(const BasisPtr& b, int g, int first_offset, int second_offset,
                                C zero = C()) {
    Grassmann<C> out(b, zero);
    for (int j = 0; j < g; ++j)
        out += Grassmann<C>::monomial(b, {first_offset + j, second_offset + j + g}, zero);
    return out;
}

// gamma = sum_j d^j d^{j+g} on the Jacobian basis.
template <class C = Rational>
Grassmann<C> gamma_class(const BasisPtr& jac, int g, C zero = C()) {
    return symplectic_pairing<C>(jac, g, 0, 0, zero);
}

template <class C = Rational>
Grassmann<C> gamma_1(const BasisPtr& pair, int g, C zero = C()) {
    return symplectic_pairing<C>(pair, g, 0, 0, zero);
}
template <class C = Rational>
Grassmann<C> gamma_2(const BasisPtr& pair, int g, C zero = C()) {
    return symplectic_pairing<C>(pair, g, 2 * g, 2 * g, zero);
}
// gamma_12 = sum_j (d_1^j d_2^{j+g} + d_2^j d_1^{j+g}).
template <class C = Rational>
Grassmann<C> gamma_12(const BasisPtr& pair, int g, C zero = C()) {
    return symplectic_pairing<C>(pair, g, 0, 2 * g, zero) +
           symplectic_pairing<C>(pair, g, 2 * g, 0, zero);
}
template <class C = Rational>
Grassmann<C> gamma_hat(const BasisPtr& pair, int g, C zero = C()) {
    return gamma_1<C>(pair, g, zero) + gamma_2<C>(pair, g, zero) + gamma_12<C>(pair, g, zero);
}

// Restriction H^*(Jac x Jac) -> H^*(Jac) along the diagonal: d_1^i, d_2^i -> d^i.
template <class C = Rational>
Grassmann<C> restrict_to_diagonal(const Grassmann<C>& x, int g, const BasisPtr& jac) {
    std::vector<Grassmann<C>> images;
    for (int r = 0; r < 2; ++r)
        for (int i = 0; i < 2 * g; ++i) images.push_back(Grassmann<C>::generator(jac, i, x.zero()));
    return x.substitute(jac, images);
}

// Closed-form value of the integral over Jac x Jac of (-gamma_12)^n gamma_hat^{2g-n}.
inline Rational gamma_moment(int g, int n) {
    if (g < 1) throw DomainError("genus must be >= 1");
    if (n < 0 || n > 2 * g) throw DomainError("gamma_moment exponent out of range [0, 2g]");
    Rational sum = 0;
    for (int k = 0; 2 * k <= 2 * g - n; ++k) {
        Rational term = Rational(factorial(2 * g - 2 * k) * factorial(2 * g - n) * factorial(g)) /
                        Rational(factorial(2 * g - 2 * k - n) * factorial(k) * factorial(g - k));
        sum += sign_pow(k) * term;
    }
    return sign_pow(n) * sum;
}

// The same integral by exterior-algebra expansion and Berezin integration.
inline Rational gamma_moment_berezin(int g, int n, int pair_orientation) {
    if (n < 0 || n > 2 * g) throw DomainError("gamma_moment exponent out of range [0, 2g]");
    auto b = jacobian_pair_basis(g, pair_orientation);
    GrassmannQ x = (-gamma_12(b, g)).pow(n) * gamma_hat(b, g).pow(2 * g - n);
    return x.berezin();
}

// Per-pair orientation making the Berezin route agree with the closed form:
// fixed by the genus-1 run, where the two differ by at most a sign.
inline int calibrate_pair_orientation() {
    Rational closed = gamma_moment(1, 1);
    Rational raw = gamma_moment_berezin(1, 1, 1);
    if (raw == 0) throw DomainError("calibration run is degenerate");
    if (closed == raw) return 1;
    if (closed == -raw) return -1;
    throw DomainError("closed form and Berezin differ by more than a sign");
}

constexpr int kPairOrientation = -1;

}  // namespace modpair
