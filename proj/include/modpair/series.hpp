#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modpair/errors.hpp"
#include "modpair/rational.hpp"

namespace modpair {

enum class VarKind { ordinary, laurent, nilpotent };

struct Variable {
    std::string name;
    VarKind kind = VarKind::ordinary;
    // laurent: deepest admissible pole; nilpotent: order k, so x^k = 0.
    int bound = 0;
    // Contribution of one power of this variable to the truncation degree.
    int weight = 1;

    bool operator==(const Variable&) const = default;
};

inline Variable ordinary_var(std::string name, int weight = 1) {
    return {std::move(name), VarKind::ordinary, 0, weight};
}
inline Variable laurent_var(std::string name, int depth, int weight = 1) {
    return {std::move(name), VarKind::laurent, depth, weight};
}
inline Variable nilpotent_var(std::string name, int order, int weight = 0) {
    return {std::move(name), VarKind::nilpotent, order, weight};
}

class VarSet {
public:
    explicit VarSet(std::vector<Variable> vars) : vars_(std::move(vars)) {
        for (size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i].name.empty()) throw DomainError("variable with empty name");
            if (vars_[i].kind == VarKind::nilpotent && vars_[i].bound < 1)
                throw DomainError("nilpotent variable needs order >= 1: " + vars_[i].name);
            if (vars_[i].kind != VarKind::nilpotent && vars_[i].weight < 1)
                throw DomainError("non-nilpotent variable needs positive weight: " + vars_[i].name);
            for (size_t j = 0; j < i; ++j)
                if (vars_[j].name == vars_[i].name)
                    throw DomainError("duplicate variable name: " + vars_[i].name);
        }
    }

    size_t size() const { return vars_.size(); }
    const Variable& operator[](size_t i) const { return vars_[i]; }
    const std::vector<Variable>& vars() const { return vars_; }

    std::optional<size_t> find(std::string_view name) const {
        for (size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].name == name) return i;
        return std::nullopt;
    }
    size_t index(std::string_view name) const {
        auto i = find(name);
        if (!i) throw DomainError("variable not in set: " + std::string(name));
        return *i;
    }

    bool operator==(const VarSet& o) const { return vars_ == o.vars_; }

private:
    std::vector<Variable> vars_;
};

using VarSetPtr = std::shared_ptr<const VarSet>;

inline VarSetPtr make_varset(std::vector<Variable> vars) {
    return std::make_shared<const VarSet>(std::move(vars));
}

using Exponent = std::vector<int>;

// Sparse multivariate Laurent/power series over Q.
//
// The truncation degree of a term is sum(weight_i * e_i). `precision` N means
// every coefficient of degree < N is exact and nothing of degree >= N is
// stored. Precision propagates like p-adic precision:
//   prec(a*b) = min(N_a + v_b, N_b + v_a), v = valuation.
class Series {
public:
    static constexpr long kExact = 1L << 40;

    explicit Series(VarSetPtr vars, long precision = kExact)
        : vars_(std::move(vars)), prec_(clamp(precision)) {
        if (!vars_) throw DomainError("series without a variable set");
    }

    static Series constant(VarSetPtr vars, const Rational& c, long precision = kExact) {
        Series s(std::move(vars), precision);
        s.add_term(Exponent(s.vars_->size(), 0), c);
        return s;
    }
    static Series monomial(VarSetPtr vars, Exponent e, const Rational& c = 1,
                           long precision = kExact) {
        Series s(std::move(vars), precision);
        s.add_term(std::move(e), c);
        return s;
    }
    static Series variable(VarSetPtr vars, std::string_view name, long precision = kExact) {
        Exponent e(vars->size(), 0);
        e[vars->index(name)] = 1;
        return monomial(std::move(vars), std::move(e), 1, precision);
    }

    const VarSetPtr& vars() const { return vars_; }
    long precision() const { return prec_; }
    bool is_exact() const { return prec_ >= kExact; }
    bool is_zero() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }
    const std::map<Exponent, Rational>& terms() const { return terms_; }

    long degree(const Exponent& e) const {
        long d = 0;
        for (size_t i = 0; i < e.size(); ++i) d += static_cast<long>((*vars_)[i].weight) * e[i];
        return d;
    }

    long valuation() const {
        long v = kExact;
        for (const auto& [e, c] : terms_) v = std::min(v, degree(e));
        return v;
    }

    bool has_nilpotent_part(const Exponent& e) const {
        for (size_t i = 0; i < e.size(); ++i)
            if ((*vars_)[i].kind == VarKind::nilpotent && e[i] != 0) return true;
        return false;
    }

    // Adds c * x^e, enforcing nilpotency, pole depth and truncation.
    void add_term(Exponent e, const Rational& c) {
        if (e.size() != vars_->size()) throw DomainError("exponent length mismatch");
        if (c == 0) return;
        for (size_t i = 0; i < e.size(); ++i) {
            const Variable& v = (*vars_)[i];
            switch (v.kind) {
                case VarKind::ordinary:
                    if (e[i] < 0)
                        throw DomainError("negative power of non-Laurent variable " + v.name);
                    break;
                case VarKind::laurent:
                    if (e[i] < -v.bound)
                        throw DomainError("pole in " + v.name + " deeper than declared depth");
                    break;
                case VarKind::nilpotent:
                    if (e[i] < 0) throw DomainError("negative power of nilpotent " + v.name);
                    if (e[i] >= v.bound) return;
                    break;
            }
        }
        if (degree(e) >= prec_) return;
        auto [it, fresh] = terms_.try_emplace(std::move(e), c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Rational coeff(const Exponent& e) const {
        if (e.size() != vars_->size()) throw DomainError("exponent length mismatch");
        for (size_t i = 0; i < e.size(); ++i) {
            const Variable& v = (*vars_)[i];
            if (v.kind == VarKind::nilpotent && e[i] >= v.bound) return 0;
            if (v.kind == VarKind::laurent && e[i] < -v.bound) return 0;
            if (v.kind != VarKind::laurent && e[i] < 0) return 0;
        }
        if (degree(e) >= prec_)
            throw TruncationError("coefficient of degree " + std::to_string(degree(e)) +
                                  " requested from a series known below degree " +
                                  std::to_string(prec_));
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational constant_term() const { return coeff(Exponent(vars_->size(), 0)); }

    Series truncated(long precision) const {
        Series out(vars_, std::min(prec_, clamp(precision)));
        for (const auto& [e, c] : terms_)
            if (degree(e) < out.prec_) out.terms_.emplace(e, c);
        return out;
    }

    Series scaled(const Rational& k) const {
        Series out(vars_, prec_);
        if (k == 0) return out;
        for (const auto& [e, c] : terms_) out.terms_.emplace(e, c * k);
        return out;
    }

    // Multiplication by the exact monomial x^shift.
    Series shifted(const Exponent& shift) const {
        Series out(vars_, add_prec(prec_, degree(shift)));
        for (const auto& [e, c] : terms_) {
            Exponent f = e;
            for (size_t i = 0; i < f.size(); ++i) f[i] += shift[i];
            out.add_term(std::move(f), c);
        }
        return out;
    }

    Series operator-() const { return scaled(-1); }

    friend Series operator+(const Series& a, const Series& b) {
        a.require_same(b);
        Series out(a.vars_, std::min(a.prec_, b.prec_));
        for (const auto& [e, c] : a.terms_) out.add_term(e, c);
        for (const auto& [e, c] : b.terms_) out.add_term(e, c);
        return out;
    }
    friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

    friend Series operator*(const Series& a, const Series& b) {
        a.require_same(b);
        long p = std::min(add_prec(a.prec_, b.valuation()), add_prec(b.prec_, a.valuation()));
        Series out(a.vars_, p);
        for (const auto& [ea, ca] : a.terms_) {
            long da = a.degree(ea);
            for (const auto& [eb, cb] : b.terms_) {
                if (da + a.degree(eb) >= out.prec_) continue;
                Exponent e(ea.size());
                for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                out.add_term(std::move(e), ca * cb);
            }
        }
        return out;
    }

    Series& operator+=(const Series& b) { return *this = *this + b; }
    Series& operator-=(const Series& b) { return *this = *this - b; }
    Series& operator*=(const Series& b) { return *this = *this * b; }

    friend Series operator*(const Rational& k, const Series& a) { return a.scaled(k); }
    friend Series operator*(const Series& a, const Rational& k) { return a.scaled(k); }
    friend Series operator+(const Series& a, const Rational& k) {
        return a + constant(a.vars_, k);
    }
    friend Series operator+(const Rational& k, const Series& a) { return a + k; }
    friend Series operator-(const Series& a, const Rational& k) {
        return a + constant(a.vars_, -k);
    }
    friend Series operator-(const Rational& k, const Series& a) {
        return constant(a.vars_, k) - a;
    }

    // Exact equality of stored terms and precision.
    bool operator==(const Series& o) const {
        return *vars_ == *o.vars_ && prec_ == o.prec_ && terms_ == o.terms_;
    }

    // Agreement on every degree both operands know.
    friend bool equal_below(const Series& a, const Series& b) {
        a.require_same(b);
        long p = std::min(a.prec_, b.prec_);
        return a.truncated(p).terms_ == b.truncated(p).terms_;
    }

    // 1/f. f = c * x^m * (1 + h) with x^m the unique lowest pure monomial;
    // every term of h must have positive degree or be degree 0 and nilpotent.
    // `cap` bounds the absolute precision of the result.
    Series inv(long cap = kExact) const {
        const Exponent* pivot = nullptr;
        long pivot_deg = kExact;
        int ties = 0;
        for (const auto& [e, c] : terms_) {
            if (has_nilpotent_part(e)) continue;
            long d = degree(e);
            if (d < pivot_deg) {
                pivot = &e;
                pivot_deg = d;
                ties = 1;
            } else if (d == pivot_deg) {
                ++ties;
            }
        }
        if (!pivot) throw NonUnitError("series has no pure leading monomial");
        if (ties > 1) throw NonUnitError("leading form is not a monomial; not a Laurent unit");
        Exponent m = *pivot;
        Rational c = terms_.at(m);

        Exponent neg_m(m.size());
        for (size_t i = 0; i < m.size(); ++i) neg_m[i] = -m[i];

        long rel = std::min(add_prec(prec_, -pivot_deg), add_prec(clamp(cap), pivot_deg));
        Series h(vars_, rel);
        try {
            for (const auto& [e, ce] : terms_) {
                if (e == m) continue;
                Exponent f = e;
                for (size_t i = 0; i < f.size(); ++i) f[i] -= m[i];
                h.add_term(std::move(f), ce / c);
            }
        } catch (const DomainError&) {
            throw NonUnitError("leading monomial is not invertible in this variable set");
        }
        bool pure_tail = false;
        for (const auto& [e, ce] : h.terms_) {
            long d = h.degree(e);
            bool nil = h.has_nilpotent_part(e);
            if (d < 0 || (d == 0 && !nil))
                throw NonUnitError("tail term does not raise degree; adjust variable weights");
            if (!nil) pure_tail = true;
        }
        if (pure_tail && h.prec_ >= kExact)
            throw TruncationError("inverse of a non-polynomial unit needs a finite precision");

        Series acc = constant(vars_, 1, h.prec_);
        Series power = acc;
        Series minus_h = -h;
        while (true) {
            power = (power * minus_h).truncated(h.prec_);
            if (power.is_zero()) break;
            acc += power;
        }
        try {
            return acc.shifted(neg_m).scaled(Rational(1) / c);
        } catch (const DomainError&) {
            throw NonUnitError("leading monomial is not invertible in this variable set");
        }
    }

    // exp(f) for f with no pure constant term.
    Series exp(long cap = kExact) const {
        bool pure_part = false;
        for (const auto& [e, c] : terms_) {
            long d = degree(e);
            bool nil = has_nilpotent_part(e);
            if (d < 0 || (d == 0 && !nil))
                throw DomainError("exp needs zero constant term and no poles");
            if (!nil) pure_part = true;
        }
        long p = std::min(prec_, clamp(cap));
        if (pure_part && p >= kExact)
            throw TruncationError("exp of a non-nilpotent series needs a finite precision");
        Series base = truncated(p);
        Series acc = constant(vars_, 1, p);
        Series term = acc;
        for (long k = 1;; ++k) {
            term = (term * base).truncated(p).scaled(Rational(1, k));
            if (term.is_zero()) break;
            acc += term;
        }
        return acc;
    }

    Series pow(long k, long cap = kExact) const {
        if (k < 0) return inv(cap).pow(-k, cap);
        Series out = constant(vars_, 1).truncated(cap);
        Series b = truncated(cap);
        while (k) {
            if (k & 1) out = out * b;
            k >>= 1;
            if (k) b = b * b;
        }
        return out;
    }

    // Coefficient of var^{-1}, as a series in the remaining variables.
    Series residue(std::string_view name) const {
        size_t v = vars_->index(name);
        if ((*vars_)[v].kind != VarKind::laurent)
            throw DomainError("residue in a variable without declared poles: " + std::string(name));
        Series out(vars_, add_prec(prec_, (*vars_)[v].weight));
        for (const auto& [e, c] : terms_) {
            if (e[v] != -1) continue;
            Exponent f = e;
            f[v] = 0;
            out.add_term(std::move(f), c);
        }
        return out;
    }

    Series derivative(std::string_view name) const {
        size_t v = vars_->index(name);
        Series out(vars_, add_prec(prec_, -(*vars_)[v].weight));
        for (const auto& [e, c] : terms_) {
            if (e[v] == 0) continue;
            Exponent f = e;
            f[v] -= 1;
            out.add_term(std::move(f), c * e[v]);
        }
        return out;
    }

    // Substitutes images[i] for variable i. Requires an exact (polynomial) input.
    Series compose(const std::vector<Series>& images, const VarSetPtr& target) const {
        if (!is_exact()) throw DomainError("compose needs an exact polynomial");
        if (images.size() != vars_->size()) throw DomainError("compose: wrong number of images");
        for (const auto& im : images)
            if (!(*im.vars_ == *target)) throw DomainError("compose: image in foreign variable set");
        std::vector<std::map<int, Series>> cache(images.size());
        auto power_of = [&](size_t i, int k) -> const Series& {
            auto it = cache[i].find(k);
            if (it != cache[i].end()) return it->second;
            return cache[i].emplace(k, images[i].pow(k)).first->second;
        };
        Series out(target);
        for (const auto& [e, c] : terms_) {
            Series t = constant(target, c);
            for (size_t i = 0; i < e.size(); ++i)
                if (e[i] != 0) t = t * power_of(i, e[i]);
            out = out + t;
        }
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const Series& s) {
        bool first = true;
        for (const auto& [e, c] : s.terms_) {
            if (!first) os << " + ";
            first = false;
            os << to_string(c);
            for (size_t i = 0; i < e.size(); ++i)
                if (e[i]) os << "*" << (*s.vars_)[i].name << "^" << e[i];
        }
        if (first) os << "0";
        if (!s.is_exact()) os << " + O(deg " << s.prec_ << ")";
        return os;
    }

private:
    static long clamp(long p) { return std::min(p, kExact); }
    static long add_prec(long a, long b) {
        if (a >= kExact || b >= kExact) return kExact;
        return clamp(a + b);
    }
    void require_same(const Series& o) const {
        if (vars_ != o.vars_ && !(*vars_ == *o.vars_))
            throw DomainError("series over different variable sets");
    }

    VarSetPtr vars_;
    std::map<Exponent, Rational> terms_;
    long prec_;
};

}  // namespace modpair
