#ifndef CARTAN_DPA_HPP
#define CARTAN_DPA_HPP

#include <map>
#include <memory>
#include <numeric>
#include <vector>

#include "cartan/field.hpp"

namespace cartan {

/// Shape of O(m;n): the number of variables, the heights n and the
/// multi-index bound tau with tau_i = p^{n_i} - 1. Monomials x^(a) with
/// 0 <= a <= tau are enumerated by a mixed-radix code.
struct Shape {
    FieldPtr field;
    u32 m = 0;
    std::vector<u32> n;
    std::vector<u32> tau;
    std::vector<u32> stride;
    u32 dim = 1; // p^{n_1 + ... + n_m}

    bool matches(const Shape& o) const {
        return field->same_field(*o.field) && n == o.n;
    }
};

using ShapePtr = std::shared_ptr<const Shape>;
using MultiIndex = std::vector<u32>;

inline ShapePtr make_shape(FieldPtr field, const std::vector<u32>& n) {
    require(!n.empty(), "BadShape", "need at least one variable");
    auto s = std::make_shared<Shape>();
    s->field = std::move(field);
    s->m = u32(n.size());
    s->n = n;
    const u32 p = s->field->p();
    u64 dim = 1;
    for (u32 ni : n) {
        require(ni >= 1, "BadShape", "heights n_i must be positive");
        u64 pn = 1;
        for (u32 j = 0; j < ni; ++j) pn *= p;
        s->stride.push_back(u32(dim));
        s->tau.push_back(u32(pn - 1));
        dim *= pn;
        require(dim <= (u64(1) << 31), "BadShape", "shape too large");
    }
    s->dim = u32(dim);
    return s;
}

inline void check_same_shape(const Shape& a, const Shape& b) {
    require(a.matches(b), "ShapeMismatch", "operands have different shapes");
}

inline u32 pack_index(const Shape& s, const MultiIndex& a) {
    require(a.size() == s.m, "BadIndex", "multi-index length mismatch");
    u32 code = 0;
    for (u32 i = 0; i < s.m; ++i) {
        require(a[i] <= s.tau[i], "BadIndex", "multi-index out of bounds");
        code += a[i] * s.stride[i];
    }
    return code;
}

inline MultiIndex unpack_index(const Shape& s, u32 code) {
    MultiIndex a(s.m);
    for (u32 i = 0; i < s.m; ++i) {
        a[i] = (code / s.stride[i]) % (s.tau[i] + 1);
    }
    return a;
}

inline u32 index_total_degree(const Shape& s, u32 code) {
    u32 d = 0;
    for (u32 i = 0; i < s.m; ++i) d += (code / s.stride[i]) % (s.tau[i] + 1);
    return d;
}

/// Element of O(m;n): a sparse scalar-valued map on multi-index codes.
/// Zero coefficients are never stored.
class DpaElement {
public:
    DpaElement() = default;
    explicit DpaElement(ShapePtr shape) : shape_(std::move(shape)) {}

    static DpaElement zero(ShapePtr shape) { return DpaElement(std::move(shape)); }

    static DpaElement one(ShapePtr shape) {
        DpaElement f(std::move(shape));
        f.add_term(0, f.field().one());
        return f;
    }

    static DpaElement monomial(ShapePtr shape, const MultiIndex& a, Scalar c) {
        DpaElement f(shape);
        f.add_term(pack_index(*shape, a), std::move(c));
        return f;
    }

    /// x_i = x^(eps_i), 1-based axis.
    static DpaElement variable(ShapePtr shape, u32 i) {
        require(i >= 1 && i <= shape->m, "AxisOutOfRange", "variable index");
        MultiIndex a(shape->m, 0);
        a[i - 1] = 1;
        return monomial(shape, a, shape->field->one());
    }

    const Shape& shape() const { return *shape_; }
    const ShapePtr& shape_ptr() const { return shape_; }
    const FieldCtx& field() const { return *shape_->field; }
    const std::map<u32, Scalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }

    Scalar coeff(u32 code) const {
        auto it = terms_.find(code);
        return it == terms_.end() ? field().zero() : it->second;
    }
    Scalar coeff(const MultiIndex& a) const { return coeff(pack_index(*shape_, a)); }
    Scalar constant_term() const { return coeff(u32(0)); }

    void add_term(u32 code, const Scalar& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(code, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend bool operator==(const DpaElement& a, const DpaElement& b) {
        check_same_shape(a.shape(), b.shape());
        if (a.terms_.size() != b.terms_.size()) return false;
        auto ia = a.terms_.begin();
        auto ib = b.terms_.begin();
        for (; ia != a.terms_.end(); ++ia, ++ib)
            if (ia->first != ib->first || ia->second != ib->second) return false;
        return true;
    }
    friend bool operator!=(const DpaElement& a, const DpaElement& b) { return !(a == b); }

    friend DpaElement operator+(const DpaElement& a, const DpaElement& b) {
        check_same_shape(a.shape(), b.shape());
        DpaElement r = a;
        for (const auto& [code, c] : b.terms_) r.add_term(code, c);
        return r;
    }

    friend DpaElement operator-(const DpaElement& a, const DpaElement& b) {
        check_same_shape(a.shape(), b.shape());
        DpaElement r = a;
        for (const auto& [code, c] : b.terms_) r.add_term(code, -c);
        return r;
    }

    friend DpaElement operator-(const DpaElement& a) {
        DpaElement r(a.shape_);
        for (const auto& [code, c] : a.terms_) r.terms_.emplace(code, -c);
        return r;
    }

    friend DpaElement operator*(const Scalar& c, const DpaElement& a) {
        DpaElement r(a.shape_);
        if (c.is_zero()) return r;
        for (const auto& [code, v] : a.terms_) r.add_term(code, c * v);
        return r;
    }

    /// Product with the divided-power rule x^(a) x^(b) = C(a+b, a) x^(a+b);
    /// terms leaving the box 0 <= a <= tau are dropped.
    friend DpaElement operator*(const DpaElement& a, const DpaElement& b) {
        check_same_shape(a.shape(), b.shape());
        const Shape& s = a.shape();
        DpaElement r(a.shape_);
        for (const auto& [ca, va] : a.terms_) {
            MultiIndex ia = unpack_index(s, ca);
            for (const auto& [cb, vb] : b.terms_) {
                MultiIndex ib = unpack_index(s, cb);
                u32 binom = 1;
                bool in_range = true;
                for (u32 i = 0; i < s.m; ++i) {
                    if (ia[i] + ib[i] > s.tau[i]) { in_range = false; break; }
                    binom = u32(u64(binom) *
                                binom_mod_p(ia[i] + ib[i], ia[i], s.field->p()) %
                                s.field->p());
                    if (binom == 0) break;
                }
                if (!in_range || binom == 0) continue;
                Scalar c = va * vb * s.field->from_int(i64(binom));
                r.add_term(ca + cb, c);
            }
        }
        return r;
    }

    DpaElement& operator+=(const DpaElement& b) { return *this = *this + b; }
    DpaElement& operator-=(const DpaElement& b) { return *this = *this - b; }

    u32 min_total_degree() const {
        u32 d = ~u32(0);
        for (const auto& [code, c] : terms_)
            d = std::min(d, index_total_degree(*shape_, code));
        return d;
    }

    /// Restriction to the terms of one total degree.
    DpaElement degree_part(u32 d) const {
        DpaElement r(shape_);
        for (const auto& [code, c] : terms_)
            if (index_total_degree(*shape_, code) == d) r.terms_.emplace(code, c);
        return r;
    }

private:
    ShapePtr shape_;
    std::map<u32, Scalar> terms_;
};

/// partial_i(x^(a)) = x^(a - eps_i); 1-based axis.
inline DpaElement partial(const DpaElement& f, u32 i) {
    const Shape& s = f.shape();
    require(i >= 1 && i <= s.m, "AxisOutOfRange",
            "axis " + std::to_string(i) + " out of range");
    const u32 ax = i - 1;
    DpaElement r(f.shape_ptr());
    for (const auto& [code, c] : f.terms()) {
        u32 ai = (code / s.stride[ax]) % (s.tau[ax] + 1);
        if (ai == 0) continue;
        r.add_term(code - s.stride[ax], c);
    }
    return r;
}

namespace detail {

// Coefficient of the divided power of a monomial:
// (x^(a))^(q) = [(qa)! / (q! (a!)^q)] x^(qa), with the integer coefficient
// evaluated mod p through p-adic valuations and unit parts, so there is no
// big-integer arithmetic and no overflow.
inline Scalar monomial_dp_coeff(const Shape& s, const MultiIndex& a, u64 q) {
    const u32 p = s.field->p();
    i64 val = 0;
    u64 unit = 1;
    auto [vq, uq] = factorial_val_unit(q, p);
    // inverse of q! unit
    u64 uq_inv = 1;
    for (u64 e = p - 2, base = uq; e; e >>= 1, base = base * base % p)
        if (e & 1) uq_inv = uq_inv * base % p;
    val -= i64(vq);
    unit = uq_inv;
    for (u32 i = 0; i < s.m; ++i) {
        if (a[i] == 0) continue;
        auto [vqa, uqa] = factorial_val_unit(q * a[i], p);
        auto [va, ua] = factorial_val_unit(a[i], p);
        val += i64(vqa) - i64(q) * i64(va);
        u64 ua_inv = 1;
        for (u64 e = p - 2, base = ua; e; e >>= 1, base = base * base % p)
            if (e & 1) ua_inv = ua_inv * base % p;
        u64 ua_inv_q = 1;
        for (u64 e = q, base = ua_inv; e; e >>= 1, base = base * base % p)
            if (e & 1) ua_inv_q = ua_inv_q * base % p;
        unit = unit * uqa % p * ua_inv_q % p;
    }
    require(val >= 0, "Internal", "divided power coefficient not integral");
    if (val > 0) return s.field->zero();
    return s.field->from_int(i64(unit));
}

// q*a stays inside the monomial box 0 <= . <= tau (monotone in q).
inline bool dp_in_range(const Shape& s, const MultiIndex& a, u64 q) {
    for (u32 i = 0; i < s.m; ++i)
        if (q * a[i] > s.tau[i]) return false;
    return true;
}

// Divided power of a single term c*x^(a); caller has checked the range.
inline DpaElement term_divided_power(const ShapePtr& sp, const MultiIndex& a,
                                     const Scalar& c, u64 q) {
    const Shape& s = *sp;
    if (q == 0) return DpaElement::one(sp);
    MultiIndex qa(s.m);
    for (u32 i = 0; i < s.m; ++i) qa[i] = u32(q * a[i]);
    Scalar coeff = c.pow(q) * monomial_dp_coeff(s, a, q);
    if (coeff.is_zero()) return DpaElement::zero(sp);
    return DpaElement::monomial(sp, qa, coeff);
}

} // namespace detail

/// Table [y^(0), y^(1), ..., y^(max_q)] of divided powers of y, which must
/// have zero constant term. Uses (t + z)^(q) = sum_i t^(i) z^(q-i) over the
/// terms of y, with closed-form divided powers of single terms.
inline std::vector<DpaElement> divided_power_table(const DpaElement& y, u64 max_q) {
    require(y.constant_term().is_zero(), "NonzeroConstantTerm",
            "divided powers need zero constant term");
    const ShapePtr& sp = y.shape_ptr();
    std::vector<DpaElement> table;
    table.reserve(max_q + 1);
    table.push_back(DpaElement::one(sp));
    for (u64 q = 1; q <= max_q; ++q) table.push_back(DpaElement::zero(sp));
    for (const auto& [code, c] : y.terms()) {
        // combine: new[q] = sum_i term^(i) * old[q - i]
        MultiIndex a = unpack_index(*sp, code);
        std::vector<DpaElement> next(table.size(), DpaElement::zero(sp));
        for (u64 i = 0; i <= max_q; ++i) {
            if (i > 0 && !detail::dp_in_range(*sp, a, i)) break; // truncated for good
            DpaElement ti = detail::term_divided_power(sp, a, c, i);
            if (ti.is_zero()) continue; // coefficient divisible by p at this i only
            for (u64 q = i; q <= max_q; ++q) {
                if (table[q - i].is_zero()) continue;
                next[q] += ti * table[q - i];
            }
        }
        table = std::move(next);
    }
    return table;
}

inline DpaElement divided_power(const DpaElement& y, u64 q) {
    return divided_power_table(y, q).back();
}

inline bool is_unit(const DpaElement& f) { return !f.constant_term().is_zero(); }

/// Inverse of a unit, by the finite geometric series of its augmentation
/// part (the ideal of positive-degree elements is nilpotent).
inline DpaElement invert(const DpaElement& f) {
    require(is_unit(f), "NotAUnit", "constant term is zero");
    const ShapePtr& sp = f.shape_ptr();
    Scalar c = f.constant_term();
    Scalar cinv = c.inv();
    DpaElement u = DpaElement::one(sp) - cinv * f; // zero constant term
    DpaElement acc = DpaElement::one(sp);
    DpaElement power = DpaElement::one(sp);
    while (true) {
        power = power * u;
        if (power.is_zero()) break;
        acc += power;
    }
    return cinv * acc;
}

} // namespace cartan

#endif
