#ifndef CARTAN_FORMS_HPP
#define CARTAN_FORMS_HPP

#include <bit>
#include <map>
#include <optional>

#include "cartan/contaut.hpp"
#include "cartan/derivation.hpp"

namespace cartan {

/// Exterior-algebra element over O(m;n): a sparse map from strictly
/// increasing axis subsets (stored as bitmasks) to coefficient functions,
/// representing sum f_S dx_{i_1} ^ ... ^ dx_{i_k}. Mixed degrees allowed.
class DifferentialForm {
public:
    DifferentialForm() = default;
    explicit DifferentialForm(ShapePtr shape) : shape_(std::move(shape)) {}

    static DifferentialForm zero(ShapePtr shape) {
        return DifferentialForm(std::move(shape));
    }

    /// f * dx_{axes}, axes 1-based and strictly increasing.
    static DifferentialForm term(const DpaElement& f, const std::vector<u32>& axes) {
        DifferentialForm w(f.shape_ptr());
        u32 mask = 0;
        for (u32 a : axes) {
            require(a >= 1 && a <= f.shape().m, "AxisOutOfRange", "dx axis");
            u32 bit = u32(1) << (a - 1);
            require(!(mask & bit), "BadInput", "repeated axis in wedge");
            mask |= bit;
        }
        w.add_term(mask, f);
        return w;
    }

    static DifferentialForm dx(ShapePtr shape, u32 axis) {
        return term(DpaElement::one(shape), {axis});
    }

    const Shape& shape() const { return *shape_; }
    const ShapePtr& shape_ptr() const { return shape_; }
    const std::map<u32, DpaElement>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    DpaElement coeff(u32 mask) const {
        auto it = terms_.find(mask);
        return it == terms_.end() ? DpaElement::zero(shape_) : it->second;
    }

    void add_term(u32 mask, const DpaElement& f) {
        if (f.is_zero()) return;
        auto [it, inserted] = terms_.emplace(mask, f);
        if (!inserted) {
            it->second += f;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend bool operator==(const DifferentialForm& a, const DifferentialForm& b) {
        check_same_shape(a.shape(), b.shape());
        if (a.terms_.size() != b.terms_.size()) return false;
        auto ia = a.terms_.begin();
        auto ib = b.terms_.begin();
        for (; ia != a.terms_.end(); ++ia, ++ib)
            if (ia->first != ib->first || ia->second != ib->second) return false;
        return true;
    }
    friend bool operator!=(const DifferentialForm& a, const DifferentialForm& b) {
        return !(a == b);
    }

    friend DifferentialForm operator+(const DifferentialForm& a,
                                      const DifferentialForm& b) {
        check_same_shape(a.shape(), b.shape());
        DifferentialForm r = a;
        for (const auto& [mask, f] : b.terms_) r.add_term(mask, f);
        return r;
    }

    friend DifferentialForm operator-(const DifferentialForm& a,
                                      const DifferentialForm& b) {
        check_same_shape(a.shape(), b.shape());
        DifferentialForm r = a;
        for (const auto& [mask, f] : b.terms_) r.add_term(mask, -f);
        return r;
    }

    friend DifferentialForm operator*(const Scalar& c, const DifferentialForm& a) {
        DifferentialForm r(a.shape_);
        for (const auto& [mask, f] : a.terms_) r.add_term(mask, c * f);
        return r;
    }

    friend DifferentialForm operator*(const DpaElement& g,
                                      const DifferentialForm& a) {
        DifferentialForm r(a.shape_);
        for (const auto& [mask, f] : a.terms_) r.add_term(mask, g * f);
        return r;
    }

    DifferentialForm& operator+=(const DifferentialForm& b) {
        return *this = *this + b;
    }
    DifferentialForm& operator-=(const DifferentialForm& b) {
        return *this = *this - b;
    }

private:
    ShapePtr shape_;
    std::map<u32, DpaElement> terms_;
};

namespace detail {

// Sign of dx_S ^ dx_T brought to increasing order: (-1)^{inversions},
// zero overlap must be checked by the caller.
inline int wedge_sign(u32 s_mask, u32 t_mask) {
    int inv = 0;
    for (u32 t = t_mask; t; t &= t - 1) {
        u32 bit = t & (~t + 1);
        inv += std::popcount(s_mask & ~(bit | (bit - 1)));
    }
    return (inv & 1) ? -1 : 1;
}

} // namespace detail

inline DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
    check_same_shape(a.shape(), b.shape());
    DifferentialForm r(a.shape_ptr());
    const FieldCtx& ctx = *a.shape().field;
    for (const auto& [ma, fa] : a.terms()) {
        for (const auto& [mb, fb] : b.terms()) {
            if (ma & mb) continue;
            int sg = detail::wedge_sign(ma, mb);
            DpaElement c = fa * fb;
            if (sg < 0) c = -c;
            (void)ctx;
            r.add_term(ma | mb, c);
        }
    }
    return r;
}

/// d(f dx_S) = sum_i d_i(f) dx_i ^ dx_S.
inline DifferentialForm exterior_d(const DifferentialForm& w) {
    DifferentialForm r(w.shape_ptr());
    const Shape& s = w.shape();
    for (const auto& [mask, f] : w.terms()) {
        for (u32 i = 1; i <= s.m; ++i) {
            u32 bit = u32(1) << (i - 1);
            if (mask & bit) continue;
            DpaElement df = partial(f, i);
            if (df.is_zero()) continue;
            int sg = detail::wedge_sign(bit, mask);
            if (sg < 0) df = -df;
            r.add_term(mask | bit, df);
        }
    }
    return r;
}

inline DifferentialForm d_of(const DpaElement& f) {
    return exterior_d(DifferentialForm::term(f, {}));
}

/// Lie derivative: acts on coefficients through D and on each dx_j through
/// dx_j -> d(D(x_j)); Leibniz over the wedge. This is the action D(omega)
/// of the membership conditions defining S, H, K.
inline DifferentialForm derivation_action(const Derivation& d,
                                          const DifferentialForm& w) {
    check_same_shape(d.shape(), w.shape());
    const Shape& s = w.shape();
    DifferentialForm r(w.shape_ptr());
    // d(D(x_j)) = d(f_j), precomputed per axis
    std::vector<DifferentialForm> df(s.m, DifferentialForm(w.shape_ptr()));
    for (u32 j = 1; j <= s.m; ++j) df[j - 1] = d_of(d.component(j));
    for (const auto& [mask, f] : w.terms()) {
        r.add_term(mask, d(f));
        u32 pos = 0;
        for (u32 j = 1; j <= s.m; ++j) {
            u32 bit = u32(1) << (j - 1);
            if (!(mask & bit)) continue;
            // slot j replaced: dx_S = (-1)^pos dx_j ^ dx_{S\j}
            DifferentialForm rest(w.shape_ptr());
            rest.add_term(mask & ~bit, DpaElement::one(w.shape_ptr()));
            DifferentialForm slot = wedge(df[j - 1], rest);
            if (pos & 1) slot = s.field->from_int(-1) * slot;
            r += f * slot;
            ++pos;
        }
    }
    return r;
}

/// psi(f dx_S) = psi(f) * d(psi x_{i_1}) ^ ... ^ d(psi x_{i_k}).
inline DifferentialForm pullback(const ContAut& psi, const DifferentialForm& w) {
    check_same_shape(psi.shape(), w.shape());
    const Shape& s = w.shape();
    std::vector<DifferentialForm> dy(s.m, DifferentialForm(w.shape_ptr()));
    for (u32 j = 1; j <= s.m; ++j) dy[j - 1] = d_of(psi.image(j));
    DifferentialForm r(w.shape_ptr());
    for (const auto& [mask, f] : w.terms()) {
        DifferentialForm acc =
            DifferentialForm::term(psi.act(f), {});
        for (u32 j = 1; j <= s.m; ++j) {
            if (!(mask & (u32(1) << (j - 1)))) continue;
            acc = wedge(acc, dy[j - 1]);
            if (acc.is_zero()) break;
        }
        r += acc;
    }
    return r;
}

/// The defining forms of Def 2.3. W has none (NoFormForW).
inline DifferentialForm omega(Kind kind, const ShapePtr& shape) {
    const u32 m = shape->m;
    switch (base_kind(kind)) {
        case Kind::W:
            raise("NoFormForW", "the Witt algebra has no defining form");
        case Kind::S: {
            check_kind_shape(Kind::S, m);
            std::vector<u32> all;
            for (u32 i = 1; i <= m; ++i) all.push_back(i);
            return DifferentialForm::term(DpaElement::one(shape), all);
        }
        case Kind::H: {
            check_kind_shape(Kind::H, m);
            const u32 r = m / 2;
            DifferentialForm w(shape);
            for (u32 i = 1; i <= r; ++i)
                w += wedge(DifferentialForm::dx(shape, i),
                           DifferentialForm::dx(shape, i + r));
            return w;
        }
        case Kind::K: {
            check_kind_shape(Kind::K, m);
            const u32 r = (m - 1) / 2;
            DifferentialForm w = DifferentialForm::dx(shape, m);
            for (u32 i = 1; i <= 2 * r; ++i) {
                DpaElement xi = DpaElement::variable(shape, i);
                if (sign_of(i, r) < 0) xi = -xi;
                w += DifferentialForm::term(xi, {paired_index(i, r)});
            }
            return w;
        }
        default: break;
    }
    raise("KindConstraintViolation", "no form for this kind");
}

/// c in F^x with w1 = c * w2, when it exists.
inline std::optional<Scalar> proportionality_scalar(const DifferentialForm& w1,
                                                    const DifferentialForm& w2) {
    check_same_shape(w1.shape(), w2.shape());
    const FieldCtx& ctx = *w1.shape().field;
    if (w2.is_zero()) return w1.is_zero() ? std::optional<Scalar>(ctx.one())
                                          : std::nullopt;
    const auto& [mask, f2] = *w2.terms().begin();
    DpaElement f1 = w1.coeff(mask);
    const auto& [code, c2] = *f2.terms().begin();
    Scalar c = f1.coeff(code) / c2;
    if (c.is_zero()) return std::nullopt;
    if (w1 == c * w2) return c;
    return std::nullopt;
}

/// u in O(m;n)^x with w1 = u * w2, when it exists; solved from the first
/// coefficient of w2 that is a unit (for omega_K that is the dx_m slot,
/// whose coefficient is 1).
inline std::optional<DpaElement> proportionality_unit(const DifferentialForm& w1,
                                                      const DifferentialForm& w2) {
    check_same_shape(w1.shape(), w2.shape());
    if (w2.is_zero())
        return w1.is_zero()
                   ? std::optional<DpaElement>(DpaElement::one(w1.shape_ptr()))
                   : std::nullopt;
    for (const auto& [mask, f2] : w2.terms()) {
        if (!is_unit(f2)) continue;
        DpaElement u = w1.coeff(mask) * invert(f2);
        if (!is_unit(u)) return std::nullopt;
        if (w1 == u * w2) return u;
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace cartan

#endif
