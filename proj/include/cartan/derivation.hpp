#ifndef CARTAN_DERIVATION_HPP
#define CARTAN_DERIVATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "cartan/dpa.hpp"
#include "cartan/linalg.hpp"

namespace cartan {

/// The four Cartan type families and the derived subalgebras that are the
/// simple graded members: S1 = S^(1), H2 = H^(2), K1 = K^(1).
enum class Kind { W, S, S1, H, H2, K, K1 };

inline Kind base_kind(Kind k) {
    switch (k) {
        case Kind::S1: return Kind::S;
        case Kind::H2: return Kind::H;
        case Kind::K1: return Kind::K;
        default: return k;
    }
}

inline u32 derived_depth(Kind k) {
    switch (k) {
        case Kind::S1:
        case Kind::K1: return 1;
        case Kind::H2: return 2;
        default: return 0;
    }
}

inline std::string kind_name(Kind k) {
    switch (k) {
        case Kind::W: return "W";
        case Kind::S: return "S";
        case Kind::S1: return "S1";
        case Kind::H: return "H";
        case Kind::H2: return "H2";
        case Kind::K: return "K";
        case Kind::K1: return "K1";
    }
    return "?";
}

inline Kind kind_from_name(const std::string& s) {
    for (Kind k : {Kind::W, Kind::S, Kind::S1, Kind::H, Kind::H2, Kind::K, Kind::K1})
        if (kind_name(k) == s) return k;
    raise("BadInput", "unknown algebra kind '" + s + "'");
}

/// m = 2r (H family) or m = 2r + 1 (K family).
inline u32 pair_count(Kind k, u32 m) {
    switch (base_kind(k)) {
        case Kind::H: return m / 2;
        case Kind::K: return (m - 1) / 2;
        default: return 0;
    }
}

inline void check_kind_shape(Kind k, u32 m) {
    switch (base_kind(k)) {
        case Kind::S:
            require(m >= 3, "KindConstraintViolation", "S family needs m >= 3");
            break;
        case Kind::H:
            require(m >= 2 && m % 2 == 0, "KindConstraintViolation",
                    "H family needs even m");
            break;
        case Kind::K:
            require(m >= 3 && m % 2 == 1, "KindConstraintViolation",
                    "K family needs odd m >= 3");
            break;
        default: break;
    }
}

/// The index pairing i <-> i' with i' = i +- r, defined for 1 <= i <= 2r.
inline u32 paired_index(u32 i, u32 r) {
    require(i >= 1 && i <= 2 * r, "AxisOutOfRange", "paired index undefined");
    return i <= r ? i + r : i - r;
}

/// sigma(i) = +1 for i <= r, -1 for r < i <= 2r.
inline int sign_of(u32 i, u32 r) {
    require(i >= 1 && i <= 2 * r, "AxisOutOfRange", "sigma undefined");
    return i <= r ? 1 : -1;
}

/// Element of W(m;n): the derivation f_1 d_1 + ... + f_m d_m.
class Derivation {
public:
    Derivation() = default;

    explicit Derivation(ShapePtr shape)
        : shape_(shape), comp_(shape->m, DpaElement(shape)) {}

    Derivation(ShapePtr shape, std::vector<DpaElement> comp)
        : shape_(std::move(shape)), comp_(std::move(comp)) {
        require(comp_.size() == shape_->m, "BadInput",
                "derivation needs one component per variable");
        for (const auto& f : comp_) check_same_shape(f.shape(), *shape_);
    }

    /// c * x^(a) d_i, 1-based axis.
    static Derivation monomial(ShapePtr shape, const MultiIndex& a, u32 i, Scalar c) {
        Derivation d(shape);
        d.comp_[i - 1] = DpaElement::monomial(shape, a, std::move(c));
        return d;
    }

    /// d_i.
    static Derivation partial_derivation(ShapePtr shape, u32 i) {
        MultiIndex a(shape->m, 0);
        return monomial(shape, a, i, shape->field->one());
    }

    const Shape& shape() const { return *shape_; }
    const ShapePtr& shape_ptr() const { return shape_; }
    const FieldCtx& field() const { return *shape_->field; }
    const DpaElement& component(u32 i) const { return comp_.at(i - 1); }
    const std::vector<DpaElement>& components() const { return comp_; }

    void set_component(u32 i, DpaElement f) {
        check_same_shape(f.shape(), *shape_);
        comp_.at(i - 1) = std::move(f);
    }

    bool is_zero() const {
        for (const auto& f : comp_)
            if (!f.is_zero()) return false;
        return true;
    }

    /// Apply to a function: D(f) = sum_i f_i d_i(f).
    DpaElement operator()(const DpaElement& f) const {
        check_same_shape(f.shape(), *shape_);
        DpaElement r(shape_);
        for (u32 i = 1; i <= shape_->m; ++i) {
            if (comp_[i - 1].is_zero()) continue;
            r += comp_[i - 1] * partial(f, i);
        }
        return r;
    }

    friend bool operator==(const Derivation& a, const Derivation& b) {
        check_same_shape(a.shape(), b.shape());
        return a.comp_ == b.comp_;
    }
    friend bool operator!=(const Derivation& a, const Derivation& b) {
        return !(a == b);
    }

    friend Derivation operator+(const Derivation& a, const Derivation& b) {
        check_same_shape(a.shape(), b.shape());
        Derivation r = a;
        for (u32 i = 0; i < r.comp_.size(); ++i) r.comp_[i] += b.comp_[i];
        return r;
    }

    friend Derivation operator-(const Derivation& a, const Derivation& b) {
        check_same_shape(a.shape(), b.shape());
        Derivation r = a;
        for (u32 i = 0; i < r.comp_.size(); ++i) r.comp_[i] -= b.comp_[i];
        return r;
    }

    friend Derivation operator*(const Scalar& c, const Derivation& a) {
        Derivation r = a;
        for (auto& f : r.comp_) f = c * f;
        return r;
    }

    Derivation& operator+=(const Derivation& b) { return *this = *this + b; }
    Derivation& operator-=(const Derivation& b) { return *this = *this - b; }

private:
    ShapePtr shape_;
    std::vector<DpaElement> comp_;
};

/// [D, E] = sum_k (D(g_k) - E(f_k)) d_k for D = sum f_i d_i, E = sum g_j d_j.
inline Derivation bracket(const Derivation& d, const Derivation& e) {
    check_same_shape(d.shape(), e.shape());
    Derivation r(d.shape_ptr());
    for (u32 k = 1; k <= d.shape().m; ++k)
        r.set_component(k, d(e.component(k)) - e(d.component(k)));
    return r;
}

inline DpaElement apply(const Derivation& d, const DpaElement& f) { return d(f); }

/// Canonical Z-degree of x^(a) d_i: |a| - 1 for W/S/H and
/// a_1 + ... + a_{m-1} + 2 a_m - 1 - delta_{i,m} for K.
inline i64 canonical_degree(const MultiIndex& a, u32 i, Kind kind) {
    i64 d = 0;
    for (u32 v : a) d += v;
    if (base_kind(kind) == Kind::K) {
        d += i64(a.back()); // a_m counts twice
        d -= (i == a.size()) ? 2 : 1;
    } else {
        d -= 1;
    }
    return d;
}

/// Canonical Z^m multidegree of x^(a) d_i: a - eps_i.
inline std::vector<i64> canonical_multidegree(const MultiIndex& a, u32 i) {
    std::vector<i64> d(a.begin(), a.end());
    d[i - 1] -= 1;
    return d;
}

/// Multidegree of a Z^m-homogeneous derivation; nullopt when mixed.
inline std::optional<std::vector<i64>> derivation_multidegree(const Derivation& d) {
    std::optional<std::vector<i64>> deg;
    const Shape& s = d.shape();
    for (u32 i = 1; i <= s.m; ++i) {
        for (const auto& [code, c] : d.component(i).terms()) {
            auto md = canonical_multidegree(unpack_index(s, code), i);
            if (!deg)
                deg = md;
            else if (*deg != md)
                return std::nullopt;
        }
    }
    return deg;
}

/// Flat coordinates over the monomial basis {x^(a) d_i}: index
/// (i-1)*dim + code. Used by the linear-algebra layers.
inline u32 flat_index(const Shape& s, u32 axis1, u32 code) {
    return (axis1 - 1) * s.dim + code;
}

inline Vec derivation_to_vec(const Derivation& d) {
    const Shape& s = d.shape();
    Vec v = zero_vec(*s.field, size_t(s.m) * s.dim);
    for (u32 i = 1; i <= s.m; ++i)
        for (const auto& [code, c] : d.component(i).terms())
            v[flat_index(s, i, code)] = c;
    return v;
}

inline Derivation derivation_from_vec(const ShapePtr& sp, const Vec& v) {
    Derivation d(sp);
    const Shape& s = *sp;
    for (u32 i = 1; i <= s.m; ++i) {
        DpaElement f(sp);
        for (u32 code = 0; code < s.dim; ++code) {
            const Scalar& c = v[flat_index(s, i, code)];
            if (!c.is_zero()) f.add_term(code, c);
        }
        d.set_component(i, std::move(f));
    }
    return d;
}

} // namespace cartan

#endif
