#ifndef CARTAN_CONTAUT_HPP
#define CARTAN_CONTAUT_HPP

#include <optional>
#include <vector>

#include "cartan/derivation.hpp"
#include "cartan/dpa.hpp"
#include "cartan/linalg.hpp"

namespace cartan {

/// Def 3.1 membership conditions for a tuple (y_1, ..., y_m): zero constant
/// terms, the flag vanishing alpha_i(p^l eps_j) = 0 whenever n_i + l > n_j,
/// and an invertible Jacobian det(d_i y_j).
inline bool tuple_flag_ok(const Shape& s, const std::vector<DpaElement>& y,
                          std::string* why = nullptr) {
    const u32 p = s.field->p();
    for (u32 i = 1; i <= s.m; ++i) {
        for (u32 j = 1; j <= s.m; ++j) {
            u64 pl = 1;
            for (u32 l = 0; pl <= s.tau[j - 1]; ++l, pl *= p) {
                if (s.n[i - 1] + l <= s.n[j - 1]) continue;
                MultiIndex a(s.m, 0);
                a[j - 1] = u32(pl);
                if (!y[i - 1].coeff(a).is_zero()) {
                    if (why)
                        *why = "coefficient of x^(p^" + std::to_string(l) +
                               " eps_" + std::to_string(j) + ") in y_" +
                               std::to_string(i) + " must vanish";
                    return false;
                }
            }
        }
    }
    return true;
}

/// Matrix of linear parts: column i holds the x_j-coefficients of y_i.
inline Mat tuple_linear_part(const Shape& s, const std::vector<DpaElement>& y) {
    Mat b(s.m, zero_vec(*s.field, s.m));
    for (u32 i = 1; i <= s.m; ++i) {
        for (u32 j = 1; j <= s.m; ++j) {
            MultiIndex e(s.m, 0);
            e[j - 1] = 1;
            b[j - 1][i - 1] = y[i - 1].coeff(e);
        }
    }
    return b;
}

/// Continuous automorphism of O(m;n), stored as the admissible tuple
/// (y_1, ..., y_m) with y_i = psi(x_i). Divided-power tables of the y_i are
/// precomputed so that acting on elements is a table of sparse products.
class ContAut {
public:
    ContAut() = default;

    /// Validates the Def 3.1 conditions.
    static ContAut make(ShapePtr shape, std::vector<DpaElement> y) {
        require(y.size() == shape->m, "BadInput", "tuple length mismatch");
        for (auto& f : y) check_same_shape(f.shape(), *shape);
        for (u32 i = 0; i < shape->m; ++i)
            require(y[i].constant_term().is_zero(), "NotAnAutomorphism",
                    "y_" + std::to_string(i + 1) + " has a constant term");
        std::string why;
        require(tuple_flag_ok(*shape, y, &why), "FlagViolation", why);
        Mat lin = tuple_linear_part(*shape, y);
        require(!mat_det(lin).is_zero(), "NotAnAutomorphism",
                "Jacobian determinant is not a unit");
        return ContAut(std::move(shape), std::move(y));
    }

    static ContAut identity(ShapePtr shape) {
        std::vector<DpaElement> y;
        for (u32 i = 1; i <= shape->m; ++i)
            y.push_back(DpaElement::variable(shape, i));
        return make(std::move(shape), std::move(y));
    }

    /// lambda(t): x_i -> t_i x_i.
    static ContAut diagonal(ShapePtr shape, const std::vector<Scalar>& t) {
        require(t.size() == shape->m, "BadInput", "need one scalar per variable");
        std::vector<DpaElement> y;
        for (u32 i = 1; i <= shape->m; ++i) {
            require(!t[i - 1].is_zero(), "NotAnAutomorphism", "t_i must be nonzero");
            y.push_back(t[i - 1] * DpaElement::variable(shape, i));
        }
        return make(std::move(shape), std::move(y));
    }

    /// Linear automorphism from the matrix b: x_i -> sum_j b[j][i] x_j.
    static ContAut linear(ShapePtr shape, const Mat& b) {
        std::vector<DpaElement> y;
        for (u32 i = 1; i <= shape->m; ++i) {
            DpaElement f(shape);
            for (u32 j = 1; j <= shape->m; ++j)
                f += b[j - 1][i - 1] * DpaElement::variable(shape, j);
            y.push_back(std::move(f));
        }
        return make(std::move(shape), std::move(y));
    }

    /// Monomial automorphism x_i -> c_i x_{img[i-1]}, 1-based images.
    static ContAut monomial_aut(ShapePtr shape, const std::vector<u32>& img,
                                const std::vector<Scalar>& c) {
        std::vector<DpaElement> y;
        for (u32 i = 1; i <= shape->m; ++i)
            y.push_back(c[i - 1] * DpaElement::variable(shape, img[i - 1]));
        return make(std::move(shape), std::move(y));
    }

    const Shape& shape() const { return *shape_; }
    const ShapePtr& shape_ptr() const { return shape_; }
    const FieldCtx& field() const { return *shape_->field; }
    const std::vector<DpaElement>& tuple() const { return y_; }
    const DpaElement& image(u32 i) const { return y_.at(i - 1); }

    friend bool operator==(const ContAut& a, const ContAut& b) {
        return a.y_ == b.y_;
    }
    friend bool operator!=(const ContAut& a, const ContAut& b) { return !(a == b); }

    bool is_identity() const {
        for (u32 i = 1; i <= shape_->m; ++i)
            if (y_[i - 1] != DpaElement::variable(shape_, i)) return false;
        return true;
    }

    bool is_diagonal() const {
        for (u32 i = 1; i <= shape_->m; ++i) {
            const auto& f = y_[i - 1];
            if (f.term_count() != 1) return false;
            MultiIndex e(shape_->m, 0);
            e[i - 1] = 1;
            if (f.terms().begin()->first != pack_index(*shape_, e)) return false;
        }
        return true;
    }

    std::vector<Scalar> diagonal_entries() const {
        require(is_diagonal(), "BadInput", "automorphism is not diagonal");
        std::vector<Scalar> t;
        for (u32 i = 1; i <= shape_->m; ++i)
            t.push_back(y_[i - 1].terms().begin()->second);
        return t;
    }

    bool is_linear() const {
        for (const auto& f : y_)
            for (const auto& [code, c] : f.terms())
                if (index_total_degree(*shape_, code) != 1) return false;
        return true;
    }

    Mat linear_part() const { return tuple_linear_part(*shape_, y_); }

    /// psi(x^(a)) = prod_i y_i^(a_i), extended linearly.
    DpaElement act(const DpaElement& f) const {
        check_same_shape(f.shape(), *shape_);
        const Shape& s = *shape_;
        DpaElement r(shape_);
        for (const auto& [code, c] : f.terms()) {
            MultiIndex a = unpack_index(s, code);
            DpaElement prod = DpaElement::one(shape_);
            bool dead = false;
            for (u32 i = 0; i < s.m && !dead; ++i) {
                if (a[i] == 0) continue;
                prod = prod * power_table(i)[a[i]];
                dead = prod.is_zero();
            }
            if (!dead) r += c * prod;
        }
        return r;
    }

    friend ContAut compose(const ContAut& psi, const ContAut& phi) {
        check_same_shape(psi.shape(), phi.shape());
        std::vector<DpaElement> z;
        for (u32 i = 1; i <= psi.shape().m; ++i) z.push_back(psi.act(phi.image(i)));
        return ContAut::make(psi.shape_ptr(), std::move(z));
    }

    /// Inverse tuple, solving psi(w_i) = x_i degree by degree: the linear
    /// part acts invertibly on each total-degree slice and the correction
    /// terms only raise the degree.
    ContAut inverse() const {
        const Shape& s = *shape_;
        if (is_linear())
            return linear(shape_, mat_inverse(linear_part()));
        ContAut lin = linear(shape_, linear_part());
        // monomial codes per total degree
        u32 maxdeg = 0;
        for (u32 i = 0; i < s.m; ++i) maxdeg += s.tau[i];
        std::vector<std::vector<u32>> slice(maxdeg + 1);
        for (u32 code = 1; code < s.dim; ++code)
            slice[index_total_degree(s, code)].push_back(code);

        std::vector<DpaElement> w;
        std::vector<std::optional<Mat>> slice_inv(maxdeg + 1);
        for (u32 i = 1; i <= s.m; ++i) {
            DpaElement target = DpaElement::variable(shape_, i);
            DpaElement sol(shape_);
            DpaElement residual = target;
            for (u32 d = 1; d <= maxdeg && !residual.is_zero(); ++d) {
                DpaElement rd = residual.degree_part(d);
                if (rd.is_zero()) continue;
                const auto& codes = slice[d];
                if (!slice_inv[d]) {
                    // matrix of the linear-part action on the degree-d slice
                    Mat md(codes.size(), zero_vec(*s.field, codes.size()));
                    for (size_t col = 0; col < codes.size(); ++col) {
                        DpaElement img = lin.act(
                            DpaElement::monomial(shape_, unpack_index(s, codes[col]),
                                                 s.field->one()));
                        for (size_t row = 0; row < codes.size(); ++row)
                            md[row][col] = img.coeff(codes[row]);
                    }
                    slice_inv[d] = mat_inverse(md);
                }
                Vec rhs = zero_vec(*s.field, codes.size());
                for (size_t row = 0; row < codes.size(); ++row)
                    rhs[row] = rd.coeff(codes[row]);
                Vec x = mat_vec(*slice_inv[d], rhs);
                DpaElement v(shape_);
                for (size_t col = 0; col < codes.size(); ++col)
                    v.add_term(codes[col], x[col]);
                sol += v;
                residual -= act(v);
            }
            require(residual.is_zero(), "Internal", "inverse solve did not close");
            w.push_back(std::move(sol));
        }
        return make(shape_, std::move(w));
    }

private:
    ContAut(ShapePtr shape, std::vector<DpaElement> y)
        : shape_(std::move(shape)), y_(std::move(y)) {
        tables_.resize(shape_->m);
    }

    const std::vector<DpaElement>& power_table(u32 axis0) const {
        auto& t = tables_[axis0];
        if (t.empty()) t = divided_power_table(y_[axis0], shape_->tau[axis0]);
        return t;
    }

    ShapePtr shape_;
    std::vector<DpaElement> y_;
    mutable std::vector<std::vector<DpaElement>> tables_;
};

/// Phi(psi) D = psi o D o psi^{-1}, as a derivation tuple. Precomputes the
/// inverse once; use for repeated conjugation by the same automorphism.
class AutConjugator {
public:
    explicit AutConjugator(ContAut psi)
        : psi_(std::move(psi)), inv_(psi_.inverse()) {}

    AutConjugator(ContAut psi, ContAut inv)
        : psi_(std::move(psi)), inv_(std::move(inv)) {}

    const ContAut& aut() const { return psi_; }
    const ContAut& inverse_aut() const { return inv_; }

    Derivation operator()(const Derivation& d) const {
        check_same_shape(d.shape(), psi_.shape());
        Derivation r(d.shape_ptr());
        for (u32 k = 1; k <= d.shape().m; ++k)
            r.set_component(k, psi_.act(d(inv_.image(k))));
        return r;
    }

private:
    ContAut psi_;
    ContAut inv_;
};

inline Derivation phi_conjugate(const ContAut& psi, const Derivation& d) {
    return AutConjugator(psi)(d);
}

/// Lift to an extension field: coefficients embed through the prime field.
inline DpaElement lift_element(const ShapePtr& ext_shape, const DpaElement& f) {
    DpaElement r(ext_shape);
    for (const auto& [code, c] : f.terms())
        r.add_term(code, lift_scalar(*ext_shape->field, c));
    return r;
}

inline Derivation lift_derivation(const ShapePtr& ext_shape, const Derivation& d) {
    Derivation r(ext_shape);
    for (u32 i = 1; i <= d.shape().m; ++i)
        r.set_component(i, lift_element(ext_shape, d.component(i)));
    return r;
}

inline ContAut lift_automorphism(const ShapePtr& ext_shape, const ContAut& psi) {
    std::vector<DpaElement> y;
    for (u32 i = 1; i <= psi.shape().m; ++i)
        y.push_back(lift_element(ext_shape, psi.image(i)));
    return ContAut::make(ext_shape, std::move(y));
}

} // namespace cartan

#endif
