#ifndef CARTAN_LINALG_HPP
#define CARTAN_LINALG_HPP

#include <optional>
#include <vector>

#include "cartan/field.hpp"

namespace cartan {

using Vec = std::vector<Scalar>;
using Mat = std::vector<Vec>;

inline Vec zero_vec(const FieldCtx& ctx, size_t n) { return Vec(n, ctx.zero()); }

inline bool vec_is_zero(const Vec& v) {
    for (const auto& x : v)
        if (!x.is_zero()) return false;
    return true;
}

inline Vec vec_scaled(const Vec& v, const Scalar& c) {
    Vec r = v;
    for (auto& x : r) x *= c;
    return r;
}

inline void vec_axpy(Vec& y, const Scalar& c, const Vec& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

inline Mat identity_mat(const FieldCtx& ctx, size_t n) {
    Mat r(n, zero_vec(ctx, n));
    for (size_t i = 0; i < n; ++i) r[i][i] = ctx.one();
    return r;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
    const FieldCtx& ctx = a.at(0).at(0).ctx();
    Mat r(a.size(), zero_vec(ctx, b[0].size()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t k = 0; k < b.size(); ++k) {
            if (a[i][k].is_zero()) continue;
            vec_axpy(r[i], a[i][k], b[k]);
        }
    return r;
}

inline Vec mat_vec(const Mat& a, const Vec& v) {
    const FieldCtx& ctx = v.at(0).ctx();
    Vec r = zero_vec(ctx, a.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j)
            if (!a[i][j].is_zero() && !v[j].is_zero()) r[i] += a[i][j] * v[j];
    return r;
}

/// In-place reduced row echelon form. Returns the pivot column of each
/// surviving row; zero rows are erased.
inline std::vector<size_t> rref(Mat& m) {
    std::vector<size_t> pivots;
    if (m.empty()) return pivots;
    const size_t cols = m[0].size();
    size_t row = 0;
    for (size_t col = 0; col < cols && row < m.size(); ++col) {
        size_t sel = row;
        while (sel < m.size() && m[sel][col].is_zero()) ++sel;
        if (sel == m.size()) continue;
        std::swap(m[row], m[sel]);
        Scalar inv = m[row][col].inv();
        for (auto& x : m[row]) x *= inv;
        for (size_t i = 0; i < m.size(); ++i) {
            if (i == row || m[i][col].is_zero()) continue;
            Scalar c = m[i][col];
            for (size_t j = col; j < cols; ++j) m[i][j] -= c * m[row][j];
        }
        pivots.push_back(col);
        ++row;
    }
    m.resize(row, Vec{});
    return pivots;
}

inline size_t rank(Mat m) { return rref(m).size(); }

/// Basis of { x : A x = 0 }, where rows of A are equations over the
/// coordinates x_0..x_{n-1}.
inline Mat kernel_basis(Mat a, size_t ncols, const FieldCtx& ctx) {
    std::vector<size_t> pivots = rref(a);
    std::vector<bool> is_pivot(ncols, false);
    for (size_t c : pivots) is_pivot[c] = true;
    Mat basis;
    for (size_t fc = 0; fc < ncols; ++fc) {
        if (is_pivot[fc]) continue;
        Vec v = zero_vec(ctx, ncols);
        v[fc] = ctx.one();
        for (size_t r = 0; r < a.size(); ++r)
            v[pivots[r]] = -a[r][fc];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solve A x = b for square-or-tall A; returns nullopt when inconsistent,
/// an arbitrary solution when underdetermined.
inline std::optional<Vec> solve_linear(Mat a, Vec b) {
    const size_t rows = a.size();
    const size_t cols = rows ? a[0].size() : 0;
    const FieldCtx& ctx = b.at(0).ctx();
    for (size_t i = 0; i < rows; ++i) a[i].push_back(b[i]);
    std::vector<size_t> pivots = rref(a);
    Vec x = zero_vec(ctx, cols);
    for (size_t r = 0; r < a.size(); ++r) {
        if (pivots[r] == cols) return std::nullopt; // pivot in augmented column
        x[pivots[r]] = a[r][cols];
    }
    return x;
}

inline Mat mat_inverse(const Mat& m) {
    const size_t n = m.size();
    const FieldCtx& ctx = m.at(0).at(0).ctx();
    Mat aug = m;
    for (size_t i = 0; i < n; ++i) {
        Vec id = zero_vec(ctx, n);
        id[i] = ctx.one();
        aug[i].insert(aug[i].end(), id.begin(), id.end());
    }
    std::vector<size_t> pivots = rref(aug);
    require(pivots.size() == n && pivots[n - 1] == n - 1, "NotInvertible",
            "matrix is singular");
    Mat r(n);
    for (size_t i = 0; i < n; ++i)
        r[i] = Vec(aug[i].begin() + n, aug[i].end());
    return r;
}

inline Scalar mat_det(Mat m) {
    const size_t n = m.size();
    const FieldCtx& ctx = m.at(0).at(0).ctx();
    Scalar det = ctx.one();
    for (size_t col = 0; col < n; ++col) {
        size_t sel = col;
        while (sel < n && m[sel][col].is_zero()) ++sel;
        if (sel == n) return ctx.zero();
        if (sel != col) {
            std::swap(m[sel], m[col]);
            det = -det;
        }
        det *= m[col][col];
        Scalar inv = m[col][col].inv();
        for (size_t i = col + 1; i < n; ++i) {
            if (m[i][col].is_zero()) continue;
            Scalar c = m[i][col] * inv;
            for (size_t j = col; j < n; ++j) m[i][j] -= c * m[col][j];
        }
    }
    return det;
}

/// Incrementally maintained row space in reduced echelon form, used for
/// span closures, membership tests and coordinate solves.
class SpanBasis {
public:
    SpanBasis(const FieldCtx& ctx, size_t width) : ctx_(&ctx), width_(width) {}

    size_t rank() const { return rows_.size(); }
    size_t width() const { return width_; }
    const Mat& rows() const { return rows_; }

    /// Reduce v against the current rows; the residual is zero iff v is in
    /// the span. When track is non-null it receives the coefficients of the
    /// reduction, i.e. v = sum_i (*track)[i] rows_[i] + residual.
    Vec reduce(Vec v, Vec* track = nullptr) const {
        if (track) *track = zero_vec(*ctx_, rows_.size());
        for (size_t i = 0; i < rows_.size(); ++i) {
            const Scalar& c = v[pivot_[i]];
            if (c.is_zero()) continue;
            if (track) (*track)[i] = c;
            Scalar mc = -c;
            vec_axpy(v, mc, rows_[i]);
        }
        return v;
    }

    bool contains(const Vec& v) const { return vec_is_zero(reduce(v)); }

    /// Insert v; returns true when it enlarges the span.
    bool insert(Vec v) {
        v = reduce(std::move(v));
        size_t p = 0;
        while (p < width_ && v[p].is_zero()) ++p;
        if (p == width_) return false;
        Scalar inv = v[p].inv();
        for (auto& x : v) x *= inv;
        for (size_t i = 0; i < rows_.size(); ++i) {
            if (rows_[i][p].is_zero()) continue;
            Scalar c = -rows_[i][p];
            vec_axpy(rows_[i], c, v);
        }
        rows_.push_back(std::move(v));
        pivot_.push_back(p);
        return true;
    }

    bool same_span(const SpanBasis& other) const {
        if (rank() != other.rank()) return false;
        for (const auto& r : rows_)
            if (!other.contains(r)) return false;
        return true;
    }

private:
    const FieldCtx* ctx_;
    size_t width_;
    Mat rows_;
    std::vector<size_t> pivot_;
};

} // namespace cartan

#endif
