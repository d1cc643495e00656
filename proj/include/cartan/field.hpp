#ifndef CARTAN_FIELD_HPP
#define CARTAN_FIELD_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "cartan/error.hpp"

namespace cartan {

using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

/// Extension degrees are capped so scalars stay small POD values.
inline constexpr u32 kMaxExtensionDegree = 8;

class Scalar;

namespace detail {

inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<u64> prime_factors(u64 n) {
    std::vector<u64> out;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// Dense polynomials over F_p, coefficients c[0] + c[1] x + ..., used only
// for modulus construction and irreducibility testing.
using Poly = std::vector<u16>;

inline void poly_trim(Poly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& mod, u32 p) {
    std::vector<u64> acc(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j)
            acc[i + j] = (acc[i + j] + u64(a[i]) * b[j]) % p;
    }
    // reduce by monic mod
    const size_t k = mod.size() - 1;
    for (size_t i = acc.size(); i-- > k;) {
        if (!acc[i]) continue;
        u64 c = acc[i];
        acc[i] = 0;
        for (size_t j = 0; j < k; ++j)
            acc[i - k + j] = (acc[i - k + j] + c * (p - mod[j] % p)) % p;
    }
    Poly r(k);
    for (size_t i = 0; i < k; ++i) r[i] = u16(acc[i]);
    poly_trim(r);
    return r;
}

inline Poly poly_powmod_xq(u64 q, const Poly& mod, u32 p) {
    // x^q mod (mod), by square and multiply
    Poly base{0, 1};
    Poly result{1};
    while (q) {
        if (q & 1) result = poly_mulmod(result, base, mod, p);
        base = poly_mulmod(base, base, mod, p);
        q >>= 1;
    }
    return result;
}

inline Poly poly_mod(Poly a, const Poly& b, u32 p) {
    poly_trim(a);
    if (b.empty()) raise("Internal", "poly_mod by zero");
    // b need not be monic: scale by inverse of leading coefficient
    u64 lead = b.back();
    u64 lead_inv = 1;
    for (u64 e = p - 2, base = lead; e; e >>= 1, base = base * base % p)
        if (e & 1) lead_inv = lead_inv * base % p;
    while (a.size() >= b.size()) {
        u64 c = u64(a.back()) * lead_inv % p;
        size_t shift = a.size() - b.size();
        for (size_t j = 0; j < b.size(); ++j)
            a[shift + j] = u16((a[shift + j] + c * (p - b[j] % p)) % p);
        poly_trim(a);
        if (a.empty()) break;
    }
    return a;
}

inline Poly poly_gcd(Poly a, Poly b, u32 p) {
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
        Poly r = poly_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// f monic of degree k is irreducible iff x^{p^k} = x (mod f) and
// gcd(x^{p^{k/q}} - x, f) = 1 for every prime q | k.
inline bool poly_irreducible(const Poly& f, u32 p) {
    const size_t k = f.size() - 1;
    u64 pk = 1;
    for (size_t i = 0; i < k; ++i) pk *= p;
    Poly xq = poly_powmod_xq(pk, f, p);
    // xq must equal x
    Poly x{0, 1};
    if (xq != x) return false;
    for (u64 q : prime_factors(k)) {
        u64 pd = 1;
        for (size_t i = 0; i < k / q; ++i) pd *= p;
        Poly g = poly_powmod_xq(pd, f, p);
        // g - x
        if (g.size() < 2) g.resize(2, 0);
        g[1] = u16((g[1] + p - 1) % p);
        poly_trim(g);
        Poly d = poly_gcd(f, g, p);
        if (d.size() != 1) return false;
    }
    return true;
}

} // namespace detail

/// Exact arithmetic context for F_{p^k}: an odd prime p, an extension
/// degree k and a monic irreducible modulus of degree k over F_p.
/// Scalars reference their context; contexts are immutable after
/// construction and must outlive the scalars built from them.
class FieldCtx {
public:
    /// Prime field F_p.
    explicit FieldCtx(u32 p) : FieldCtx(p, 1, {}) {}

    /// F_{p^k}. If modulus is empty an irreducible one is found by seeded
    /// random search (deterministic for fixed (p, k, seed)).
    FieldCtx(u32 p, u32 k, std::vector<u16> modulus, u64 seed = 0)
        : p_(p), k_(k) {
        require(p > 2 && detail::is_prime_u64(p), "BadCharacteristic",
                "p must be an odd prime, got " + std::to_string(p));
        require(k >= 1 && k <= kMaxExtensionDegree, "FieldDegreeTooLarge",
                "extension degree " + std::to_string(k) + " out of range");
        order_ = 1;
        for (u32 i = 0; i < k; ++i) order_ *= p;
        if (k_ == 1) {
            modulus_ = {0, 1}; // unused
        } else if (!modulus.empty()) {
            require(modulus.size() == k + 1 && modulus.back() == 1,
                    "BadModulus", "modulus must be monic of degree k");
            for (auto& c : modulus) c = u16(c % p);
            require(detail::poly_irreducible(modulus, p), "BadModulus",
                    "modulus is not irreducible");
            modulus_ = std::move(modulus);
        } else {
            modulus_ = find_irreducible(p, k, seed);
        }
        find_generator();
    }

    FieldCtx(const FieldCtx&) = delete;
    FieldCtx& operator=(const FieldCtx&) = delete;

    u32 p() const noexcept { return p_; }
    u32 k() const noexcept { return k_; }
    u64 order() const noexcept { return order_; }
    const std::vector<u16>& modulus() const noexcept { return modulus_; }

    bool same_field(const FieldCtx& o) const noexcept {
        return p_ == o.p_ && k_ == o.k_ && modulus_ == o.modulus_;
    }

    Scalar zero() const;
    Scalar one() const;
    Scalar from_int(i64 v) const;
    Scalar from_coeffs(const std::vector<u16>& c) const;
    /// Element with coefficient vector decoded from an index in [0, p^k).
    Scalar element(u64 index) const;
    /// Generator of the multiplicative group F_{p^k}^*.
    Scalar generator() const;

private:
    static std::vector<u16> find_irreducible(u32 p, u32 k, u64 seed) {
        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + p * 1000003ULL + k);
        std::uniform_int_distribution<u32> coef(0, p - 1);
        detail::Poly f(k + 1);
        for (int tries = 0; tries < 20000; ++tries) {
            for (u32 i = 0; i < k; ++i) f[i] = u16(coef(rng));
            f[k] = 1;
            if (f[0] == 0) f[0] = 1; // constant term 0 is never irreducible (k>1)
            if (detail::poly_irreducible(f, p)) return f;
        }
        raise("BadModulus", "irreducible search failed");
    }

    void find_generator();

    u32 p_;
    u32 k_;
    u64 order_;
    std::vector<u16> modulus_;
    std::array<u16, kMaxExtensionDegree> gen_{};
};

using FieldPtr = std::shared_ptr<const FieldCtx>;

inline FieldPtr make_field(u32 p, u32 k = 1, u64 seed = 0) {
    return k == 1 ? std::make_shared<const FieldCtx>(p)
                  : std::make_shared<const FieldCtx>(p, k, std::vector<u16>{}, seed);
}

/// Element of F_{p^k}: coefficient vector of length k over F_p, reduced
/// modulo the context's irreducible polynomial.
class Scalar {
public:
    Scalar() : ctx_(nullptr) { c_.fill(0); }

    Scalar(const FieldCtx* ctx, std::array<u16, kMaxExtensionDegree> c)
        : ctx_(ctx), c_(c) {}

    const FieldCtx& ctx() const {
        require(ctx_ != nullptr, "Internal", "use of uninitialized scalar");
        return *ctx_;
    }
    const FieldCtx* ctx_ptr() const noexcept { return ctx_; }

    bool is_zero() const {
        for (u32 i = 0; i < ctx().k(); ++i)
            if (c_[i]) return false;
        return true;
    }
    bool is_one() const {
        if (c_[0] != 1) return false;
        for (u32 i = 1; i < ctx().k(); ++i)
            if (c_[i]) return false;
        return true;
    }

    u16 coeff(u32 i) const { return c_[i]; }
    std::vector<u16> coeffs() const {
        return std::vector<u16>(c_.begin(), c_.begin() + ctx().k());
    }

    /// Index of the coefficient vector in base p; inverse of FieldCtx::element.
    u64 index() const {
        u64 r = 0;
        for (u32 i = ctx().k(); i-- > 0;) r = r * ctx().p() + c_[i];
        return r;
    }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        a.check_ctx(b);
        return a.c_ == b.c_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        a.check_ctx(b);
        const u32 p = a.ctx().p();
        std::array<u16, kMaxExtensionDegree> r{};
        for (u32 i = 0; i < a.ctx().k(); ++i) {
            u32 s = u32(a.c_[i]) + b.c_[i];
            r[i] = u16(s >= p ? s - p : s);
        }
        return Scalar(a.ctx_, r);
    }

    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        a.check_ctx(b);
        const u32 p = a.ctx().p();
        std::array<u16, kMaxExtensionDegree> r{};
        for (u32 i = 0; i < a.ctx().k(); ++i) {
            u32 s = u32(a.c_[i]) + p - b.c_[i];
            r[i] = u16(s >= p ? s - p : s);
        }
        return Scalar(a.ctx_, r);
    }

    friend Scalar operator-(const Scalar& a) { return a.ctx().zero() - a; }

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        a.check_ctx(b);
        const u32 p = a.ctx().p();
        const u32 k = a.ctx().k();
        if (k == 1) {
            std::array<u16, kMaxExtensionDegree> r{};
            r[0] = u16(u64(a.c_[0]) * b.c_[0] % p);
            return Scalar(a.ctx_, r);
        }
        std::array<u64, 2 * kMaxExtensionDegree> acc{};
        for (u32 i = 0; i < k; ++i) {
            if (!a.c_[i]) continue;
            for (u32 j = 0; j < k; ++j)
                acc[i + j] += u64(a.c_[i]) * b.c_[j];
        }
        const auto& m = a.ctx().modulus();
        for (u32 i = 2 * k - 1; i >= k; --i) {
            u64 c = acc[i] % p;
            if (c)
                for (u32 j = 0; j < k; ++j)
                    acc[i - k + j] += c * (p - m[j]);
            acc[i] = 0;
            if (i == k) break;
        }
        std::array<u16, kMaxExtensionDegree> r{};
        for (u32 i = 0; i < k; ++i) r[i] = u16(acc[i] % p);
        return Scalar(a.ctx_, r);
    }

    Scalar pow(u64 e) const {
        Scalar base = *this;
        Scalar r = ctx().one();
        while (e) {
            if (e & 1) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

    Scalar inv() const {
        require(!is_zero(), "DivisionByZero", "inverse of zero");
        return pow(ctx().order() - 2);
    }

    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inv(); }

    Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
    Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
    Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

    /// Multiplicative order of a nonzero element.
    u64 mult_order() const {
        require(!is_zero(), "DivisionByZero", "order of zero");
        u64 e = ctx().order() - 1;
        for (u64 q : detail::prime_factors(e))
            while (e % q == 0 && pow(e / q).is_one()) e /= q;
        return e;
    }

private:
    void check_ctx(const Scalar& o) const {
        require(ctx_ != nullptr && o.ctx_ != nullptr, "Internal",
                "use of uninitialized scalar");
        if (ctx_ == o.ctx_) return;
        require(ctx_->same_field(*o.ctx_), "ContextMismatch",
                "scalars from different field contexts");
    }

    friend class FieldCtx;
    const FieldCtx* ctx_;
    std::array<u16, kMaxExtensionDegree> c_;
};

inline Scalar FieldCtx::zero() const { return Scalar(this, {}); }

inline Scalar FieldCtx::one() const {
    std::array<u16, kMaxExtensionDegree> c{};
    c[0] = 1;
    return Scalar(this, c);
}

inline Scalar FieldCtx::from_int(i64 v) const {
    std::array<u16, kMaxExtensionDegree> c{};
    i64 r = v % i64(p_);
    if (r < 0) r += p_;
    c[0] = u16(r);
    return Scalar(this, c);
}

inline Scalar FieldCtx::from_coeffs(const std::vector<u16>& in) const {
    require(in.size() <= k_, "BadInput", "coefficient vector longer than degree");
    std::array<u16, kMaxExtensionDegree> c{};
    for (size_t i = 0; i < in.size(); ++i) c[i] = u16(in[i] % p_);
    return Scalar(this, c);
}

inline Scalar FieldCtx::element(u64 index) const {
    std::array<u16, kMaxExtensionDegree> c{};
    for (u32 i = 0; i < k_ && index; ++i) {
        c[i] = u16(index % p_);
        index /= p_;
    }
    return Scalar(this, c);
}

inline Scalar FieldCtx::generator() const { return Scalar(this, gen_); }

inline void FieldCtx::find_generator() {
    const u64 n = order_ - 1;
    auto qs = detail::prime_factors(n);
    for (u64 idx = 1; idx < order_; ++idx) {
        Scalar g = element(idx);
        if (g.is_zero()) continue;
        bool ok = true;
        for (u64 q : qs)
            if (g.pow(n / q).is_one()) { ok = false; break; }
        if (ok) {
            for (u32 i = 0; i < k_; ++i) gen_[i] = g.coeff(i);
            return;
        }
    }
    raise("Internal", "no generator found");
}

/// C(a, b) mod p by Lucas' theorem on base-p digits.
inline u32 binom_mod_p(u64 a, u64 b, u32 p) {
    if (b > a) return 0;
    u64 r = 1;
    while (b > 0 || a > 0) {
        u64 ad = a % p, bd = b % p;
        if (bd > ad) return 0;
        // C(ad, bd) mod p with ad, bd < p
        u64 num = 1, den = 1;
        for (u64 i = 1; i <= bd; ++i) {
            num = num * ((ad + 1 - i) % p) % p;
            den = den * (i % p) % p;
        }
        u64 den_inv = 1;
        for (u64 e = p - 2, base = den; e; e >>= 1, base = base * base % p)
            if (e & 1) den_inv = den_inv * base % p;
        r = r * num % p * den_inv % p;
        a /= p;
        b /= p;
        if (r == 0) return 0;
    }
    return u32(r);
}

inline Scalar binom_scalar(const FieldCtx& ctx, u64 a, u64 b) {
    return ctx.from_int(i64(binom_mod_p(a, b, ctx.p())));
}

/// p-adic valuation and unit part of n!: n! = p^val * unit with p not
/// dividing unit; unit returned mod p (Legendre + Wilson recursion).
inline std::pair<u64, u32> factorial_val_unit(u64 n, u32 p) {
    u64 val = 0;
    u64 unit = 1;
    while (n > 1) {
        u64 q = n / p, r = n % p;
        val += q;
        u64 block = 1;
        for (u64 i = 2; i <= r; ++i) block = block * i % p;
        unit = unit * block % p;
        if (q & 1) unit = unit * (p - 1) % p; // Wilson sign for each full block
        n = q;
    }
    return {val, u32(unit)};
}

/// Smallest k with e | p^k - 1 (the multiplicative order of p modulo e).
inline u32 minimal_extension_degree(u32 p, u64 e) {
    require(e >= 1 && e % p != 0, "OrderUnavailable",
            "order not coprime to characteristic");
    if (e == 1) return 1;
    u64 pk = 1;
    for (u32 k = 1; k <= 64; ++k) {
        pk = pk * p % e;
        if (pk == 1) return k;
    }
    raise("OrderUnavailable", "no extension degree found");
}

/// Element of multiplicative order exactly e. Requires e | p^k - 1;
/// otherwise OrderUnavailable signals that the caller must enlarge k.
inline Scalar root_of_unity(const FieldCtx& ctx, u64 e) {
    require(e >= 1, "BadInput", "order must be positive");
    require(std::gcd(e, u64(ctx.p())) == 1, "OrderUnavailable",
            "order divisible by the characteristic");
    const u64 n = ctx.order() - 1;
    require(n % e == 0, "OrderUnavailable",
            std::to_string(e) + " does not divide p^k - 1 = " + std::to_string(n));
    return ctx.generator().pow(n / e);
}

/// Discrete log of x in the cyclic group generated by zeta (order e),
/// by direct scan; group orders here are small.
inline u64 dlog_in_cycle(const Scalar& zeta, u64 e, const Scalar& x) {
    Scalar cur = zeta.ctx().one();
    for (u64 i = 0; i < e; ++i) {
        if (cur == x) return i;
        cur = cur * zeta;
    }
    raise("BadInput", "element not in the cyclic subgroup");
}

/// Square root in F_{p^k} via the generator's discrete log; requires the
/// argument to be a square (guaranteed when 2*ord(x) | p^k - 1).
inline Scalar sqrt_scalar(const Scalar& x) {
    require(!x.is_zero(), "BadInput", "sqrt of zero");
    const u64 n = x.ctx().order() - 1;
    Scalar g = x.ctx().generator();
    u64 d = dlog_in_cycle(g, n, x);
    require(d % 2 == 0, "OrderUnavailable", "element is not a square; enlarge k");
    return g.pow(d / 2);
}

/// Embed an F_p scalar into an extension F_{p^k} (prime subfield map).
inline Scalar lift_scalar(const FieldCtx& ext, const Scalar& a) {
    require(a.ctx().k() == 1, "ContextMismatch",
            "can only lift from the prime field");
    require(ext.p() == a.ctx().p(), "ContextMismatch",
            "lift across different characteristics");
    return ext.from_int(i64(a.coeff(0)));
}

} // namespace cartan

#endif
