/**
 * @file field.hpp
 * @brief Exact arithmetic in prime fields F_p and quadratic extensions F_{p^2}.
 *
 * Residues are stored as 32-bit integers and reduced after every operation.
 * The modulus is restricted to odd primes below 2^16 so that every product of
 * two residues fits in 32 bits.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssp4 {

/// Deterministic trial-division primality test (moduli here are tiny).
constexpr bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

class PrimeField {
   public:
    static constexpr std::uint32_t max_modulus = 1u << 16;

    explicit PrimeField(std::uint32_t p) : p_(p) {
        if (p < 3 || p >= max_modulus || !is_prime(p))
            throw std::invalid_argument("PrimeField: modulus must be an odd prime below 2^16, got " +
                                        std::to_string(p));
    }

    std::uint32_t p() const noexcept { return p_; }
    std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept {
        std::uint32_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept { return a >= b ? a - b : a + p_ - b; }
    std::uint32_t neg(std::uint32_t a) const noexcept { return a == 0 ? 0 : p_ - a; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept { return (a * b) % p_; }
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const noexcept {
        std::uint32_t r = 1 % p_;
        a %= p_;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    std::uint32_t inv(std::uint32_t a) const {
        if (a % p_ == 0) throw std::domain_error("PrimeField: inverse of zero");
        // extended Euclid
        std::int64_t t = 0, nt = 1, r = p_, nr = a % p_;
        while (nr) {
            std::int64_t q = r / nr;
            std::int64_t tmp = t - q * nt;
            t = nt;
            nt = tmp;
            tmp = r - q * nr;
            r = nr;
            nr = tmp;
        }
        return static_cast<std::uint32_t>(t < 0 ? t + p_ : t);
    }
    std::uint32_t reduce(std::int64_t v) const noexcept {
        std::int64_t r = v % static_cast<std::int64_t>(p_);
        return static_cast<std::uint32_t>(r < 0 ? r + p_ : r);
    }
    bool is_square(std::uint32_t a) const noexcept {
        a %= p_;
        return a == 0 || pow(a, (p_ - 1) / 2) == 1;
    }

    friend bool operator==(const PrimeField&, const PrimeField&) = default;

   private:
    std::uint32_t p_;
};

/**
 * An element of F_p that carries its modulus.
 *
 * A default-constructed element is the zero of every prime field; binary
 * operations take the modulus from whichever operand knows it.
 */
class Fp {
   public:
    constexpr Fp() noexcept = default;
    Fp(std::int64_t v, std::uint32_t p) : p_(p) {
        if (p == 0) throw std::invalid_argument("Fp: modulus 0");
        std::int64_t r = v % static_cast<std::int64_t>(p);
        v_ = static_cast<std::uint32_t>(r < 0 ? r + p : r);
    }

    std::uint32_t value() const noexcept { return v_; }
    std::uint32_t modulus() const noexcept { return p_; }
    bool is_zero() const noexcept { return v_ == 0; }
    explicit operator bool() const noexcept { return v_ != 0; }

    Fp operator-() const noexcept { return raw(v_ == 0 ? 0 : p_ - v_, p_); }
    friend Fp operator+(Fp a, Fp b) noexcept {
        std::uint32_t p = a.p_ ? a.p_ : b.p_;
        std::uint32_t s = a.v_ + b.v_;
        return raw(p && s >= p ? s - p : s, p);
    }
    friend Fp operator-(Fp a, Fp b) noexcept { return a + (-b); }
    friend Fp operator*(Fp a, Fp b) noexcept {
        std::uint32_t p = a.p_ ? a.p_ : b.p_;
        return raw(p ? (a.v_ * b.v_) % p : 0, p);
    }
    Fp& operator+=(Fp o) noexcept { return *this = *this + o; }
    Fp& operator-=(Fp o) noexcept { return *this = *this - o; }
    Fp& operator*=(Fp o) noexcept { return *this = *this * o; }
    friend bool operator==(Fp a, Fp b) noexcept { return a.v_ == b.v_; }

    Fp inv() const {
        if (v_ == 0) throw std::domain_error("Fp: inverse of zero");
        return raw(PrimeField(p_).inv(v_), p_);
    }
    Fp pow(std::uint64_t e) const {
        if (p_ == 0) return e == 0 ? Fp() : *this;  // zero without modulus
        return raw(PrimeField(p_).pow(v_, e), p_);
    }

    static Fp raw(std::uint32_t v, std::uint32_t p) noexcept {
        Fp r;
        r.v_ = v;
        r.p_ = p;
        return r;
    }

   private:
    std::uint32_t v_ = 0;
    std::uint32_t p_ = 0;
};

inline bool is_zero(const Fp& a) noexcept { return a.is_zero(); }

/// Multiplicative order of a nonzero residue.
inline std::uint32_t multiplicative_order(const PrimeField& F, std::uint32_t a) {
    if (a % F.p() == 0) throw std::domain_error("multiplicative_order: zero has no order");
    std::uint32_t x = a % F.p(), k = 1;
    while (x != 1) {
        x = F.mul(x, a);
        ++k;
    }
    return k;
}

/// Smallest positive integer generating F_p^×.
inline std::uint32_t primitive_element(std::uint32_t p) {
    PrimeField F(p);
    for (std::uint32_t g = 2; g < p; ++g)
        if (multiplicative_order(F, g) == p - 1) return g;
    throw std::logic_error("primitive_element: no generator found");
}

/// The (p-1)/2 quadratic non-residues, ascending.
inline std::vector<std::uint32_t> nonsquares(std::uint32_t p) {
    PrimeField F(p);
    std::vector<bool> square(p, false);
    for (std::uint32_t a = 1; a < p; ++a) square[F.mul(a, a)] = true;
    std::vector<std::uint32_t> out;
    for (std::uint32_t a = 1; a < p; ++a)
        if (!square[a]) out.push_back(a);
    return out;
}

/// Default non-square: 2 when it is one, otherwise the smallest non-square.
inline std::uint32_t default_nonsquare(std::uint32_t p) {
    PrimeField F(p);
    if (!F.is_square(2)) return 2;
    return nonsquares(p).front();
}

/**
 * F_{p^2} = F_p[t]/(t^2 - eps) for a non-square eps.
 */
class QuadExt {
   public:
    struct Element {
        std::uint32_t re = 0;  ///< constant part
        std::uint32_t im = 0;  ///< coefficient of t
        friend bool operator==(const Element&, const Element&) = default;
    };

    QuadExt(std::uint32_t p, std::uint32_t eps) : F_(p), eps_(eps % p) {
        if (F_.is_square(eps_))
            throw std::invalid_argument("QuadExt: eps must be a quadratic non-residue mod p");
    }
    explicit QuadExt(std::uint32_t p) : QuadExt(p, default_nonsquare(p)) {}

    const PrimeField& base() const noexcept { return F_; }
    std::uint32_t epsilon() const noexcept { return eps_; }
    std::uint64_t order() const noexcept { return std::uint64_t(F_.p()) * F_.p(); }

    Element make(std::uint32_t re, std::uint32_t im = 0) const noexcept { return {re % F_.p(), im % F_.p()}; }
    Element embed(std::uint32_t a) const noexcept { return {a % F_.p(), 0}; }
    /// Enumeration index -> element (re + p*im); inverse of index().
    Element from_index(std::uint64_t i) const noexcept {
        return {static_cast<std::uint32_t>(i % F_.p()), static_cast<std::uint32_t>(i / F_.p())};
    }
    std::uint64_t index(Element a) const noexcept { return a.re + std::uint64_t(F_.p()) * a.im; }

    Element add(Element a, Element b) const noexcept { return {F_.add(a.re, b.re), F_.add(a.im, b.im)}; }
    Element sub(Element a, Element b) const noexcept { return {F_.sub(a.re, b.re), F_.sub(a.im, b.im)}; }
    Element neg(Element a) const noexcept { return {F_.neg(a.re), F_.neg(a.im)}; }
    Element mul(Element a, Element b) const noexcept {
        // (a0 + a1 t)(b0 + b1 t) = a0 b0 + eps a1 b1 + (a0 b1 + a1 b0) t
        return {F_.add(F_.mul(a.re, b.re), F_.mul(eps_, F_.mul(a.im, b.im))),
                F_.add(F_.mul(a.re, b.im), F_.mul(a.im, b.re))};
    }
    /// u^2 - eps v^2 for u + v t.
    std::uint32_t norm(Element a) const noexcept {
        return F_.sub(F_.mul(a.re, a.re), F_.mul(eps_, F_.mul(a.im, a.im)));
    }
    Element inv(Element a) const {
        std::uint32_t n = norm(a);
        if (n == 0) throw std::domain_error("QuadExt: inverse of zero");
        std::uint32_t ni = F_.inv(n);
        return {F_.mul(a.re, ni), F_.mul(F_.neg(a.im), ni)};
    }
    Element pow(Element a, std::uint64_t e) const noexcept {
        Element r{1, 0};
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    bool is_zero(Element a) const noexcept { return a.re == 0 && a.im == 0; }

   private:
    PrimeField F_;
    std::uint32_t eps_;
};

enum class ExtOp { add, mul, inv };

/// Single entry point for the extension-field operations.
inline QuadExt::Element ext_arith(const QuadExt& K, QuadExt::Element a, QuadExt::Element b, ExtOp op) {
    switch (op) {
        case ExtOp::add: return K.add(a, b);
        case ExtOp::mul: return K.mul(a, b);
        case ExtOp::inv: return K.inv(a);
    }
    throw std::invalid_argument("ext_arith: unknown op");
}

/**
 * GF(p^k) for small p^k, elements numbered 0..p^k-1 by their coefficient
 * digits in base p over a primitive modulus.  Multiplication goes through
 * log tables.
 */
class GaloisField {
   public:
    GaloisField(std::uint32_t p, int k) : F_(p), p_(p), k_(k) {
        if (k < 1 || k > 6) throw std::invalid_argument("GaloisField: degree must be in 1..6");
        std::uint64_t n = 1;
        for (int i = 0; i < k; ++i) n *= p;
        if (n > (1u << 22)) throw std::invalid_argument("GaloisField: field too large");
        n_ = static_cast<std::uint32_t>(n);
        std::vector<std::uint32_t> mod(static_cast<std::size_t>(k), 0);
        for (std::uint32_t c = 0; c < n_; ++c) {
            std::uint32_t t = c;
            for (int i = 0; i < k; ++i) {
                mod[static_cast<std::size_t>(i)] = t % p;
                t /= p;
            }
            if (k > 1 && mod[0] == 0) continue;
            if (try_modulus(mod)) return;
        }
        throw std::logic_error("GaloisField: no primitive modulus found");
    }

    std::uint32_t size() const noexcept { return n_; }
    std::uint32_t characteristic() const noexcept { return p_; }
    int degree() const noexcept { return k_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept {
        std::uint32_t r = 0, m = 1;
        for (int i = 0; i < k_; ++i) {
            r += F_.add(a % p_, b % p_) * m;
            a /= p_;
            b /= p_;
            m *= p_;
        }
        return r;
    }
    std::uint32_t neg(std::uint32_t a) const noexcept {
        std::uint32_t r = 0, m = 1;
        for (int i = 0; i < k_; ++i) {
            r += F_.neg(a % p_) * m;
            a /= p_;
            m *= p_;
        }
        return r;
    }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept {
        if (!a || !b) return 0;
        std::uint32_t s = log_[a] + log_[b];
        if (s >= n_ - 1) s -= n_ - 1;
        return exp_[s];
    }
    std::uint32_t inv(std::uint32_t a) const {
        if (!a) throw std::domain_error("GaloisField: inverse of zero");
        return exp_[(n_ - 1 - log_[a]) % (n_ - 1)];
    }
    /// The image of a prime-field residue.
    std::uint32_t embed(std::uint32_t c) const noexcept { return c % p_; }
    /// Generator of the multiplicative group.
    std::uint32_t generator() const noexcept { return exp_[n_ > 2 ? 1 : 0]; }

   private:
    bool try_modulus(const std::vector<std::uint32_t>& mod) {
        // x^k = -(mod[0] + mod[1] x + ... ); x must have order n-1
        std::vector<std::uint32_t> e(n_ - 1), l(n_, 0);
        std::vector<std::uint32_t> cur(static_cast<std::size_t>(k_), 0);
        cur[0] = 1;
        std::vector<bool> seen(n_, false);
        for (std::uint32_t i = 0; i + 1 < n_; ++i) {
            std::uint32_t idx = 0, m = 1;
            for (int j = 0; j < k_; ++j) {
                idx += cur[static_cast<std::size_t>(j)] * m;
                m *= p_;
            }
            if (idx == 0 || seen[idx]) return false;
            seen[idx] = true;
            e[i] = idx;
            l[idx] = i;
            if (k_ == 1) {
                // degree one: use a primitive root of F_p as generator
                cur[0] = F_.mul(cur[0], primitive_element(p_));
                continue;
            }
            std::uint32_t top = cur[static_cast<std::size_t>(k_ - 1)];
            for (int j = k_ - 1; j > 0; --j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)];
            cur[0] = 0;
            for (int j = 0; j < k_; ++j)
                cur[static_cast<std::size_t>(j)] =
                    F_.sub(cur[static_cast<std::size_t>(j)], F_.mul(top, mod[static_cast<std::size_t>(j)]));
        }
        exp_ = std::move(e);
        log_ = std::move(l);
        return true;
    }

    PrimeField F_;
    std::uint32_t p_;
    int k_;
    std::uint32_t n_ = 0;
    std::vector<std::uint32_t> exp_, log_;
};

}  // namespace ssp4
