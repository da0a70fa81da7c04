/**
 * @file monomial.hpp
 * @brief Packed exponent vectors and the graded reverse lexicographic order.
 *
 * An exponent vector for up to 23 variables is packed into three 64-bit words,
 * one byte per variable (variable i in byte i) and the total degree in the top
 * byte.  Exponents and total degree stay below 128, which lets divisibility be
 * tested on whole words at once.
 */
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ssp4 {

class Monomial {
   public:
    static constexpr int max_vars = 23;
    static constexpr int max_degree = 127;

    constexpr Monomial() noexcept = default;

    /// Build from an explicit exponent list (length at most max_vars).
    static Monomial from_exponents(const std::vector<int>& e) {
        if (e.size() > static_cast<std::size_t>(max_vars)) throw std::invalid_argument("Monomial: too many variables");
        Monomial m;
        int deg = 0;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] < 0) throw std::invalid_argument("Monomial: negative exponent");
            deg += e[i];
            if (deg > max_degree) throw std::overflow_error("Monomial: total degree exceeds 127");
            m.set_byte(static_cast<int>(i), static_cast<std::uint64_t>(e[i]));
        }
        m.set_byte(23, static_cast<std::uint64_t>(deg));
        return m;
    }
    static Monomial variable(int i, int power = 1) {
        std::vector<int> e(static_cast<std::size_t>(i) + 1, 0);
        e[static_cast<std::size_t>(i)] = power;
        return from_exponents(e);
    }

    int degree() const noexcept { return static_cast<int>(w_[2] >> 56); }
    int operator[](int i) const noexcept { return static_cast<int>((w_[i >> 3] >> ((i & 7) * 8)) & 0xff); }
    std::vector<int> exponents(int nvars) const {
        std::vector<int> e(static_cast<std::size_t>(nvars));
        for (int i = 0; i < nvars; ++i) e[static_cast<std::size_t>(i)] = (*this)[i];
        return e;
    }
    bool is_one() const noexcept { return degree() == 0; }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        if (a.degree() + b.degree() > max_degree) throw std::overflow_error("Monomial: total degree exceeds 127");
        Monomial r;
        for (int k = 0; k < 3; ++k) r.w_[k] = a.w_[k] + b.w_[k];
        return r;
    }
    /// a / b, assuming b divides a.
    friend Monomial operator/(const Monomial& a, const Monomial& b) noexcept {
        Monomial r;
        for (int k = 0; k < 3; ++k) r.w_[k] = a.w_[k] - b.w_[k];
        return r;
    }
    /// true iff this divides b
    bool divides(const Monomial& b) const noexcept {
        constexpr std::uint64_t H = 0x8080808080808080ull;
        for (int k = 0; k < 3; ++k)
            if ((((b.w_[k] | H) - w_[k]) & H) != H) return false;
        return true;
    }
    static Monomial lcm(const Monomial& a, const Monomial& b) noexcept {
        constexpr std::uint64_t H = 0x8080808080808080ull;
        Monomial r;
        std::uint64_t deg = 0;
        for (int k = 0; k < 3; ++k) {
            std::uint64_t aw = a.w_[k], bw = b.w_[k];
            if (k == 2) {
                aw &= 0x00ffffffffffffffull;
                bw &= 0x00ffffffffffffffull;
            }
            std::uint64_t ge = ((aw | H) - bw) & H;  // high bit set where a_i >= b_i
            std::uint64_t mask = (ge >> 7) * 0xff;
            r.w_[k] = (aw & mask) | (bw & ~mask);
            deg += (r.w_[k] * 0x0101010101010101ull) >> 56;
        }
        r.w_[2] |= deg << 56;
        return r;
    }
    /// gcd(a,b) == 1
    static bool coprime(const Monomial& a, const Monomial& b) noexcept {
        for (int k = 0; k < 3; ++k) {
            std::uint64_t x = a.w_[k], y = b.w_[k];
            if (k == 2) {
                x &= 0x00ffffffffffffffull;
                y &= 0x00ffffffffffffffull;
            }
            if (nonzero_bytes(x) & nonzero_bytes(y)) return false;
        }
        return true;
    }

    /// Bit i set iff variable i (mod 64) occurs; cheap divisibility prefilter.
    std::uint64_t support_mask() const noexcept {
        std::uint64_t m = 0;
        for (int i = 0; i < max_vars; ++i)
            if ((*this)[i]) m |= 1ull << i;
        return m;
    }

    /// Graded reverse lexicographic comparison: variable 0 is the largest.
    friend bool grevlex_greater(const Monomial& a, const Monomial& b) noexcept {
        if (a.w_[2] >> 56 != b.w_[2] >> 56) return (a.w_[2] >> 56) > (b.w_[2] >> 56);
        if (a.w_[2] != b.w_[2]) return a.w_[2] < b.w_[2];
        if (a.w_[1] != b.w_[1]) return a.w_[1] < b.w_[1];
        return a.w_[0] < b.w_[0];
    }
    friend int grevlex_cmp(const Monomial& a, const Monomial& b) noexcept {
        if (a == b) return 0;
        return grevlex_greater(a, b) ? 1 : -1;
    }

    friend bool operator==(const Monomial&, const Monomial&) = default;

    std::size_t hash() const noexcept {
        std::uint64_t h = w_[0] * 0x9e3779b97f4a7c15ull;
        h ^= (w_[1] + 0x632be59bd9b4e019ull + (h << 6) + (h >> 2)) * 0xbf58476d1ce4e5b9ull;
        h ^= (w_[2] + 0x94d049bb133111ebull + (h << 6) + (h >> 2)) * 0x9e3779b97f4a7c15ull;
        return static_cast<std::size_t>(h ^ (h >> 31));
    }

    const std::array<std::uint64_t, 3>& words() const noexcept { return w_; }

   private:
    /// High bit of each byte set iff that byte (< 128) is nonzero.
    static std::uint64_t nonzero_bytes(std::uint64_t x) noexcept {
        constexpr std::uint64_t L = 0x7f7f7f7f7f7f7f7full;
        return ((x & L) + L) & 0x8080808080808080ull;
    }
    void set_byte(int i, std::uint64_t v) noexcept {
        std::uint64_t& w = w_[i >> 3];
        int sh = (i & 7) * 8;
        w = (w & ~(0xffull << sh)) | (v << sh);
    }

    std::array<std::uint64_t, 3> w_{};
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const noexcept { return m.hash(); }
};

/// Strict weak order placing grevlex-larger monomials first.
struct GrevlexDesc {
    bool operator()(const Monomial& a, const Monomial& b) const noexcept { return grevlex_greater(a, b); }
};

}  // namespace ssp4
