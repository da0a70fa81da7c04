/**
 * @file isomorphism.hpp
 * @brief Orthogonal similitudes of the three quadrics, their action on cubics,
 *        and isomorphism testing and classification of curves V(P,Q).
 *
 * V(P1,Q) and V(P2,Q) are isomorphic over K iff P1(g v) = lambda P2(v) mod Q
 * for a similitude g of Q (tg phi g = mu phi) and lambda in K^x.  Similitudes
 * are written as products of Bruhat factors; each cell of the decomposition
 * turns the condition into a polynomial system in the cell parameters and
 * lambda, decided with a Groebner basis.
 *
 * Conventions: act(g, P)(v) = P(g v) reduced mod Q, so act(h, act(g, P)) =
 * act(g h, P).  The cells used for testing are taken modulo scalars (scalars
 * only rescale lambda) and keep, to the right of the Weyl element, only the
 * unipotent factors it does not absorb, so every similitude class mod scalars
 * has exactly one parameter tuple.
 */
#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "curve.hpp"
#include "families.hpp"
#include "groebner.hpp"
#include "solve.hpp"

namespace ssp4 {

template <class C>
using Mat4 = std::array<std::array<C, 4>, 4>;
using FpMat = Mat4<Fp>;
using PolyMat = Mat4<Poly>;

namespace detail {

inline std::uint32_t modulus_of(const Fp& a) { return a.modulus(); }
inline std::uint32_t modulus_of(const Poly& a) { return a.ring_checked()->one.modulus(); }
inline Fp constant_like(const Fp& a, std::int64_t v) { return Fp(v, a.modulus()); }
inline Poly constant_like(const Poly& a, std::int64_t v) {
    auto r = a.ring_checked();
    return Poly::constant(r, Fp(v, r->one.modulus()));
}
/// v / d in F_p as an integer residue.
inline std::int64_t frac(std::int64_t v, std::int64_t d, std::uint32_t p) {
    return (Fp(v, p) * Fp(d, p).inv()).value();
}

}  // namespace detail

template <class C>
Mat4<C> mat_identity(const C& like) {
    C zero = detail::constant_like(like, 0), one = detail::constant_like(like, 1);
    Mat4<C> m;
    for (auto& row : m) row.fill(zero);
    for (int i = 0; i < 4; ++i) m[i][i] = one;
    return m;
}

template <class C>
Mat4<C> mat_mul(const Mat4<C>& a, const Mat4<C>& b) {
    Mat4<C> c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            C s = a[i][0] * b[0][j];
            for (int k = 1; k < 4; ++k) s += a[i][k] * b[k][j];
            c[i][j] = s;
        }
    return c;
}

template <class C>
Mat4<C> mat_transpose(const Mat4<C>& a) {
    Mat4<C> t = a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) t[i][j] = a[j][i];
    return t;
}

template <class C>
Mat4<C> mat_diag(const C& a, const C& b, const C& c, const C& d) {
    Mat4<C> m = mat_identity(a);
    m[0][0] = a;
    m[1][1] = b;
    m[2][2] = c;
    m[3][3] = d;
    return m;
}

/// Permutation matrix with m[i][image[i]] = 1.
template <class C>
Mat4<C> mat_permutation(const C& like, const std::array<int, 4>& image) {
    Mat4<C> m = mat_identity(like);
    C zero = detail::constant_like(like, 0), one = detail::constant_like(like, 1);
    for (auto& row : m) row.fill(zero);
    for (int i = 0; i < 4; ++i) m[i][image[static_cast<std::size_t>(i)]] = one;
    return m;
}

inline Fp determinant(FpMat m) {
    std::uint32_t p = m[0][0].modulus();
    Fp det(1, p);
    for (int c = 0; c < 4; ++c) {
        int r = c;
        while (r < 4 && m[r][c].is_zero()) ++r;
        if (r == 4) return Fp(0, p);
        if (r != c) {
            std::swap(m[r], m[c]);
            det = -det;
        }
        det *= m[c][c];
        Fp inv = m[c][c].inv();
        for (int i = c + 1; i < 4; ++i) {
            Fp f = m[i][c] * inv;
            if (f.is_zero()) continue;
            for (int j = c; j < 4; ++j) m[i][j] -= f * m[c][j];
        }
    }
    return det;
}

inline FpMat mat_inverse(const FpMat& a) {
    std::uint32_t p = a[0][0].modulus();
    FpMat m = a, inv = mat_identity(Fp(1, p));
    for (int c = 0; c < 4; ++c) {
        int r = c;
        while (r < 4 && m[r][c].is_zero()) ++r;
        if (r == 4) throw std::invalid_argument("mat_inverse: singular matrix");
        std::swap(m[r], m[c]);
        std::swap(inv[r], inv[c]);
        Fp s = m[c][c].inv();
        for (int j = 0; j < 4; ++j) {
            m[c][j] *= s;
            inv[c][j] *= s;
        }
        for (int i = 0; i < 4; ++i) {
            if (i == c || m[i][c].is_zero()) continue;
            Fp f = m[i][c];
            for (int j = 0; j < 4; ++j) {
                m[i][j] -= f * m[c][j];
                inv[i][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

inline FpMat to_fp_matrix(const std::array<std::array<std::uint32_t, 4>, 4>& a, std::uint32_t p) {
    FpMat m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m[i][j] = Fp(a[i][j], p);
    return m;
}

// ---------------------------------------------------------------------------
// Bruhat factors.  C is Fp for numeric matrices or Poly for symbolic ones.

/// N1 unipotent factors U1(a), U2(b).
template <class C>
Mat4<C> n1_u1(const C& a) {
    Mat4<C> m = mat_identity(a);
    m[0][1] = a;
    m[2][3] = -a;
    return m;
}
template <class C>
Mat4<C> n1_u2(const C& b) {
    Mat4<C> m = mat_identity(b);
    m[0][2] = b;
    m[1][3] = -b;
    return m;
}
/// N1 component group A: identity or the swap of y and z.
template <class C>
Mat4<C> n1_a(int k, const C& like) {
    return k ? mat_permutation(like, {0, 2, 1, 3}) : mat_identity(like);
}
/// N1 Weyl elements 1, s1, s2, s1 s2 for k = 0..3.
template <class C>
Mat4<C> n1_w(int k, const C& like) {
    Mat4<C> s1 = mat_permutation(like, {1, 0, 3, 2}), s2 = mat_permutation(like, {2, 3, 0, 1});
    switch (k) {
        case 0: return mat_identity(like);
        case 1: return s1;
        case 2: return s2;
        case 3: return mat_mul(s1, s2);
    }
    throw std::invalid_argument("n1_w: index out of range");
}

template <class C>
Mat4<C> n2_h(const C& a, const C& a_inv) {
    C one = detail::constant_like(a, 1);
    return mat_diag(a, one, one, a_inv);
}
/// R(a,b) with the norm a^2 - eps b^2 in the last entry.
template <class C>
Mat4<C> n2_r(const C& a, const C& b, std::uint32_t eps) {
    Mat4<C> m = mat_identity(a);
    C e = detail::constant_like(a, eps);
    m[1][1] = a;
    m[1][2] = e * b;
    m[2][1] = b;
    m[2][2] = a;
    m[3][3] = a * a - e * b * b;
    return m;
}
template <class C>
Mat4<C> n2_u1(const C& a) {
    std::uint32_t p = detail::modulus_of(a);
    Mat4<C> m = mat_identity(a);
    m[0][1] = a;
    m[0][3] = a * a * detail::constant_like(a, p - detail::frac(1, 2, p));
    m[1][3] = -a;
    return m;
}
template <class C>
Mat4<C> n2_u2(const C& b, std::uint32_t eps) {
    std::uint32_t p = detail::modulus_of(b);
    Mat4<C> m = mat_identity(b);
    m[0][2] = b;
    m[0][3] = b * b * detail::constant_like(b, detail::frac(1, 2 * static_cast<std::int64_t>(eps), p));
    m[2][3] = b * detail::constant_like(b, detail::frac(1, eps, p));
    return m;
}
template <class C>
Mat4<C> n2_a(int k, const C& like) {
    Mat4<C> m = mat_identity(like);
    if (k) m[2][2] = detail::constant_like(like, -1);
    return m;
}
template <class C>
Mat4<C> n2_w(int k, const C& like) {
    if (!k) return mat_identity(like);
    Mat4<C> m = mat_permutation(like, {3, 1, 2, 0});
    m[2][2] = detail::constant_like(like, -1);
    return m;
}

template <class C>
Mat4<C> dege_t(const C& a, const C& a_inv) {
    C one = detail::constant_like(a, 1);
    return mat_diag(one, a, one, a_inv);
}
template <class C>
Mat4<C> dege_scale(const C& b) {
    return mat_diag(detail::constant_like(b, 1), b, b, b);
}
/// U(a) for 2yw + z^2.
template <class C>
Mat4<C> dege_u(const C& a) {
    std::uint32_t p = detail::modulus_of(a);
    Mat4<C> m = mat_identity(a);
    m[1][2] = a;
    m[1][3] = a * a * detail::constant_like(a, p - detail::frac(1, 2, p));
    m[2][3] = -a;
    return m;
}
template <class C>
Mat4<C> dege_s(const C& like) {
    return mat_permutation(like, {0, 3, 2, 1});
}
template <class C>
Mat4<C> dege_v(const C& a, const C& b, const C& c, const C& d) {
    Mat4<C> m = mat_identity(a);
    m[0][0] = a;
    m[0][1] = b;
    m[0][2] = c;
    m[0][3] = d;
    return m;
}
template <class C>
Mat4<C> dege_a(int k, const C& like) {
    return n2_a(k, like);
}

// ---------------------------------------------------------------------------

struct Similitude {
    QuadricCase qcase;
    std::uint32_t p = 0;
    FpMat matrix;
    Fp mu;  ///< tg phi g = mu phi
};

/// mu with tg phi g = mu phi, if g is a similitude of the case quadric.
inline std::optional<Fp> similitude_factor(const FpMat& g, const QuadricCase& c, std::uint32_t p) {
    FpMat phi = to_fp_matrix(quadric_matrix(c, p), p);
    FpMat s = mat_mul(mat_mul(mat_transpose(g), phi), g);
    std::optional<Fp> mu;
    for (int i = 0; i < 4 && !mu; ++i)
        for (int j = 0; j < 4 && !mu; ++j)
            if (!phi[i][j].is_zero()) mu = s[i][j] * phi[i][j].inv();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (!(s[i][j] == *mu * phi[i][j])) return std::nullopt;
    if (mu->is_zero()) return std::nullopt;
    return mu;
}

/// Checks invertibility and the similitude identity.
inline Similitude make_similitude(const FpMat& g, const QuadricCase& c, std::uint32_t p) {
    if (determinant(g).is_zero()) throw std::invalid_argument("make_similitude: singular matrix");
    auto mu = similitude_factor(g, c, p);
    if (!mu) throw std::invalid_argument("make_similitude: matrix is not a similitude of the quadric");
    return {c, p, g, *mu};
}

/**
 * A numeric Bruhat word; t is read as follows.
 *   N1:   A_a diag(t1,t2,t3/t2,t3/t1) U1(t4)U2(t5) W_w U1(t6)U2(t7); t1,t2,t3 units
 *   N2:   A_a H(t1) R(t2,t3) U1(t4)U2(t5) W_w U1(t6)U2(t7); t1 and t2^2 - eps t3^2 units
 *   Dege: A_a diag(1,t1,t1,t1) T(t2) U(t3) [s U(t4) when w = 1] V(t5,t6,t7,t8); t1,t2,t5 units
 */
struct BruhatWord {
    int a = 0;
    int w = 0;
    std::vector<std::uint32_t> t;
};

inline Similitude bruhat_element(const QuadricCase& c, std::uint32_t p, const BruhatWord& word) {
    auto need = [&](std::size_t n) {
        if (word.t.size() != n)
            throw std::invalid_argument("bruhat_element: expected " + std::to_string(n) + " parameters");
    };
    auto t = [&](std::size_t i) { return Fp(word.t[i - 1], p); };
    auto unit = [&](const Fp& v, const char* what) {
        if (v.is_zero()) throw std::invalid_argument(std::string("bruhat_element: ") + what + " must be a unit");
        return v;
    };
    Fp one(1, p);
    FpMat g;
    switch (c.kind) {
        case QuadricKind::N1: {
            need(7);
            if (word.a < 0 || word.a > 1 || word.w < 0 || word.w > 3) throw std::invalid_argument("bruhat_element: bad A/W index");
            Fp t1 = unit(t(1), "t1"), t2 = unit(t(2), "t2"), t3 = unit(t(3), "t3");
            g = mat_mul(n1_a(word.a, one), mat_diag(t1, t2, t3 * t2.inv(), t3 * t1.inv()));
            g = mat_mul(mat_mul(g, n1_u1(t(4))), n1_u2(t(5)));
            g = mat_mul(g, n1_w(word.w, one));
            g = mat_mul(mat_mul(g, n1_u1(t(6))), n1_u2(t(7)));
            break;
        }
        case QuadricKind::N2: {
            need(7);
            if (word.a < 0 || word.a > 1 || word.w < 0 || word.w > 1) throw std::invalid_argument("bruhat_element: bad A/W index");
            std::uint32_t eps = resolve_eps(c, p);
            Fp t1 = unit(t(1), "t1");
            unit(t(2) * t(2) - Fp(eps, p) * t(3) * t(3), "t2^2 - eps t3^2");
            g = mat_mul(mat_mul(n2_a(word.a, one), n2_h(t1, t1.inv())), n2_r(t(2), t(3), eps));
            g = mat_mul(mat_mul(g, n2_u1(t(4))), n2_u2(t(5), eps));
            g = mat_mul(g, n2_w(word.w, one));
            g = mat_mul(mat_mul(g, n2_u1(t(6))), n2_u2(t(7), eps));
            break;
        }
        case QuadricKind::Dege: {
            need(8);
            if (word.a < 0 || word.a > 1 || word.w < 0 || word.w > 1) throw std::invalid_argument("bruhat_element: bad A/s index");
            Fp t1 = unit(t(1), "t1"), t2 = unit(t(2), "t2");
            unit(t(5), "t5");
            g = mat_mul(mat_mul(dege_a(word.a, one), dege_scale(t1)), dege_t(t2, t2.inv()));
            g = mat_mul(g, dege_u(t(3)));
            if (word.w) g = mat_mul(mat_mul(g, dege_s(one)), dege_u(t(4)));
            g = mat_mul(g, dege_v(t(5), t(6), t(7), t(8)));
            break;
        }
    }
    return make_similitude(g, c, p);
}

// ---------------------------------------------------------------------------
// Action on cubics

/// P(g v) reduced modulo the case quadric.
inline Poly act(const FpMat& g, const Poly& P, const QuadricCase& c) {
    std::uint32_t p = P.ring_checked()->one.modulus();
    if (determinant(g).is_zero()) throw std::invalid_argument("act: singular matrix");
    std::vector<std::vector<Fp>> M(4, std::vector<Fp>(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g[i][j];
    return mod_quad(P.linear_substitute(M), quadric(c, p), mod_monomial(c.kind));
}

inline Poly act(const Similitude& g, const Poly& P) { return act(g.matrix, P, g.qcase); }

/// act(g, P1) == lambda P2 mod Q.
inline bool check_witness(const FpMat& g, const Fp& lambda, const Poly& P1, const Poly& P2, const QuadricCase& c) {
    std::uint32_t p = P1.ring_checked()->one.modulus();
    Poly d = act(g, P1, c) - P2.scale(lambda);
    return mod_quad(d, quadric(c, p), mod_monomial(c.kind)).is_zero();
}

// ---------------------------------------------------------------------------
// Cubics over F_p(sqrt eps), used for the change of quadric N2 -> N1

/// re + sqrt(eps) * im, both forms over F_p; im = 0 for a cubic over F_p.
struct ExtCubic {
    Poly re, im;
    std::uint32_t eps = 0;

    static ExtCubic rational(const Poly& P) { return {P, Poly(P.ring_checked()), 0}; }
    bool is_rational() const { return im.is_zero(); }
    friend bool operator==(const ExtCubic& a, const ExtCubic& b) {
        return a.re == b.re && a.im == b.im && (a.is_rational() || a.eps == b.eps);
    }
};

/**
 * The change of variables M_Q taking 2xw + y^2 - eps z^2 to 2xw + 2yz:
 * y -> y/2 + z, z -> (y - 2z)/(2 sqrt eps).  Entries in F_p(sqrt eps).
 */
inline Mat4<QuadExt::Element> n2_transport_matrix(std::uint32_t p, std::uint32_t eps) {
    QuadExt K(p, eps);
    PrimeField F(p);
    Mat4<QuadExt::Element> m{};
    m[0][0] = m[3][3] = K.embed(1);
    m[1][1] = K.embed(F.inv(2));
    m[1][2] = K.embed(1);
    // 1/(2 sqrt eps) = sqrt eps / (2 eps), -1/sqrt eps = -sqrt eps / eps
    m[2][1] = K.make(0, F.inv(F.mul(2, eps % p)));
    m[2][2] = K.make(0, F.neg(F.inv(eps % p)));
    return m;
}

/// tM phi M for a matrix over F_p(sqrt eps) and a symmetric phi over F_p.
inline Mat4<QuadExt::Element> transform_form(const QuadExt& K, const Mat4<QuadExt::Element>& M,
                                             const std::array<std::array<std::uint32_t, 4>, 4>& phi) {
    Mat4<QuadExt::Element> out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            QuadExt::Element s = K.embed(0);
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l)
                    if (phi[k][l]) s = K.add(s, K.mul(K.mul(M[k][i], K.embed(phi[k][l])), M[l][j]));
            out[i][j] = s;
        }
    return out;
}

/// P(M_Q v) reduced modulo 2xw + 2yz, for an N2 cubic P.
inline ExtCubic n2_to_n1(const Poly& P, std::uint32_t eps) {
    auto r = P.ring_checked();
    std::uint32_t p = r->one.modulus();
    QuadExt K(p, eps);  // rejects square eps
    PrimeField F(p);
    Poly x = Poly::variable(r, 0), y = Poly::variable(r, 1), z = Poly::variable(r, 2), w = Poly::variable(r, 3);
    Poly Y = y.scale(Fp(F.inv(2), p)) + z;
    Poly L = (y - z.scale(Fp(2, p))).scale(Fp(F.inv(F.mul(2, eps % p)), p));  // image of z is sqrt(eps) * L
    Poly re(r), im(r);
    for (auto& t : P.terms()) {
        auto e = t.first.exponents(4);
        Poly term = Poly::constant(r, t.second) * x.power(static_cast<unsigned>(e[0])) * Y.power(static_cast<unsigned>(e[1])) *
                    L.power(static_cast<unsigned>(e[2])) * w.power(static_cast<unsigned>(e[3]));
        // sqrt(eps)^c = eps^(c/2) sqrt(eps)^(c mod 2)
        term = term.scale(Fp(F.pow(eps % p, static_cast<std::uint64_t>(e[2] / 2)), p));
        if (e[2] % 2)
            im += term;
        else
            re += term;
    }
    Poly Q1 = quadric({QuadricKind::N1, 0}, p);
    Monomial mQ = mod_monomial(QuadricKind::N1);
    return {mod_quad(re, Q1, mQ), mod_quad(im, Q1, mQ), eps % p};
}

// ---------------------------------------------------------------------------
// Symbolic cells and the isomorphism systems

enum class IsoGroup {
    O,     ///< similitude factor 1
    Full,  ///< all similitudes
};

struct BruhatCell {
    std::string label;
    RingPtr<Fp> ring;
    PolyMat g;
    std::vector<Poly> relations;  ///< equations among the parameters
    std::vector<int> units;       ///< variables required to be nonzero
    std::vector<Poly> nonzero;    ///< further polynomials required to be nonzero
    int lambda = -1;
    int theta = -1;     ///< sqrt(eps), when present
    int rabinowitsch = -1;
};

namespace detail {

/// Cell over a ring with the given parameter names plus l, optional th and r.
struct CellBuilder {
    std::vector<std::string> names;
    RingPtr<Fp> ring;
    BruhatCell cell;

    CellBuilder(std::uint32_t p, std::vector<std::string> params, bool theta, bool rabinowitsch, std::string label) {
        names = std::move(params);
        names.push_back("l");
        if (theta) names.push_back("th");
        if (rabinowitsch) names.push_back("r");
        ring = make_fp_ring(p, names);
        cell.label = std::move(label);
        cell.ring = ring;
        cell.lambda = ring->index_of("l");
        if (theta) cell.theta = ring->index_of("th");
        if (rabinowitsch) cell.rabinowitsch = ring->index_of("r");
        cell.units.push_back(cell.lambda);
    }
    Poly v(const std::string& n) const { return Poly::variable(ring, n); }
    Poly k(std::int64_t c) const { return Poly::constant(ring, Fp(c, ring->one.modulus())); }
    void unit(const std::string& n) { cell.units.push_back(ring->index_of(n)); }
};

}  // namespace detail

/**
 * The cells of the similitude group of the case quadric, in search order
 * (A outer, Weyl part inner).
 *   N1 Full: A diag(1,b,c,bc) U1(t4)U2(t5) W [U1(t6)] [U2(t7)]
 *   N1 O:    A diag(t1,t2,u2,u1) U1(t4)U2(t5) W [...], t1 u1 = t2 u2 = 1
 *   N2 Full: A R(c,d) U1(t4)U2(t5) W [U1(t6)U2(t7)], c^2 - eps d^2 != 0
 *   N2 O:    A H(t1) R(c,d) ..., t1 u1 = 1, c^2 - eps d^2 = 1
 *   Dege Full: diag(1,a^2,a,1) U(t3) [s U(t4)] V(v1,v2,v3,v4)
 *   Dege O:    T(a) U(t3) [s U(t4)] V(v1,...), a u = 1
 * For Dege the component A lies in T(-1) V(-1,0,0,0) times a scalar, so it is
 * left out.
 * The right unipotent factor after W is U1 for s1, U2 for s2, both for s1 s2
 * and for the N2 Weyl element, none for the identity.
 */
inline std::vector<BruhatCell> bruhat_cells(const QuadricCase& c, std::uint32_t p, IsoGroup grp, bool theta = false,
                                            bool rabinowitsch = false) {
    std::vector<BruhatCell> out;
    switch (c.kind) {
        case QuadricKind::N1:
            for (int a = 0; a < 2; ++a)
                for (int w = 0; w < 4; ++w) {
                    std::vector<std::string> params{"t4", "t5"};
                    if (w & 1) params.push_back("t6");
                    if (w & 2) params.push_back("t7");
                    if (grp == IsoGroup::Full) {
                        params.insert(params.end(), {"b", "c"});
                    } else {
                        params.insert(params.end(), {"t1", "t2", "u1", "u2"});
                    }
                    detail::CellBuilder B(p, params, theta, rabinowitsch, "A" + std::to_string(a) + " W" + std::to_string(w));
                    Poly one = B.k(1);
                    PolyMat g;
                    if (grp == IsoGroup::Full) {
                        g = mat_mul(n1_a(a, one), mat_diag(one, B.v("b"), B.v("c"), B.v("b") * B.v("c")));
                        B.unit("b");
                        B.unit("c");
                    } else {
                        g = mat_mul(n1_a(a, one), mat_diag(B.v("t1"), B.v("t2"), B.v("u2"), B.v("u1")));
                        B.cell.relations.push_back(B.v("t1") * B.v("u1") - one);
                        B.cell.relations.push_back(B.v("t2") * B.v("u2") - one);
                        B.unit("t1");
                        B.unit("t2");
                    }
                    g = mat_mul(mat_mul(mat_mul(g, n1_u1(B.v("t4"))), n1_u2(B.v("t5"))), n1_w(w, one));
                    if (w & 1) g = mat_mul(g, n1_u1(B.v("t6")));
                    if (w & 2) g = mat_mul(g, n1_u2(B.v("t7")));
                    B.cell.g = g;
                    out.push_back(std::move(B.cell));
                }
            break;
        case QuadricKind::N2: {
            std::uint32_t eps = resolve_eps(c, p);
            for (int a = 0; a < 2; ++a)
                for (int w = 0; w < 2; ++w) {
                    std::vector<std::string> params{"t4", "t5"};
                    if (w) params.insert(params.end(), {"t6", "t7"});
                    if (grp == IsoGroup::O) params.insert(params.end(), {"t1", "u1"});
                    params.insert(params.end(), {"c", "d"});
                    detail::CellBuilder B(p, params, theta, rabinowitsch, "A" + std::to_string(a) + " W" + std::to_string(w));
                    Poly one = B.k(1);
                    Poly norm = B.v("c") * B.v("c") - B.k(eps) * B.v("d") * B.v("d");
                    PolyMat g = n2_a(a, one);
                    if (grp == IsoGroup::O) {
                        g = mat_mul(g, n2_h(B.v("t1"), B.v("u1")));
                        B.cell.relations.push_back(B.v("t1") * B.v("u1") - one);
                        B.cell.relations.push_back(norm - one);
                        B.unit("t1");
                    } else {
                        B.cell.nonzero.push_back(norm);
                    }
                    g = mat_mul(g, n2_r(B.v("c"), B.v("d"), eps));
                    g = mat_mul(mat_mul(mat_mul(g, n2_u1(B.v("t4"))), n2_u2(B.v("t5"), eps)), n2_w(w, one));
                    if (w) g = mat_mul(mat_mul(g, n2_u1(B.v("t6"))), n2_u2(B.v("t7"), eps));
                    B.cell.g = g;
                    out.push_back(std::move(B.cell));
                }
            break;
        }
        case QuadricKind::Dege:
            for (int a = 0; a < 1; ++a)
                for (int s = 0; s < 2; ++s) {
                    std::vector<std::string> params{"t3"};
                    if (s) params.push_back("t4");
                    params.push_back("a");
                    if (grp == IsoGroup::O) params.push_back("u");
                    params.insert(params.end(), {"v1", "v2", "v3", "v4"});
                    detail::CellBuilder B(p, params, theta, rabinowitsch, "A" + std::to_string(a) + " S" + std::to_string(s));
                    Poly one = B.k(1);
                    PolyMat g = dege_a(a, one);
                    if (grp == IsoGroup::Full) {
                        g = mat_mul(g, mat_diag(one, B.v("a") * B.v("a"), B.v("a"), one));
                    } else {
                        g = mat_mul(g, dege_t(B.v("a"), B.v("u")));
                        B.cell.relations.push_back(B.v("a") * B.v("u") - one);
                    }
                    B.unit("a");
                    g = mat_mul(g, dege_u(B.v("t3")));
                    if (s) g = mat_mul(mat_mul(g, dege_s(one)), dege_u(B.v("t4")));
                    g = mat_mul(g, dege_v(B.v("v1"), B.v("v2"), B.v("v3"), B.v("v4")));
                    B.unit("v1");
                    B.cell.g = g;
                    out.push_back(std::move(B.cell));
                }
            break;
    }
    return out;
}

namespace detail {

inline SymPoly lift_ext(const ExtCubic& P, const RingPtr<Poly>& sr, const BruhatCell& cell) {
    std::map<Monomial, Poly, GrevlexDesc> acc;
    auto pr = cell.ring;
    for (auto& t : P.re.terms()) acc[t.first] = Poly::constant(pr, t.second);
    if (!P.is_rational()) {
        if (cell.theta < 0) throw std::invalid_argument("isomorphism system: irrational cubic needs a sqrt(eps) variable");
        Poly th = Poly::variable(pr, cell.theta);
        for (auto& t : P.im.terms()) {
            auto it = acc.find(t.first);
            Poly c = th.scale(t.second);
            if (it == acc.end())
                acc[t.first] = c;
            else
                it->second += c;
        }
    }
    std::vector<SymPoly::Term> terms;
    for (auto& [m, c] : acc) terms.push_back({m, c});
    return SymPoly::from_terms(sr, std::move(terms));
}

}  // namespace detail

/// Coefficients of P1(g v) - lambda P2(v) mod Q in the cell parameters.
inline std::vector<Poly> cell_equations(const BruhatCell& cell, const ExtCubic& P1, const ExtCubic& P2, const QuadricCase& c) {
    std::uint32_t p = cell.ring->one.modulus();
    auto sr = make_ring<Poly>({"x", "y", "z", "w"}, Poly::one(cell.ring));
    std::vector<std::vector<Poly>> M(4, std::vector<Poly>(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cell.g[i][j];
    SymPoly G = detail::lift_ext(P1, sr, cell).linear_substitute(M) -
                detail::lift_ext(P2, sr, cell) * SymPoly::constant(sr, Poly::variable(cell.ring, cell.lambda));
    // Q has coefficients in F_p for every case (the N2 transport lands on N1)
    G = mod_quad(G, quadric(c, p), mod_monomial(c.kind));
    std::vector<Poly> eqs;
    for (auto& t : G.terms()) {
        if (t.second.is_zero()) continue;
        Poly f = t.second.scale(t.second.leading_coefficient().inv());
        if (std::find(eqs.begin(), eqs.end(), f) == eqs.end()) eqs.push_back(f);
    }
    return eqs;
}

struct IsoWitness {
    Similitude g;
    Fp lambda;
    std::string cell;
};

struct IsoStats {
    std::uint64_t tests = 0;
    std::uint64_t cells = 0;  ///< cell systems solved
    double seconds = 0;
    void merge(const IsoStats& o) {
        tests += o.tests;
        cells += o.cells;
        seconds += o.seconds;
    }
};

struct IsoResult {
    bool isomorphic = false;
    std::optional<IsoWitness> witness;
    std::string cell;  ///< cell of the hit
};

namespace detail {

inline void check_same_case(const Poly& P1, const Poly& P2) {
    for (auto* P : {&P1, &P2})
        if (P->is_zero() || P->total_degree() != 3 || !P->is_homogeneous())
            throw std::invalid_argument("is_isomorphic: inputs must be cubic forms");
    if (P1.ring_checked()->one.modulus() != P2.ring_checked()->one.modulus())
        throw std::invalid_argument("is_isomorphic: characteristic mismatch");
}

}  // namespace detail

/**
 * Isomorphism over F_q (q prime): for each cell, the coefficient system with
 * X^(q-1) = 1 for the unit parameters and lambda, X^q = X for the others.
 * A solution yields a witness, which is rechecked numerically.
 */
inline IsoResult is_isomorphic(const Poly& P1, const Poly& P2, const QuadricCase& c, std::uint32_t q,
                               IsoGroup grp = IsoGroup::Full, IsoStats* stats = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    detail::check_same_case(P1, P2);
    if (P1.ring_checked()->one.modulus() != q) throw std::invalid_argument("is_isomorphic: cubics not over F_q");
    IsoResult res;
    if (stats) ++stats->tests;
    auto e1 = ExtCubic::rational(P1), e2 = ExtCubic::rational(P2);
    for (auto& cell : bruhat_cells(c, q, grp)) {
        if (stats) ++stats->cells;
        std::vector<Poly> sys = cell_equations(cell, e1, e2, c);
        for (auto& r : cell.relations) sys.push_back(r);
        for (auto& f : cell.nonzero) sys.push_back(f.power(q - 1) - Poly::one(cell.ring));
        SolveOptions so;
        so.units.assign(static_cast<std::size_t>(cell.ring->nvars()), false);
        for (int u : cell.units) so.units[static_cast<std::size_t>(u)] = true;
        auto pts = variety_over_fq(sys, cell.ring, q, so);
        if (pts.empty()) continue;
        FpMat g;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) g[i][j] = evaluate(cell.g[i][j], pts.front());
        Fp lambda(pts.front()[static_cast<std::size_t>(cell.lambda)], q);
        if (!check_witness(g, lambda, P1, P2, c))
            throw std::logic_error("is_isomorphic: witness fails the numeric recheck in cell " + cell.label);
        res.isomorphic = true;
        res.cell = cell.label;
        res.witness = IsoWitness{make_similitude(g, c, q), lambda, cell.label};
        break;
    }
    if (stats) stats->seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

/**
 * Isomorphism over the algebraic closure for cubics on the N1 or Dege quadric
 * (N2 cubics are moved to N1 first, see the Poly overload).  Field equations
 * are dropped; one Rabinowitsch variable forces the units and the other
 * nonvanishing conditions; sqrt(eps) enters as a variable th with th^2 = eps.
 */
inline bool is_isomorphic_closure(const ExtCubic& P1, const ExtCubic& P2, QuadricKind kind, std::uint32_t p,
                                  IsoStats* stats = nullptr) {
    if (kind == QuadricKind::N2) throw std::invalid_argument("is_isomorphic_closure: move N2 cubics to N1 first");
    auto t0 = std::chrono::steady_clock::now();
    if (!P1.is_rational() && !P2.is_rational() && P1.eps != P2.eps)
        throw std::invalid_argument("is_isomorphic_closure: different quadratic extensions");
    bool theta = !P1.is_rational() || !P2.is_rational();
    std::uint32_t eps = P1.is_rational() ? P2.eps : P1.eps;
    QuadricCase c{kind, 0};
    bool found = false;
    if (stats) ++stats->tests;
    for (auto& cell : bruhat_cells(c, p, IsoGroup::Full, theta, true)) {
        if (stats) ++stats->cells;
        std::vector<Poly> sys = cell_equations(cell, P1, P2, c);
        for (auto& r : cell.relations) sys.push_back(r);
        Poly prod = Poly::variable(cell.ring, cell.rabinowitsch);
        for (int u : cell.units) prod = prod * Poly::variable(cell.ring, u);
        for (auto& f : cell.nonzero) prod = prod * f;
        sys.push_back(prod - Poly::one(cell.ring));
        if (theta) {
            Poly th = Poly::variable(cell.ring, cell.theta);
            sys.push_back(th * th - Poly::constant(cell.ring, Fp(eps, p)));
        }
        if (!is_inconsistent(sys, cell.ring)) {
            found = true;
            break;
        }
    }
    if (stats) stats->seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return found;
}

inline ExtCubic closure_form(const Poly& P, const QuadricCase& c, std::uint32_t p) {
    if (c.kind == QuadricKind::N2) return n2_to_n1(P, resolve_eps(c, p));
    return ExtCubic::rational(P);
}

inline QuadricKind closure_kind(QuadricKind k) { return k == QuadricKind::Dege ? QuadricKind::Dege : QuadricKind::N1; }

/// Closure test for two cubics of the same case, N2 moved to N1.
inline bool is_isomorphic_closure(const Poly& P1, const Poly& P2, const QuadricCase& c, IsoStats* stats = nullptr) {
    detail::check_same_case(P1, P2);
    std::uint32_t p = P1.ring_checked()->one.modulus();
    return is_isomorphic_closure(closure_form(P1, c, p), closure_form(P2, c, p), closure_kind(c.kind), p, stats);
}

// ---------------------------------------------------------------------------
// Classification

/**
 * First-seen representatives under an equivalence test: item i becomes a
 * representative unless an earlier representative matched it.  class_of maps
 * each item to the position of its representative.
 */
struct FlagListResult {
    std::vector<std::size_t> representatives;
    std::vector<std::size_t> class_of;
};

inline FlagListResult flag_list(std::size_t n, const std::function<bool(std::size_t, std::size_t)>& iso) {
    FlagListResult r;
    r.class_of.assign(n, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < n; ++i) {
        if (r.class_of[i] != static_cast<std::size_t>(-1)) continue;
        std::size_t id = r.representatives.size();
        r.representatives.push_back(i);
        r.class_of[i] = id;
        for (std::size_t j = i + 1; j < n; ++j)
            if (r.class_of[j] == static_cast<std::size_t>(-1) && iso(i, j)) r.class_of[j] = id;
    }
    return r;
}

struct ClassifyOptions {
    bool phase1 = true;  ///< first pass with the similitude-factor-1 subgroup
    std::function<void(const std::string&)> log;
};

struct Classification {
    std::vector<std::size_t> representatives;  ///< input indices, in input order
    std::vector<std::size_t> class_of;         ///< input index -> class id
    std::vector<std::size_t> phase1_representatives;
    /// act(g, P_rep) = lambda P_i for non-representatives, when a witness is known
    std::vector<std::optional<IsoWitness>> witness;
    IsoStats stats;
};

/**
 * Two-phase classification over F_q: phase 1 groups the inputs under O,
 * phase 2 groups the phase-1 representatives under all similitudes.
 */
inline Classification classify(const std::vector<Poly>& cubics, const QuadricCase& c, std::uint32_t q,
                               const ClassifyOptions& opt = {}) {
    Classification out;
    std::size_t n = cubics.size();
    auto say = [&](const std::string& s) {
        if (opt.log) opt.log(s);
    };
    std::vector<std::size_t> stage(n);
    std::vector<std::size_t> reps1;
    std::vector<std::optional<IsoWitness>> w1(n), w2(n);
    if (opt.phase1) {
        auto r1 = flag_list(n, [&](std::size_t i, std::size_t j) {
            auto r = is_isomorphic(cubics[i], cubics[j], c, q, IsoGroup::O, &out.stats);
            if (r.isomorphic) w1[j] = r.witness;
            return r.isomorphic;
        });
        reps1 = r1.representatives;
        stage = r1.class_of;
        say("phase 1: " + std::to_string(reps1.size()) + " of " + std::to_string(n) + " remain");
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            reps1.push_back(i);
            stage[i] = i;
        }
    }
    auto r2 = flag_list(reps1.size(), [&](std::size_t i, std::size_t j) {
        auto r = is_isomorphic(cubics[reps1[i]], cubics[reps1[j]], c, q, IsoGroup::Full, &out.stats);
        if (r.isomorphic) w2[j] = r.witness;
        return r.isomorphic;
    });
    say("phase 2: " + std::to_string(r2.representatives.size()) + " classes");
    out.phase1_representatives = reps1;
    for (auto k : r2.representatives) out.representatives.push_back(reps1[k]);
    out.class_of.resize(n);
    out.witness.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t s = stage[i];
        out.class_of[i] = r2.class_of[s];
        // compose rep -> phase-1 rep -> i: act(g1, act(g2, P)) = act(g2 g1, P)
        const auto& a = w2[s];
        const auto& b = w1[i];
        if (a && b)
            out.witness[i] = IsoWitness{make_similitude(mat_mul(a->g.matrix, b->g.matrix), c, q), a->lambda * b->lambda,
                                        a->cell + " / " + b->cell};
        else if (a)
            out.witness[i] = a;
        else if (b)
            out.witness[i] = b;
    }
    return out;
}

/// Single-phase classification over the algebraic closure.
inline Classification classify_closure(const std::vector<ExtCubic>& cubics, QuadricKind kind, std::uint32_t p) {
    Classification out;
    auto r = flag_list(cubics.size(), [&](std::size_t i, std::size_t j) {
        return is_isomorphic_closure(cubics[i], cubics[j], kind, p, &out.stats);
    });
    out.representatives = r.representatives;
    out.phase1_representatives = r.representatives;
    out.class_of = r.class_of;
    out.witness.resize(cubics.size());
    return out;
}

inline nlohmann::json to_json(const IsoWitness& w) {
    nlohmann::json g = nlohmann::json::array();
    for (auto& row : w.g.matrix) {
        nlohmann::json r = nlohmann::json::array();
        for (auto& e : row) r.push_back(e.value());
        g.push_back(r);
    }
    return {{"g", g}, {"mu", w.g.mu.value()}, {"lambda", w.lambda.value()}, {"cell", w.cell}};
}

/**
 * Classification document: the classes with their representatives, and for
 * each input its class id and, when known, a witness g, lambda with
 * act(g, P_rep) = lambda P.
 */
inline nlohmann::json to_json(const Classification& c, const std::vector<CurveRecord>& curves, const std::string& field) {
    nlohmann::json j;
    j["field"] = field;
    j["classes"] = nlohmann::json::array();
    std::vector<std::size_t> size(c.representatives.size(), 0);
    for (auto k : c.class_of) ++size[k];
    for (std::size_t k = 0; k < c.representatives.size(); ++k) {
        std::size_t r = c.representatives[k];
        j["classes"].push_back({{"id", k}, {"representative", r}, {"P", curves[r].P.to_string()}, {"size", size[k]}});
    }
    j["curves"] = nlohmann::json::array();
    for (std::size_t i = 0; i < curves.size(); ++i) {
        nlohmann::json e{{"index", i}, {"case", to_string(curves[i].qcase.kind)}, {"P", curves[i].P.to_string()},
                         {"class", c.class_of[i]}};
        if (i < c.witness.size() && c.witness[i]) e["witness"] = to_json(*c.witness[i]);
        j["curves"].push_back(e);
    }
    j["stats"] = {{"tests", c.stats.tests}, {"cells", c.stats.cells}, {"seconds", c.stats.seconds}};
    return j;
}

// ---------------------------------------------------------------------------
// Exhaustive group sweep

namespace detail {

/// Dense cubic forms over F_p in 20 coefficients, with composition and reduction mod Q.
class CubicArith {
   public:
    using Dense = std::array<std::uint32_t, 20>;

    CubicArith(const QuadricCase& c, std::uint32_t p) : p_(p) {
        int n = 0;
        for (int a = 3; a >= 0; --a)
            for (int b = 3 - a; b >= 0; --b)
                for (int cc = 3 - a - b; cc >= 0; --cc) {
                    std::array<int, 4> e{a, b, cc, 3 - a - b - cc};
                    exps_[static_cast<std::size_t>(n)] = e;
                    std::vector<int> v;
                    for (int i = 0; i < 4; ++i)
                        for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) v.push_back(i);
                    idx3_[v[0]][v[1]][v[2]] = n;
                    ++n;
                }
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k) {
                    std::array<int, 3> s{i, j, k};
                    std::sort(s.begin(), s.end());
                    idx3_[i][j][k] = idx3_[s[0]][s[1]][s[2]];
                }
        n = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                idx2_[i][j] = idx2_[j][i] = n;
                pairs_[static_cast<std::size_t>(n)] = {i, j};
                ++n;
            }
        // reduction: m = mQ * r  ->  -(Q - cQ mQ)/cQ * r
        Poly Q = quadric(c, p);
        Monomial mQ = mod_monomial(c.kind);
        Fp inv = Q.coefficient_of(mQ).inv();
        auto e = mQ.exponents(4);
        int qa = -1, qb = -1;
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) (qa < 0 ? qa : qb) = i;
        for (int r = 0; r < 4; ++r) {
            Red red;
            red.from = idx3_[qa][qb][r];
            for (auto& t : Q.terms()) {
                if (t.first == mQ) continue;
                auto te = t.first.exponents(4);
                std::vector<int> v;
                for (int i = 0; i < 4; ++i)
                    for (int k = 0; k < te[static_cast<std::size_t>(i)]; ++k) v.push_back(i);
                int to = idx3_[v[0]][v[1]][r];
                if (divisible(to, qa, qb)) throw std::logic_error("CubicArith: reduction does not terminate in one step");
                red.to.push_back({to, (-(t.second * inv)).value()});
            }
            reds_.push_back(red);
        }
    }

    Dense from_poly(const Poly& P) const {
        Dense d{};
        for (auto& t : P.terms()) {
            auto e = t.first.exponents(4);
            std::vector<int> v;
            for (int i = 0; i < 4; ++i)
                for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) v.push_back(i);
            if (v.size() != 3) throw std::invalid_argument("CubicArith: not a cubic form");
            d[static_cast<std::size_t>(idx3_[v[0]][v[1]][v[2]])] = t.second.value();
        }
        return d;
    }

    /// P(g v), reduced mod Q and scaled to a leading coefficient 1.
    Dense canonical(const Dense& P, const std::array<std::array<std::uint32_t, 4>, 4>& g) const {
        const std::uint64_t p = p_;
        std::array<std::array<std::uint32_t, 10>, 10> quad{};
        std::array<bool, 10> have{};
        std::array<std::uint64_t, 20> acc{};
        for (int m = 0; m < 20; ++m) {
            std::uint64_t cm = P[static_cast<std::size_t>(m)];
            if (!cm) continue;
            auto& e = exps_[static_cast<std::size_t>(m)];
            int v[3], n = 0;
            for (int i = 0; i < 4; ++i)
                for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) v[n++] = i;
            int qi = idx2_[v[0]][v[1]];
            auto& Lq = quad[static_cast<std::size_t>(qi)];
            if (!have[static_cast<std::size_t>(qi)]) {
                std::array<std::uint64_t, 10> t{};
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) t[static_cast<std::size_t>(idx2_[a][b])] += std::uint64_t(g[v[0]][a]) * g[v[1]][b];
                for (int k = 0; k < 10; ++k) Lq[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(t[static_cast<std::size_t>(k)] % p);
                have[static_cast<std::size_t>(qi)] = true;
            }
            for (int k = 0; k < 10; ++k) {
                std::uint64_t qc = Lq[static_cast<std::size_t>(k)];
                if (!qc) continue;
                qc = qc * cm % p;
                auto [a, b] = pairs_[static_cast<std::size_t>(k)];
                for (int r = 0; r < 4; ++r)
                    if (g[v[2]][r]) acc[static_cast<std::size_t>(idx3_[a][b][r])] += qc * g[v[2]][r];
            }
        }
        Dense d;
        for (int k = 0; k < 20; ++k) d[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(acc[static_cast<std::size_t>(k)] % p);
        reduce(d);
        normalize(d);
        return d;
    }

    void reduce(Dense& d) const {
        for (auto& r : reds_) {
            std::uint64_t v = d[static_cast<std::size_t>(r.from)];
            if (!v) continue;
            d[static_cast<std::size_t>(r.from)] = 0;
            for (auto [to, f] : r.to)
                d[static_cast<std::size_t>(to)] = static_cast<std::uint32_t>((d[static_cast<std::size_t>(to)] + v * f) % p_);
        }
    }
    void normalize(Dense& d) const {
        for (auto& c : d)
            if (c) {
                std::uint64_t inv = PrimeField(p_).inv(c);
                for (auto& x : d) x = static_cast<std::uint32_t>(x * inv % p_);
                return;
            }
    }

   private:
    struct Red {
        int from;
        std::vector<std::pair<int, std::uint32_t>> to;
    };
    bool divisible(int m, int qa, int qb) const {
        auto e = exps_[static_cast<std::size_t>(m)];
        if (--e[static_cast<std::size_t>(qa)] < 0) return false;
        return --e[static_cast<std::size_t>(qb)] >= 0;
    }

    std::uint32_t p_;
    std::array<std::array<int, 4>, 20> exps_{};
    int idx3_[4][4][4]{};
    int idx2_[4][4]{};
    std::array<std::pair<int, int>, 10> pairs_{};
    std::vector<Red> reds_;
};

struct DenseHash {
    std::size_t operator()(const CubicArith::Dense& d) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (auto v : d) h = (h ^ v) * 0x100000001b3ull;
        return static_cast<std::size_t>(h);
    }
};

inline std::array<std::array<std::uint32_t, 4>, 4> raw(const FpMat& m) {
    std::array<std::array<std::uint32_t, 4>, 4> r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i][j] = m[i][j].value();
    return r;
}

/// Numeric cell: every element of the cell is left[i] * right[j].
struct NumericCell {
    std::string label;
    std::vector<FpMat> left, right;
};

inline std::vector<std::uint32_t> range_values(std::uint32_t q, bool units) {
    std::vector<std::uint32_t> v;
    for (std::uint32_t a = units ? 1 : 0; a < q; ++a) v.push_back(a);
    return v;
}

/// The exact cells of the similitude group modulo scalars, numerically.
inline std::vector<NumericCell> numeric_cells(const QuadricCase& c, std::uint32_t q) {
    std::vector<NumericCell> out;
    Fp one(1, q);
    auto F = [&](std::uint32_t v) { return Fp(v, q); };
    auto all = range_values(q, false), units = range_values(q, true);
    switch (c.kind) {
        case QuadricKind::N1:
            for (int a = 0; a < 2; ++a)
                for (int w = 0; w < 4; ++w) {
                    NumericCell cell;
                    cell.label = "A" + std::to_string(a) + " W" + std::to_string(w);
                    for (auto b : units)
                        for (auto cc : units) {
                            FpMat T = mat_mul(n1_a(a, one), mat_diag(one, F(b), F(cc), F(b) * F(cc)));
                            for (auto t4 : all)
                                for (auto t5 : all)
                                    cell.left.push_back(mat_mul(mat_mul(mat_mul(T, n1_u1(F(t4))), n1_u2(F(t5))), n1_w(w, one)));
                        }
                    for (auto t6 : (w & 1) ? all : std::vector<std::uint32_t>{0})
                        for (auto t7 : (w & 2) ? all : std::vector<std::uint32_t>{0})
                            cell.right.push_back(mat_mul(n1_u1(F(t6)), n1_u2(F(t7))));
                    out.push_back(std::move(cell));
                }
            break;
        case QuadricKind::N2: {
            std::uint32_t eps = resolve_eps(c, q);
            for (int a = 0; a < 2; ++a)
                for (int w = 0; w < 2; ++w) {
                    NumericCell cell;
                    cell.label = "A" + std::to_string(a) + " W" + std::to_string(w);
                    for (auto cc : all)
                        for (auto d : all) {
                            if ((F(cc) * F(cc) - F(eps) * F(d) * F(d)).is_zero()) continue;
                            FpMat T = mat_mul(n2_a(a, one), n2_r(F(cc), F(d), eps));
                            for (auto t4 : all)
                                for (auto t5 : all)
                                    cell.left.push_back(mat_mul(mat_mul(mat_mul(T, n2_u1(F(t4))), n2_u2(F(t5), eps)), n2_w(w, one)));
                        }
                    for (auto t6 : w ? all : std::vector<std::uint32_t>{0})
                        for (auto t7 : w ? all : std::vector<std::uint32_t>{0})
                            cell.right.push_back(mat_mul(n2_u1(F(t6)), n2_u2(F(t7), eps)));
                    out.push_back(std::move(cell));
                }
            break;
        }
        case QuadricKind::Dege:
            for (int a = 0; a < 1; ++a)
                for (int s = 0; s < 2; ++s) {
                    NumericCell cell;
                    cell.label = "A" + std::to_string(a) + " S" + std::to_string(s);
                    for (auto t : units) {
                        FpMat T = mat_mul(dege_a(a, one), mat_diag(one, F(t) * F(t), F(t), one));
                        for (auto t3 : all) {
                            FpMat L = mat_mul(T, dege_u(F(t3)));
                            if (!s) {
                                cell.left.push_back(L);
                                continue;
                            }
                            for (auto t4 : all) cell.left.push_back(mat_mul(mat_mul(L, dege_s(one)), dege_u(F(t4))));
                        }
                    }
                    for (auto v1 : units)
                        for (auto v2 : all)
                            for (auto v3 : all)
                                for (auto v4 : all) cell.right.push_back(dege_v(F(v1), F(v2), F(v3), F(v4)));
                    out.push_back(std::move(cell));
                }
            break;
    }
    return out;
}

}  // namespace detail

/// Order of the similitude group of the case quadric over F_q, modulo scalars.
inline std::uint64_t similitude_group_order(QuadricKind k, std::uint64_t q) {
    switch (k) {
        case QuadricKind::N1: return 2 * q * q * (q * q - 1) * (q * q - 1);
        case QuadricKind::N2: return 2 * q * q * (q * q * q * q - 1);
        case QuadricKind::Dege: return q * q * q * q * (q - 1) * (q * q - 1);
    }
    return 0;
}

/// Calls visit(g) once for every cell parameter tuple (one per similitude mod scalars).
template <class Visit>
void for_each_similitude(const QuadricCase& c, std::uint32_t q, Visit&& visit) {
    for (auto& cell : detail::numeric_cells(c, q))
        for (auto& L : cell.left)
            for (auto& R : cell.right) visit(mat_mul(L, R));
}

struct SweepResult {
    bool isomorphic = false;
    std::optional<IsoWitness> witness;
    std::uint64_t transforms = 0;  ///< cubic transformations evaluated
};

/**
 * Exhaustive oracle over the whole similitude group: for each cell, the
 * normalized forms P2(R^-1 v) mod Q of the right factors are tabulated and
 * every P1(L v) mod Q is looked up.  Refuses with BudgetExceeded when the
 * number of transformations would exceed the budget.
 */
inline SweepResult sweep_isomorphic(const Poly& P1, const Poly& P2, const QuadricCase& c, std::uint32_t q,
                                    double budget = 2e7) {
    detail::check_same_case(P1, P2);
    auto cells = detail::numeric_cells(c, q);
    double need = 0;
    for (auto& cell : cells) need += static_cast<double>(cell.left.size() + cell.right.size());
    if (need > budget)
        throw BudgetExceeded("sweep_isomorphic: " + std::to_string(static_cast<long long>(need)) +
                             " transformations exceed the budget");
    detail::CubicArith ar(c, q);
    auto d1 = ar.from_poly(P1), d2 = ar.from_poly(P2);
    SweepResult res;
    for (auto& cell : cells) {
        std::unordered_map<detail::CubicArith::Dense, std::size_t, detail::DenseHash> table;
        for (std::size_t j = 0; j < cell.right.size(); ++j) {
            table.emplace(ar.canonical(d2, detail::raw(mat_inverse(cell.right[j]))), j);
            ++res.transforms;
        }
        for (auto& L : cell.left) {
            ++res.transforms;
            auto it = table.find(ar.canonical(d1, detail::raw(L)));
            if (it == table.end()) continue;
            FpMat g = mat_mul(L, cell.right[it->second]);
            Poly img = act(g, P1, c);
            // lambda from any monomial where P2 is nonzero
            Poly P2r = mod_quad(P2, quadric(c, q), mod_monomial(c.kind));
            Fp lambda = img.coefficient_of(P2r.leading_monomial()) * P2r.leading_coefficient().inv();
            if (!check_witness(g, lambda, P1, P2, c))
                throw std::logic_error("sweep_isomorphic: witness fails the numeric recheck");
            res.isomorphic = true;
            res.witness = IsoWitness{make_similitude(g, c, q), lambda, cell.label};
            return res;
        }
    }
    return res;
}

}  // namespace ssp4
