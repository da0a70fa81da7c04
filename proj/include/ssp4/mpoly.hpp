/**
 * @file mpoly.hpp
 * @brief Sparse multivariate polynomials over a pluggable coefficient ring.
 *
 * MPoly<C> is a sorted list of (monomial, coefficient) terms, largest first in
 * grevlex.  The coefficient type C is either Fp or another MPoly, which gives
 * the nested ring F_p[a_1..a_s][x,y,z,w] used by the symbolic search.
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "field.hpp"
#include "monomial.hpp"

namespace ssp4 {

template <class C>
class MPoly;

/// Polynomial ring C[v_0, ..., v_{n-1}]; v_0 is the largest variable in grevlex.
template <class C>
struct PolyRing {
    std::vector<std::string> names;
    C one;  ///< the unit of the coefficient ring, used to build constants

    int nvars() const noexcept { return static_cast<int>(names.size()); }
    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        return -1;
    }
};

template <class C>
using RingPtr = std::shared_ptr<const PolyRing<C>>;

template <class C>
RingPtr<C> make_ring(std::vector<std::string> names, C one) {
    if (names.size() > static_cast<std::size_t>(Monomial::max_vars))
        throw std::invalid_argument("make_ring: at most 23 variables");
    return std::make_shared<const PolyRing<C>>(PolyRing<C>{std::move(names), std::move(one)});
}

inline RingPtr<Fp> make_fp_ring(std::uint32_t p, std::vector<std::string> names) {
    PrimeField check(p);
    return make_ring<Fp>(std::move(names), Fp(1, p));
}

/**
 * A precedence chain for grevlex: perm[0] is the largest variable.
 * Orders are realised by building the ring with its variables listed in
 * precedence order, so a TermOrder is just the permutation used to do that.
 */
struct TermOrder {
    std::vector<int> perm;

    static TermOrder identity(int n) {
        TermOrder t;
        t.perm.resize(static_cast<std::size_t>(n));
        std::iota(t.perm.begin(), t.perm.end(), 0);
        return t;
    }
    /// From a chain written smallest first, e.g. {"a10","a9","a4"} for a10 < a9 < a4.
    static TermOrder from_ascending_chain(const std::vector<std::string>& names,
                                          const std::vector<std::string>& chain) {
        if (chain.size() != names.size()) throw std::invalid_argument("TermOrder: chain must list every variable");
        TermOrder t;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            auto pos = std::find(names.begin(), names.end(), *it);
            if (pos == names.end()) throw std::invalid_argument("TermOrder: unknown variable " + *it);
            t.perm.push_back(static_cast<int>(pos - names.begin()));
        }
        std::vector<int> s = t.perm;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw std::invalid_argument("TermOrder: repeated variable");
        return t;
    }
};

// ---- coefficient ring hooks -------------------------------------------------

inline bool coeff_is_zero(const Fp& c) noexcept { return c.is_zero(); }
inline Fp scalar_mul(const Fp& c, const Fp& s) noexcept { return c * s; }
inline std::string coeff_to_string(const Fp& c) { return std::to_string(c.value()); }
inline bool coeff_is_one(const Fp& c) noexcept { return c.value() == 1; }
inline bool coeff_is_atomic(const Fp&) noexcept { return true; }

template <class C>
bool coeff_is_zero(const MPoly<C>& c) noexcept {
    return c.is_zero();
}
template <class C>
MPoly<C> scalar_mul(const MPoly<C>& c, const Fp& s) {
    return c.scale_base(s);
}
template <class C>
std::string coeff_to_string(const MPoly<C>& c) {
    return c.to_string();
}
template <class C>
bool coeff_is_one(const MPoly<C>& c) noexcept {
    return c.is_constant() && c.terms().size() == 1 && coeff_is_one(c.terms()[0].second);
}
template <class C>
bool coeff_is_atomic(const MPoly<C>& c) noexcept {
    return c.terms().size() <= 1 && (c.terms().empty() || c.terms()[0].first.is_one());
}

template <class C>
class MPoly {
   public:
    using Term = std::pair<Monomial, C>;

    MPoly() = default;  ///< zero in no particular ring
    explicit MPoly(RingPtr<C> r) : ring_(std::move(r)) {}

    static MPoly constant(RingPtr<C> r, const C& c) {
        MPoly f(std::move(r));
        if (!coeff_is_zero(c)) f.terms_.push_back({Monomial(), c});
        return f;
    }
    static MPoly one(RingPtr<C> r) {
        C u = r->one;
        return constant(std::move(r), u);
    }
    static MPoly variable(RingPtr<C> r, int i) {
        if (i < 0 || i >= r->nvars()) throw std::out_of_range("MPoly::variable: index out of range");
        MPoly f(r);
        f.terms_.push_back({Monomial::variable(i), r->one});
        return f;
    }
    static MPoly variable(RingPtr<C> r, const std::string& name) {
        int i = r->index_of(name);
        if (i < 0) throw std::invalid_argument("MPoly::variable: unknown variable " + name);
        return variable(std::move(r), i);
    }
    static MPoly monomial(RingPtr<C> r, const Monomial& m, const C& c) {
        MPoly f(std::move(r));
        if (!coeff_is_zero(c)) f.terms_.push_back({m, c});
        return f;
    }
    /// Build from unsorted terms; like monomials are combined.
    static MPoly from_terms(RingPtr<C> r, std::vector<Term> t) {
        MPoly f(std::move(r));
        f.terms_ = std::move(t);
        f.normalize();
        return f;
    }

    const RingPtr<C>& ring() const noexcept { return ring_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_constant() const noexcept { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one()); }
    std::size_t size() const noexcept { return terms_.size(); }
    int total_degree() const noexcept {
        int d = -1;
        for (auto& t : terms_) d = std::max(d, t.first.degree());
        return d;
    }
    bool is_homogeneous() const noexcept {
        for (auto& t : terms_)
            if (t.first.degree() != terms_.front().first.degree()) return false;
        return true;
    }
    const Monomial& leading_monomial() const {
        if (terms_.empty()) throw std::domain_error("MPoly: leading monomial of zero");
        return terms_.front().first;
    }
    const C& leading_coefficient() const {
        if (terms_.empty()) throw std::domain_error("MPoly: leading coefficient of zero");
        return terms_.front().second;
    }

    C coefficient_of(const Monomial& m) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const Term& t, const Monomial& k) { return grevlex_greater(t.first, k); });
        if (it != terms_.end() && it->first == m) return it->second;
        return zero_coeff();
    }
    C coefficient_of(const std::vector<int>& exps) const { return coefficient_of(Monomial::from_exponents(exps)); }

    MPoly operator-() const {
        MPoly r(ring_);
        r.terms_.reserve(terms_.size());
        for (auto& t : terms_) r.terms_.push_back({t.first, -t.second});
        return r;
    }
    friend MPoly operator+(const MPoly& a, const MPoly& b) { return merge(a, b, false); }
    friend MPoly operator-(const MPoly& a, const MPoly& b) { return merge(a, b, true); }
    MPoly& operator+=(const MPoly& o) { return *this = *this + o; }
    MPoly& operator-=(const MPoly& o) { return *this = *this - o; }
    MPoly& operator*=(const MPoly& o) { return *this = *this * o; }

    friend MPoly operator*(const MPoly& a, const MPoly& b) {
        check_same(a, b);
        MPoly r(a.ring_ ? a.ring_ : b.ring_);
        if (a.is_zero() || b.is_zero()) return r;
        if (a.size() < b.size()) return b * a;
        std::unordered_map<Monomial, std::size_t, MonomialHash> pos;
        pos.reserve(a.size() * b.size());
        std::vector<Term> acc;
        for (auto& tb : b.terms_)
            for (auto& ta : a.terms_) {
                Monomial m = ta.first * tb.first;
                auto [it, fresh] = pos.try_emplace(m, acc.size());
                if (fresh)
                    acc.push_back({m, ta.second * tb.second});
                else
                    acc[it->second].second += ta.second * tb.second;
            }
        r.terms_ = std::move(acc);
        r.drop_zeros_and_sort();
        return r;
    }

    /// Multiply every coefficient by c.
    MPoly scale(const C& c) const {
        MPoly r(ring_);
        if (coeff_is_zero(c)) return r;
        for (auto& t : terms_) {
            C v = t.second * c;
            if (!coeff_is_zero(v)) r.terms_.push_back({t.first, std::move(v)});
        }
        return r;
    }
    /// Multiply every coefficient by a base-field scalar.
    MPoly scale_base(const Fp& s) const {
        MPoly r(ring_);
        for (auto& t : terms_) {
            C v = scalar_mul(t.second, s);
            if (!coeff_is_zero(v)) r.terms_.push_back({t.first, std::move(v)});
        }
        return r;
    }
    MPoly mul_monomial(const Monomial& m, const C& c) const {
        MPoly r(ring_);
        for (auto& t : terms_) {
            C v = t.second * c;
            if (!coeff_is_zero(v)) r.terms_.push_back({t.first * m, std::move(v)});
        }
        return r;  // order is preserved by monomial multiplication
    }

    MPoly power(unsigned n) const {
        MPoly result = one(ring_checked());
        MPoly base = *this;
        while (n) {
            if (n & 1u) result = result * base;
            n >>= 1;
            if (n) base = base * base;
        }
        return result;
    }

    MPoly partial_derivative(int var) const {
        if (var < 0 || var >= ring_checked()->nvars())
            throw std::out_of_range("partial_derivative: variable out of range");
        MPoly r(ring_);
        for (auto& t : terms_) {
            int e = t.first[var];
            if (e == 0) continue;
            C c = t.second;
            C s = zero_coeff();
            for (int k = 0; k < e; ++k) s += c;  // e * c without needing an integer map
            if (coeff_is_zero(s)) continue;
            r.terms_.push_back({t.first / Monomial::variable(var), std::move(s)});
        }
        r.sort_terms();
        return r;
    }

    /// Substitute constants (coefficient-ring values) for some variables.
    MPoly substitute(const std::map<int, C>& values) const {
        MPoly r(ring_);
        int n = ring_checked()->nvars();
        std::vector<Term> out;
        for (auto& t : terms_) {
            C c = t.second;
            std::vector<int> e = t.first.exponents(n);
            for (auto& [v, val] : values) {
                for (int k = 0; k < e[static_cast<std::size_t>(v)]; ++k) c = c * val;
                e[static_cast<std::size_t>(v)] = 0;
            }
            if (!coeff_is_zero(c)) out.push_back({Monomial::from_exponents(e), std::move(c)});
        }
        return from_terms(ring_, std::move(out));
    }

    /// Apply f to every coefficient, landing in ring r.
    template <class D, class F>
    MPoly<D> map_coefficients(RingPtr<D> r, F&& f) const {
        std::vector<std::pair<Monomial, D>> out;
        out.reserve(terms_.size());
        for (auto& t : terms_) {
            D v = f(t.second);
            if (!coeff_is_zero(v)) out.push_back({t.first, std::move(v)});
        }
        return MPoly<D>::from_terms(std::move(r), std::move(out));
    }

    /**
     * Replace each variable v_i by sum_j M[i][j] v_j (M square, entries in C).
     * For a column vector v this is f(M v).
     */
    MPoly linear_substitute(const std::vector<std::vector<C>>& M) const {
        int n = ring_checked()->nvars();
        if (static_cast<int>(M.size()) != n) throw std::invalid_argument("linear_substitute: matrix size mismatch");
        std::vector<MPoly> lin(static_cast<std::size_t>(n), MPoly(ring_));
        for (int i = 0; i < n; ++i) {
            std::vector<Term> t;
            for (int j = 0; j < n; ++j)
                if (!coeff_is_zero(M[i][j])) t.push_back({Monomial::variable(j), M[i][j]});
            lin[static_cast<std::size_t>(i)] = from_terms(ring_, std::move(t));
        }
        std::vector<std::vector<MPoly>> pw(static_cast<std::size_t>(n));
        MPoly result(ring_);
        for (auto& t : terms_) {
            MPoly term = constant(ring_, t.second);
            for (int i = 0; i < n; ++i) {
                int e = t.first[i];
                if (!e) continue;
                auto& cache = pw[static_cast<std::size_t>(i)];
                if (cache.empty()) cache.push_back(one(ring_));
                while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * lin[static_cast<std::size_t>(i)]);
                term = term * cache[static_cast<std::size_t>(e)];
            }
            result += term;
        }
        return result;
    }

    /// Canonical text: grevlex-descending terms, least residues, "*" between factors.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string s;
        bool first = true;
        for (auto& t : terms_) {
            if (!first) s += " + ";
            first = false;
            std::string mon = monomial_string(t.first);
            if (mon.empty()) {
                s += coeff_is_atomic(t.second) ? coeff_to_string(t.second) : "(" + coeff_to_string(t.second) + ")";
            } else if (coeff_is_one(t.second)) {
                s += mon;
            } else if (coeff_is_atomic(t.second)) {
                s += coeff_to_string(t.second) + "*" + mon;
            } else {
                s += "(" + coeff_to_string(t.second) + ")*" + mon;
            }
        }
        return s;
    }

    std::string monomial_string(const Monomial& m) const {
        std::string s;
        auto& names = ring_checked()->names;
        for (int i = 0; i < static_cast<int>(names.size()); ++i) {
            int e = m[i];
            if (!e) continue;
            if (!s.empty()) s += "*";
            s += names[static_cast<std::size_t>(i)];
            if (e > 1) s += "^" + std::to_string(e);
        }
        return s;
    }

    friend bool operator==(const MPoly& a, const MPoly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (!(a.terms_[i].first == b.terms_[i].first) || !(a.terms_[i].second == b.terms_[i].second))
                return false;
        return true;
    }

    const RingPtr<C>& ring_checked() const {
        if (!ring_) throw std::logic_error("MPoly: operation needs a ring");
        return ring_;
    }

    /// Sort terms descending and merge duplicates; drops zero coefficients.
    void normalize() {
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& a, const Term& b) { return grevlex_greater(a.first, b.first); });
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (auto& t : terms_) {
            if (!out.empty() && out.back().first == t.first)
                out.back().second += t.second;
            else
                out.push_back(std::move(t));
        }
        terms_.clear();
        for (auto& t : out)
            if (!coeff_is_zero(t.second)) terms_.push_back(std::move(t));
    }

   private:
    C zero_coeff() const {
        if (ring_) return ring_->one - ring_->one;
        return C();
    }
    static void check_same(const MPoly& a, const MPoly& b) {
        if (a.ring_ && b.ring_ && a.ring_ != b.ring_ && a.ring_->names != b.ring_->names)
            throw std::invalid_argument("MPoly: ring mismatch");
    }
    static MPoly merge(const MPoly& a, const MPoly& b, bool subtract) {
        check_same(a, b);
        MPoly r(a.ring_ ? a.ring_ : b.ring_);
        r.terms_.reserve(a.size() + b.size());
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && grevlex_greater(a.terms_[i].first, b.terms_[j].first))) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.size() || grevlex_greater(b.terms_[j].first, a.terms_[i].first)) {
                r.terms_.push_back({b.terms_[j].first, subtract ? -b.terms_[j].second : b.terms_[j].second});
                ++j;
            } else {
                C c = subtract ? a.terms_[i].second - b.terms_[j].second : a.terms_[i].second + b.terms_[j].second;
                if (!coeff_is_zero(c)) r.terms_.push_back({a.terms_[i].first, std::move(c)});
                ++i;
                ++j;
            }
        }
        return r;
    }
    void sort_terms() {
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& a, const Term& b) { return grevlex_greater(a.first, b.first); });
    }
    void drop_zeros_and_sort() {
        std::erase_if(terms_, [](const Term& t) { return coeff_is_zero(t.second); });
        sort_terms();
    }

    RingPtr<C> ring_;
    std::vector<Term> terms_;
};

using Poly = MPoly<Fp>;
using SymPoly = MPoly<Poly>;  ///< polynomials in x,y,z,w over F_p[a-vars]

/// Substitute values for some variables of the coefficient ring of a nested polynomial.
inline SymPoly specialize(const SymPoly& f, const std::map<int, Fp>& values) {
    if (values.empty()) return f;
    return f.map_coefficients<Poly>(f.ring_checked(), [&](const Poly& c) { return c.substitute(values); });
}

/// Move a polynomial into the ring with the same variables listed in a different order.
inline Poly permute_variables(const Poly& f, const RingPtr<Fp>& target) {
    auto& src = f.ring_checked()->names;
    std::vector<int> to(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
        to[i] = target->index_of(src[i]);
        if (to[i] < 0) throw std::invalid_argument("permute_variables: variable " + src[i] + " missing in target");
    }
    std::vector<Poly::Term> out;
    out.reserve(f.size());
    for (auto& t : f.terms()) {
        std::vector<int> e(static_cast<std::size_t>(target->nvars()), 0);
        for (std::size_t i = 0; i < src.size(); ++i) e[static_cast<std::size_t>(to[i])] = t.first[static_cast<int>(i)];
        out.push_back({Monomial::from_exponents(e), t.second});
    }
    return Poly::from_terms(target, std::move(out));
}

/// Evaluate a polynomial over F_p at a full point.
inline Fp evaluate(const Poly& f, const std::vector<std::uint32_t>& point) {
    auto& r = f.ring_checked();
    std::uint32_t p = r->one.modulus();
    PrimeField F(p);
    int n = r->nvars();
    if (static_cast<int>(point.size()) != n) throw std::invalid_argument("evaluate: point has wrong length");
    std::uint32_t acc = 0;
    for (auto& t : f.terms()) {
        std::uint32_t v = t.second.value();
        for (int i = 0; i < n && v; ++i)
            if (int e = t.first[i]) v = F.mul(v, F.pow(point[static_cast<std::size_t>(i)], static_cast<unsigned>(e)));
        acc = F.add(acc, v);
    }
    return Fp::raw(acc, p);
}

/**
 * Rewrite P so that no term is divisible by m_Q, using P ≡ P - (c/c_Q) r Q.
 * Q must have nonzero coefficient c_Q at m_Q.
 */
template <class C>
MPoly<C> mod_quad(const MPoly<C>& P, const Poly& Q, const Monomial& mQ) {
    Fp cQ = Q.coefficient_of(mQ);
    if (cQ.is_zero()) throw std::invalid_argument("mod_quad: m_Q is not a monomial of Q");
    Fp inv_cQ = cQ.inv();
    // tail = (Q - c_Q m_Q) / c_Q, carried over into C
    std::vector<std::pair<Monomial, Fp>> tail;
    for (auto& t : Q.terms())
        if (!(t.first == mQ)) tail.push_back({t.first, t.second * inv_cQ});
    const auto& ring = P.ring_checked();
    MPoly<C> cur = P;
    for (;;) {
        std::vector<typename MPoly<C>::Term> keep, extra;
        bool changed = false;
        for (auto& t : cur.terms()) {
            if (!mQ.divides(t.first)) {
                keep.push_back(t);
                continue;
            }
            changed = true;
            Monomial r = t.first / mQ;
            for (auto& [m, c] : tail) extra.push_back({m * r, scalar_mul(t.second, -c)});
        }
        if (!changed) return cur;
        for (auto& e : extra) keep.push_back(std::move(e));
        cur = MPoly<C>::from_terms(ring, std::move(keep));
    }
}

// ---- parsing -----------------------------------------------------------------

/**
 * Parse an expression over F_p in the ring's variables.  Accepts integers,
 * variable names, + - * ^, parentheses, and juxtaposition as multiplication
 * ("x^2 y + 3 y z^2").
 */
class PolyParser {
   public:
    PolyParser(RingPtr<Fp> r, std::string text) : ring_(std::move(r)), s_(std::move(text)) {}

    Poly parse() {
        pos_ = 0;
        Poly f = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return f;
    }

   private:
    [[noreturn]] void fail(const std::string& why) const {
        throw std::invalid_argument("parse_poly: " + why + " at position " + std::to_string(pos_) + " in \"" + s_ +
                                    "\"");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool starts_factor() {
        skip();
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        return std::isalnum(static_cast<unsigned char>(c)) || c == '(' || c == '_';
    }
    Poly expr() {
        Poly f(ring_);
        bool neg = false;
        if (peek('-')) {
            neg = true;
            ++pos_;
        } else if (peek('+')) {
            ++pos_;
        }
        Poly t = term();
        f = neg ? -t : t;
        for (;;) {
            if (peek('+')) {
                ++pos_;
                f += term();
            } else if (peek('-')) {
                ++pos_;
                f -= term();
            } else {
                return f;
            }
        }
    }
    Poly term() {
        Poly f = factor();
        for (;;) {
            if (peek('*')) {
                ++pos_;
                f = f * factor();
            } else if (starts_factor()) {
                f = f * factor();
            } else {
                return f;
            }
        }
    }
    Poly factor() {
        Poly b = atom();
        if (peek('^')) {
            ++pos_;
            skip();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected exponent");
            b = b.power(static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start))));
        }
        return b;
    }
    Poly atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Poly f = expr();
            if (!peek(')')) fail("expected )");
            ++pos_;
            return f;
        }
        if (c == '-') {
            ++pos_;
            return -factor();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::uint32_t p = ring_->one.modulus();
            std::uint64_t v = 0;
            for (std::size_t k = start; k < pos_; ++k) v = (v * 10 + static_cast<std::uint64_t>(s_[k] - '0')) % p;
            return Poly::constant(ring_, Fp(static_cast<std::int64_t>(v), p));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            // longest variable name that matches here
            int best = -1;
            std::size_t best_len = 0;
            for (int i = 0; i < ring_->nvars(); ++i) {
                auto& nm = ring_->names[static_cast<std::size_t>(i)];
                if (nm.size() > best_len && s_.compare(pos_, nm.size(), nm) == 0) {
                    best = i;
                    best_len = nm.size();
                }
            }
            if (best < 0) fail("unknown variable");
            pos_ += best_len;
            return Poly::variable(ring_, best);
        }
        fail("unexpected character");
    }

    RingPtr<Fp> ring_;
    std::string s_;
    std::size_t pos_ = 0;
};

inline Poly parse_poly(const RingPtr<Fp>& r, const std::string& text) { return PolyParser(r, text).parse(); }

}  // namespace ssp4
