/**
 * @file solve.hpp
 * @brief F_q-rational solutions of polynomial systems.
 *
 * Two independent backends: Gröbner bases with field equations adjoined and
 * recursive splitting on one variable at a time, and an exhaustive search
 * over dense partial evaluations.  Both return solutions sorted
 * lexicographically by residue.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "dense.hpp"
#include "groebner.hpp"

namespace ssp4 {

using Point = std::vector<std::uint32_t>;

/// Thrown when a search would exceed its configured budget.
class BudgetExceeded : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct SolveOptions {
    /// Variables known to be nonzero get X^(q-1) - 1 instead of X^q - X.
    std::vector<bool> units;
};

namespace detail {

inline Poly field_equation(const RingPtr<Fp>& r, int v, std::uint32_t q, bool unit) {
    Poly x = Poly::variable(r, v);
    if (unit) return x.power(q - 1) - Poly::one(r);
    return x.power(q) - x;
}

/// If f involves the single variable v only, return its coefficient list (index = exponent).
inline bool univariate_in(const Poly& f, int& v, std::vector<std::uint32_t>& coeffs) {
    int var = -1;
    int n = f.ring_checked()->nvars();
    for (auto& t : f.terms())
        for (int i = 0; i < n; ++i)
            if (t.first[i]) {
                if (var >= 0 && var != i) return false;
                var = i;
            }
    if (var < 0) return false;
    coeffs.assign(static_cast<std::size_t>(f.total_degree()) + 1, 0);
    for (auto& t : f.terms()) coeffs[static_cast<std::size_t>(t.first[var])] = t.second.value();
    v = var;
    return true;
}

inline void split_solve(const GroebnerBasis& G, std::uint32_t q, std::vector<Point>& out, GBStats* stats) {
    if (G.is_unit()) return;
    const auto& r = G.ring;
    int n = r->nvars();
    PrimeField F(q);
    // a reduced basis {x_i - c_i} is a single point
    Point pt(static_cast<std::size_t>(n), 0);
    std::vector<bool> fixed(static_cast<std::size_t>(n), false);
    bool all_linear = static_cast<int>(G.basis.size()) == n;
    for (auto& g : G.basis) {
        int v;
        std::vector<std::uint32_t> c;
        if (!univariate_in(g, v, c) || c.size() != 2) {
            all_linear = false;
            break;
        }
        fixed[static_cast<std::size_t>(v)] = true;
        pt[static_cast<std::size_t>(v)] = F.neg(F.mul(c[0], F.inv(c[1])));
    }
    if (all_linear && std::all_of(fixed.begin(), fixed.end(), [](bool b) { return b; })) {
        out.push_back(pt);
        return;
    }
    if (n == 0) {
        out.push_back({});
        return;
    }
    // branch on the roots of a univariate element, preferring the lowest degree
    int best_v = -1;
    std::vector<std::uint32_t> best_c;
    for (auto& g : G.basis) {
        int v;
        std::vector<std::uint32_t> c;
        if (univariate_in(g, v, c) && c.size() > 2 && (best_v < 0 || c.size() < best_c.size())) {
            best_v = v;
            best_c = c;
        }
    }
    std::vector<std::uint32_t> values;
    if (best_v >= 0) {
        for (std::uint32_t a = 0; a < q; ++a) {
            std::uint32_t acc = 0;
            for (std::size_t k = best_c.size(); k-- > 0;) acc = F.add(F.mul(acc, a), best_c[k]);
            if (!acc) values.push_back(a);
        }
    } else {
        // no univariate element: branch on a variable not yet pinned
        for (int v = n - 1; v >= 0; --v) {
            bool pinned = false;
            for (auto& g : G.basis) {
                int u;
                std::vector<std::uint32_t> c;
                if (univariate_in(g, u, c) && u == v && c.size() == 2) pinned = true;
            }
            if (!pinned) {
                best_v = v;
                break;
            }
        }
        for (std::uint32_t a = 0; a < q; ++a) values.push_back(a);
    }
    for (std::uint32_t a : values) {
        std::vector<Poly> gens = G.basis;
        gens.push_back(Poly::variable(r, best_v) - Poly::constant(r, Fp(a, q)));
        split_solve(groebner(gens, r, {}, stats), q, out, stats);
    }
}

}  // namespace detail

/**
 * All F_q-points of V(gens) in the ring's variables (q prime).  Field
 * equations are adjoined internally.
 */
inline std::vector<Point> variety_over_fq(const std::vector<Poly>& gens, const RingPtr<Fp>& ring, std::uint32_t q,
                                          const SolveOptions& opt = {}, GBStats* stats = nullptr) {
    if (ring->one.modulus() != q) throw std::invalid_argument("variety_over_fq: only prime fields are supported");
    check_system(gens, ring);
    std::vector<Poly> sys = gens;
    for (int v = 0; v < ring->nvars(); ++v) {
        bool unit = v < static_cast<int>(opt.units.size()) && opt.units[static_cast<std::size_t>(v)];
        sys.push_back(detail::field_equation(ring, v, q, unit));
    }
    std::vector<Point> out;
    detail::split_solve(groebner(sys, ring, {}, stats), q, out, stats);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/**
 * Exhaustive search with pruning.  Random linear combinations of the
 * generators are partially evaluated one variable at a time; every point
 * where all combinations vanish is then checked exactly against each
 * generator.  Refuses when q^n exceeds the budget.
 */
inline std::vector<Point> brute_force_variety(const std::vector<Poly>& gens, const RingPtr<Fp>& ring, std::uint32_t q,
                                              double budget = 1e8) {
    if (ring->one.modulus() != q) throw std::invalid_argument("brute_force_variety: only prime fields are supported");
    check_system(gens, ring);
    int n = ring->nvars();
    double space = 1;
    for (int i = 0; i < n; ++i) space *= q;
    if (space > budget) throw BudgetExceeded("brute_force_variety: q^n exceeds budget");
    PrimeField F(q);
    std::vector<Poly> sys;
    for (auto& g : gens)
        if (!g.is_zero()) sys.push_back(g);
    for (auto& g : sys)
        if (g.is_constant()) return {};
    std::vector<Point> out;
    if (n == 0) {
        out.push_back({});
        return out;
    }
    Point cur(static_cast<std::size_t>(n), 0);
    if (sys.empty()) {
        for (;;) {
            out.push_back(cur);
            int k = n - 1;
            while (k >= 0 && ++cur[static_cast<std::size_t>(k)] == q) cur[static_cast<std::size_t>(k--)] = 0;
            if (k < 0) break;
        }
        return out;
    }
    int D = 0;
    for (auto& g : sys) D = std::max(D, g.total_degree());
    std::vector<std::unique_ptr<DenseSpace>> spaces;
    for (int k = 0; k <= n; ++k) spaces.push_back(std::make_unique<DenseSpace>(n - k, D));
    std::vector<std::unique_ptr<FirstVarEvaluator>> ev;
    for (int k = 0; k < n; ++k) ev.push_back(std::make_unique<FirstVarEvaluator>(*spaces[k], *spaces[k + 1]));

    // number of combinations: enough that false candidates are rare
    std::size_t R = 1;
    for (double fp = q; fp < 1e4 && R < sys.size(); fp *= q) ++R;
    std::mt19937_64 rng(0x5eed5eedULL + sys.size());
    std::vector<DenseVec> combos;
    if (R >= sys.size()) {
        for (auto& g : sys) combos.push_back(to_dense(*spaces[0], g));
    } else {
        std::vector<DenseVec> dense;
        for (auto& g : sys) dense.push_back(to_dense(*spaces[0], g));
        for (std::size_t r = 0; r < R; ++r) {
            DenseVec c(spaces[0]->size(), 0);
            for (auto& d : dense) {
                std::uint32_t w = static_cast<std::uint32_t>(rng() % q);
                if (!w) continue;
                for (std::size_t i = 0; i < c.size(); ++i) c[i] = (c[i] + w * d[i]) % q;
            }
            combos.push_back(std::move(c));
        }
    }
    std::vector<std::vector<std::uint32_t>> pw(q, std::vector<std::uint32_t>(static_cast<std::size_t>(D) + 1));
    for (std::uint32_t a = 0; a < q; ++a) {
        pw[a][0] = 1;
        for (int k = 1; k <= D; ++k) pw[a][static_cast<std::size_t>(k)] = F.mul(pw[a][static_cast<std::size_t>(k - 1)], a);
    }
    // buffers per level and combination
    std::vector<std::vector<DenseVec>> buf(static_cast<std::size_t>(n) + 1, std::vector<DenseVec>(combos.size()));
    buf[0] = combos;
    auto exact = [&](const Point& pt) {
        for (auto& g : sys)
            if (!evaluate(g, pt).is_zero()) return false;
        return true;
    };
    auto rec = [&](auto&& self, int k) -> void {
        for (std::uint32_t a = 0; a < q; ++a) {
            cur[static_cast<std::size_t>(k)] = a;
            bool dead = false;
            for (std::size_t r = 0; r < combos.size(); ++r) {
                DenseVec& dst = buf[static_cast<std::size_t>(k) + 1][r];
                ev[static_cast<std::size_t>(k)]->apply(buf[static_cast<std::size_t>(k)][r], pw[a], q, dst);
                if (dst[0] && std::all_of(dst.begin() + 1, dst.end(), [](std::uint32_t x) { return x == 0; })) {
                    dead = true;
                    break;
                }
            }
            if (dead) continue;
            if (k + 1 == n) {
                bool zero = true;
                for (std::size_t r = 0; r < combos.size() && zero; ++r) zero = buf[static_cast<std::size_t>(n)][r][0] == 0;
                if (zero && exact(cur)) out.push_back(cur);
            } else {
                self(self, k + 1);
            }
        }
    };
    rec(rec, 0);
    return out;
}

/**
 * Solutions with the variables where mask is 0 pinned to the given values,
 * reassembled into full tuples in the ring's variable order.
 */
inline std::vector<Point> restricted_variety(const std::vector<Poly>& gens, const RingPtr<Fp>& ring,
                                             const std::vector<int>& mask, const Point& values, std::uint32_t q,
                                             bool use_groebner = true) {
    int n = ring->nvars();
    if (static_cast<int>(mask.size()) != n) throw std::invalid_argument("restricted_variety: mask length mismatch");
    std::size_t pinned = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 0));
    if (pinned != values.size()) throw std::invalid_argument("restricted_variety: tuple length mismatch");
    std::map<int, Fp> sub;
    std::vector<std::string> free_names;
    std::size_t j = 0;
    for (int i = 0; i < n; ++i) {
        if (mask[static_cast<std::size_t>(i)] == 0)
            sub[i] = Fp(values[j++], q);
        else
            free_names.push_back(ring->names[static_cast<std::size_t>(i)]);
    }
    auto sub_ring = make_fp_ring(q, free_names);
    std::vector<Poly> sys;
    for (auto& g : gens) {
        Poly s = g.substitute(sub);
        std::vector<Poly::Term> t;
        for (auto& term : s.terms()) {
            std::vector<int> e;
            for (int i = 0; i < n; ++i)
                if (mask[static_cast<std::size_t>(i)]) e.push_back(term.first[i]);
            t.push_back({Monomial::from_exponents(e), term.second});
        }
        sys.push_back(Poly::from_terms(sub_ring, std::move(t)));
    }
    std::vector<Point> part =
        use_groebner ? variety_over_fq(sys, sub_ring, q) : brute_force_variety(sys, sub_ring, q);
    std::vector<Point> out;
    for (auto& s : part) {
        Point full(static_cast<std::size_t>(n));
        std::size_t a = 0, b = 0;
        for (int i = 0; i < n; ++i)
            full[static_cast<std::size_t>(i)] = mask[static_cast<std::size_t>(i)] ? s[a++] : values[b++];
        out.push_back(std::move(full));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ssp4
